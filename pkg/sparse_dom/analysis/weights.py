# Weights, Muckenhoupt characteristics, BMO norms and John-Nirenberg profiles
#
# Created On: Oct 19, 2026
#

from dataclasses import dataclass, field
import logging
import math

import numpy as np

from .errors import DataError, ParameterError
from .grid import Cube, DyadicLattice, GridFunction
from .orlicz import exp_minus_one, hardy_littlewood_maximal, luxemburg_norm, phi_llogl
from .reports import CheckReport
from .utils import block_view, log_grid, window_blocks

logger = logging.getLogger(__name__)

__all__ = [
    "Weight",
    "ap_constant",
    "ap_profile",
    "duality_check",
    "a1_constant",
    "ainf_constant",
    "mean_oscillation",
    "bmo_norm",
    "weighted_bmo_norm",
    "distribution",
    "JohnNirenbergReport",
    "john_nirenberg_profile",
    "osc_llogl_check",
    "constant_weight",
    "power_weight",
    "step_weight",
    "product_weight",
]


class Weight(GridFunction):
    """
    A strictly positive grid function.

    Raises
    ------
    DataError
        If some sample is not strictly positive.
    """

    def __init__(self, values, h:float=1.0, origin=None):
        super().__init__(values, h=h, origin=origin)
        if not np.all(self.values > 0):
            raise DataError(f"weights must be strictly positive, smallest sample is {self.values.min()}")

    @classmethod
    def of(cls, f:GridFunction):
        return cls(f.values, h=f.h, origin=f.origin)

    def measure(self, mask=None):
        """``w(E)`` for the cells selected by the boolean `mask` (all cells when None)."""
        vals = self.values if mask is None else self.values[np.asarray(mask, dtype=bool)]
        return float(vals.sum() * self.cell_volume)

    def sigma(self, p:float):
        """The dual weight ``w^{-1/(p-1)}``."""
        _check_p(p)
        return Weight(self.values ** (-1.0 / (p - 1.0)), h=self.h, origin=self.origin)

    def __repr__(self):
        return f"Weight(dim={self.dim}, cells={self.cells}, h={self.h}, origin={self.origin})"


def _check_p(p:float):
    if not p > 1:
        raise ParameterError(f"p must exceed 1, got {p}")


def _cube_blocks(f:GridFunction, values, cubes):
    """
    Yield ``(side, offset, stride, blocks)`` covering a cube set.

    `blocks` has shape ``grid + (side**dim,)``; the cube at grid index ``i``
    has lowest cell ``offset + i * stride``.

    cubes : "all", "dyadic", DyadicLattice or iterable of Cube
        ``"all"`` is every grid-aligned cube inside the box, ``"dyadic"`` the
        aligned dyadic blocks of the box.
    """
    arr = np.asarray(values, dtype=float)
    nd = arr.ndim
    if isinstance(cubes, str):
        if cubes == "all":
            for s in range(1, min(f.cells) + 1):
                blocks, grid_shape = window_blocks(arr, s)
                yield s, (0,) * nd, 1, blocks.reshape(grid_shape + (-1,))
            return
        if cubes == "dyadic":
            s = 1
            while s <= min(f.cells):
                if all(c % s == 0 for c in f.cells):
                    yield s, (0,) * nd, s, block_view(arr, s)
                s *= 2
            return
        raise ParameterError(f"unknown cube set '{cubes}'")
    if isinstance(cubes, DyadicLattice):
        tol = 1e-9 * f.h
        cubes = [
            Q for k in range(cubes.levels[0], cubes.levels[1] + 1)
            for Q in cubes.members(k)
            if all(a >= o - tol and b <= e + tol for a, b, o, e in zip(Q.anchor, Q.hi, f.origin, f.box_hi))
        ]
    for Q in cubes:
        lo, s = f.index_box(Q)
        block = arr[tuple(slice(i, i + s) for i in lo)]
        yield s, lo, 1, block.reshape((1,) * nd + (-1,))


def _best(best, f, s, offset, stride, vals):
    """Keep the largest value seen so far with its cube."""
    idx = np.unravel_index(int(np.argmax(vals)), vals.shape)
    value = float(vals[idx])
    if best is None or value > best[0]:
        lo = tuple(o + i * stride for o, i in zip(offset, idx))
        return value, f.cube_from_index(lo, s)
    return best


def ap_constant(w:Weight, p:float, cubes="all", return_cube:bool=False):
    """
    ``sup_Q [w]_{A_p,Q}`` with ``[w]_{A_p,Q} = avg_Q w * (avg_Q sigma)^{p-1}``.

    Returns
    -------
    float, or (float, Cube) when `return_cube` is True
    """
    _check_p(p)
    sigma = w.sigma(p)
    best = None
    for (s, off, stride, wb), (_, _, _, sb) in zip(_cube_blocks(w, w.values, cubes), _cube_blocks(w, sigma.values, cubes)):
        vals = wb.mean(axis=-1) * sb.mean(axis=-1) ** (p - 1.0)
        best = _best(best, w, s, off, stride, vals)
    if best is None:
        raise ParameterError("empty cube set")
    logger.debug("[w]_A%s = %.6g attained on %s", p, best[0], best[1])
    return best if return_cube else best[0]


def ap_profile(w:Weight, p:float, cubes="all"):
    """
    Per-cube characteristics of `w` in A_p and of its dual weight in A_{p'}.

    Returns
    -------
    (ndarray, ndarray)
        ``[w]_{A_p,Q}`` and ``[sigma]_{A_{p'},Q}`` over the cube set, flattened
        in scan order.
    """
    _check_p(p)
    sigma = w.sigma(p)
    q = p / (p - 1.0)
    # sigma^{-1/(q-1)}, computed cell-wise from sigma
    back = sigma.values ** (-1.0 / (q - 1.0))
    ws, ss = [], []
    scans = zip(_cube_blocks(w, w.values, cubes), _cube_blocks(w, sigma.values, cubes), _cube_blocks(w, back, cubes))
    for (_, _, _, wb), (_, _, _, sb), (_, _, _, bb) in scans:
        ws.append((wb.mean(axis=-1) * sb.mean(axis=-1) ** (p - 1.0)).ravel())
        ss.append((sb.mean(axis=-1) * bb.mean(axis=-1) ** (q - 1.0)).ravel())
    return np.concatenate(ws), np.concatenate(ss)


def duality_check(w:Weight, p:float, cubes="all", tol:float=1e-12):
    """``[sigma]_{A_{p'},Q} = [w]_{A_p,Q}^{1/(p-1)}`` on every cube; the sample is the worst relative error."""
    a, b = ap_profile(w, p, cubes)
    target = a ** (1.0 / (p - 1.0))
    err = float(np.max(np.abs(b - target) / target))
    return CheckReport.build(
        "duality", {"w": w.to_dict(), "p": p, "cubes": str(cubes)}, [err], [tol],
        labels=[f"p={p!r}"], ceiling=1.0, notes={"cubes": int(a.size)},
    )


def a1_constant(w:Weight, return_cell:bool=False):
    """``max_x M w(x) / w(x)``, M over all grid-aligned cubes in the box."""
    ratio = hardy_littlewood_maximal(w).values / w.values
    cell = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    value = float(ratio[cell])
    return (value, tuple(int(i) for i in cell)) if return_cell else value


def _local_maximal_integral(block):
    """``sum over the block of M(block)``, M over the subcubes of the block."""
    g = GridFunction(block)
    return float(hardy_littlewood_maximal(g).values.sum())


def ainf_constant(w:Weight, cubes="all", return_cube:bool=False):
    """
    Fujii-Wilson ``sup_Q (1/w(Q)) int_Q M(w chi_Q)``.

    M is taken over the grid-aligned subcubes of Q, which bounds the full
    maximal function from below.
    """
    best = None
    nd = w.dim
    for s, off, stride, blocks in _cube_blocks(w, w.values, cubes):
        grid_shape = blocks.shape[:-1]
        vals = np.empty(grid_shape)
        for idx in np.ndindex(*grid_shape):
            block = blocks[idx].reshape((s,) * nd)
            vals[idx] = _local_maximal_integral(block) / block.sum()
        best = _best(best, w, s, off, stride, vals)
    if best is None:
        raise ParameterError("empty cube set")
    return best if return_cube else best[0]


def mean_oscillation(b:GridFunction, Q:Cube):
    """``Omega(b; Q) = avg_Q |b - b_Q|``."""
    vals = b.values[b.slices(Q)]
    return float(np.abs(vals - vals.mean()).mean())


def _oscillations(blocks):
    return np.abs(blocks - blocks.mean(axis=-1, keepdims=True)).mean(axis=-1)


def bmo_norm(b:GridFunction, cubes="all", return_cube:bool=False):
    """``sup_Q Omega(b; Q)`` over the cube set."""
    best = None
    for s, off, stride, blocks in _cube_blocks(b, b.values, cubes):
        best = _best(best, b, s, off, stride, _oscillations(blocks))
    if best is None:
        raise ParameterError("empty cube set")
    return best if return_cube else best[0]


def weighted_bmo_norm(b:GridFunction, nu:Weight, cubes="all", return_cube:bool=False):
    """``sup_Q (1/nu(Q)) int_Q |b - b_Q|``."""
    if not b.same_geometry(nu):
        raise ParameterError("b and nu live on different grids")
    best = None
    for (s, off, stride, bb), (_, _, _, nb) in zip(_cube_blocks(b, b.values, cubes), _cube_blocks(b, nu.values, cubes)):
        best = _best(best, b, s, off, stride, _oscillations(bb) / nb.mean(axis=-1))
    if best is None:
        raise ParameterError("empty cube set")
    return best if return_cube else best[0]


def distribution(w:Weight, f:GridFunction, lam:float):
    """
    ``w{|f| > lam}``; Lebesgue measure when `w` is None.

    Right-continuous and nonincreasing in `lam`.
    """
    mask = np.abs(f.values) > lam
    if w is None:
        return float(mask.sum() * f.cell_volume)
    if not w.same_geometry(f):
        raise ParameterError("w and f live on different grids")
    return w.measure(mask)


@dataclass
class JohnNirenbergReport:
    """
    Decay of ``lam -> |{x in Q : |b - b_Q| > lam}| / |Q|``.

    `rate` is the fitted exponential rate (None with fewer than two positive
    samples); `envelope` is ``e * exp(-lam / (2^n e ||b||_BMO))``.
    """

    cube: Cube
    bmo: float
    lambdas: np.ndarray
    profile: np.ndarray
    envelope: np.ndarray
    rate: float = None
    exp_norm: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def under_envelope(self):
        return bool(np.all(self.profile <= self.envelope + 1e-15))

    @property
    def exp_constant(self):
        """``||b - b_Q||_{exp,Q} / ||b||_BMO`` (0 for constant b)."""
        return 0.0 if self.bmo == 0 else self.exp_norm / self.bmo

    def to_dict(self):
        return {
            "cube": self.cube.to_dict(),
            "bmo": self.bmo,
            "lambdas": self.lambdas.tolist(),
            "profile": self.profile.tolist(),
            "envelope": self.envelope.tolist(),
            "rate": self.rate,
            "exp_constant": self.exp_constant,
            "under_envelope": self.under_envelope,
        }


def john_nirenberg_profile(b:GridFunction, Q:Cube, lambdas=None):
    """
    Distribution profile of the oscillation of `b` on `Q` against the
    John-Nirenberg envelope, with the ``exp(L)`` norm of ``b - b_Q``.
    """
    sub = b.restrict(Q)
    dev = np.abs(sub.values - sub.values.mean())
    bmo = bmo_norm(sub)
    if lambdas is None:
        top = float(dev.max())
        lambdas = log_grid(1e-3 * top, top, 40) if top > 0 else np.array([1.0])
    lambdas = np.asarray(lambdas, dtype=float)
    profile = np.array([(dev > lam).mean() for lam in lambdas])
    if bmo > 0:
        envelope = np.e * np.exp(-lambdas / (2 ** b.dim * np.e * bmo))
    else:
        envelope = np.zeros_like(lambdas)
    rate = None
    pos = profile > 0
    if pos.sum() >= 2:
        slope, _ = np.polyfit(lambdas[pos], np.log(profile[pos]), 1)
        rate = float(-slope)
    exp_norm = luxemburg_norm(sub.with_values(dev), Q, exp_minus_one())
    report = JohnNirenbergReport(Q, bmo, lambdas, profile, envelope, rate, exp_norm)
    logger.info("John-Nirenberg on %s: bmo=%.6g rate=%s exp constant=%.6g", Q, bmo, rate, report.exp_constant)
    return report


def osc_llogl_check(b:GridFunction, instances, ceiling:float=math.inf):
    """
    ``avg_Q |(b - b_Q) g| <= c ||b||_BMO ||g||_{L log L, Q}`` on ``(g, Q)`` pairs;
    the empirical constant is c.
    """
    bmo = bmo_norm(b)
    Phi = phi_llogl()
    lhs, rhs, labels, keys = [], [], [], []
    for g, Q in instances:
        sl = b.slices(Q)
        vals = b.values[sl]
        lhs.append(float(np.abs((vals - vals.mean()) * g.values[sl]).mean()))
        rhs.append(bmo * luxemburg_norm(g, Q, Phi))
        labels.append(str(Q))
        keys.append([g.to_dict(), Q.to_dict()])
    return CheckReport.build(
        "osc_llogl", {"b": b.to_dict(), "instances": keys}, lhs, rhs, labels=labels,
        ceiling=ceiling, notes={"bmo": bmo},
    )


# ---------- generators ----------

def _geometry(cells, h, origin, dim):
    cells = tuple(int(c) for c in np.atleast_1d(cells))
    if len(cells) == 1:
        cells = cells * dim
    if origin is None:
        origin = tuple(-c * h / 2 for c in cells)
    return cells, float(h), tuple(float(o) for o in np.atleast_1d(origin))


def constant_weight(cells, h:float=1.0, origin=None, c:float=1.0, dim:int=1):
    cells, h, origin = _geometry(cells, h, origin, dim)
    return Weight(np.full(cells, float(c)), h=h, origin=origin)


def power_weight(cells, alpha:float, h:float=1.0, origin=None, dim:int=1, center=None):
    """
    ``|x - center|^alpha`` at cell midpoints; the default box is centred at 0.

    Raises DataError when a midpoint hits the center with ``alpha < 0``, or
    the weight vanishes somewhere.
    """
    cells, h, origin = _geometry(cells, h, origin, dim)
    proto = GridFunction(np.zeros(cells), h=h, origin=origin)
    center = np.zeros(len(cells)) if center is None else np.atleast_1d(center)
    r = np.linalg.norm(proto.centers() - center, axis=1).reshape(cells)
    with np.errstate(divide="ignore"):
        vals = r ** alpha
    if not np.all(np.isfinite(vals)):
        raise DataError(f"power weight |x|^{alpha} is singular at a cell midpoint")
    return Weight(vals, h=h, origin=origin)


def step_weight(cells, levels, h:float=1.0, origin=None, dim:int=1):
    """Equal slabs along the first axis taking the values `levels` in turn."""
    cells, h, origin = _geometry(cells, h, origin, dim)
    levels = [float(v) for v in levels]
    idx = (np.arange(cells[0]) * len(levels)) // cells[0]
    col = np.asarray(levels)[idx]
    vals = np.broadcast_to(col.reshape((-1,) + (1,) * (len(cells) - 1)), cells)
    return Weight(np.array(vals), h=h, origin=origin)


def product_weight(cells, alpha:float, beta:float, h:float=1.0, origin=None):
    """``|x_1|^alpha |x_2|^beta`` in dimension 2."""
    cells, h, origin = _geometry(cells, h, origin, 2)
    proto = GridFunction(np.zeros(cells), h=h, origin=origin)
    x1, x2 = np.meshgrid(proto.axis_centers(0), proto.axis_centers(1), indexing="ij")
    with np.errstate(divide="ignore"):
        vals = np.abs(x1) ** alpha * np.abs(x2) ** beta
    if not np.all(np.isfinite(vals)):
        raise DataError("product weight is singular at a cell midpoint")
    return Weight(vals, h=h, origin=origin)
