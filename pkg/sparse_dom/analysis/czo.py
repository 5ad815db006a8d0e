# Discretized Calderón-Zygmund operators, truncations, grand maximal operators and commutators
#
# Created On: Oct 19, 2026
#

from pathlib import Path
import logging
import math
import re

import numpy as np

from .errors import DataError, ParameterError
from .grid import Cube, DyadicLattice, GridFunction, _clipped, standard_lattice, three_lattice_shifts
from .orlicz import hardy_littlewood_maximal, orlicz_maximal, power
from .reports import CheckReport
from .utils import block_view, expand_blocks

logger = logging.getLogger(__name__)

__all__ = [
    "CZKernel",
    "TabulatedKernel",
    "hilbert_kernel",
    "riesz2d_x_kernel",
    "kernel_by_name",
    "apply_T",
    "maximal_truncated",
    "grand_maximal",
    "local_grand_maximal",
    "commutator",
    "dyadic_local_maximal",
    "power_maximal",
    "weak_type_check",
    "truncation_bounds_check",
]

# rows of the kernel matrix evaluated at once
_ROW_CHUNK = 256


class CZKernel:
    """
    An analytic Calderón-Zygmund kernel.

    Parameters
    ----------
    name : str
    func : callable
        ``func(Z)`` with ``Z = x - y`` of shape ``(..., dim)``; only
        translation invariant kernels are built in.
    dim : int
    size_constant : float
        ``C_K`` in ``|K(x, y)| <= C_K / |x - y|^n``.
    modulus : callable
        The modulus of continuity ``omega``.
    dini : float
        ``int_0^1 omega(t) / t dt``.
    l2_norm : float
        ``||T||_{L^2 -> L^2}``.
    """

    norm_is_estimate = False

    def __init__(self, name:str, func, dim:int, size_constant:float, modulus, dini:float, l2_norm:float):
        self.name = name
        self._func = func
        self.dim = dim
        self.size_constant = float(size_constant)
        self.modulus = modulus
        self.dini = float(dini)
        self.l2_norm = float(l2_norm)

    @property
    def c_t(self):
        """``C_T = ||T|| + C_K + [omega]_Dini``."""
        return self.l2_norm + self.size_constant + self.dini

    def __call__(self, x, y):
        """K(x, y) for single points, 0 on the diagonal."""
        z = np.atleast_1d(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
        if not np.any(z):
            return 0.0
        return float(self._func(z[None, :])[0])

    def pair_matrix(self, f:GridFunction, rows, cols):
        """``K(x_r, x_c)`` at cell centres of `f` (flat indices), zero where ``r == c``."""
        centers = _centers(f)
        Z = centers[rows][:, None, :] - centers[cols][None, :, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self._func(Z)
        out[~np.any(Z != 0, axis=-1)] = 0.0
        return out

    def size_ratio(self, x, y):
        """``|K(x, y)| |x - y|^n / C_K`` for point arrays of shape ``(m, dim)``."""
        Z = np.atleast_2d(x) - np.atleast_2d(y)
        r = np.linalg.norm(Z, axis=1)
        return np.abs(self._func(Z)) * r ** self.dim / self.size_constant

    def smoothness_ratio(self, x, xp, y):
        """
        ``(|K(x,y) - K(x',y)| + |K(y,x) - K(y,x')|) / (omega(t) / |x - y|^n)``
        with ``t = |x - x'| / |x - y|``, for pairs with ``|x - y| > 2 |x - x'|``.
        """
        x, xp, y = (np.atleast_2d(np.asarray(a, dtype=float)) for a in (x, xp, y))
        r = np.linalg.norm(x - y, axis=1)
        d = np.linalg.norm(x - xp, axis=1)
        if np.any(r <= 2 * d):
            raise ParameterError("smoothness is sampled only where |x - y| > 2 |x - x'|")
        lhs = np.abs(self._func(x - y) - self._func(xp - y)) + np.abs(self._func(y - x) - self._func(y - xp))
        return lhs / (self.modulus(d / r) / r ** self.dim)

    def describe(self):
        return {"name": self.name, "c_t": self.c_t, "norm_is_estimate": self.norm_is_estimate}

    def __repr__(self):
        return f"CZKernel({self.name}, dim={self.dim}, C_T={self.c_t:.6g})"


def _centers(f:GridFunction):
    return f.centers().reshape(-1, f.dim)


def _hilbert(Z):
    return 1.0 / Z[..., 0]


def _riesz2d_x(Z):
    r = np.sqrt((Z ** 2).sum(axis=-1))
    return Z[..., 0] / r ** 3


def hilbert_kernel():
    """
    ``K(x, y) = 1 / (x - y)`` without the ``1/pi``: ``C_K = 1``, ``||T|| = pi``.

    The two differences together are ``2|x - x'| / (|x - y| |x' - y|)``, so
    ``omega(t) = 4t`` on ``|x - y| > 2|x - x'|``.
    """
    return CZKernel("hilbert", _hilbert, 1, 1.0, lambda t: 4.0 * np.asarray(t), 4.0, math.pi)


def riesz2d_x_kernel():
    """
    ``K(x, y) = (x_1 - y_1) / |x - y|^3`` in the plane, ``2 pi`` times the first
    Riesz transform, so ``||T|| = 2 pi``.

    The gradient is at most ``4 / |z|^3``; on ``|x - y| > 2|x - x'|`` that gives
    ``omega(t) = 64 t`` for the two differences together.
    """
    return CZKernel("riesz2d_x", _riesz2d_x, 2, 1.0, lambda t: 64.0 * np.asarray(t), 64.0, 2 * math.pi)


class TabulatedKernel:
    """
    A kernel given by its matrix on one grid.

    The file holds ``M * M`` little-endian doubles, row-major, where ``M`` is
    the number of cells of the grid (cells flattened in C order). Entry
    ``(i, j)`` is ``K(x_i, x_j)``; the diagonal is ignored.

    The operator norm is estimated by power iteration on the discretized
    operator and flagged as an estimate.
    """

    norm_is_estimate = True

    def __init__(self, table, h:float, dim:int=1, name:str="tabulated", size_constant:float=None, dini:float=0.0):
        table = np.array(table, dtype=float)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise DataError(f"a kernel table must be square, got shape {table.shape}")
        if not np.all(np.isfinite(table)):
            raise DataError("kernel table has non-finite entries")
        np.fill_diagonal(table, 0.0)
        self.name = name
        self.dim = dim
        self.h = float(h)
        self._table = table
        self.size_constant = float(size_constant) if size_constant is not None else math.nan
        self.dini = float(dini)
        self.l2_norm = self._power_iteration()
        logger.warning("operator norm of %s is an estimate: %.6g", name, self.l2_norm)

    @classmethod
    def load(cls, path:Path, h:float, dim:int=1, name:str=None):
        path = Path(path)
        raw = np.fromfile(path, dtype="<f8")
        m = math.isqrt(raw.size)
        if m * m != raw.size:
            raise DataError(f"{path}: {raw.size} doubles do not form a square table")
        return cls(raw.reshape(m, m), h, dim=dim, name=name or path.stem)

    def save(self, path:Path):
        self._table.astype("<f8").tofile(Path(path))
        return path

    @property
    def size(self):
        return self._table.shape[0]

    @property
    def c_t(self):
        return self.l2_norm + (0.0 if math.isnan(self.size_constant) else self.size_constant) + self.dini

    def _power_iteration(self, iterations:int=500, tol:float=1e-12):
        A = self._table * self.h ** self.dim
        v = np.ones(A.shape[1]) / math.sqrt(A.shape[1])
        sigma = 0.0
        for _ in range(iterations):
            u = A.T @ (A @ v)
            norm = np.linalg.norm(u)
            if norm == 0:
                return 0.0
            v = u / norm
            prev, sigma = sigma, math.sqrt(norm)
            if abs(sigma - prev) <= tol * sigma:
                break
        return sigma

    def pair_matrix(self, f:GridFunction, rows, cols):
        if f.values.size != self.size:
            raise ParameterError(f"{self.name} is tabulated on {self.size} cells, grid has {f.values.size}")
        return self._table[np.ix_(rows, cols)]

    def describe(self):
        return {"name": self.name, "c_t": self.c_t, "norm_is_estimate": True}

    def __repr__(self):
        return f"TabulatedKernel({self.name}, M={self.size}, ||T||~{self.l2_norm:.6g})"


_BUILTIN = {"hilbert": hilbert_kernel, "riesz2d_x": riesz2d_x_kernel}


def kernel_by_name(text:str, h:float=None, dim:int=1):
    """
    ``hilbert``, ``riesz2d_x`` or ``tabulated(<path>)``; the tabulated form
    needs the cell edge `h`.
    """
    text = text.strip()
    if text in _BUILTIN:
        return _BUILTIN[text]()
    match = re.fullmatch(r"tabulated\((.+)\)", text)
    if match:
        if h is None:
            raise ParameterError("a tabulated kernel needs the cell edge h")
        return TabulatedKernel.load(Path(match.group(1).strip()), h, dim=dim)
    raise ParameterError(f"unknown kernel '{text}'")


# ---------- operators ----------

def _flat(f:GridFunction, Q:Cube, clip:bool=True):
    """Flat indices (C order) of the cells of `Q` inside the box."""
    lo, side = f.index_box(Q, clip=clip)
    sl = _clipped(lo, side, f.cells)
    if sl is None:
        return np.zeros(0, dtype=int)
    grids = np.meshgrid(*[np.arange(s.start, s.stop) for s in sl], indexing="ij")
    return np.ravel_multi_index(tuple(g.ravel() for g in grids), f.cells)


def _apply_rows(K, f:GridFunction, vals, rows, cols):
    """``sum_{c in cols} K(x_r, x_c) vals_c h^n`` for r in rows."""
    out = np.zeros(len(rows))
    if len(cols) == 0 or len(rows) == 0:
        return out
    v = vals[cols]
    for start in range(0, len(rows), _ROW_CHUNK):
        block = K.pair_matrix(f, rows[start:start + _ROW_CHUNK], cols)
        out[start:start + _ROW_CHUNK] = block @ v
    return out * f.cell_volume


def apply_T(K, f:GridFunction):
    """``T f(x_i) = sum_{j != i} K(x_i, x_j) f(x_j) h^n``."""
    vals = f.values.ravel()
    everything = np.arange(vals.size)
    support = np.flatnonzero(vals)
    return f.with_values(_apply_rows(K, f, vals, everything, support).reshape(f.cells))


def maximal_truncated(K, f:GridFunction):
    """
    ``T* f(x) = sup_eps |sum_{|x_j - x| > eps} K(x, x_j) f(x_j) h^n|``.

    The sup runs over the distinct cell distances; partial sums are prefix
    sums of the terms ordered by decreasing distance, cut only between
    distinct distances.
    """
    vals = f.values.ravel()
    support = np.flatnonzero(vals)
    m = vals.size
    out = np.zeros(m)
    if support.size == 0:
        return f.with_values(out.reshape(f.cells))
    centers = _centers(f)
    for start in range(0, m, _ROW_CHUNK):
        rows = np.arange(start, min(m, start + _ROW_CHUNK))
        terms = K.pair_matrix(f, rows, support) * vals[support] * f.cell_volume
        dist = np.linalg.norm(centers[rows][:, None, :] - centers[support][None, :, :], axis=-1)
        order = np.argsort(-dist, axis=1, kind="stable")
        dist = np.take_along_axis(dist, order, axis=1)
        partial = np.cumsum(np.take_along_axis(terms, order, axis=1), axis=1)
        cut = np.ones_like(dist, dtype=bool)
        cut[:, :-1] = dist[:, :-1] > dist[:, 1:]
        out[rows] = np.where(cut, np.abs(partial), 0.0).max(axis=1)
    return f.with_values(out.reshape(f.cells))


def _grand_engine(K, f:GridFunction, vals, Tvals, cubes):
    """
    ``out(x) = max over Q ∋ x of max_{xi in Q} |Tvals(xi) - T(vals chi_{3Q})(xi)|``.

    `Tvals` is ``T(vals)`` on (at least) the cells of every cube.
    """
    out = np.zeros(vals.size)
    for Q in cubes:
        rows = _flat(f, Q)
        if rows.size == 0:
            continue
        near = _flat(f, Q.dilate(3))
        near = near[vals[near] != 0]
        local = Tvals[rows] - _apply_rows(K, f, vals, rows, near)
        out[rows] = np.maximum(out[rows], np.abs(local).max())
    return out


def _meets_box(f:GridFunction, Q:Cube):
    return all(a < e and a + Q.side > o for a, o, e in zip(Q.anchor, f.origin, f.box_hi))


def grand_maximal(K, f:GridFunction, lattices=None):
    """
    The grand maximal truncated operator, its sup taken over the members of
    the shifted lattices containing x.

    lattices : list of DyadicLattice, optional
        Defaults to the shifts of ``standard_lattice(f)``.
    """
    if lattices is None:
        lattices = three_lattice_shifts(standard_lattice(f))
    Tvals = apply_T(K, f).values.ravel()
    vals = f.values.ravel()
    cubes = []
    for L in lattices:
        for k in range(L.levels[0], L.levels[1] + 1):
            cubes.extend(Q for Q in L.members(k) if _meets_box(f, Q))
            if L.side(k) >= 3 * max(e - o for o, e in zip(f.origin, f.box_hi)):
                # 3Q covers the box: nothing outside it
                break
    return f.with_values(_grand_engine(K, f, vals, Tvals, cubes).reshape(f.cells))


def _blocks(Q0:Cube, h:float):
    """
    The largest power-of-two cubes tiling `Q0`, lexicographically; ``[Q0]``
    when `Q0` itself is a power of two cells wide.
    """
    cells = int(round(Q0.side / h))
    block = cells & -cells
    if block == cells:
        return [Q0]
    return [
        Cube(tuple(a + c * block * h for a, c in zip(Q0.anchor, corner)), block * h)
        for corner in np.ndindex(*(cells // block,) * Q0.dim)
    ]


def _descendants(Q0:Cube, h:float):
    """Q0, its power-of-two blocks and their dyadic descendants down to single cells."""
    level = _blocks(Q0, h)
    cubes = [Q0] + [B for B in level if B != Q0]
    while level[0].side > h * (1 + 1e-9):
        level = [
            Cube(tuple(a + c * P.side / 2 for a, c in zip(P.anchor, corner)), P.side / 2)
            for P in level for corner in np.ndindex(*(2,) * Q0.dim)
        ]
        cubes.extend(level)
    return cubes


def local_grand_maximal(K, f:GridFunction, Q0:Cube, lattice:DyadicLattice=None):
    """
    ``M_{T,Q0} f(x) = max over dyadic Q ⊂ Q0 with x in Q of
    max_{xi in Q} |T(f chi_{3Q0 minus 3Q})(xi)|``; zero outside Q0.

    `Q0` may be an odd multiple ``m`` of a power of two cells wide; its
    dyadic cubes are then those of its ``m^n`` power-of-two blocks.

    Raises
    ------
    ParameterError
        If `Q0` (or each of its blocks) is not a member of `lattice`
        (default ``standard_lattice(f)``).
    """
    if lattice is None:
        lattice = standard_lattice(f)
    if not all(lattice.contains(B) for B in _blocks(Q0, f.h)):
        raise ParameterError(f"{Q0} is not a member of {lattice!r}")
    rows = _flat(f, Q0, clip=False)
    vals = np.zeros(f.values.size)
    around = _flat(f, Q0.dilate(3))
    vals[around] = f.values.ravel()[around]
    Tvals = np.zeros(vals.size)
    Tvals[rows] = _apply_rows(K, f, vals, rows, around[vals[around] != 0])
    out = _grand_engine(K, f, vals, Tvals, _descendants(Q0, f.h))
    return f.with_values(out.reshape(f.cells))


def commutator(K, b:GridFunction, f:GridFunction):
    """``[b, T] f = b T f - T(b f)``."""
    return b * apply_T(K, f) - apply_T(K, b * f)


def dyadic_local_maximal(g:GridFunction, Q:Cube):
    """
    Sup of the averages of ``|g|`` over the dyadic descendants of `Q`
    containing x; zero outside `Q`.
    """
    _, side = g.index_box(Q)
    if side & (side - 1):
        raise ParameterError(f"{Q} is not a power of two cells wide")
    sub = np.abs(g.values[g.slices(Q)])
    best = np.zeros_like(sub)
    s = side
    while s >= 1:
        best = np.maximum(best, expand_blocks(block_view(sub, s).mean(axis=-1), s))
        s //= 2
    out = np.zeros(g.cells)
    out[g.slices(Q)] = best
    return g.with_values(out)


def power_maximal(w:GridFunction, r:float, cubes="all"):
    """``M_{L^r} w = (M(w^r))^{1/r}``."""
    return orlicz_maximal(w, power(r), cubes)


# ---------- checks ----------

def _weak_sup(values, cell_volume:float):
    """``sup_lam lam |{|g| > lam}|`` of a grid sample."""
    v = np.sort(np.abs(np.asarray(values, dtype=float)).ravel())[::-1]
    if v.size == 0:
        return 0.0
    return float(np.max(v * np.arange(1, v.size + 1)) * cell_volume)


_OPERATORS = {
    "T": lambda K, f: apply_T(K, f),
    "T*": maximal_truncated,
    "M_T": grand_maximal,
}


def weak_type_check(K, fs, operator:str="T", ceiling:float=math.inf):
    """
    ``sup_lam lam |{|O f| > lam}| <= C ||f||_1`` over the suite `fs`, with O one
    of ``T``, ``T*`` or ``M_T``; the empirical constant estimates C.
    """
    if operator not in _OPERATORS:
        raise ParameterError(f"unknown operator '{operator}'")
    op = _OPERATORS[operator]
    lhs, rhs, keys = [], [], []
    for f in fs:
        lhs.append(_weak_sup(op(K, f).values, f.cell_volume))
        rhs.append(abs(f).integral())
        keys.append(f.to_dict())
    return CheckReport.build(
        "weak_type", {"kernel": K.name, "operator": operator, "fs": keys}, lhs, rhs,
        labels=[f"{operator}:{i}" for i in range(len(lhs))], ceiling=ceiling,
        notes={"operator": operator, "c_t": K.c_t},
    )


def _worst(lhs, rhs):
    """The pair with the largest ratio, ``0/0`` counted as 0."""
    lhs, rhs = np.asarray(lhs).ravel(), np.asarray(rhs).ravel()
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(lhs > 0, lhs / rhs, 0.0)
    i = int(np.argmax(ratio))
    return float(lhs[i]), float(rhs[i])


def truncation_bounds_check(K, fs, Q0:Cube=None, ceiling:float=math.inf):
    """
    The two pointwise estimates for the grand maximal operators on a suite:
    ``|T(f chi_{3Q0})| <= C (|f| + M_{T,Q0} f)`` on Q0 (samples ``i:k``) and
    ``M_T f <= C (M f + T* f)`` (samples ``ii:k``). Each function contributes
    its worst cell.
    """
    lhs, rhs, labels, keys = [], [], [], []
    for i, f in enumerate(fs):
        Q = Cube(f.origin, f.h * f.cells[0]) if Q0 is None else Q0
        near = np.zeros(f.cells)
        sl = _clipped(*f.index_box(Q.dilate(3), clip=True), f.cells)
        near[sl] = f.values[sl]
        inner = f.slices(Q)
        left = np.abs(apply_T(K, f.with_values(near)).values)[inner]
        right = (np.abs(f.values) + local_grand_maximal(K, f, Q).values)[inner]
        pairs = [("i", _worst(left, right))]
        left = grand_maximal(K, f).values
        right = hardy_littlewood_maximal(f).values + maximal_truncated(K, f).values
        pairs.append(("ii", _worst(left, right)))
        for part, (l, r) in pairs:
            lhs.append(l)
            rhs.append(r)
            labels.append(f"{part}:{i}")
        keys.append(f.to_dict())
    return CheckReport.build(
        "truncation_bounds", {"kernel": K.name, "fs": keys, "Q0": None if Q0 is None else Q0.to_dict()},
        lhs, rhs, labels=labels, ceiling=ceiling,
    )
