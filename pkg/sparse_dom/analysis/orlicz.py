# Young functions, Luxemburg norms, Orlicz maximal operators and the constants C_phi, K_phi
#
# Created On: Oct 19, 2026
#

from itertools import product
import logging
import math
import re

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize_scalar

from .errors import AlignmentError, ContractError, DataError, DivergenceError, HypothesisError, ParameterError
from .grid import Cube, DyadicLattice, GridFunction, _clipped
from .reports import CheckReport
from .utils import box_sums, block_view, cover_any, cover_max, expand_blocks, nearest_integer, window_blocks, log_grid
from ..scripts.constants import LUXEMBURG_RTOL, LITERAL_SLACK

logger = logging.getLogger(__name__)

__all__ = [
    "YoungFunction",
    "phi_llogl",
    "phi_eps",
    "phi_loglog",
    "exp_minus_one",
    "power",
    "identity",
    "compose",
    "compose_llogl",
    "from_inverse",
    "holder_factor",
    "young_function",
    "complementary",
    "luxemburg_norm",
    "luxemburg_rows",
    "orlicz_maximal",
    "orlicz_level_set",
    "hardy_littlewood_maximal",
    "lattice_reduce",
    "c_phi",
    "k_phi",
    "inverse_tail_integral",
    "composed_constant_check",
    "generalized_holder",
    "young_holder",
    "submultiplicativity_check",
    "luxemburg_fact_check",
]

_LOG_CEIL = 1e306


def _scalar_or_array(template, out):
    if np.ndim(template) == 0:
        return float(np.asarray(out).reshape(()))
    return out


def _solve_increasing(g, target, floor:float=None):
    """
    Vectorized root of ``g(d) = target`` for a nondecreasing `g`.

    The bracket starts at [-1, 1] and doubles outwards. Targets below
    ``g(floor)`` (or below ``g(-1e306)`` without a floor) give -inf, targets
    above ``g(1e306)`` give +inf.
    """
    target = np.asarray(target, dtype=float)
    lo = np.full(target.shape, -1.0)
    hi = np.full(target.shape, 1.0)
    step = np.ones(target.shape)
    with np.errstate(all="ignore"):
        if floor is None:
            low_out = np.zeros(target.shape, dtype=bool)
        else:
            low_out = g(np.full(target.shape, float(floor))) > target
            lo = np.maximum(lo, floor)
        while True:
            bad = (g(lo) > target) & ~low_out
            if not bad.any():
                break
            lo[bad] -= step[bad]
            step[bad] *= 2.0
            if floor is not None:
                lo = np.maximum(lo, floor)
            low_out |= lo < -_LOG_CEIL
        hi = np.maximum(hi, lo)
        step[:] = 1.0
        high_out = np.zeros(target.shape, dtype=bool)
        while True:
            bad = (g(hi) < target) & ~high_out
            if not bad.any():
                break
            hi[bad] += step[bad]
            step[bad] *= 2.0
            high_out |= hi > _LOG_CEIL
        for _ in range(400):
            mid = 0.5 * (lo + hi)
            up = g(mid) < target
            lo = np.where(up, mid, lo)
            hi = np.where(up, hi, mid)
            if np.all(hi - lo <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(mid))):
                break
    out = 0.5 * (lo + hi)
    out[low_out] = -np.inf
    out[high_out] = np.inf
    return out


def _fixed_point_excess(excess, L, max_iter:int=300):
    """
    Solve ``d = -excess(L + d)`` by iteration; None unless it settles.

    Converges when the excess is a contraction, which holds for the
    logarithmic builtins.
    """
    d = np.zeros_like(L)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            new = -excess(L + d)
            if not np.all(np.isfinite(new)):
                return None
            if np.all(np.abs(new - d) <= 1e-14 * np.maximum(1.0, np.abs(new))):
                return new
            d = new
    return None


class YoungFunction:
    """
    An evaluable Young function with its inverse.

    Besides direct evaluation, every instance exposes its logarithmic
    excess ``log(phi(e^y) / e^y)`` and the excess of its inverse
    ``log(phi^{-1}(e^L) / e^L)``. The improper integrals defining C_phi and
    K_phi run over ``L = log t`` up to astronomically large values, where only
    these differences keep their precision.

    Parameters
    ----------
    name : str
    func : callable
        Vectorized ``t -> phi(t)`` for ``t >= 0``.
    log_excess : callable, optional
        Vectorized ``y -> log(phi(e^y)) - y``; derived from `func` when missing.
    inverse : callable, optional
        Vectorized closed form of ``phi^{-1}``.
    inverse_log_excess : callable, optional
        Vectorized ``L -> log(phi^{-1}(e^L)) - L``; solved numerically when missing.
    params : tuple
        Parameters of a builtin, part of its key.
    power : (r, c), optional
        Set when ``phi(t) = c t**r``; enables closed-form norms.
    """

    def __init__(self, name:str, func, log_excess=None, inverse=None, inverse_log_excess=None, params=(), power=None):
        self._name = name
        self._func = func
        self._log_excess = log_excess
        self._inverse = inverse
        self._inverse_log_excess = inverse_log_excess
        self._params = tuple(params)
        self._power = power

    @property
    def name(self):
        return self._name

    @property
    def params(self):
        return self._params

    @property
    def power(self):
        return self._power

    @property
    def key(self):
        """Config-file spelling, e.g. ``phi_eps(0.5)``."""
        if not self._params:
            return self._name
        args = ", ".join(p.key if isinstance(p, YoungFunction) else repr(p) for p in self._params)
        return f"{self._name}({args})"

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            out = self._func(arr)
        return _scalar_or_array(t, out)

    def log_excess(self, y):
        y = np.asarray(y, dtype=float)
        with np.errstate(all="ignore"):
            if self._log_excess is not None:
                return self._log_excess(y)
            x = np.exp(y)
            return np.log(self._func(x) / x)

    def log_eval(self, y):
        """``log(phi(e^y))``."""
        y = np.asarray(y, dtype=float)
        return y + self.log_excess(y)

    def inverse_log_excess(self, L):
        L = np.asarray(L, dtype=float)
        if self._inverse_log_excess is not None:
            with np.errstate(all="ignore"):
                return self._inverse_log_excess(L)
        flat = L.ravel()
        if self._log_excess is not None:
            d = _fixed_point_excess(self._log_excess, flat)
            if d is not None:
                return d.reshape(L.shape)
        d = _solve_increasing(lambda d: d + self.log_excess(flat + d), np.zeros_like(flat))
        return d.reshape(L.shape)

    def log_inverse(self, L):
        """``log(phi^{-1}(e^L))``."""
        L = np.asarray(L, dtype=float)
        return L + self.inverse_log_excess(L)

    def inverse(self, t):
        arr = np.asarray(t, dtype=float)
        if self._inverse is not None:
            with np.errstate(over="ignore", invalid="ignore"):
                return _scalar_or_array(t, self._inverse(arr))
        out = np.zeros(arr.shape)
        pos = arr > 0
        if pos.any():
            with np.errstate(over="ignore"):
                out[pos] = np.exp(self.log_inverse(np.log(arr[pos])))
        return _scalar_or_array(t, out)

    def is_young(self, grid=None, rtol:float=1e-9):
        """
        Spot check on a log grid: ``phi(0) = 0``, strictly increasing, and
        nondecreasing slopes (convexity).
        """
        t = log_grid(1e-3, 1e3, 121) if grid is None else np.asarray(grid, dtype=float)
        t = np.concatenate(([0.0], t))
        v = np.asarray(self(t))
        if v[0] != 0.0 or not np.all(np.isfinite(v)):
            return False
        if np.any(np.diff(v) <= 0):
            return False
        slopes = np.diff(v) / np.diff(t)
        return bool(np.all(np.diff(slopes) >= -rtol * np.abs(slopes[1:])))

    def __repr__(self):
        return f"YoungFunction({self.key})"


def _log_power_family(name:str, eps:float, params):
    return YoungFunction(
        name,
        lambda t: t * np.log(np.e + t) ** eps,
        log_excess=lambda y: eps * np.log(np.logaddexp(1.0, y)),
        params=params,
    )


def phi_llogl():
    """``t log(e + t)``."""
    return _log_power_family("phi_llogl", 1.0, ())


def phi_eps(eps:float):
    """``t log(e + t)**eps``."""
    if not eps > 0:
        raise ParameterError(f"phi_eps needs eps > 0, got {eps}")
    return _log_power_family("phi_eps", float(eps), (float(eps),))


def phi_loglog(alpha:float):
    """``t (log log(e^e + t))**alpha``."""
    if not alpha > 0:
        raise ParameterError(f"phi_loglog needs alpha > 0, got {alpha}")
    alpha = float(alpha)
    return YoungFunction(
        "phi_loglog",
        lambda t: t * np.log(np.log(np.exp(np.e) + t)) ** alpha,
        log_excess=lambda y: alpha * np.log(np.log(np.logaddexp(np.e, y))),
        params=(alpha,),
    )


def _exp_excess(y):
    x = np.exp(y)
    big = x > 30.0
    out = np.empty_like(x)
    out[big] = x[big] + np.log1p(-np.exp(-x[big])) - y[big]
    small = ~big
    xs = x[small]
    safe = np.where(xs > 0, xs, 1.0)
    out[small] = np.where(xs > 0, np.log(np.expm1(safe) / safe), 0.0)
    return out


def exp_minus_one():
    """``e^t - 1``."""
    return YoungFunction(
        "exp_minus_one",
        np.expm1,
        log_excess=lambda y: _exp_excess(np.atleast_1d(y)).reshape(np.shape(y)),
        inverse=np.log1p,
        inverse_log_excess=lambda L: np.log(np.logaddexp(0.0, L)) - L,
    )


def power(r:float, c:float=1.0):
    """``c t**r`` with ``r >= 1``."""
    if not r >= 1:
        raise ParameterError(f"power needs r >= 1, got {r}")
    if not c > 0:
        raise ParameterError(f"power needs c > 0, got {c}")
    r, c = float(r), float(c)
    logc = math.log(c)
    return YoungFunction(
        "power",
        lambda t: c * t ** r,
        log_excess=lambda y: (r - 1.0) * y + logc,
        inverse=lambda t: (t / c) ** (1.0 / r),
        inverse_log_excess=lambda L: -((r - 1.0) * L + logc) / r,
        params=(r,) if c == 1.0 else (r, c),
        power=(r, c),
    )


def identity():
    """``t``; not a Young function in the strict sense, used for L^1 averages."""
    return YoungFunction(
        "identity",
        lambda t: t + 0.0,
        log_excess=lambda y: np.zeros_like(y),
        inverse=lambda t: t + 0.0,
        inverse_log_excess=lambda L: np.zeros_like(L),
        power=(1.0, 1.0),
    )


def compose(outer:YoungFunction, inner:YoungFunction, name:str=None):
    """``outer(inner(t))``; its inverse is ``inner^{-1}(outer^{-1}(t))``."""

    def log_excess(y):
        a = inner.log_excess(y)
        return a + outer.log_excess(y + a)

    def inverse_log_excess(L):
        a = outer.inverse_log_excess(L)
        return a + inner.inverse_log_excess(L + a)

    params = () if name else (outer, inner)
    return YoungFunction(
        name or "compose",
        lambda t: outer(inner(t)),
        log_excess=log_excess,
        inverse=lambda t: inner.inverse(outer.inverse(t)),
        inverse_log_excess=inverse_log_excess,
        params=params,
    )


def compose_llogl(inner:YoungFunction):
    """``Phi o inner`` with ``Phi(t) = t log(e + t)``."""
    phi = compose(phi_llogl(), inner, name="compose_llogl")
    phi._params = (inner,)
    return phi


def from_inverse(name:str, inverse_log_excess):
    """
    The function whose inverse has the given excess ``log(A^{-1}(e^L)) - L``.

    ``A(x)`` is 0 below ``A^{-1}(0+)``. No convexity is assumed.
    """

    def log_excess(y):
        flat = np.asarray(y, dtype=float).ravel()
        # solve log A^{-1}(e^L) = y for L = y + d
        L = _solve_increasing(lambda L: L + inverse_log_excess(L), flat, floor=-745.0)
        return (L - flat).reshape(np.shape(y))

    def func(t):
        arr = np.asarray(t, dtype=float)
        out = np.zeros(arr.shape)
        pos = arr > 0
        if pos.any():
            y = np.log(arr[pos])
            out[pos] = np.exp(y + log_excess(y))
        return out

    return YoungFunction(name, func, log_excess=log_excess, inverse_log_excess=inverse_log_excess)


def holder_factor(phi:YoungFunction):
    """
    The function A with ``A^{-1} = Phi^{-1} / (phi^{-1} o Phi^{-1})``.

    Together with ``B = Phi o phi`` it satisfies ``A^{-1} B^{-1} = Phi^{-1}``.
    """
    Phi = phi_llogl()

    def inverse_log_excess(L):
        M = L + Phi.inverse_log_excess(L)
        return -phi.inverse_log_excess(M) - L

    A = from_inverse("holder_factor", inverse_log_excess)
    A._params = (phi,)
    return A


_BUILTINS = {
    "phi_llogl": (phi_llogl, 0),
    "phi_eps": (phi_eps, 1),
    "phi_loglog": (phi_loglog, 1),
    "exp_minus_one": (exp_minus_one, 0),
    "power": (power, (1, 2)),
    "identity": (identity, 0),
}

_CALL = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def young_function(text:str):
    """
    Parse a builtin from its config spelling.

    Examples
    --------
    >>> young_function("phi_eps(0.5)").key
    'phi_eps(0.5)'
    >>> young_function("compose_llogl(power(2.0))").key
    'compose_llogl(power(2.0))'
    """
    if isinstance(text, YoungFunction):
        return text
    m = _CALL.match(str(text))
    if not m:
        raise ParameterError(f"cannot parse Young function '{text}'")
    name, args = m.group(1), m.group(2)
    if name == "compose_llogl":
        if not args:
            raise ParameterError("compose_llogl needs an inner Young function")
        return compose_llogl(young_function(args))
    if name not in _BUILTINS:
        raise ParameterError(f"unknown Young function '{name}'")
    factory, arity = _BUILTINS[name]
    try:
        values = [float(a) for a in args.split(",")] if args and args.strip() else []
    except ValueError:
        raise ParameterError(f"bad parameters in '{text}'")
    allowed = arity if isinstance(arity, tuple) else (arity,)
    if len(values) not in allowed:
        raise ParameterError(f"'{name}' takes {arity} parameter(s), got {len(values)}")
    return factory(*values)


# ---------- complementary functions ----------

_CONJUGATE_TABLES = {}


class _Conjugate:
    """
    ``sup_x (x t - phi(x))`` for a generic Young function.

    On ``[1e-3, 1e3]`` the values come from a table of exact maximizations on
    a log grid (128 nodes per decade, plus the kink ``phi'(0)`` below which the
    supremum is zero), interpolated monotonically in ``log1p(phi_bar)``
    against ``t``. The table is built once per function key. Arguments
    outside the table are maximized directly and memoized.
    """

    NODES = log_grid(1e-3, 1e3, 769)

    def __init__(self, phi:YoungFunction):
        self._phi = phi
        self._memo = {}
        self._table = None

    @property
    def table(self):
        """``(t_lo, t_hi, interpolant)`` or None when fewer than two nodes are finite."""
        if self._table is None:
            key = self._phi.key
            if key not in _CONJUGATE_TABLES:
                _CONJUGATE_TABLES[key] = self._tabulate()
            self._table = _CONJUGATE_TABLES[key]
        return self._table or None

    def _tabulate(self):
        t = self.NODES
        with np.errstate(all="ignore"):
            kink = float(self._phi(1e-12)) / 1e-12
        if t[0] < kink < t[-1]:
            t = np.unique(np.append(t, kink))
        vals = np.array([self._compute(v) for v in t])
        finite = np.isfinite(vals)
        top = len(t) if finite.all() else int(np.argmin(finite))
        if top < 2:
            return ()
        t, vals = t[:top], vals[:top]
        logger.debug("complementary of %s tabulated on %d nodes up to t=%g", self._phi.key, top, t[-1])
        return float(t[0]), float(t[-1]), PchipInterpolator(t, np.log1p(vals), extrapolate=False)

    def value(self, t:float):
        t = float(t)
        table = self.table
        if table and table[0] <= t <= table[1]:
            return float(np.expm1(table[2](t)))
        if t in self._memo:
            return self._memo[t]
        self._memo[t] = val = self._compute(t)
        return val

    def _compute(self, t:float):
        if not t > 0:
            return 0.0
        phi = self._phi

        def gain(x):
            return x * t - float(phi(x))

        x_hi = 1.0
        while gain(2 * x_hi) > gain(x_hi):
            x_hi *= 2
            if x_hi > 1e300:
                slope_far = float(phi(1e300)) / 1e300
                slope_mid = float(phi(1e150)) / 1e150
                if not slope_far > slope_mid * (1 + 1e-6):
                    raise ContractError(f"sup of x*t - {phi.key}(x) diverges at t={t}; not a Young function")
                return math.inf
        res = minimize_scalar(
            lambda x: -gain(x), bounds=(0.0, 2 * x_hi), method="bounded",
            options={"xatol": 1e-12 * x_hi},
        )
        return max(0.0, -float(res.fun), gain(x_hi))

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        flat = arr.ravel()
        out = np.zeros(flat.shape)
        table = self.table
        inside = np.zeros(flat.shape, dtype=bool)
        if table:
            inside = (flat >= table[0]) & (flat <= table[1])
            out[inside] = np.expm1(table[2](flat[inside]))
        for i in np.flatnonzero(~inside):
            out[i] = self.value(flat[i])
        return out.reshape(arr.shape)


def _exp_conjugate(t):
    t = np.asarray(t, dtype=float)
    safe = np.where(t > 1, t, 1.0)
    return np.where(t > 1, safe * np.log(safe) - safe + 1.0, 0.0)


def _exp_conjugate_excess(y):
    y = np.asarray(y, dtype=float)
    safe = np.where(y > 0, y, 1.0)
    with np.errstate(divide="ignore"):
        return np.where(y > 0, np.log(safe + np.expm1(-safe)), -np.inf)


def complementary(phi:YoungFunction):
    """
    The complementary function ``phi_bar(t) = sup_{x >= 0} (x t - phi(x))``.

    Closed forms are used for powers (another power) and for ``e^t - 1``
    (``t log t - t + 1`` above 1, zero below); any other function gets a
    bounded Brent search with a doubling bracket, tabulated once on a log grid
    and interpolated monotonically.

    Raises
    ------
    ContractError
        For linear functions, whose supremum is infinite.
    """
    if phi.power is not None:
        r, c = phi.power
        if r <= 1:
            raise ContractError(f"{phi.key} is linear; its complementary function is infinite")
        rc = r / (r - 1.0)
        cc = (1.0 - 1.0 / r) * (c * r) ** (-1.0 / (r - 1.0))
        return power(rc, cc)
    if phi.name == "exp_minus_one":
        return YoungFunction("complementary", _exp_conjugate, log_excess=_exp_conjugate_excess, params=(phi,))
    conj = _Conjugate(phi)
    return YoungFunction("complementary", conj, params=(phi,))


# ---------- Luxemburg norms ----------

def luxemburg_rows(rows, phi:YoungFunction, total:int=None, rtol:float=LUXEMBURG_RTOL):
    """
    Luxemburg norm of every row of `rows`, averaging over `total` cells.

    Cells beyond the row length count as zeros, so ``total > rows.shape[1]``
    is the norm of a zero-extended function.
    """
    A = np.abs(np.atleast_2d(np.asarray(rows, dtype=float)))
    if not np.all(np.isfinite(A)):
        raise DataError("Luxemburg norm of non-finite values")
    m, k = A.shape
    total = k if total is None else int(total)
    out = np.zeros(m)
    if k == 0:
        return out
    peak = A.max(axis=1)
    live = peak > 0
    if not live.any():
        return out
    if phi.power is not None:
        r, c = phi.power
        out[live] = (c * (A[live] ** r).sum(axis=1) / total) ** (1.0 / r)
        return out
    B = A[live]

    def avg(lam):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.asarray(phi(B / lam[:, None])).sum(axis=1) / total

    hi = peak[live].copy()
    for _ in range(2100):
        bad = avg(hi) > 1
        if not bad.any():
            break
        hi[bad] *= 2
    lo = hi / 2
    for _ in range(2100):
        ok = avg(lo) <= 1
        if not ok.any():
            break
        hi[ok] = lo[ok]
        lo[ok] /= 2
    for _ in range(200):
        if np.all(hi - lo <= rtol * hi):
            break
        mid = 0.5 * (lo + hi)
        feasible = avg(mid) <= 1
        hi = np.where(feasible, mid, hi)
        lo = np.where(feasible, lo, mid)
    out[live] = hi
    return out


def luxemburg_norm(f:GridFunction, Q:Cube, phi:YoungFunction, rtol:float=LUXEMBURG_RTOL):
    """
    Returns ``inf{lam > 0 : avg_Q phi(|f| / lam) <= 1}``.

    `Q` must be grid-aligned; the part of `Q` outside the box of `f` counts as
    zeros. The bisection returns the upper end of its final bracket, so the
    returned value is always feasible.
    """
    lo, side = f.index_box(Q, clip=True)
    if any(i < 0 or i + side > n for i, n in zip(lo, f.cells)):
        logger.debug("Luxemburg norm on %s: clipped to the box of %s cells, outside counts as zero", Q, f.cells)
    sl = _clipped(lo, side, f.cells)
    if sl is None:
        return 0.0
    vals = f.values[sl].ravel()
    return float(luxemburg_rows(vals[None, :], phi, total=side ** f.dim, rtol=rtol)[0])


# ---------- maximal operators ----------

def lattice_reduce(values, f:GridFunction, lattice:DyadicLattice, reducer):
    """
    Sup over the generations of `lattice` of a per-member reduction.

    ``reducer(rows, total)`` receives the in-box cell values of members, one
    row per member, and the member's cell count `total` (cells outside the
    box are zeros); it returns one number per row. The result maps every cell
    to the largest number among the members containing it.
    """
    arr = np.asarray(values, dtype=float)
    shape, nd = arr.shape, arr.ndim
    out = np.full(shape, -np.inf)
    g_min, g_max = lattice.levels
    for k in range(g_min, g_max + 1):
        s = nearest_integer(lattice.side(k) / f.h)
        if s is None or s < 1:
            raise AlignmentError(f"generation {k} of {lattice!r} is not made of whole cells of {f.h}")
        first = lattice.containing(f.origin, k)
        lead = [nearest_integer((o - a) / f.h) for o, a in zip(f.origin, first.anchor)]
        if s <= max(shape):
            padded = np.pad(arr, [(b, (-(b + n)) % s) for b, n in zip(lead, shape)])
            blocks = block_view(padded, s)
            vals = np.asarray(reducer(blocks.reshape(-1, s ** nd), s ** nd), dtype=float)
            full = expand_blocks(vals.reshape(blocks.shape[:-1]), s)
            level = full[tuple(slice(b, b + n) for b, n in zip(lead, shape))]
        else:
            # at most two members per axis meet the box
            level = np.empty(shape)
            ids = [(b + np.arange(n)) // s for b, n in zip(lead, shape)]
            for combo in product(*[np.unique(i) for i in ids]):
                index = np.ix_(*[np.flatnonzero(i == c) for i, c in zip(ids, combo)])
                level[index] = float(np.asarray(reducer(arr[index].reshape(1, -1), s ** nd))[0])
        out = np.maximum(out, level)
    return out


def _window_norms(vals, side:int, phi:YoungFunction):
    if phi.power is not None:
        r, c = phi.power
        sums = box_sums(vals ** r, side)
        return (c * sums / side ** vals.ndim) ** (1.0 / r)
    blocks, grid_shape = window_blocks(vals, side)
    return luxemburg_rows(blocks, phi).reshape(grid_shape)


def orlicz_maximal(f:GridFunction, phi:YoungFunction, cubes="all"):
    """
    The Orlicz maximal function ``sup_{Q ∋ x} ||f||_{phi,Q}``.

    Parameters
    ----------
    cubes : "all" or DyadicLattice
        ``"all"``: every grid-aligned cube inside the box of `f` (pad `f`
        first to reach cubes sticking out of the data). A lattice: its
        members, zero-extended beyond the box.

    Returns
    -------
    GridFunction
    """
    vals = np.abs(f.values)
    if isinstance(cubes, DyadicLattice):
        out = lattice_reduce(vals, f, cubes, lambda rows, total: luxemburg_rows(rows, phi, total=total))
    elif cubes == "all":
        out = np.zeros(f.cells)
        for s in range(1, min(f.cells) + 1):
            out = np.maximum(out, cover_max(_window_norms(vals, s, phi), s, f.cells))
    else:
        raise ParameterError(f"unknown cube set {cubes!r}")
    return f.with_values(out)


def hardy_littlewood_maximal(f:GridFunction, cubes="all"):
    """``M f``, the maximal average of ``|f|`` over the cubes containing each cell."""
    return orlicz_maximal(f, identity(), cubes)


def orlicz_level_set(f:GridFunction, phi:YoungFunction, lam:float, cubes="all"):
    """
    Mask of ``{M_phi f > lam}``.

    Uses ``||f||_{phi,Q} > lam  <=>  avg_Q phi(|f| / lam) > 1``, so no norm is
    ever computed.
    """
    if not lam > 0:
        raise ParameterError(f"level must be positive, got {lam}")
    with np.errstate(over="ignore"):
        scaled = np.asarray(phi(np.abs(f.values) / lam), dtype=float)
    if isinstance(cubes, DyadicLattice):
        hit = lattice_reduce(scaled, f, cubes, lambda rows, total: (rows.sum(axis=1) / total > 1).astype(float))
        return hit > 0.5
    if cubes != "all":
        raise ParameterError(f"unknown cube set {cubes!r}")
    out = np.zeros(f.cells, dtype=bool)
    for s in range(1, min(f.cells) + 1):
        big = box_sums(scaled, s) / s ** f.dim > 1
        if big.any():
            out |= cover_any(big, s, f.cells)
    return out


# ---------- improper integrals over [1, inf) ----------

_GL_CACHE = {}


def _gauss(nodes:int):
    if nodes not in _GL_CACHE:
        _GL_CACHE[nodes] = np.polynomial.legendre.leggauss(nodes)
    return _GL_CACHE[nodes]


def _panel(log_integrand, a:float, b:float, nodes:int, depth:int=0):
    x, w = _gauss(nodes)

    def gl(lo, hi):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        with np.errstate(all="ignore"):
            vals = np.exp(log_integrand(mid + half * x))
        return half * float(np.dot(w, vals))

    whole = gl(a, b)
    m = 0.5 * (a + b)
    split = gl(a, m) + gl(m, b)
    if abs(whole - split) <= 1e-13 * abs(split) or depth >= 12:
        return split
    return _panel(log_integrand, a, m, nodes, depth + 1) + _panel(log_integrand, m, b, nodes, depth + 1)


def _log_integral(log_integrand, what:str, nodes:int=32, tol:float=1e-10, switch:float=1024.0):
    """
    ``int_0^inf exp(log_integrand(L)) dL`` over panels ``[0,1], [1,2], [2,4], ...``.

    After each panel the tail is estimated geometrically from the ratio of the
    last two panels; the sum stops once that estimate is below `tol` of the
    total, and the estimate is added. Past ``L = switch`` the panels double in
    ``u = log L`` instead, where integrands decaying like a power of
    ``log log t`` have a constant panel ratio; a ratio that has settled below 1
    also closes the sum. A ratio stuck at 1 means divergence.
    """
    total, prev, stuck = 0.0, None, 0
    a, b = 0.0, 1.0
    while b <= switch:
        piece = _panel(log_integrand, a, b, nodes)
        if not math.isfinite(piece):
            raise DivergenceError(f"{what}: non-finite integrand on [{a}, {b}]", partial=total)
        total += piece
        if piece == 0.0 and total > 0:
            return total
        if prev and b >= 8:
            rho = piece / prev
            if rho < 1:
                tail = piece * rho / (1.0 - rho)
                if tail <= tol * total:
                    logger.debug("%s: converged at L = %g, tail %.3g", what, b, tail)
                    return total + tail
            stuck = stuck + 1 if rho >= 1 - 1e-3 else 0
            if stuck >= 8:
                raise DivergenceError(f"{what} diverges: panel ratio {rho:.6f} near 1", partial=total)
        prev = piece
        a, b = b, 2 * b

    def in_u(u):
        return log_integrand(np.exp(u)) + u

    a = math.log(a)
    b = 2 * a
    prev, last_rho, stuck = None, None, 0
    while b < 700:
        piece = _panel(in_u, a, b, nodes)
        if not math.isfinite(piece):
            raise DivergenceError(f"{what}: non-finite integrand on log L in [{a}, {b}]", partial=total)
        total += piece
        if piece == 0.0:
            return total
        if prev:
            rho = piece / prev
            stuck = stuck + 1 if rho >= 1 - 1e-3 else 0
            if stuck >= 2:
                raise DivergenceError(f"{what} diverges: panel ratio {rho:.6f} in log L", partial=total)
            if rho < 1:
                tail = piece * rho / (1.0 - rho)
                settled = last_rho is not None and abs(rho - last_rho) <= 1e-9
                if tail <= tol * total or settled:
                    logger.debug("%s: converged at log L = %g, tail %.3g", what, b, tail)
                    return total + tail
            last_rho = rho
        prev = piece
        a, b = b, 2 * b
    raise DivergenceError(f"{what} did not converge", partial=total)


def c_phi(phi:YoungFunction, nodes:int=32):
    """
    ``C_phi = int_1^inf phi^{-1}(t) / (t^2 log(e + t)) dt``.

    Raises DivergenceError (carrying the partial sum) when the tail does not shrink.
    """
    return _log_integral(
        lambda L: phi.inverse_log_excess(L) - np.log(np.logaddexp(1.0, L)),
        f"C_phi of {phi.key}", nodes=nodes,
    )


def k_phi(phi:YoungFunction, nodes:int=32):
    """``K_phi``: the integrand of `c_phi` times ``log log(e^2 + t)``."""
    return _log_integral(
        lambda L: phi.inverse_log_excess(L) - np.log(np.logaddexp(1.0, L)) + np.log(np.log(np.logaddexp(2.0, L))),
        f"K_phi of {phi.key}", nodes=nodes,
    )


def inverse_tail_integral(phi:YoungFunction, nodes:int=32):
    """``int_1^inf phi^{-1}(t) / t^2 dt``."""
    return _log_integral(lambda L: phi.inverse_log_excess(L), f"inverse tail of {phi.key}", nodes=nodes)


def composed_constant_check(phi:YoungFunction, ceiling:float=math.inf, nodes:int=32):
    """
    Compare ``int_1^inf phi^{-1}(Phi^{-1}(t)) / t^2 dt`` with ``C_phi``.

    The composition identity ``(Phi o phi)^{-1} = phi^{-1} o Phi^{-1}`` is
    checked at t = 1, 10, 100 and its largest relative error is noted.
    """
    Phi = phi_llogl()
    composed = compose(Phi, phi)
    value = _log_integral(
        lambda L: composed.inverse_log_excess(L), f"composed integral of {phi.key}", nodes=nodes
    )
    C = c_phi(phi, nodes=nodes)
    t = np.array([1.0, 10.0, 100.0])
    direct = phi.inverse(Phi.inverse(t))
    via = np.exp(composed.log_inverse(np.log(t)))
    err = float(np.max(np.abs(direct - via) / np.abs(direct)))
    return CheckReport.build(
        "composed_constant", {"phi": phi.key, "nodes": nodes}, [value], [C],
        labels=[phi.key], ceiling=ceiling,
        notes={"integral": value, "c_phi": C, "composition_error": err},
    )


# ---------- Hölder type inequalities ----------

def _as_cubes(Q):
    return [Q] if isinstance(Q, Cube) else list(Q)


def generalized_holder(f:GridFunction, g:GridFunction, Q, A:YoungFunction, B:YoungFunction, C:YoungFunction, grid=None):
    """
    ``||f g||_{C,Q} <= 2 ||f||_{A,Q} ||g||_{B,Q}`` on one cube or a list of cubes.

    Raises
    ------
    HypothesisError
        When ``A^{-1} B^{-1} <= C^{-1}`` fails on the log grid or C fails the
        convexity spot check; nothing is evaluated then.
    """
    t = log_grid(1e-3, 1e6, 200) if grid is None else np.asarray(grid, dtype=float)
    L = np.log(t)
    gap = A.log_inverse(L) + B.log_inverse(L) - C.log_inverse(L)
    if np.any(gap > 1e-9):
        worst = float(t[np.argmax(gap)])
        raise HypothesisError(f"A^-1 B^-1 <= C^-1 fails at t={worst} for A={A.key}, B={B.key}, C={C.key}")
    if not C.is_young():
        raise HypothesisError(f"{C.key} fails the convexity spot check")
    fg = f * g
    lhs, rhs, labels = [], [], []
    for cube in _as_cubes(Q):
        lhs.append(luxemburg_norm(fg, cube, C))
        rhs.append(2.0 * luxemburg_norm(f, cube, A) * luxemburg_norm(g, cube, B))
        labels.append(str(cube))
    inputs = {"f": f.to_dict(), "g": g.to_dict(), "A": A.key, "B": B.key, "C": C.key, "cubes": labels}
    return CheckReport.build("holder", inputs, lhs, rhs, labels=labels, ceiling=1.0, slack=LITERAL_SLACK)


def young_holder(f:GridFunction, g:GridFunction, Q, phi:YoungFunction, phi_bar:YoungFunction=None):
    """``avg_Q |f g| <= 2 ||f||_{phi,Q} ||g||_{phi_bar,Q}``."""
    phi_bar = complementary(phi) if phi_bar is None else phi_bar
    fg = abs(f * g)
    lhs, rhs, labels = [], [], []
    for cube in _as_cubes(Q):
        lhs.append(luxemburg_norm(fg, cube, identity()))
        rhs.append(2.0 * luxemburg_norm(f, cube, phi) * luxemburg_norm(g, cube, phi_bar))
        labels.append(str(cube))
    inputs = {"f": f.to_dict(), "g": g.to_dict(), "phi": phi.key, "cubes": labels}
    return CheckReport.build("young_holder", inputs, lhs, rhs, labels=labels, ceiling=1.0, slack=LITERAL_SLACK)


def submultiplicativity_check(Phi:YoungFunction=None, count:int=200, top:float=1e3):
    """``Phi(ab) <= 2 Phi(a) Phi(b)`` on a ``count x count`` grid of [0, top]^2 (zero included)."""
    Phi = phi_llogl() if Phi is None else Phi
    axis = np.concatenate(([0.0], log_grid(1e-3, top, count - 1)))
    a, b = np.meshgrid(axis, axis, indexing="ij")
    lhs = np.asarray(Phi(a * b)).ravel()
    rhs = (2.0 * np.asarray(Phi(a)) * np.asarray(Phi(b))).ravel()
    ratios = np.where(lhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), 0.0)
    worst = int(np.argmax(ratios))
    # only the worst pair is stored
    return CheckReport.build(
        "submultiplicativity", {"Phi": Phi.key, "count": count, "top": top},
        [lhs[worst]], [rhs[worst]], labels=[f"a={a.ravel()[worst]!r},b={b.ravel()[worst]!r}"],
        ceiling=1.0, slack=LITERAL_SLACK, notes={"pairs": int(lhs.size)},
    )


def luxemburg_fact_check(instances, tol:float=1e-8):
    """
    ``||f||_{phi,Q} <= 1  <=>  avg_Q phi(|f|) <= 1`` on ``(f, Q, phi)`` triples.

    Each sample is 1 for a violation beyond `tol` and 0 otherwise; the
    ceiling is 0.
    """
    lhs, labels, keys = [], [], []
    for i, (f, Q, phi) in enumerate(instances):
        norm = luxemburg_norm(f, Q, phi)
        lo, side = f.index_box(Q, clip=True)
        sl = _clipped(lo, side, f.cells)
        avg = 0.0 if sl is None else float(np.sum(phi(np.abs(f.values[sl]))) / side ** f.dim)
        bad = (norm <= 1 - tol and avg > 1 + tol) or (norm > 1 + tol and avg <= 1 - tol)
        lhs.append(1.0 if bad else 0.0)
        labels.append(f"{i}:{phi.key}")
        keys.append([f.to_dict(), Q.to_dict(), phi.key])
    return CheckReport.build("fact", keys, lhs, [1.0] * len(lhs), labels=labels, ceiling=0.0)
