# Some utility functions shared by the analysis modules
#
# Created On: Oct 19, 2026
#

import hashlib
import json
import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

ALIGN_TOL = 1e-9


def nearest_integer(x:float, tol:float=ALIGN_TOL):
    """
    Round `x` to the nearest integer if it is one up to `tol`.

    Returns
    -------
    int or None
        The integer, or None when `x` is not (numerically) integral.

    Examples
    --------
    >>> nearest_integer(2.9999999999)
    3
    >>> nearest_integer(2.5) is None
    True
    """
    r = round(x)
    if abs(x - r) <= tol * max(1.0, abs(x)):
        return int(r)
    return None


def box_sums(arr, side:int):
    """
    Sums of `arr` over every window of edge `side` lying inside the array.

    Parameters
    ----------
    arr : ndarray
        One or two dimensional array.
    side : int
        Window edge in cells.

    Returns
    -------
    ndarray
        Array of shape ``(N_i - side + 1, ...)``; entry ``i`` is the sum over
        the window whose lowest corner is ``i``.
    """
    a = np.asarray(arr, dtype=float)
    nd = a.ndim
    P = np.pad(a, [(1, 0)] * nd)
    for ax in range(nd):
        P = np.cumsum(P, axis=ax)
    S = P
    for ax in range(nd):
        hi = [slice(None)] * nd
        lo = [slice(None)] * nd
        hi[ax] = slice(side, None)
        lo[ax] = slice(None, S.shape[ax] - side)
        S = S[tuple(hi)] - S[tuple(lo)]
    return S


def window_blocks(arr, side:int):
    """
    Every window of edge `side` of `arr`, flattened.

    Returns
    -------
    blocks : ndarray, shape (m, side**ndim)
    grid_shape : tuple
        Shape of the window-position array, ``m == prod(grid_shape)``.
    """
    a = np.asarray(arr, dtype=float)
    nd = a.ndim
    view = sliding_window_view(a, (side,) * nd)
    grid_shape = view.shape[:nd]
    return view.reshape(-1, side ** nd), grid_shape


def cover_max(window_values, side:int, shape):
    """
    Push window values back onto cells.

    Entry ``x`` of the result is the largest value among the windows of edge
    `side` that contain the cell ``x``; `window_values` is indexed by the
    lowest corner of each window, as returned by `box_sums`.
    """
    v = np.asarray(window_values, dtype=float)
    nd = v.ndim
    full = np.full(tuple(n + side - 1 for n in shape), -np.inf)
    full[tuple(slice(side - 1, side - 1 + m) for m in v.shape)] = v
    view = sliding_window_view(full, (side,) * nd)
    return view.max(axis=tuple(range(nd, 2 * nd)))


def cover_any(window_mask, side:int, shape):
    """Boolean version of `cover_max`: cells lying in at least one marked window."""
    m = np.asarray(window_mask, dtype=float)
    full = np.zeros(tuple(n + side - 1 for n in shape))
    full[tuple(slice(side - 1, side - 1 + k) for k in m.shape)] = m
    return box_sums(full, side) > 0.5


def block_view(arr, side:int):
    """
    Cut an array whose extents are multiples of `side` into aligned blocks.

    Returns an array of shape ``(N_0/side, ..., side**ndim)``.
    """
    a = np.asarray(arr)
    if a.ndim == 1:
        return a.reshape(-1, side)
    n0, n1 = a.shape
    return (
        a.reshape(n0 // side, side, n1 // side, side)
        .transpose(0, 2, 1, 3)
        .reshape(n0 // side, n1 // side, side * side)
    )


def expand_blocks(block_values, side:int):
    """Inverse of a block reduction: repeat every block value over its block."""
    out = np.asarray(block_values)
    for ax in range(out.ndim):
        out = np.repeat(out, side, axis=ax)
    return out


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def canonical_json(obj, indent=None):
    """JSON text with sorted keys; non-finite floats are written as strings."""
    return json.dumps(
        _finite_or_text(obj),
        sort_keys=True,
        indent=indent,
        default=_json_default,
        separators=(",", ":") if indent is None else (",", ": "),
    )


def _finite_or_text(obj):
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, dict):
        return {str(k): _finite_or_text(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite_or_text(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_finite_or_text(v) for v in obj.tolist()]
    return obj


def parse_float(text):
    """Inverse of the non-finite encoding used by `canonical_json` ("inf" reads back as inf)."""
    return float(text)


def digest(obj):
    """
    Returns the `sha256` digest of the canonical JSON of `obj`, truncated to 16 hex digits.
    """
    hasher = hashlib.sha256()
    hasher.update(canonical_json(obj).encode())

    # Truncating at 16 hex digits for cleanliness
    return hasher.hexdigest()[:16]


def format_float(x:float):
    """Shortest text that reads back to the same double."""
    return repr(float(x))


def log_grid(lo:float, hi:float, count:int):
    """Log-spaced grid from `lo` to `hi` inclusive."""
    return np.geomspace(lo, hi, count)
