# Piecewise constant functions on uniform grids, half-open cubes and dyadic lattices
#
# Created On: Oct 19, 2026
#

from dataclasses import dataclass
from itertools import product
from pathlib import Path
import json
import logging
import math

import numpy as np

from .errors import AlignmentError, DomainError, ParameterError, DataError
from .utils import nearest_integer, format_float, ALIGN_TOL

logger = logging.getLogger(__name__)

__all__ = [
    "Cube",
    "GridFunction",
    "DyadicLattice",
    "cube_average",
    "three_lattice_shifts",
    "covering_cube",
    "standard_lattice",
]

# Class of a shifted lattice one generation down (see DyadicLattice)
_FLIP = (2, 1, 0)


@dataclass(frozen=True)
class Cube:
    """
    A half-open cube ``prod [a_i, a_i + side)``.

    Attributes
    ----------
    anchor : tuple of float
        Lowest corner.
    side : float
        Edge length, positive.
    """

    anchor: tuple
    side: float

    def __post_init__(self):
        anchor = tuple(float(a) for a in np.atleast_1d(self.anchor))
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "side", float(self.side))
        if not self.side > 0:
            raise ParameterError(f"cube side must be positive, got {self.side}")
        if len(anchor) not in (1, 2):
            raise ParameterError(f"only dimensions 1 and 2 are supported, got {len(anchor)}")

    @property
    def dim(self):
        return len(self.anchor)

    @property
    def hi(self):
        return tuple(a + self.side for a in self.anchor)

    @property
    def volume(self):
        return self.side ** self.dim

    @property
    def center(self):
        return tuple(a + self.side / 2 for a in self.anchor)

    def dilate(self, factor:float):
        """The concentric cube with side ``factor * side`` (``dilate(3)`` is 3Q)."""
        new_side = factor * self.side
        return Cube(tuple(c - new_side / 2 for c in self.center), new_side)

    def contains(self, other:"Cube", tol:float=ALIGN_TOL):
        """True when `other` is a subset of this cube."""
        return all(
            a - tol <= b and b + other.side <= a + self.side + tol
            for a, b in zip(self.anchor, other.anchor)
        )

    def contains_point(self, x):
        return all(a <= xi < a + self.side for a, xi in zip(self.anchor, np.atleast_1d(x)))

    def sort_key(self):
        return (self.side, self.anchor)

    def to_dict(self):
        return {"anchor": list(self.anchor), "side": self.side}

    @classmethod
    def from_dict(cls, data:dict):
        return cls(tuple(data["anchor"]), data["side"])

    def __str__(self):
        sides = " x ".join(f"[{format_float(a)}, {format_float(a + self.side)})" for a in self.anchor)
        return f"Cube({sides})"


class GridFunction:
    """
    A real function on a uniform half-open grid, constant on every cell.

    Every integral is an exact finite sum: a cell of edge `h` contributes its
    sample times ``h**dim``. The function is taken to vanish outside the box.

    Parameters
    ----------
    values : array_like
        One sample per cell, shape ``(cells,)`` or ``(cells_x, cells_y)``.
    h : float
        Cell edge.
    origin : sequence of float, optional
        Lowest corner of the box; zeros by default.

    Examples
    --------
    >>> f = GridFunction([1.0, 2.0, 3.0, 4.0], h=0.25)
    >>> f.average(Cube((0.0,), 1.0))
    2.5
    """

    def __init__(self, values, h:float=1.0, origin=None):
        arr = np.array(values, dtype=float)
        if arr.ndim not in (1, 2):
            raise ParameterError(f"only dimensions 1 and 2 are supported, got {arr.ndim}")
        if arr.size == 0:
            raise DataError("a grid function needs at least one cell")
        if not np.all(np.isfinite(arr)):
            raise DataError("grid function values must be finite")
        if not h > 0:
            raise ParameterError(f"spacing h must be positive, got {h}")
        if origin is None:
            origin = (0.0,) * arr.ndim
        origin = tuple(float(o) for o in np.atleast_1d(origin))
        if len(origin) != arr.ndim:
            raise ParameterError(f"origin has {len(origin)} coordinates for a {arr.ndim}-dimensional grid")
        arr.setflags(write=False)
        self._values = arr
        self._h = float(h)
        self._origin = origin

    @classmethod
    def from_flat(cls, values, dim:int, cells, h:float=1.0, origin=None):
        """Build from a flat C-ordered sequence of ``prod(cells)`` samples."""
        cells = tuple(int(c) for c in np.atleast_1d(cells))
        if len(cells) == 1 and dim == 2:
            cells = cells * 2
        flat = np.asarray(values, dtype=float).ravel()
        if flat.size != int(np.prod(cells)):
            raise DataError(f"expected {int(np.prod(cells))} values for cells {cells}, got {flat.size}")
        return cls(flat.reshape(cells), h=h, origin=origin)

    @property
    def values(self):
        return self._values

    @property
    def dim(self):
        return self._values.ndim

    @property
    def h(self):
        return self._h

    @property
    def origin(self):
        return self._origin

    @property
    def cells(self):
        return self._values.shape

    @property
    def cell_volume(self):
        return self._h ** self.dim

    @property
    def box_hi(self):
        return tuple(o + n * self._h for o, n in zip(self._origin, self.cells))

    @property
    def box(self):
        """The box as a Cube; only defined for grids with equal cell counts per axis."""
        if len(set(self.cells)) != 1:
            raise ParameterError(f"box of a {self.cells} grid is not a cube")
        return Cube(self._origin, self.cells[0] * self._h)

    def axis_centers(self, axis:int=0):
        return self._origin[axis] + (np.arange(self.cells[axis]) + 0.5) * self._h

    def centers(self):
        """Cell midpoints, shape ``(prod(cells), dim)`` in C order."""
        axes = np.meshgrid(*[self.axis_centers(ax) for ax in range(self.dim)], indexing="ij")
        return np.stack([a.ravel() for a in axes], axis=-1)

    def same_geometry(self, other:"GridFunction"):
        return (
            self.cells == other.cells
            and self._h == other._h
            and self._origin == other._origin
        )

    def with_values(self, values):
        """A grid function with this geometry and new samples."""
        arr = np.asarray(values, dtype=float)
        if arr.shape != self.cells:
            raise DataError(f"expected values of shape {self.cells}, got {arr.shape}")
        return GridFunction(arr, h=self._h, origin=self._origin)

    def index_box(self, Q:Cube, clip:bool=False):
        """
        Cell coordinates of a grid-aligned cube.

        Returns
        -------
        lo : tuple of int
            Index of the lowest cell (may be negative when `clip` is True).
        side : int
            Edge in cells.

        Raises
        ------
        AlignmentError
            If the anchor or side of `Q` is not a multiple of h.
        DomainError
            If `Q` leaves the box and `clip` is False.
        """
        if Q.dim != self.dim:
            raise ParameterError(f"{Q} has dimension {Q.dim}, grid has {self.dim}")
        side = nearest_integer(Q.side / self._h)
        if side is None or side < 1:
            raise AlignmentError(f"side of {Q} is not a multiple of h={self._h}")
        lo = []
        for a, o in zip(Q.anchor, self._origin):
            i = nearest_integer((a - o) / self._h)
            if i is None:
                raise AlignmentError(f"anchor of {Q} is not on the grid of spacing {self._h}")
            lo.append(i)
        if not clip:
            for i, n in zip(lo, self.cells):
                if i < 0 or i + side > n:
                    raise DomainError(f"{Q} is not inside the box of the grid")
        return tuple(lo), side

    def slices(self, Q:Cube):
        lo, side = self.index_box(Q)
        return tuple(slice(i, i + side) for i in lo)

    def cube_from_index(self, lo, side:int):
        return Cube(tuple(o + i * self._h for o, i in zip(self._origin, lo)), side * self._h)

    def average(self, Q:Cube):
        """Exact mean of the function over `Q`."""
        return float(self._values[self.slices(Q)].mean())

    def integral(self, Q:Cube=None):
        if Q is None:
            return float(self._values.sum() * self.cell_volume)
        return float(self._values[self.slices(Q)].sum() * self.cell_volume)

    def zero_extended_sum(self, Q:Cube):
        """Sum of samples over the part of `Q` inside the box (zero outside)."""
        lo, side = self.index_box(Q, clip=True)
        sl = _clipped(lo, side, self.cells)
        if sl is None:
            return 0.0
        return float(self._values[sl].sum())

    def restrict(self, Q:Cube):
        """The function on the sub-grid covering `Q`."""
        return GridFunction(self._values[self.slices(Q)], h=self._h, origin=Q.anchor)

    def padded(self, k:int):
        """Add `k` zero cells on every side of the box."""
        arr = np.pad(self._values, [(k, k)] * self.dim)
        return GridFunction(arr, h=self._h, origin=tuple(o - k * self._h for o in self._origin))

    def _binary(self, other, op):
        if isinstance(other, GridFunction):
            if not self.same_geometry(other):
                raise ParameterError("grid functions live on different grids")
            return self.with_values(op(self._values, other._values))
        return self.with_values(op(self._values, float(other)))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return self.with_values(float(other) - self._values)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        return self.with_values(-self._values)

    def __abs__(self):
        return self.with_values(np.abs(self._values))

    def __repr__(self):
        return f"GridFunction(dim={self.dim}, cells={self.cells}, h={self._h}, origin={self._origin})"

    # ---------- serialization ----------

    def to_dict(self):
        return {
            "dim": self.dim,
            "origin": list(self._origin),
            "h": self._h,
            "cells": list(self.cells),
            "values": self._values.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, data:dict):
        try:
            return cls.from_flat(
                data["values"], dim=int(data["dim"]), cells=data["cells"],
                h=float(data["h"]), origin=data["origin"]
            )
        except KeyError as e:
            raise DataError(f"grid function record is missing {e}")

    def to_text(self):
        lines = [
            "# sparse_dom grid function",
            f"dim {self.dim}",
            "origin " + " ".join(format_float(o) for o in self._origin),
            f"h {format_float(self._h)}",
            "cells " + " ".join(str(c) for c in self.cells),
            "values",
        ]
        lines += [format_float(v) for v in self._values.ravel()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text:str):
        header = {}
        rows = [ln.strip() for ln in text.splitlines()]
        rows = [ln for ln in rows if ln and not ln.startswith("#")]
        try:
            start = rows.index("values")
        except ValueError:
            raise DataError("grid function text has no 'values' line")
        for ln in rows[:start]:
            key, _, rest = ln.partition(" ")
            header[key] = rest.split()
        try:
            dim = int(header["dim"][0])
            values = [float(tok) for ln in rows[start + 1:] for tok in ln.split()]
            return cls.from_flat(
                values, dim=dim, cells=[int(c) for c in header["cells"]],
                h=float(header["h"][0]), origin=[float(o) for o in header["origin"]]
            )
        except (KeyError, IndexError, ValueError) as e:
            raise DataError(f"malformed grid function header: {e}")

    def save(self, path:Path):
        path = Path(path)
        if path.suffix == ".json":
            path.write_text(json.dumps(self.to_dict()))
        else:
            path.write_text(self.to_text())
        return path

    @classmethod
    def load(cls, path:Path):
        path = Path(path)
        if not path.exists():
            raise DataError(f"no such grid function file: {path}")
        if path.suffix == ".json":
            return cls.from_dict(json.loads(path.read_text()))
        return cls.from_text(path.read_text())


def _clipped(lo, side:int, shape):
    """Slices of the index box ``[lo, lo+side)`` clipped to an array of `shape`; None if empty."""
    sl = []
    for i, n in zip(lo, shape):
        a, b = max(i, 0), min(i + side, n)
        if a >= b:
            return None
        sl.append(slice(a, b))
    return tuple(sl)


def cube_average(f:GridFunction, Q:Cube):
    """
    Returns ``(1/|Q|) * integral of f over Q``.

    Raises AlignmentError for cubes off the grid and DomainError for cubes
    leaving the box (no silent clipping).
    """
    return f.average(Q)


class DyadicLattice:
    """
    A truncated dyadic lattice in dimension 1 or 2.

    Generation `k` of the standard lattice is made of the cubes of side
    ``unit * 2**k`` anchored at ``origin + t * unit * 2**k``. A shifted
    lattice (``classes`` given) is one of the lattices made of tripled
    standard cubes: generation `k` has side ``3 * unit * 2**k`` and anchors
    ``origin + (3t + c_k - 1) * unit * 2**k`` per axis, where ``c_k`` is the
    class of the axis at even generations and its flip ``(0<->2, 1 fixed)``
    at odd generations. The flip keeps children of members inside the
    lattice.

    Parameters
    ----------
    dim : int
    origin : sequence of float, optional
    unit : float
        Side of a generation-0 standard cube.
    levels : (int, int)
        Lowest and highest generation kept.
    classes : sequence of int, optional
        One class in {0, 1, 2} per axis for a shifted lattice.
    box : (sequence, sequence), optional
        Lower and upper corner of the truncation box. Defaults to the top
        generation-`levels[1]` cube at the origin.
    """

    def __init__(self, dim:int=1, origin=None, unit:float=1.0, levels=(0, 10), classes=None, box=None):
        if dim not in (1, 2):
            raise ParameterError(f"only dimensions 1 and 2 are supported, got {dim}")
        if not unit > 0:
            raise ParameterError(f"unit must be positive, got {unit}")
        g_min, g_max = int(levels[0]), int(levels[1])
        if g_min > g_max:
            raise ParameterError(f"empty generation range {levels}")
        self._dim = dim
        self._origin = tuple(float(o) for o in (np.zeros(dim) if origin is None else np.atleast_1d(origin)))
        self._unit = float(unit)
        self._levels = (g_min, g_max)
        if classes is not None:
            classes = tuple(int(c) for c in classes)
            if len(classes) != dim or any(c not in (0, 1, 2) for c in classes):
                raise ParameterError(f"classes must be {dim} values in {{0,1,2}}, got {classes}")
        self._classes = classes
        if box is None:
            top = self._unit * 2.0 ** g_max
            box = (self._origin, tuple(o + top for o in self._origin))
        self._box = (tuple(float(x) for x in box[0]), tuple(float(x) for x in box[1]))

    @property
    def dim(self):
        return self._dim

    @property
    def origin(self):
        return self._origin

    @property
    def unit(self):
        return self._unit

    @property
    def levels(self):
        return self._levels

    @property
    def classes(self):
        return self._classes

    @property
    def shifted(self):
        return self._classes is not None

    @property
    def box(self):
        return self._box

    @property
    def atom(self):
        """Common refinement of all generations: ``unit * 2**g_min``."""
        return self._unit * 2.0 ** self._levels[0]

    def side(self, k:int):
        return (3.0 if self.shifted else 1.0) * self._unit * 2.0 ** k

    def _class_at(self, k:int, axis:int):
        c = self._classes[axis]
        return c if k % 2 == 0 else _FLIP[c]

    def _start(self, q:int, k:int, axis:int):
        """Index, in units of ``unit * 2**k``, of the member start at or below unit index `q`."""
        if not self.shifted:
            return q
        off = self._class_at(k, axis) - 1
        return 3 * ((q - off) // 3) + off

    def level_of(self, Q:Cube):
        """Generation whose side equals that of `Q`, or None."""
        base = Q.side / ((3.0 if self.shifted else 1.0) * self._unit)
        k = nearest_integer(math.log2(base))
        if k is None or not (self._levels[0] <= k <= self._levels[1]):
            return None
        return k

    def containing(self, x, k:int):
        """The generation-`k` member containing the point `x`."""
        scale = self._unit * 2.0 ** k
        anchor = []
        for axis, (xi, o) in enumerate(zip(np.atleast_1d(x), self._origin)):
            q = math.floor((xi - o) / scale + ALIGN_TOL)
            anchor.append(o + self._start(q, k, axis) * scale)
        return Cube(tuple(anchor), self.side(k))

    def contains(self, Q:Cube):
        """Membership test (generation range included, translates not bounded)."""
        if Q.dim != self._dim:
            return False
        k = self.level_of(Q)
        if k is None:
            return False
        P = self.containing(Q.center, k)
        return all(abs(a - b) <= ALIGN_TOL * max(1.0, abs(a)) for a, b in zip(P.anchor, Q.anchor))

    def in_box(self, Q:Cube, margin:float=0.0):
        lo, hi = self._box
        return all(
            l - ALIGN_TOL <= a - margin and a + Q.side + margin <= u + ALIGN_TOL
            for a, l, u in zip(Q.anchor, lo, hi)
        )

    def parent(self, Q:Cube):
        k = self.level_of(Q)
        if k is None or k + 1 > self._levels[1]:
            return None
        return self.containing(Q.center, k + 1)

    def ancestor(self, Q:Cube, k:int):
        return self.containing(Q.center, k)

    def children(self, Q:Cube):
        k = self.level_of(Q)
        if k is None or k - 1 < self._levels[0]:
            return []
        half = Q.side / 2
        return [
            Cube(tuple(a + s * half for a, s in zip(Q.anchor, corner)), half)
            for corner in product((0, 1), repeat=self._dim)
        ]

    def members(self, k:int):
        """Generation-`k` members meeting the truncation box, in lexicographic order."""
        lo, hi = self._box
        first = self.containing(lo, k)
        side = self.side(k)
        ranges = []
        for a0, u in zip(first.anchor, hi):
            count = max(0, math.ceil((u - a0) / side - ALIGN_TOL))
            ranges.append([a0 + t * side for t in range(count)])
        return [Cube(anchor, side) for anchor in product(*ranges)]

    def describe(self):
        return {
            "dim": self._dim,
            "origin": list(self._origin),
            "unit": self._unit,
            "levels": list(self._levels),
            "classes": None if self._classes is None else list(self._classes),
            "box": [list(self._box[0]), list(self._box[1])],
        }

    @classmethod
    def from_description(cls, data:dict):
        return cls(
            dim=int(data["dim"]), origin=data["origin"], unit=float(data["unit"]),
            levels=tuple(data["levels"]), classes=data.get("classes"),
            box=data.get("box")
        )

    def __eq__(self, other):
        return isinstance(other, DyadicLattice) and self.describe() == other.describe()

    def __hash__(self):
        return hash((self._dim, self._origin, self._unit, self._levels, self._classes, self._box))

    def __repr__(self):
        kind = f"shifted{self._classes}" if self.shifted else "standard"
        return f"DyadicLattice({kind}, dim={self._dim}, unit={self._unit}, levels={self._levels})"


def standard_lattice(f:GridFunction, dilation:int=9):
    """
    The standard lattice whose atoms are the cells of `f`.

    The truncation box is the concentric `dilation`-fold enlargement of the
    (cubical) box of `f`; the lattice is anchored at its lower corner so that
    the whole truncation box sits inside one top generation cube.
    """
    if dilation % 2 != 1:
        raise ParameterError(f"dilation must be odd, got {dilation}")
    n = f.cells[0]
    if len(set(f.cells)) != 1:
        raise ParameterError(f"grid {f.cells} is not a cube")
    pad = (dilation - 1) // 2 * n
    origin = tuple(o - pad * f.h for o in f.origin)
    top = math.ceil(math.log2(dilation * n))
    hi = tuple(o + dilation * n * f.h for o in origin)
    return DyadicLattice(f.dim, origin=origin, unit=f.h, levels=(0, top), box=(origin, hi))


def three_lattice_shifts(D:DyadicLattice):
    """
    The 3**n shifted lattices whose union is ``{3Q : Q in D}``.

    Every tripled member of `D` is a member of exactly one returned lattice
    at the same generation, and for each member Q and each returned lattice
    there is exactly one member R of side ``3 * side(Q)`` with ``Q ⊂ R``.
    The lattices are ordered by their class vectors, lexicographically.
    """
    if D.shifted:
        raise ParameterError("three_lattice_shifts expects a standard lattice")
    shifts = [
        DyadicLattice(D.dim, origin=D.origin, unit=D.unit, levels=D.levels, classes=c, box=D.box)
        for c in product(range(3), repeat=D.dim)
    ]
    logger.debug("built %d shifted lattices for %r", len(shifts), D)
    return shifts


def covering_cube(Q:Cube, shifts):
    """
    Returns ``(j, P)`` with ``P`` a member of ``shifts[j]``, ``Q ⊂ P`` and
    ``side(P) <= 3 side(Q)``.

    Candidates are scanned from the smallest admissible side upwards, and
    within one side by increasing `j`; at a fixed side and lattice the
    candidate is unique, so the choice is deterministic.

    Raises
    ------
    DomainError
        If `Q` is not inside the truncation box with a margin of ``3 side(Q)``,
        or no admissible generation is kept by the lattices.
    """
    if not shifts:
        raise ParameterError("no shifted lattices given")
    ref = shifts[0]
    if not ref.in_box(Q, margin=3 * Q.side):
        raise DomainError(f"{Q} is closer than 3*side to the truncation box boundary")
    base = 3.0 * ref.unit
    k_lo = math.ceil(math.log2(Q.side / base) - ALIGN_TOL)
    k_hi = math.floor(math.log2(Q.side / ref.unit) + ALIGN_TOL)
    g_min, g_max = ref.levels
    for k in range(max(k_lo, g_min), min(k_hi, g_max) + 1):
        for j, L in enumerate(shifts):
            P = L.containing(Q.anchor, k)
            if P.contains(Q):
                return j, P
    raise DomainError(f"no covering cube for {Q} within generations {ref.levels}")
