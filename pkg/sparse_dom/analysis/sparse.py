# Sparse and Carleson families of lattice cubes
#
# Created On: Oct 19, 2026
#

from dataclasses import dataclass, field
from pathlib import Path
import json
import logging
import math

import numpy as np

from .errors import AlignmentError, ContractError, DataError, ParameterError, StructuralError
from .grid import Cube, DyadicLattice
from .utils import nearest_integer, format_float

logger = logging.getLogger(__name__)

__all__ = [
    "SparseFamily",
    "SparseCertificate",
    "LayerDecomposition",
    "carleson_constant",
    "verify_sparse",
    "certify_sparse",
    "split_family",
    "augment",
    "layer_decomposition",
]

# Rows of the containment matrix built at once
_CHUNK = 256


class SparseFamily:
    """
    A finite family of cubes of one lattice (or of a union of shifted lattices).

    Cubes are kept sorted by ``(side, anchor)`` and measured in cells of
    edge `cell` (the common atom of the lattices unless given), so that every
    measure comparison is integer arithmetic.

    Parameters
    ----------
    lattice : DyadicLattice or sequence of DyadicLattice
    cubes : iterable of Cube
    witnesses : dict, optional
        Cube -> boolean mask of shape ``(side_in_cells,) * dim`` marking E_Q.
    cell : float, optional
    """

    def __init__(self, lattice, cubes, witnesses:dict=None, cell:float=None):
        lattices = tuple(lattice) if isinstance(lattice, (list, tuple)) else (lattice,)
        if not lattices or not all(isinstance(L, DyadicLattice) for L in lattices):
            raise TypeError("SparseFamily needs at least one DyadicLattice")
        self._lattices = lattices
        self._cell = float(cell) if cell is not None else lattices[0].atom
        self._origin = lattices[0].origin
        self._dim = lattices[0].dim
        unique = sorted(set(cubes), key=Cube.sort_key)
        for Q in unique:
            if not any(L.contains(Q) for L in lattices):
                raise ParameterError(f"{Q} is not a member of the declared lattice")
        self._cubes = tuple(unique)
        self._index = {Q: i for i, Q in enumerate(self._cubes)}
        lo = np.zeros((len(unique), self._dim), dtype=np.int64)
        side = np.zeros(len(unique), dtype=np.int64)
        for i, Q in enumerate(unique):
            lo[i], side[i] = self._to_cells(Q)
        self._lo, self._side = lo, side
        self._witnesses = {}
        if witnesses:
            for Q, mask in witnesses.items():
                if Q not in self._index:
                    raise ParameterError(f"witness given for {Q}, which is not in the family")
                mask = np.asarray(mask, dtype=bool)
                s = int(self._side[self._index[Q]])
                if mask.shape != (s,) * self._dim:
                    raise DataError(f"witness of {Q} has shape {mask.shape}, expected {(s,) * self._dim}")
                self._witnesses[Q] = mask

    def _to_cells(self, Q:Cube):
        side = nearest_integer(Q.side / self._cell)
        lo = [nearest_integer((a - o) / self._cell) for a, o in zip(Q.anchor, self._origin)]
        if side is None or any(i is None for i in lo):
            raise AlignmentError(f"{Q} is not aligned with cells of edge {self._cell}")
        return lo, side

    @property
    def lattices(self):
        return self._lattices

    @property
    def cubes(self):
        return self._cubes

    @property
    def cell(self):
        return self._cell

    @property
    def origin(self):
        return self._origin

    @property
    def dim(self):
        return self._dim

    @property
    def witnesses(self):
        return dict(self._witnesses)

    @property
    def cell_boxes(self):
        """``(lo, side)``: integer corners ``(m, dim)`` and edges ``(m,)`` in cells."""
        return self._lo, self._side

    def cell_box(self, Q:Cube):
        i = self._index[Q]
        return tuple(int(v) for v in self._lo[i]), int(self._side[i])

    def cells_of(self, Q:Cube):
        """Number of cells of `Q`."""
        return int(self._side[self._index[Q]]) ** self._dim

    def __len__(self):
        return len(self._cubes)

    def __iter__(self):
        return iter(self._cubes)

    def __contains__(self, Q):
        return Q in self._index

    def __repr__(self):
        return f"SparseFamily({len(self)} cubes, {len(self._lattices)} lattice(s))"

    def with_cubes(self, cubes, witnesses=None):
        return SparseFamily(self._lattices, cubes, witnesses=witnesses, cell=self._cell)

    def with_witnesses(self, witnesses:dict):
        return SparseFamily(self._lattices, self._cubes, witnesses=witnesses, cell=self._cell)

    def containment_rows(self, rows):
        """Boolean matrix ``C[r, j]``: cube j is contained in cube ``rows[r]``."""
        lo, side = self._lo, self._side
        hi = lo + side[:, None]
        rlo, rhi = lo[rows], hi[rows]
        inside = np.all(lo[None, :, :] >= rlo[:, None, :], axis=2)
        inside &= np.all(hi[None, :, :] <= rhi[:, None, :], axis=2)
        return inside

    def depths(self):
        """Number of strict ancestors of every cube inside the family."""
        m = len(self)
        counts = np.zeros(m, dtype=np.int64)
        for start in range(0, m, _CHUNK):
            rows = np.arange(start, min(start + _CHUNK, m))
            counts += self.containment_rows(rows).sum(axis=0)
        return counts - 1

    def coverage(self):
        """Frame corner, and the number of family cubes covering each cell of the frame."""
        lo0 = self._lo.min(axis=0)
        hi0 = (self._lo + self._side[:, None]).max(axis=0)
        cov = np.zeros(tuple(int(v) for v in hi0 - lo0), dtype=np.int64)
        for i in range(len(self)):
            cov[self._frame_slices(i, lo0)] += 1
        return lo0, cov

    def _frame_slices(self, i:int, lo0):
        return tuple(
            slice(int(a - b), int(a - b + self._side[i])) for a, b in zip(self._lo[i], lo0)
        )

    # ---------- serialization ----------

    def to_dict(self):
        witnesses = {}
        for Q, mask in self._witnesses.items():
            witnesses[str(self._index[Q])] = np.flatnonzero(mask.ravel()).tolist()
        return {
            "lattices": [L.describe() for L in self._lattices],
            "cell": self._cell,
            "cubes": [Q.to_dict() for Q in self._cubes],
            "witnesses": witnesses,
        }

    @classmethod
    def from_dict(cls, data:dict):
        try:
            lattices = [DyadicLattice.from_description(d) for d in data["lattices"]]
            cubes = [Cube.from_dict(c) for c in data["cubes"]]
            fam = cls(lattices, cubes, cell=data.get("cell"))
        except (KeyError, TypeError) as e:
            raise DataError(f"malformed family record: {e}")
        wit = {}
        for key, flat in data.get("witnesses", {}).items():
            Q = fam.cubes[int(key)]
            s = fam.cell_box(Q)[1]
            mask = np.zeros(s ** fam.dim, dtype=bool)
            mask[np.asarray(flat, dtype=np.int64)] = True
            wit[Q] = mask.reshape((s,) * fam.dim)
        return fam.with_witnesses(wit) if wit else fam

    def to_text(self):
        lines = [
            "# sparse_dom sparse family",
            "lattices " + json.dumps([L.describe() for L in self._lattices], sort_keys=True),
            f"cell {format_float(self._cell)}",
        ]
        for Q in self._cubes:
            lines.append("cube " + " ".join(format_float(a) for a in Q.anchor) + " " + format_float(Q.side))
        for Q, mask in self._witnesses.items():
            flat = np.flatnonzero(mask.ravel())
            lines.append(f"witness {self._index[Q]} " + " ".join(str(v) for v in flat))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text:str):
        record = {"cubes": [], "witnesses": {}}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, rest = line.partition(" ")
            try:
                if key == "lattices":
                    record["lattices"] = json.loads(rest)
                elif key == "cell":
                    record["cell"] = float(rest)
                elif key == "cube":
                    nums = [float(tok) for tok in rest.split()]
                    record["cubes"].append({"anchor": nums[:-1], "side": nums[-1]})
                elif key == "witness":
                    toks = rest.split()
                    record["witnesses"][toks[0]] = [int(t) for t in toks[1:]]
                else:
                    raise DataError(f"line {lineno}: unknown record '{key}'")
            except ValueError as e:
                raise DataError(f"line {lineno}: {e}")
        if "lattices" not in record:
            raise DataError("family text has no 'lattices' line")
        return cls.from_dict(record)

    def save(self, path:Path):
        path = Path(path)
        if path.suffix == ".json":
            path.write_text(json.dumps(self.to_dict(), sort_keys=True))
        else:
            path.write_text(self.to_text())
        return path

    @classmethod
    def load(cls, path:Path):
        path = Path(path)
        if not path.exists():
            raise DataError(f"no such family file: {path}")
        if path.suffix == ".json":
            return cls.from_dict(json.loads(path.read_text()))
        return cls.from_text(path.read_text())


@dataclass
class SparseCertificate:
    """
    Outcome of a sparseness verification.

    `method` is ``"witness"`` when disjoint sets E_Q were exhibited and
    ``"carleson"`` when only the Carleson bound ``Λ <= 1/η`` certified the
    density.
    """

    success: bool
    eta: float
    carleson: float
    worst_ratio: float
    worst_cube: Cube = None
    witnesses: dict = field(default_factory=dict)
    method: str = "witness"

    def to_dict(self):
        return {
            "success": self.success,
            "eta": self.eta,
            "carleson": self.carleson,
            "worst_ratio": self.worst_ratio,
            "worst_cube": None if self.worst_cube is None else self.worst_cube.to_dict(),
            "method": self.method,
        }


def carleson_constant(S:SparseFamily):
    """
    Returns ``max over Q in S of (sum of |P| for P in S, P ⊆ Q) / |Q|``.

    The empty family has constant 0.
    """
    m = len(S)
    if m == 0:
        return 0.0
    lo, side = S.cell_boxes
    vol = side.astype(np.int64) ** S.dim
    best = 0.0
    for start in range(0, m, _CHUNK):
        rows = np.arange(start, min(start + _CHUNK, m))
        sums = S.containment_rows(rows).astype(np.int64) @ vol
        best = max(best, float(np.max(sums / vol[rows])))
    return best


def verify_sparse(S:SparseFamily, eta:float):
    """
    Build disjoint witness sets E_Q with ``|E_Q| >= eta |Q|``.

    Cubes are processed from the smallest to the largest. Each takes
    ``ceil(eta |Q|)`` of its still unclaimed cells, preferring the cells
    covered by the fewest cubes of the family, then the lowest index.

    Returns
    -------
    SparseCertificate
        With `success` False when some cube finds too few unclaimed cells;
        `worst_ratio` is then the smallest ``free/|Q|`` met.

    Raises
    ------
    ParameterError
        If `eta` is not in (0, 1].
    StructuralError
        If a successful run contradicts ``carleson <= 1/eta``.
    """
    if not 0 < eta <= 1:
        raise ParameterError(f"eta must lie in (0, 1], got {eta}")
    carleson = carleson_constant(S)
    if len(S) == 0:
        return SparseCertificate(True, eta, carleson, 1.0)
    lo0, cov = S.coverage()
    claimed = np.zeros(cov.shape, dtype=bool)
    witnesses = {}
    ok = True
    worst, worst_cube = math.inf, None
    for i, Q in enumerate(S.cubes):
        sl = S._frame_slices(i, lo0)
        vol = S.cells_of(Q)
        need = math.ceil(eta * vol - 1e-9)
        free = ~claimed[sl]
        n_free = int(free.sum())
        if n_free < need:
            ok = False
            ratio = n_free / vol
            if ratio < worst:
                worst, worst_cube = ratio, Q
            logger.debug("cube %s: %d free cells, %d needed", Q, n_free, need)
            continue
        cand = np.flatnonzero(free.ravel())
        order = np.lexsort((cand, cov[sl].ravel()[cand]))
        chosen = cand[order[:need]]
        mask = np.zeros(vol, dtype=bool)
        mask[chosen] = True
        mask = mask.reshape(free.shape)
        claimed[sl] |= mask
        witnesses[Q] = mask
        if need / vol < worst:
            worst, worst_cube = need / vol, Q
    if ok and carleson > 1.0 / eta + 1e-9:
        raise StructuralError(
            f"witnesses certify eta={eta} but the Carleson constant is {carleson}", offender=S
        )
    return SparseCertificate(ok, eta, carleson, worst, worst_cube, witnesses if ok else {}, "witness")


def certify_sparse(S:SparseFamily, eta:float, what:str="family"):
    """
    Certify `eta`-sparseness by witnesses, falling back to the Carleson bound.

    Raises StructuralError carrying `S` when neither certifies.
    """
    cert = verify_sparse(S, eta)
    if cert.success:
        return cert
    if cert.carleson <= 1.0 / eta + 1e-12:
        logger.info("%s certified %.6g-sparse through its Carleson constant %.6g", what, eta, cert.carleson)
        cert.success, cert.method = True, "carleson"
        return cert
    raise StructuralError(
        f"{what} is not certified {eta:.6g}-sparse (Carleson constant {cert.carleson:.6g}, "
        f"worst witness ratio {cert.worst_ratio:.6g} at {cert.worst_cube})",
        offender=S,
    )


def split_family(S:SparseFamily, eta:float, m:int):
    """
    Split `S` into `m` families by nesting depth modulo `m`.

    Every part is verified at ``eta' = m / (m + 1/eta - 1)``.

    Returns
    -------
    list of SparseFamily
        The parts, each carrying its witnesses.

    Raises
    ------
    ParameterError
        If ``m < 2`` or `eta` is out of range.
    StructuralError
        If `S` is not `eta`-sparse or a part fails its target density.
    """
    if int(m) != m or m < 2:
        raise ParameterError(f"m must be an integer >= 2, got {m}")
    if not 0 < eta <= 1:
        raise ParameterError(f"eta must lie in (0, 1], got {eta}")
    certify_sparse(S, eta, what="input family")
    target = m / (m + 1.0 / eta - 1.0)
    depths = S.depths()
    parts = []
    for r in range(m):
        part = S.with_cubes([Q for Q, d in zip(S.cubes, depths) if d % m == r])
        cert = verify_sparse(part, target)
        if not cert.success:
            raise StructuralError(
                f"part {r} of the split is not {target:.6g}-sparse (worst ratio {cert.worst_ratio:.6g})",
                offender=part,
            )
        parts.append(part.with_witnesses(cert.witnesses))
    logger.info("split %d cubes into %d parts at eta'=%.6g", len(S), m, target)
    return parts


def augment(S:SparseFamily, F:dict, eta0:float, eta:float):
    """
    The augmented family: the union over Q in S of F(Q) with the cubes lying in
    a strictly smaller member of S removed.

    Parameters
    ----------
    S : SparseFamily
        An `eta0`-sparse family.
    F : dict
        Q -> SparseFamily (or iterable of cubes) inside Q that contains Q.

    Returns
    -------
    (SparseFamily, SparseCertificate)
        The certificate is at density ``eta * eta0 / (1 + eta0)``.
    """
    members = list(S.cubes)
    kept = []
    for Q in members:
        if Q not in F:
            raise ContractError(f"no family given for {Q}")
        FQ = list(F[Q])
        if Q not in FQ:
            raise ContractError(f"the family attached to {Q} does not contain it")
        inner = [R for R in members if R != Q and Q.contains(R)]
        for P in FQ:
            if not Q.contains(P):
                raise ContractError(f"{P} in the family of {Q} is not inside it")
            if any(R.contains(P) for R in inner):
                continue
            kept.append(P)
    out = S.with_cubes(kept)
    target = eta * eta0 / (1.0 + eta0)
    cert = certify_sparse(out, target, what="augmented family")
    logger.debug("augmented %d cubes to %d", len(S), len(out))
    return out.with_witnesses(cert.witnesses), cert


@dataclass
class LayerDecomposition:
    """
    Layers of a family: layer 0 holds the maximal cubes, layer v+1 the maximal
    cubes of what is left.

    Attributes
    ----------
    layers : list of list of Cube
    layer_of : dict
        Cube -> layer index.
    e_sets : dict
        Cube -> mask of ``Q`` minus the next-layer cubes inside it.
    a_sets : dict
        Cube -> mask of the union of the layer ``v + 2**k`` cubes inside it.
    k : int
    """

    family: SparseFamily
    layers: list
    layer_of: dict
    e_sets: dict
    a_sets: dict
    k: int

    def check_identity(self):
        """
        True when ``Q \\ A_k(Q)`` equals the union of E_{Q'} over the cubes Q' ⊆ Q
        of the layers ``v, ..., v + 2**k - 1``, cell by cell, for every Q.
        """
        S = self.family
        span = 2 ** self.k
        for Q in S.cubes:
            (lo, side), v = S.cell_box(Q), self.layer_of[Q]
            union = np.zeros((side,) * S.dim, dtype=bool)
            for l in range(v, v + span):
                if l >= len(self.layers):
                    break
                for P in self.layers[l]:
                    if Q.contains(P):
                        plo, pside = S.cell_box(P)
                        sl = tuple(slice(a - b, a - b + pside) for a, b in zip(plo, lo))
                        union[sl] |= self.e_sets[P]
            if not np.array_equal(union, ~self.a_sets[Q]):
                return False
        return True


def layer_decomposition(F:SparseFamily, k:int=0):
    """
    Split a family into layers and attach E_Q and A_k(Q) to every cube.

    Returns
    -------
    LayerDecomposition
    """
    m = len(F)
    if m == 0:
        return LayerDecomposition(F, [], {}, {}, {}, k)
    C = F.containment_rows(np.arange(m))
    np.fill_diagonal(C, False)
    remaining = np.ones(m, dtype=bool)
    layer = np.full(m, -1, dtype=np.int64)
    v = 0
    while remaining.any():
        # maximal: not strictly inside another remaining cube
        covered = C[remaining].any(axis=0)
        top = remaining & ~covered
        layer[top] = v
        remaining &= ~top
        v += 1
    layers = [[F.cubes[i] for i in np.flatnonzero(layer == l)] for l in range(v)]
    layer_of = {Q: int(layer[i]) for i, Q in enumerate(F.cubes)}

    def union_of(i, target_layer):
        lo, side = F.cell_box(F.cubes[i])
        mask = np.zeros((side,) * F.dim, dtype=bool)
        for j in np.flatnonzero(C[i] & (layer == target_layer)):
            plo, pside = F.cell_box(F.cubes[j])
            mask[tuple(slice(a - b, a - b + pside) for a, b in zip(plo, lo))] = True
        return mask

    e_sets, a_sets = {}, {}
    for i, Q in enumerate(F.cubes):
        e_sets[Q] = ~union_of(i, layer[i] + 1)
        a_sets[Q] = union_of(i, layer[i] + 2 ** k)
    logger.debug("layer decomposition: %d layers for %d cubes", v, m)
    return LayerDecomposition(F, layers, layer_of, e_sets, a_sets, k)
