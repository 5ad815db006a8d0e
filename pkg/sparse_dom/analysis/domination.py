# Constructive sparse domination of T and [b, T], sparse operators and the oscillation family
#
# Created On: Oct 19, 2026
#

from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
import logging
import math

import numpy as np

from .czo import _worst, apply_T, commutator, dyadic_local_maximal, local_grand_maximal
from .errors import HypothesisError, ParameterError, ResolutionError, StructuralError
from .grid import Cube, DyadicLattice, GridFunction, _clipped, covering_cube, standard_lattice, three_lattice_shifts
from .orlicz import YoungFunction, complementary, luxemburg_norm, orlicz_maximal, phi_llogl
from .reports import CheckReport
from .sparse import SparseFamily, augment, certify_sparse, layer_decomposition, verify_sparse
from .utils import block_view, canonical_json, log_grid
from .weights import bmo_norm, weighted_bmo_norm
from ..scripts.constants import LITERAL_SLACK, SCHEMA_VERSION

logger = logging.getLogger(__name__)

__all__ = [
    "cz_decomposition",
    "sparse_apply",
    "NodeDiagnostics",
    "DominationResult",
    "build_T_domination",
    "build_commutator_domination",
    "OscillationFamily",
    "build_oscillation_family",
    "norm_window_family",
    "key_lemma_check",
    "TBFDecomposition",
    "tbf_decomposition",
    "adjoint_sparse_check",
    "bloom_step_check",
    "jn_alpha",
]

VARIANTS = ("plain", "llogl", "comm", "comm_star")


def cz_decomposition(mask, height:float):
    """
    Maximal dyadic subcubes of the cube carried by `mask` on which the
    density of `mask` exceeds `height`.

    The cube is halved while its edge (in cells) is even.

    Returns
    -------
    list of (tuple, int)
        Lowest cell and edge of every selected cube, ordered by edge (largest
        first) then position.
    """
    E = np.asarray(mask, dtype=bool)
    side = E.shape[0]
    taken = np.zeros(E.shape, dtype=bool)
    chosen = []
    s = side
    while True:
        dens = block_view(E.astype(float), s).mean(axis=-1)
        free = ~block_view(taken, s).any(axis=-1)
        for idx in zip(*np.nonzero((dens > height) & free)):
            lo = tuple(int(i) * s for i in idx)
            chosen.append((lo, s))
            taken[tuple(slice(a, a + s) for a in lo)] = True
        if s % 2:
            break
        s //= 2
    return chosen


# ---------- sparse operators ----------

def sparse_apply(S:SparseFamily, f:GridFunction, variant:str="plain", b:GridFunction=None):
    """
    Pointwise sums over the cubes R of `S`:

    - ``plain``: ``f_R``
    - ``llogl``: ``||f||_{L log L, R}``
    - ``comm``: ``|b(x) - b_R| f_R``
    - ``comm_star``: ``avg_R(|b - b_R| f)``

    each times ``chi_R``, evaluated on the grid of `f`. Cubes may leave the
    box; `f` and `b` vanish outside it.
    """
    if variant not in VARIANTS:
        raise ParameterError(f"unknown sparse operator '{variant}'")
    if variant in ("comm", "comm_star"):
        if b is None:
            raise ParameterError(f"the '{variant}' operator needs b")
        if not b.same_geometry(f):
            raise ParameterError("b and f live on different grids")
    Phi = phi_llogl() if variant == "llogl" else None
    out = np.zeros(f.cells)
    for R in S.cubes:
        lo, side = f.index_box(R, clip=True)
        sl = _clipped(lo, side, f.cells)
        if sl is None:
            continue
        cells = side ** f.dim
        if variant == "plain":
            out[sl] += f.values[sl].sum() / cells
        elif variant == "llogl":
            out[sl] += luxemburg_norm(f, R, Phi)
        else:
            dev = np.abs(b.values[sl] - b.values[sl].sum() / cells)
            if variant == "comm":
                out[sl] += dev * (f.values[sl].sum() / cells)
            else:
                out[sl] += (dev * f.values[sl]).sum() / cells
    return f.with_values(out)


# ---------- the domination recursion ----------

@dataclass
class NodeDiagnostics:
    """One recursion node: realized thresholds and their multiples of the governing averages."""

    cube: Cube
    depth: int
    thresholds: dict
    alphas: dict
    e_fraction: float
    children: int

    def to_dict(self):
        return {
            "cube": self.cube.to_dict(),
            "depth": self.depth,
            "thresholds": self.thresholds,
            "alphas": self.alphas,
            "e_fraction": self.e_fraction,
            "children": self.children,
        }


@dataclass
class DominationResult:
    """
    Families realizing the pointwise domination, with the diagnostics of the
    recursion and both sides evaluated on the window.

    Attributes
    ----------
    kind : str
        ``"T"`` or ``"commutator"``.
    families : list of SparseFamily
        One per shifted lattice.
    certificates : list of SparseCertificate
    local_family : SparseFamily
        The recursion nodes, a 1/2-sparse family of the standard lattice.
    cube_data : list of list of dict
        Per family and cube: ``f_avg`` and, for commutators, ``osc_avg``.
    nodes : list of NodeDiagnostics
    lhs, rhs : GridFunction
    """

    kind: str
    kernel: dict
    families: list
    certificates: list
    local_family: SparseFamily
    cube_data: list
    nodes: list
    lhs: GridFunction
    rhs: GridFunction
    notes: dict = field(default_factory=dict)

    @property
    def empirical(self):
        """``max LHS / RHS`` over the cells with ``LHS > 0``; inf when RHS vanishes there."""
        l, r = self.lhs.values, self.rhs.values
        live = l > 0
        if not live.any():
            return 0.0
        if np.any(r[live] <= 0):
            return math.inf
        return float(np.max(l[live] / r[live]))

    @property
    def carleson(self):
        return [c.carleson for c in self.certificates]

    @property
    def alpha(self):
        """Largest realized threshold multiple per component."""
        out = {}
        for node in self.nodes:
            for key, a in node.alphas.items():
                out[key] = max(out.get(key, 0.0), a)
        return out

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "kernel": self.kernel,
            "empirical": self.empirical,
            "alpha": self.alpha,
            "families": [S.to_dict() for S in self.families],
            "certificates": [c.to_dict() for c in self.certificates],
            "local_family": self.local_family.to_dict(),
            "cube_data": self.cube_data,
            "nodes": [node.to_dict() for node in self.nodes],
            "window": {"h": self.lhs.h, "origin": list(self.lhs.origin), "cells": list(self.lhs.cells)},
            "notes": self.notes,
        }

    def save(self, path:Path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(canonical_json(self.to_dict(), indent=2) + "\n")
        return path


def _window(f:GridFunction, shells:int=1):
    N = f.cells[0]
    if len(set(f.cells)) != 1 or N & (N - 1):
        raise ResolutionError(f"domination needs a cubical grid of 2^m cells per axis, got {f.cells}")
    if shells < 0:
        raise ParameterError(f"shells must be nonnegative, got {shells}")
    return f.padded(N * (3 ** (shells + 1) - 1) // 2)


def _window_b(b:GridFunction, f:GridFunction, F:GridFunction):
    if b.same_geometry(F):
        return b
    if b.same_geometry(f):
        return b.padded((F.cells[0] - f.cells[0]) // 2)
    raise ParameterError("b must live on the grid of f or on its window")


def _stopping_children(E, height:float):
    """
    `cz_decomposition` of `E` on each of its largest power-of-two blocks, so
    that cubes an odd multiple of 2^m cells wide still stop at single cells.
    """
    side = E.shape[0]
    block = side & -side
    if block == side:
        return cz_decomposition(E, height)
    out = []
    for corner in np.ndindex(*(side // block,) * E.ndim):
        lo = tuple(c * block for c in corner)
        sub = E[tuple(slice(a, a + block) for a in lo)]
        out.extend((tuple(a + i for a, i in zip(lo, sub_lo)), s) for sub_lo, s in cz_decomposition(sub, height))
    return sorted(out, key=lambda c: (-c[1], c[0]))


class _Recursion:
    """State of one domination run on the window ``3^{shells+1} Q0``."""

    def __init__(self, K, F:GridFunction, B:GridFunction=None, rings=()):
        self.K = K
        self.rings = tuple(rings)
        self.F = F
        self.absF = abs(F)
        self.B = B
        self.lattice = standard_lattice(F)
        self.shifts = three_lattice_shifts(self.lattice)
        self.n = F.dim
        self.lifted = [[] for _ in self.shifts]
        self.members = []
        self.nodes = []

    def _avg(self, g:GridFunction, Q:Cube):
        return g.zero_extended_sum(Q) / _cells(Q, g.h) ** g.dim

    def _components(self, Q:Cube, R:Cube):
        sl = self.F.slices(Q)
        comps = {}
        near = self._avg(self.absF, Q.dilate(3))
        comps["f"] = (self.absF.values[sl], near)
        comps["mt_f"] = (local_grand_maximal(self.K, self.F, Q, self.lattice).values[sl], near)
        if self.B is not None:
            G = (self.B - self._avg(self.B, R)) * self.F
            near_g = self._avg(abs(G), Q.dilate(3))
            comps["osc_f"] = (np.abs(G.values[sl]), near_g)
            comps["mt_osc_f"] = (local_grand_maximal(self.K, G, Q, self.lattice).values[sl], near_g)
        return comps

    def run(self, root:Cube):
        n = self.n
        bound = int(math.log2(_cells(root, self.F.h))) + 1
        queue = [(root, 0)]
        while queue:
            Q, depth = queue.pop(0)
            if depth > bound:
                raise ResolutionError(f"recursion below {root} exceeded depth {bound}")
            j, R = covering_cube(Q.dilate(3), self.shifts)
            self.members.append(Q)
            self.lifted[j].append(R)
            L = _cells(Q, self.F.h)
            r = L ** n // 2 ** (n + 4)
            E = np.zeros((L,) * n, dtype=bool)
            thresholds, alphas = {}, {}
            for name, (vals, avg) in self._components(Q, R).items():
                ordered = np.sort(vals.ravel())[::-1]
                t = float(ordered[r]) if r < ordered.size else 0.0
                thresholds[name] = t
                alphas[name] = t / avg if avg > 0 else 0.0
                E |= vals > t
            count = int(E.sum())
            if 2 ** (n + 2) * count > L ** n:
                raise StructuralError(f"exceptional set of {Q} has {count} of {L ** n} cells", offender=Q)
            children = _stopping_children(E, 2.0 ** -(n + 1)) if count else []
            if 2 * sum(s ** n for _, s in children) > L ** n:
                raise StructuralError(f"children of {Q} exceed half its measure", offender=Q)
            node = NodeDiagnostics(Q, depth, thresholds, alphas, count / L ** n, len(children))
            self.nodes.append(node)
            logger.debug("node %s depth %d: |E|=%d alphas=%s children=%d", Q, depth, count, alphas, len(children))
            for lo, s in children:
                P = Cube(tuple(a + i * self.F.h for a, i in zip(Q.anchor, lo)), s * self.F.h)
                queue.append((P, depth + 1))

    def families(self):
        eta = 1.0 / (2 * 9 ** self.n)
        fams, certs = [], []
        for j, L in enumerate(self.shifts):
            S = SparseFamily(L, self.lifted[j], cell=self.F.h)
            cert = certify_sparse(S, eta, what=f"family {j}")
            fams.append(S.with_witnesses(cert.witnesses))
            certs.append(cert)
        local = SparseFamily((self.lattice,) + self.rings, self.members, cell=self.F.h)
        certify_sparse(local, 0.5, what="recursion family")
        return fams, certs, local


def _cells(Q:Cube, h:float):
    return int(round(Q.side / h))


def _partition(f:GridFunction, shells:int=1):
    """
    The data box Q0 with its 3^n - 1 congruent neighbours, lexicographically,
    then for k = 1..shells the 3^n - 1 cubes of side ``3^k |Q0|`` covering
    ``3^{k+1} Q0`` minus ``3^k Q0``. Every cube Q satisfies ``Q0 ⊂ 3Q``.

    Also returns, per outer ring, a one-generation lattice whose members are
    that ring's cubes.
    """
    N, h = f.cells[0], f.h
    cubes, lattices = [], []
    for k in range(shells + 1):
        side = 3 ** k * N
        start = -(3 ** k - 1) // 2 * N - side
        for offset in product((0, 1, 2), repeat=f.dim):
            if k and offset == (1,) * f.dim:
                continue
            cubes.append(f.cube_from_index(tuple(start + o * side for o in offset), side))
        if k:
            lo = f.cube_from_index((start,) * f.dim, 3 * side)
            hi = tuple(a + lo.side for a in lo.anchor)
            lattices.append(DyadicLattice(f.dim, origin=lo.anchor, unit=side * h, levels=(0, 0), box=(lo.anchor, hi)))
    return cubes, lattices


def _dominate(K, f:GridFunction, b:GridFunction=None, shells:int=1):
    F = _window(f, shells)
    B = None if b is None else _window_b(b, f, F)
    cubes, rings = _partition(f, shells)
    rec = _Recursion(K, F, B, rings)
    for P in cubes:
        if rec._avg(rec.absF, P.dilate(3)) == 0:
            continue
        rec.run(P)
    fams, certs, local = rec.families()
    cube_data = []
    for S in fams:
        rows = []
        for R in S.cubes:
            row = {"cube": R.to_dict(), "f_avg": rec._avg(rec.absF, R)}
            if B is not None:
                bR = rec._avg(B, R)
                row["osc_avg"] = rec._avg(abs((B - bR) * F), R)
            rows.append(row)
        cube_data.append(rows)
    return rec, F, B, fams, certs, local, cube_data


def build_T_domination(K, f:GridFunction, shells:int=1):
    """
    ``|T f| <= C sum_j A_{S_j} |f|`` on the window ``3^{shells+1} Q0``, with the
    families built by the stopping time recursion (two level set components
    per node) run on every cube of `_partition`.

    Raises
    ------
    StructuralError
        When a family fails its sparseness certificate or a node its measure
        bounds.
    ResolutionError
        When the grid is not 2^m cells per axis.
    """
    rec, F, _, fams, certs, local, cube_data = _dominate(K, f, shells=shells)
    lhs = abs(apply_T(K, F))
    rhs = F.with_values(np.zeros(F.cells))
    for S in fams:
        rhs = rhs + sparse_apply(S, rec.absF, "plain")
    result = DominationResult("T", K.describe(), fams, certs, local, cube_data, rec.nodes, lhs, rhs,
                              notes={"shells": shells})
    logger.info("T domination: %d nodes, families %s, empirical %.6g",
                len(rec.nodes), [len(S) for S in fams], result.empirical)
    return result


def build_commutator_domination(K, b:GridFunction, f:GridFunction, shells:int=1):
    """
    ``|[b, T] f| <= C sum_j (T_{S_j,b} |f| + T*_{S_j,b} |f|)`` on the window
    ``3^{shells+1} Q0``.

    `b` lives on the grid of `f` (it is taken to vanish outside the data box)
    or on the window itself.
    """
    rec, F, B, fams, certs, local, cube_data = _dominate(K, f, b, shells)
    lhs = abs(commutator(K, B, F))
    rhs = F.with_values(np.zeros(F.cells))
    for S in fams:
        rhs = rhs + sparse_apply(S, rec.absF, "comm", b=B) + sparse_apply(S, rec.absF, "comm_star", b=B)
    result = DominationResult("commutator", K.describe(), fams, certs, local, cube_data, rec.nodes, lhs, rhs,
                              notes={"shells": shells})
    logger.info("commutator domination: %d nodes, families %s, empirical %.6g",
                len(rec.nodes), [len(S) for S in fams], result.empirical)
    return result


# ---------- the oscillation family ----------

@dataclass
class OscillationFamily:
    """
    The augmented family with its sparseness certificate and the pointwise
    oscillation bound measured on every cube (`bound`, ceiling 1).
    """

    family: SparseFamily
    certificate: object
    local: dict
    bound: CheckReport


def _oscillation_tree(b:GridFunction, Q:Cube):
    """Q and the stopping cubes of the oscillation recursion below it."""
    n = b.dim
    out = []
    queue = [Q]
    while queue:
        P = queue.pop(0)
        out.append(P)
        sl = b.slices(P)
        vals = b.values[sl]
        dev = vals - vals.mean()
        omega = float(np.abs(dev).mean())
        sub = GridFunction(dev, h=b.h, origin=P.anchor)
        E = dyadic_local_maximal(sub, sub.box).values > 2 ** (n + 2) * omega
        if not E.any():
            continue
        side = _cells(P, b.h)
        children = cz_decomposition(E, 2.0 ** -(n + 1))
        if 2 * sum(s ** n for _, s in children) > side ** n:
            raise StructuralError(f"oscillation children of {P} exceed half its measure", offender=P)
        for lo, s in children:
            queue.append(Cube(tuple(a + i * b.h for a, i in zip(P.anchor, lo)), s * b.h))
    return out


def build_oscillation_family(b:GridFunction, S:SparseFamily, gamma:float):
    """
    Augment a `gamma`-sparse family so that every member Q satisfies
    ``|b(x) - b_Q| <= 2^{n+2} sum_{R in S~, R ⊆ Q} Omega(b; R) chi_R(x)`` on Q.

    The cubes of `S` must be inside the box of `b` and 2^m cells wide.

    Raises
    ------
    ParameterError
        For cubes that cannot be halved down to single cells.
    StructuralError
        When the bound fails somewhere (the construction guarantees it).
    """
    for Q in S.cubes:
        side = _cells(Q, b.h)
        if side & (side - 1):
            raise ParameterError(f"{Q} is {side} cells wide, not a power of two")
    local = {Q: _oscillation_tree(b, Q) for Q in S.cubes}
    tilde, cert = augment(S, local, gamma, 0.5)
    bound = _bound_report(b, tilde)
    if not bound.passed:
        raise StructuralError(f"oscillation bound fails with ratio {bound.empirical!r}", offender=tilde)
    logger.info("oscillation family: %d -> %d cubes, eta=%.6g", len(S), len(tilde), cert.eta)
    return OscillationFamily(tilde, cert, local, bound)


def _bound_report(b:GridFunction, S:SparseFamily):
    n = b.dim
    omega = {}
    for R in S.cubes:
        vals = b.values[b.slices(R)]
        omega[R] = float(np.abs(vals - vals.mean()).mean())
    lhs, rhs, labels = [], [], []
    for i, Q in enumerate(S.cubes):
        sl = b.slices(Q)
        vals = b.values[sl]
        left = np.abs(vals - vals.mean())
        right = np.zeros_like(left)
        inside = np.flatnonzero(S.containment_rows([i])[0])
        for j in inside:
            R = S.cubes[j]
            lo_q, _ = b.index_box(Q)
            lo_r, side_r = b.index_box(R)
            right[tuple(slice(a - c, a - c + side_r) for a, c in zip(lo_r, lo_q))] += omega[R]
        right *= 2 ** (n + 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(left > 0, left / right, 0.0)
        k = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
        lhs.append(float(left[k]))
        rhs.append(float(right[k]))
        labels.append(str(Q))
    # rounding of the averages only
    return CheckReport.build("oscillation", {"b": b.to_dict(), "family": S.to_dict()}, lhs, rhs,
                             labels=labels, ceiling=1.0, slack=1e-12)


# ---------- the key lemma ----------

def _window_exponent(k:int, window:int):
    if window not in (1, -1):
        raise ParameterError(f"window must be +1 or -1, got {window}")
    return k if window > 0 else -k


def norm_window_family(S:SparseFamily, f:GridFunction, Psi:YoungFunction, k:int, window:int=-1):
    """
    The cubes of `S` with ``4^{e-1} < ||f||_{Psi,Q} <= 4^e``, where ``e = k``
    for ``window = +1`` and ``e = -k`` for ``window = -1``.
    """
    e = _window_exponent(k, window)
    lo, hi = 4.0 ** (e - 1), 4.0 ** e
    chosen = [Q for Q in S.cubes if lo < luxemburg_norm(f, Q, Psi) <= hi]
    return S.with_cubes(chosen)


def key_lemma_check(Psi:YoungFunction, Lambda:float, f:GridFunction, F_k:SparseFamily, k:int,
                    w:GridFunction, E, phi:YoungFunction, window:int=-1, grid=None):
    """
    Check the layer estimate for a family of cubes in one norm window.

    Samples ``layer:<cube>`` compare 1 with ``(2 Lambda / |Q|) int_{E_Q} Psi(4^{-e} |f|)``
    and the sample ``conclusion`` compares ``int_E (sum chi_Q) w`` with
    ``2^k w(E) + 4 Lambda / phibar^{-1}((2 Lambda)^{2^k}) int Psi(4^{-e} |f|) M_phi w``.
    All samples have ceiling 1.

    Raises
    ------
    HypothesisError
        When ``Psi(4t) <= Lambda Psi(t)`` fails on the test grid, a cube lies
        outside the norm window, or the family is not
        ``(1 - 1/(2 Lambda))``-sparse.
    """
    t = log_grid(1e-4, 1e4, 161) if grid is None else np.asarray(grid, dtype=float)
    if np.any(np.asarray(Psi(4 * t)) > Lambda * np.asarray(Psi(t)) * (1 + 1e-12)):
        raise HypothesisError(f"{Psi.key}(4t) <= {Lambda} {Psi.key}(t) fails")
    e = _window_exponent(k, window)
    for Q in F_k.cubes:
        norm = luxemburg_norm(f, Q, Psi)
        if not 4.0 ** (e - 1) < norm <= 4.0 ** e:
            raise HypothesisError(f"||f||_{Psi.key},{Q} = {norm!r} is outside (4^{e - 1}, 4^{e}]")
    eta = 1.0 - 1.0 / (2 * Lambda)
    cert = verify_sparse(F_k, eta)
    if not cert.success:
        raise HypothesisError(f"the family is not {eta:.6g}-sparse (worst ratio {cert.worst_ratio:.6g})")
    E = np.asarray(E, dtype=bool)
    scaled = np.asarray(Psi(4.0 ** (-e) * np.abs(f.values)), dtype=float)
    layers = layer_decomposition(F_k, k)
    lhs, rhs, labels = [], [], []
    for Q in F_k.cubes:
        sl = f.slices(Q)
        integral = scaled[sl][layers.e_sets[Q]].sum()
        lhs.append(1.0)
        rhs.append(2 * Lambda * integral / scaled[sl].size)
        labels.append(f"layer:{Q}")
    count = np.zeros(f.cells)
    for Q in F_k.cubes:
        count[f.slices(Q)] += 1
    vol = f.cell_volume
    left = float((count * w.values)[E].sum() * vol)
    wE = float(w.values[E].sum() * vol)
    big = (2 * Lambda) ** (2 ** k)
    factor = 4 * Lambda / float(complementary(phi).inverse(big))
    maximal = orlicz_maximal(w, phi).values
    right = 2 ** k * wE + factor * float((scaled * maximal).sum() * vol)
    lhs.append(left)
    rhs.append(right)
    labels.append("conclusion")
    inputs = {"Psi": Psi.key, "Lambda": Lambda, "f": f.to_dict(), "family": F_k.to_dict(), "k": k,
              "w": w.to_dict(), "E": np.flatnonzero(E.ravel()).tolist(), "phi": phi.key, "window": window}
    return CheckReport.build("key_lemma", inputs, lhs, rhs, labels=labels, ceiling=1.0, slack=LITERAL_SLACK,
                             notes={"layers": len(layers.layers), "identity": layers.check_identity()})


# ---------- the split of the commutator sparse operator ----------

def _level(avg:float):
    """The k with ``4^{-k-1} < avg <= 4^{-k}``."""
    k = math.floor(-math.log(avg, 4))
    while avg > 4.0 ** -k:
        k -= 1
    while avg <= 4.0 ** (-k - 1):
        k += 1
    return k


@dataclass
class TBFDecomposition:
    """
    The split ``T_{S,b} f <= T_1 f + T_2 f`` on the cells where every cube of
    `S` containing them has ``f_Q <= 1/4``.

    Attributes
    ----------
    levels : dict
        k -> cubes with ``4^{-k-1} < f_Q <= 4^{-k}``, ``k >= 1``.
    level_sets : dict
        Cube -> mask of ``{x in Q : |b(x) - b_Q| > (3/2)^k ||b||_BMO}``.
    tsb, t1, t2 : GridFunction
    region : ndarray of bool
    measure : CheckReport
        ``|F_k(Q)| / |Q|`` against ``alpha_k``, one sample per cube.
    """

    bmo: float
    levels: dict
    level_sets: dict
    tsb: GridFunction
    t1: GridFunction
    t2: GridFunction
    region: np.ndarray
    measure: CheckReport

    @property
    def splitting_holds(self):
        lhs = self.tsb.values[self.region]
        rhs = (self.t1.values + self.t2.values)[self.region]
        return bool(np.all(lhs <= rhs * (1 + 1e-12) + 1e-300))


def jn_alpha(k:int, dim:int):
    """``min(1, exp(1 - (3/2)^k / (2^n e)))``."""
    return min(1.0, math.exp(1.0 - 1.5 ** k / (2 ** dim * math.e)))


def tbf_decomposition(b:GridFunction, S:SparseFamily, f:GridFunction):
    """
    Split the commutator sparse operator of ``|f|`` by the norm windows of the
    averages and the oscillation level sets of `b`. The cubes of `S` must lie
    inside the box.
    """
    absf = abs(f)
    bmo = bmo_norm(b)
    n = f.dim
    levels, level_sets = {}, {}
    t1 = np.zeros(f.cells)
    t2 = np.zeros(f.cells)
    big = np.zeros(f.cells, dtype=bool)
    lhs, rhs, labels = [], [], []
    for Q in S.cubes:
        sl = f.slices(Q)
        avg = float(absf.values[sl].mean())
        if avg > 0.25:
            big[sl] = True
        if avg == 0 or avg > 0.25:
            continue
        k = _level(avg)
        levels.setdefault(k, []).append(Q)
        dev = np.abs(b.values[sl] - b.values[sl].mean())
        cut = 1.5 ** k * bmo
        mask = dev > cut if bmo > 0 else np.zeros(dev.shape, dtype=bool)
        level_sets[Q] = mask
        t1[sl] += cut * avg
        t2[sl] += np.where(mask, dev * avg, 0.0)
        lhs.append(float(mask.mean()))
        rhs.append(jn_alpha(k, n))
        labels.append(f"{k}:{Q}")
    tsb = sparse_apply(S, absf, "comm", b=b)
    measure = CheckReport.build(
        "tbf_measure", {"b": b.to_dict(), "family": S.to_dict(), "f": f.to_dict()}, lhs, rhs,
        labels=labels, notes={"bmo": bmo},
    )
    return TBFDecomposition(bmo, levels, level_sets, tsb, f.with_values(t1), f.with_values(t2), ~big, measure)


# ---------- pointwise checks on sparse operators ----------

def adjoint_sparse_check(S:SparseFamily, b:GridFunction, fs, ceiling:float=math.inf):
    """``T*_{S,b} |f| <= c ||b||_BMO A_{S, L log L} |f|``; the worst cell of each f is one sample."""
    bmo = bmo_norm(b)
    lhs, rhs, keys = [], [], []
    for f in fs:
        absf = abs(f)
        left = sparse_apply(S, absf, "comm_star", b=b).values
        right = bmo * sparse_apply(S, absf, "llogl").values
        l, r = _worst(left, right)
        lhs.append(l)
        rhs.append(r)
        keys.append(f.to_dict())
    return CheckReport.build("adjoint_sparse", {"b": b.to_dict(), "family": S.to_dict(), "fs": keys}, lhs, rhs,
                             ceiling=ceiling, notes={"bmo": bmo})


def bloom_step_check(S:SparseFamily, b:GridFunction, nu:GridFunction, fs, ceiling:float=math.inf):
    """
    ``T*_{S,b} |f| <= c ||b||_{BMO_nu} A_S((A_S |f|) nu)`` with the worst cell
    of each f as a sample.
    """
    norm = weighted_bmo_norm(b, nu)
    lhs, rhs, keys = [], [], []
    for f in fs:
        absf = abs(f)
        left = sparse_apply(S, absf, "comm_star", b=b).values
        inner = sparse_apply(S, absf, "plain") * nu
        right = norm * sparse_apply(S, inner, "plain").values
        l, r = _worst(left, right)
        lhs.append(l)
        rhs.append(r)
        keys.append(f.to_dict())
    return CheckReport.build("bloom_step", {"b": b.to_dict(), "nu": nu.to_dict(), "family": S.to_dict(), "fs": keys},
                             lhs, rhs, ceiling=ceiling, notes={"bmo_nu": norm})
