# A bot that runs inequality checks for sparse domination
#
# Created On: Oct 19, 2026
#
# Scenario files name the kernel, the grid, the generators of f, b and the
# weights, the Young functions and the ceilings; the bot turns every named
# check into a CheckReport and writes the reports.
#

from dataclasses import dataclass, field, replace
from pathlib import Path
import logging
import math
import time

import numpy as np

from .analysis.czo import commutator, kernel_by_name, truncation_bounds_check, power_maximal, weak_type_check, _worst
from .analysis.domination import (
    bloom_step_check, build_T_domination, build_commutator_domination, build_oscillation_family,
    adjoint_sparse_check, key_lemma_check, norm_window_family, sparse_apply, tbf_decomposition,
)
from .analysis.errors import ConfigError, ParameterError, SparseDomError, StructuralError
from .analysis.grid import GridFunction, _clipped, standard_lattice
from .analysis.orlicz import (
    c_phi, compose, composed_constant_check, generalized_holder, hardy_littlewood_maximal, holder_factor,
    k_phi, luxemburg_fact_check, luxemburg_norm, orlicz_level_set, orlicz_maximal, phi_eps, phi_llogl,
    submultiplicativity_check, young_function, young_holder,
)
from .analysis.reports import CheckReport, sample_ratio, write_csv, write_dat, write_json
from .analysis.sparse import SparseFamily, carleson_constant, verify_sparse
from .analysis.utils import log_grid
from .analysis.weights import (
    Weight, a1_constant, ainf_constant, ap_constant, bmo_norm, osc_llogl_check, distribution,
    duality_check, weighted_bmo_norm,
)
from .scripts.functions import *

logger = logging.getLogger(__name__)

CWD = Path.cwd()

__all__ = [
    "lambda_grid",
    "check_fs",
    "check_orlicz_fs",
    "check_weakcomm",
    "check_cor15",
    "check_bloom",
    "check_asp",
    "check_llogl_sparse",
    "check_tbf_weak",
    "check_resolution_drift",
    "Scenario",
    "DominationBot",
    "run_scenario",
]


def lambda_grid(top:float, count:int=DEFAULT_LAMBDA_COUNT, span:float=DEFAULT_LAMBDA_SPAN):
    """Log-spaced levels over ``[span * top, top]``; ``[1.0]`` when `top` vanishes."""
    if not top > 0:
        return np.array([1.0])
    return log_grid(span * top, top, count)


def _levels(lambdas, top:float):
    if lambdas is None:
        return lambda_grid(top)
    if callable(lambdas):
        return np.asarray(lambdas(top), dtype=float)
    return np.asarray(lambdas, dtype=float)


def _labels(lams):
    return [f"lambda={lam!r}" for lam in lams]


def _cubes_key(cubes):
    return cubes if isinstance(cubes, str) else cubes.describe()


def _integral(values, g:GridFunction):
    return float(np.sum(values) * g.cell_volume)


def _lp(values, weight, p:float, cell_volume:float):
    return float(np.sum(np.abs(values) ** p * weight) * cell_volume) ** (1.0 / p)


# ---------- inequality checks ----------

def check_fs(w:Weight, f:GridFunction, lambdas=None, cubes="all", ceiling:float=math.inf):
    """
    Fefferman-Stein: ``lam w{M f > lam} <= C int |f| M w`` over the levels.

    `lambdas` is a sequence, a callable of the top level, or None for the
    default grid below ``max M f``.
    """
    Mf = hardy_littlewood_maximal(f, cubes)
    Mw = hardy_littlewood_maximal(w, cubes)
    right = _integral(np.abs(f.values) * Mw.values, f)
    lams = _levels(lambdas, float(Mf.values.max()))
    lhs = [lam * distribution(w, Mf, lam) for lam in lams]
    inputs = {"w": w.to_dict(), "f": f.to_dict(), "lambdas": lams.tolist(), "cubes": _cubes_key(cubes)}
    return CheckReport.build("fs", inputs, lhs, [right] * len(lhs), labels=_labels(lams), ceiling=ceiling,
                             notes={"rhs": right})


def check_orlicz_fs(Phi, w:Weight, f:GridFunction, lambdas=None, cubes="all"):
    """
    ``w{M_Phi f > lam} <= 3^n int Phi(9^n |f| / lam) M w`` with its literal
    constants (ceiling 1).

    For ``Phi = t log(e + t)`` the notes also carry the constant of the form
    without the dilations, ``w{M_{L log L} f > lam} <= c int Phi(|f| / lam) M w``.
    """
    n = f.dim
    Mw = hardy_littlewood_maximal(w, cubes).values
    absf = np.abs(f.values)
    # ||f||_{Phi,Q} <= max|f| / Phi^{-1}(1)
    lams = _levels(lambdas, float(absf.max()) / float(Phi.inverse(1.0)))
    lhs, rhs, plain = [], [], []
    for lam in lams:
        lhs.append(w.measure(orlicz_level_set(f, Phi, lam, cubes)))
        with np.errstate(over="ignore"):
            rhs.append(3 ** n * _integral(np.asarray(Phi(9 ** n * absf / lam)) * Mw, f))
            plain.append(_integral(np.asarray(Phi(absf / lam)) * Mw, f))
    notes = {}
    if Phi.name == "phi_llogl":
        notes["llogl_constant"] = max((sample_ratio(l, r) for l, r in zip(lhs, plain)), default=0.0)
    inputs = {"Phi": Phi.key, "w": w.to_dict(), "f": f.to_dict(), "lambdas": lams.tolist(), "cubes": _cubes_key(cubes)}
    return CheckReport.build("orlicz_fs", inputs, lhs, rhs, labels=_labels(lams), ceiling=1.0,
                             slack=LITERAL_SLACK, notes=notes)


def check_weakcomm(K, b:GridFunction, f:GridFunction, w:Weight, phi, lambdas=None, cubes="all",
                   ceiling:float=math.inf):
    """
    ``w{|[b, T] f| > lam} <= c C_T C_phi int Phi(||b|| |f| / lam) M_{(Phi o phi)(L)} w``;
    the empirical constant estimates c.
    """
    Phi = phi_llogl()
    const = K.c_t * c_phi(phi)
    bmo = bmo_norm(b)
    comm = abs(commutator(K, b, f))
    Mw = orlicz_maximal(w, compose(Phi, phi), cubes).values
    absf = np.abs(f.values)
    lams = _levels(lambdas, float(comm.values.max()))
    lhs, rhs = [], []
    for lam in lams:
        lhs.append(distribution(w, comm, lam))
        rhs.append(const * _integral(np.asarray(Phi(bmo * absf / lam)) * Mw, f))
    inputs = {"kernel": K.name, "b": b.to_dict(), "f": f.to_dict(), "w": w.to_dict(), "phi": phi.key,
              "lambdas": lams.tolist(), "cubes": _cubes_key(cubes)}
    return CheckReport.build("weakcomm", inputs, lhs, rhs, labels=_labels(lams), ceiling=ceiling,
                             notes={"c_t": K.c_t, "c_phi": const / K.c_t, "bmo": bmo})


def _cor15_steps(w:Weight, ainf:float, cubes):
    """
    The two pointwise steps behind the A1 bound: the calibrated exponent
    ``r = 1 + 1 / (c [w]_{A_inf})`` with ``M_{L^r} w <= 2 M w``, and the
    constant of ``M_{L (log L)^{1+eps}} w <= (c / alpha^{1+eps}) M_{L^r} w``.
    """
    Mw = hardy_littlewood_maximal(w, cubes).values
    eps = 1.0 / math.log(math.e + ainf)
    holds = False
    for j in range(11):
        c = 2.0 ** j
        r = 1.0 + 1.0 / (c * ainf)
        Mr = power_maximal(w, r, cubes).values
        if np.all(Mr <= 2.0 * Mw * (1.0 + LITERAL_SLACK)):
            holds = True
            break
    alpha = (r - 1.0) / (1.0 + eps)
    left = orlicz_maximal(w, phi_eps(1.0 + eps), cubes).values
    return {
        "eps": eps,
        "c_n": c,
        "r_n": r,
        "alpha": alpha,
        "step1_constant": float(np.max(left / Mr)) * alpha ** (1.0 + eps),
        "step2_ratio": float(np.max(Mr / Mw)),
        "step2_holds": holds,
    }


def check_cor15(K, b:GridFunction, f:GridFunction, w:Weight, lambdas=None, cubes="all", ceiling:float=math.inf):
    """
    ``w{|[b, T] f| > lam} <= c C_T [w]_{A_1} Phi([w]_{A_inf}) int Phi(||b|| |f| / lam) w``.

    ``[w]_{A_inf}`` is taken over the dyadic blocks of the box.
    """
    Phi = phi_llogl()
    a1 = a1_constant(w)
    ainf = ainf_constant(w, "dyadic")
    bmo = bmo_norm(b)
    const = K.c_t * a1 * float(Phi(ainf))
    comm = abs(commutator(K, b, f))
    absf = np.abs(f.values)
    lams = _levels(lambdas, float(comm.values.max()))
    lhs, rhs = [], []
    for lam in lams:
        lhs.append(distribution(w, comm, lam))
        rhs.append(const * _integral(np.asarray(Phi(bmo * absf / lam)) * w.values, f))
    notes = {"a1": a1, "ainf": ainf, "bmo": bmo}
    notes.update(_cor15_steps(w, ainf, cubes))
    logger.info("A1 steps: c_n=%g r_n=%.6g step1 constant %.6g", notes["c_n"], notes["r_n"], notes["step1_constant"])
    inputs = {"kernel": K.name, "b": b.to_dict(), "f": f.to_dict(), "w": w.to_dict(),
              "lambdas": lams.tolist(), "cubes": _cubes_key(cubes)}
    return CheckReport.build("cor15", inputs, lhs, rhs, labels=_labels(lams), ceiling=ceiling, notes=notes)


def check_bloom(K, p:float, mu:Weight, lam:Weight, b:GridFunction, fs, cubes="all", ceiling:float=math.inf):
    """
    ``||[b, T] f||_{L^p(lam)} <= C ([mu]_{A_p} [lam]_{A_p})^{max(1, 1/(p-1))} ||b||_{BMO_nu} ||f||_{L^p(mu)}``
    with ``nu = (mu / lam)^{1/p}``, one sample per function of the suite.
    """
    if not mu.same_geometry(lam):
        raise ParameterError("mu and lambda live on different grids")
    nu = Weight((mu.values / lam.values) ** (1.0 / p), h=mu.h, origin=mu.origin)
    norm = weighted_bmo_norm(b, nu, cubes)
    a_mu = ap_constant(mu, p, cubes)
    a_lam = ap_constant(lam, p, cubes)
    expo = max(1.0, 1.0 / (p - 1.0))
    factor = (a_mu * a_lam) ** expo * norm
    vol = mu.cell_volume
    lhs, rhs, keys = [], [], []
    for f in fs:
        lhs.append(_lp(commutator(K, b, f).values, lam.values, p, vol))
        rhs.append(factor * _lp(f.values, mu.values, p, vol))
        keys.append(f.to_dict())
    one_weight = bool(np.array_equal(mu.values, lam.values))
    notes = {"a_mu": a_mu, "a_lambda": a_lam, "bmo_nu": norm, "exponent": expo, "one_weight": one_weight}
    if one_weight:
        # nu = 1 and the factor is [w]^{2 max(1, 1/(p-1))}
        notes["one_weight_factor"] = a_mu ** (2.0 * expo)
    inputs = {"kernel": K.name, "p": p, "mu": mu.to_dict(), "lambda": lam.to_dict(), "b": b.to_dict(),
              "fs": keys, "cubes": _cubes_key(cubes)}
    return CheckReport.build("bloom", inputs, lhs, rhs, labels=[f"f{i}" for i in range(len(lhs))],
                             ceiling=ceiling, notes=notes)


def check_asp(S:SparseFamily, w:Weight, p:float, fs, cubes="all", ceiling:float=math.inf, extremal:int=4):
    """
    ``||A_S f||_{L^p(w)} <= c [w]_{A_p}^{max(1, 1/(p-1))} ||f||_{L^p(w)}``.

    Besides the suite, ``sigma chi_Q`` for the `extremal` largest cubes of `S`
    are tested, sigma being the dual weight.
    """
    a = ap_constant(w, p, cubes)
    expo = max(1.0, 1.0 / (p - 1.0))
    sigma = w.sigma(p)
    tests = [abs(f) for f in fs]
    for Q in sorted(S.cubes, key=lambda Q: -Q.side)[:extremal]:
        sl = _clipped(*w.index_box(Q, clip=True), w.cells)
        mask = np.zeros(w.cells)
        if sl is not None:
            mask[sl] = 1.0
        tests.append(GridFunction(sigma.values * mask, h=w.h, origin=w.origin))
    vol = w.cell_volume
    lhs, rhs, keys = [], [], []
    for g in tests:
        lhs.append(_lp(sparse_apply(S, g, "plain").values, w.values, p, vol))
        rhs.append(a ** expo * _lp(g.values, w.values, p, vol))
        keys.append(g.to_dict())
    labels = [f"f{i}" for i in range(len(fs))] + [f"sigma{i}" for i in range(len(tests) - len(fs))]
    inputs = {"family": S.to_dict(), "w": w.to_dict(), "p": p, "tests": keys, "cubes": _cubes_key(cubes)}
    return CheckReport.build("asp", inputs, lhs, rhs, labels=labels, ceiling=ceiling,
                             notes={"ap": a, "exponent": expo})


def check_llogl_sparse(S:SparseFamily, f:GridFunction, w:Weight, phi, lambdas=None, cubes="all",
                       ceiling:float=math.inf):
    """``w{A_{S, L log L} |f| > lam} <= c K_phi int Phi(|f| / lam) M_{phi(L)} w``."""
    Phi = phi_llogl()
    const = k_phi(phi)
    A = sparse_apply(S, abs(f), "llogl")
    Mw = orlicz_maximal(w, phi, cubes).values
    absf = np.abs(f.values)
    lams = _levels(lambdas, float(A.values.max()))
    lhs, rhs = [], []
    for lam in lams:
        lhs.append(distribution(w, A, lam))
        rhs.append(const * _integral(np.asarray(Phi(absf / lam)) * Mw, f))
    inputs = {"family": S.to_dict(), "f": f.to_dict(), "w": w.to_dict(), "phi": phi.key,
              "lambdas": lams.tolist(), "cubes": _cubes_key(cubes)}
    return CheckReport.build("llogl_sparse", inputs, lhs, rhs, labels=_labels(lams), ceiling=ceiling,
                             notes={"k_phi": const})


def check_tbf_weak(S:SparseFamily, b:GridFunction, f:GridFunction, w:Weight, phi, lambdas=None, cubes="all",
                   ceiling:float=math.inf):
    """``w{T_{S,b} |f| > lam} <= c C_phi ||b||_BMO / lam int |f| M_{(Phi o phi)(L)} w``."""
    Phi = phi_llogl()
    const = c_phi(phi)
    bmo = bmo_norm(b)
    T = sparse_apply(S, abs(f), "comm", b=b)
    Mw = orlicz_maximal(w, compose(Phi, phi), cubes).values
    integral = _integral(np.abs(f.values) * Mw, f)
    lams = _levels(lambdas, float(T.values.max()))
    lhs = [distribution(w, T, lam) for lam in lams]
    rhs = [const * bmo * integral / lam for lam in lams]
    inputs = {"family": S.to_dict(), "b": b.to_dict(), "f": f.to_dict(), "w": w.to_dict(), "phi": phi.key,
              "lambdas": lams.tolist(), "cubes": _cubes_key(cubes)}
    return CheckReport.build("tbf_weak", inputs, lhs, rhs, labels=_labels(lams), ceiling=ceiling,
                             notes={"c_phi": const, "bmo": bmo})


def check_resolution_drift(measure, scenario:"Scenario", check_id:str):
    """
    Run `check_id` through ``measure(scenario, check_id)`` at the scenario's
    resolution and at twice that; the sample is the relative drift of the
    empirical constant against the accepted drift (ceiling 1).
    """
    coarse = measure(scenario, check_id)
    fine = measure(scenario.refined(), check_id)
    e1, e2 = coarse.empirical, fine.empirical
    if e1 == e2:
        drift = 0.0
    elif e1 > 0 and math.isfinite(e1):
        drift = abs(e2 - e1) / e1
    else:
        drift = math.inf
    logger.info("drift of %s: %.6g -> %.6g (%.3g)", check_id, e1, e2, drift)
    inputs = {"check": check_id, "coarse": coarse.digest, "fine": fine.digest}
    label = f"{check_id}:{scenario.cells}->{2 * scenario.cells}"
    return CheckReport.build("resolution_drift", inputs, [drift], [RESOLUTION_DRIFT], labels=[label],
                             ceiling=1.0, notes={"check": check_id, "coarse": e1, "fine": e2})


# ---------- scenarios ----------

_LAYOUT = {
    "scenario": {
        "name": str, "seed": int, "kernel": str, "suite": int, "lambda_count": int,
        "lambda_span": float, "maximal": str, "json_out": Path, "csv_out": Path, "dat_dir": Path,
    },
    "grid": {"dim": int, "cells": int, "shells": int},
    "functions": {"f": str, "b": str, "w": str, "mu": str, "lambda": str, "p": float},
    "young": {"phi": str, "Psi": str, "Lambda": float},
    "checks": {"run": split_list, "drift": str},
}

# config keys whose attribute name differs
_ATTRIBUTE = {"lambda": "lam"}

_KERNEL_DIMS = {"hilbert": 1, "riesz2d_x": 2}


@dataclass
class Scenario:
    """
    Everything a run needs; a fixed seed makes the run deterministic.

    Random suites draw from `Lcg` sub-streams named ``f:<i>``, ``b:<i>``,
    ``w``, ``mu``, ``lambda``, ``family:<i>``, ``cubes:<i>`` and ``fact``.
    """

    name: str = "scenario"
    seed: int = 0
    kernel: str = "hilbert"
    suite: int = 4
    lambda_count: int = DEFAULT_LAMBDA_COUNT
    lambda_span: float = DEFAULT_LAMBDA_SPAN
    maximal: str = "all"
    json_out: Path = None
    csv_out: Path = None
    dat_dir: Path = None
    dim: int = 1
    cells: int = 64
    shells: int = 1
    f: str = "indicator"
    b: str = "sign"
    w: str = "constant"
    mu: str = "constant"
    lam: str = "constant"
    p: float = 2.0
    phi: str = "phi_eps(0.5)"
    Psi: str = "phi_llogl"
    Lambda: float = 16.0
    run: list = field(default_factory=list)
    drift: str = "fs"
    ceilings: dict = field(default_factory=dict)
    source: Path = None

    @classmethod
    def from_file(cls, path:Path, **overrides):
        """
        Parse a scenario file; `overrides` (``seed``, ``cells``, ``json_out``,
        ``csv_out``) replace the file's values when not None.

        Raises
        ------
        ConfigError
            For unknown sections or keys, bad values and unknown names, with
            the line number of the offending entry.
        """
        path = Path(path)
        sections, lines = read_config(path)

        def fail(message, section, key=None):
            raise ConfigError(message, path=path, lineno=lines.get((section, key), lines.get((section, None))))

        values = {}
        for section, body in sections.items():
            if section == "ceilings":
                ceilings = {}
                for key, raw in body.items():
                    if key not in CHECK_IDS:
                        fail(f"unknown check id '{key}' in [ceilings]", section, key)
                    try:
                        ceilings[key] = float(raw)
                    except (TypeError, ValueError):
                        fail(f"ceiling of '{key}' is not a number: {raw!r}", section, key)
                    if not ceilings[key] >= 0:
                        fail(f"ceiling of '{key}' must be nonnegative", section, key)
                values["ceilings"] = ceilings
                continue
            if section not in _LAYOUT:
                fail(f"unknown section [{section}]", section)
            for key, raw in body.items():
                convert = _LAYOUT[section].get(key)
                if convert is None:
                    fail(f"unknown key '{key}' in [{section}]", section, key)
                try:
                    values[_ATTRIBUTE.get(key, key)] = convert(raw)
                except (TypeError, ValueError):
                    fail(f"bad value for '{key}' in [{section}]: {raw!r}", section, key)

        for key, value in overrides.items():
            if value is not None:
                values[key] = value
        scenario = cls(source=path, **values)

        where = {name: (section, key) for section, keys in _LAYOUT.items() for key in keys
                 for name in [_ATTRIBUTE.get(key, key)]}
        try:
            scenario.validate()
        except _Invalid as e:
            section, key = where.get(e.attribute, ("scenario", None))
            fail(e.message, section, key)
        return scenario

    def validate(self):
        """Raise `_Invalid` naming the first attribute with a bad value."""
        checks = [
            ("dim", self.dim in (1, 2), f"dimension must be 1 or 2, got {self.dim}"),
            ("cells", self.cells >= 2, f"need at least 2 cells per axis, got {self.cells}"),
            ("shells", self.shells >= 0, f"shells must be nonnegative, got {self.shells}"),
            ("suite", self.suite >= 1, f"suite must hold at least one function, got {self.suite}"),
            ("lambda_count", self.lambda_count >= 2, f"lambda_count must be at least 2, got {self.lambda_count}"),
            ("lambda_span", 0 < self.lambda_span < 1, f"lambda_span must lie in (0, 1), got {self.lambda_span}"),
            ("maximal", self.maximal in ("all", "dyadic"), f"maximal must be 'all' or 'dyadic', got '{self.maximal}'"),
            ("p", self.p > 1, f"p must exceed 1, got {self.p}"),
            ("Lambda", self.Lambda > 0, f"Lambda must be positive, got {self.Lambda}"),
        ]
        for attribute, ok, message in checks:
            if not ok:
                raise _Invalid(attribute, message)
        head = self.kernel.split("(")[0].strip()
        if head not in KERNEL_NAMES or (head == "tabulated") != ("(" in self.kernel):
            raise _Invalid("kernel", f"unknown kernel '{self.kernel}', expected one of {KERNEL_NAMES}")
        if _KERNEL_DIMS.get(head, self.dim) != self.dim:
            raise _Invalid("kernel", f"kernel '{head}' lives in dimension {_KERNEL_DIMS[head]}, the grid in {self.dim}")
        for attribute, names in (("f", F_GENERATORS), ("b", B_GENERATORS), ("w", W_GENERATORS),
                                 ("mu", W_GENERATORS), ("lam", W_GENERATORS)):
            try:
                head, _ = parse_call(getattr(self, attribute))
            except ParameterError as e:
                raise _Invalid(attribute, e.message)
            if head not in names:
                raise _Invalid(attribute, f"unknown generator '{head}', expected one of {names}")
        for attribute in ("phi", "Psi"):
            try:
                young_function(getattr(self, attribute))
            except ParameterError as e:
                raise _Invalid(attribute, e.message)
        for check_id in self.run:
            if check_id not in CHECK_IDS:
                raise _Invalid("run", f"unknown check id '{check_id}'")
        if self.drift not in CHECK_IDS or self.drift == "resolution_drift":
            raise _Invalid("drift", f"cannot measure the drift of '{self.drift}'")

    # ---------- inputs ----------

    @property
    def template(self):
        return make_grid(self.dim, self.cells)

    def rng(self, label:str):
        return Lcg.stream(self.seed, label)

    def f_suite(self):
        t = self.template
        return [generate_f(self.f, t, self.rng(f"f:{i}")) for i in range(self.suite)]

    def b_suite(self):
        t = self.template
        return [generate_b(self.b, t, self.rng(f"b:{i}")) for i in range(self.suite)]

    def weight(self, which:str="w"):
        text = {"w": self.w, "mu": self.mu, "lambda": self.lam}[which]
        return generate_w(text, self.template, self.rng(which))

    def young(self):
        return young_function(self.phi)

    def psi(self):
        return young_function(self.Psi)

    def kernel_obj(self):
        t = self.template
        return kernel_by_name(self.kernel, h=t.h, dim=self.dim)

    def cube_set(self):
        """What the maximal operators and characteristics run over."""
        return "all" if self.maximal == "all" else standard_lattice(self.template)

    def family(self, label:str="family", shrink:int=1):
        return random_family(self.template, self.rng(label), shrink=shrink)

    def lambdas(self, top:float):
        return lambda_grid(top, self.lambda_count, self.lambda_span)

    def refined(self):
        return replace(self, cells=2 * self.cells)

    def ceiling(self, check_id:str):
        return self.ceilings.get(check_id, DEFAULT_CEILINGS[check_id])

    def to_dict(self):
        return {
            "name": self.name, "seed": self.seed, "kernel": self.kernel, "suite": self.suite,
            "dim": self.dim, "cells": self.cells, "shells": self.shells, "f": self.f, "b": self.b, "w": self.w,
            "mu": self.mu, "lambda": self.lam, "p": self.p, "phi": self.phi, "Psi": self.Psi,
            "Lambda": self.Lambda, "maximal": self.maximal,
        }


class _Invalid(Exception):

    def __init__(self, attribute:str, message:str):
        self.attribute = attribute
        self.message = message
        super().__init__(message)


# ---------- the bot ----------

class DominationBot:
    """
    Runs the checks of a scenario and writes their reports.

    Output paths that are not absolute are taken relative to `root_dir`.
    """

    def __init__(self, root_dir:Path=CWD, timings:bool=False):
        self._root_dir = Path(root_dir)
        self._timings = timings
        self._checks = {check_id: getattr(self, f"_check_{check_id}") for check_id in CHECK_IDS}
        self.structural_failures = []

    @property
    def root_dir(self):
        return self._root_dir

    @property
    def check_ids(self):
        return sorted(self._checks)

    def measure(self, scenario:Scenario, check_id:str):
        """The raw report of one check, before the scenario's ceiling is applied."""
        start = time.perf_counter()
        report = self._checks[check_id](scenario)
        report.runtime = time.perf_counter() - start
        return report

    def run_check(self, scenario:Scenario, check_id:str):
        """
        One check with its ceiling. Errors other than certificate failures
        become failing reports (ceiling 0) carrying the message in their notes.
        """
        try:
            report = self.measure(scenario, check_id)
        except StructuralError as e:
            logger.error("%s: %s", check_id, e)
            self.structural_failures.append(check_id)
            return self._error_report(scenario, check_id, e, structural=True)
        except SparseDomError as e:
            logger.error("%s: %s", check_id, e)
            return self._error_report(scenario, check_id, e)
        if check_id not in LITERAL_CHECKS:
            if check_id not in scenario.ceilings:
                logger.warning("no ceiling given for '%s'; it cannot fail", check_id)
            report.with_ceiling(scenario.ceiling(check_id))
        logger.info("%s", report.summary())
        return report

    @staticmethod
    def _error_report(scenario, check_id, error, structural:bool=False):
        return CheckReport.build(check_id, scenario.to_dict(), [1.0], [1.0], labels=["error"], ceiling=0.0,
                                 notes={"error": str(error), "structural": structural})

    def run(self, scenario:Scenario):
        """Run the scenario's checks; reports come back ordered by check id."""
        self.structural_failures = []
        reports = [self.run_check(scenario, check_id) for check_id in scenario.run]
        return sorted(reports, key=lambda rep: rep.check_id)

    def write_reports(self, scenario:Scenario, reports):
        meta = {"scenario": scenario.to_dict()}
        written = []
        if scenario.json_out is not None:
            written.append(write_json(reports, self._root_dir / scenario.json_out, timings=self._timings, meta=meta))
        if scenario.csv_out is not None:
            written.append(write_csv(reports, self._root_dir / scenario.csv_out))
        if scenario.dat_dir is not None:
            for rep in reports:
                written.append(write_dat(rep, self._root_dir / scenario.dat_dir / f"{rep.check_id}.dat"))
        return written

    def verify_family(self, path:Path, eta:float):
        """Load a family file and certify it; returns the certificate."""
        S = SparseFamily.load(self._root_dir / path)
        cert = verify_sparse(S, eta)
        logger.info("%r: eta=%s success=%s carleson=%.6g", S, eta, cert.success, carleson_constant(S))
        return cert

    def dominate(self, kernel:str, f_path:Path, b_path:Path=None, out_dir:Path=Path("domination"), shells:int=1):
        """
        Build the domination of ``T f`` (or ``[b, T] f`` when `b_path` is given)
        on ``3^{shells+1} Q0`` and save the result and the families under `out_dir`.
        """
        f = GridFunction.load(self._root_dir / f_path)
        K = kernel_by_name(kernel, h=f.h, dim=f.dim)
        if b_path is None:
            result = build_T_domination(K, f, shells)
        else:
            result = build_commutator_domination(K, GridFunction.load(self._root_dir / b_path), f, shells)
        out = self._root_dir / out_dir
        result.save(out / "domination.json")
        for j, S in enumerate(result.families):
            S.save(out / f"family_{j}.txt")
        return result

    # ---------- one method per check id ----------

    def _pairs(self, sc:Scenario):
        return list(zip(sc.f_suite(), sc.b_suite()))

    def _check_fs(self, sc):
        w, cubes = sc.weight(), sc.cube_set()
        return CheckReport.combine("fs", [check_fs(w, f, sc.lambdas, cubes) for f in sc.f_suite()])

    def _check_orlicz_fs(self, sc):
        w, cubes, Phi = sc.weight(), sc.cube_set(), sc.psi()
        reps = [check_orlicz_fs(Phi, w, f, sc.lambdas, cubes) for f in sc.f_suite()]
        notes = {}
        if Phi.name == "phi_llogl":
            notes["llogl_constant"] = max(rep.notes["llogl_constant"] for rep in reps)
        return CheckReport.combine("orlicz_fs", reps, notes=notes)

    def _check_weakcomm(self, sc):
        K, w, phi, cubes = sc.kernel_obj(), sc.weight(), sc.young(), sc.cube_set()
        reps = [check_weakcomm(K, b, f, w, phi, sc.lambdas, cubes) for f, b in self._pairs(sc)]
        return CheckReport.combine("weakcomm", reps, notes=reps[0].notes)

    def _check_cor15(self, sc):
        K, w, cubes = sc.kernel_obj(), sc.weight(), sc.cube_set()
        reps = [check_cor15(K, b, f, w, sc.lambdas, cubes) for f, b in self._pairs(sc)]
        notes = {key: value for key, value in reps[0].notes.items() if key != "bmo"}
        return CheckReport.combine("cor15", reps, notes=notes)

    def _check_bloom(self, sc):
        K = sc.kernel_obj()
        b = sc.b_suite()[0]
        return check_bloom(K, sc.p, sc.weight("mu"), sc.weight("lambda"), b, sc.f_suite(), sc.cube_set())

    def _check_asp(self, sc):
        return check_asp(sc.family(), sc.weight(), sc.p, sc.f_suite(), sc.cube_set())

    def _check_llogl_sparse(self, sc):
        S, w, phi, cubes = sc.family(), sc.weight(), sc.young(), sc.cube_set()
        reps = [check_llogl_sparse(S, f, w, phi, sc.lambdas, cubes) for f in sc.f_suite()]
        return CheckReport.combine("llogl_sparse", reps, notes=reps[0].notes)

    def _check_tbf_weak(self, sc):
        S, w, phi, cubes = sc.family(), sc.weight(), sc.young(), sc.cube_set()
        reps = [check_tbf_weak(S, b, f, w, phi, sc.lambdas, cubes) for f, b in self._pairs(sc)]
        return CheckReport.combine("tbf_weak", reps, notes={"c_phi": reps[0].notes["c_phi"]})

    def _check_tbf_measure(self, sc):
        reps = []
        for i, (f, b) in enumerate(self._pairs(sc)):
            split = tbf_decomposition(b, sc.family(f"family:{i}"), f)
            if not split.splitting_holds:
                raise StructuralError(f"T_(S,b) exceeds T_1 + T_2 for pair {i}", offender=i)
            reps.append(split.measure)
        return CheckReport.combine("tbf_measure", reps)

    def _domination(self, sc, check_id:str, build):
        lhs, rhs, labels, notes = [], [], [], []
        for i, (f, b) in enumerate(self._pairs(sc)):
            result = build(f, b)
            l, r = _worst(result.lhs.values, result.rhs.values)
            lhs.append(l)
            rhs.append(r)
            labels.append(f"pair{i}")
            notes.append({"carleson": result.carleson, "alpha": result.alpha, "nodes": len(result.nodes)})
        inputs = {"scenario": sc.to_dict(), "check": check_id}
        return CheckReport.build(check_id, inputs, lhs, rhs, labels=labels, notes={"runs": notes})

    def _check_domination(self, sc):
        K = sc.kernel_obj()
        return self._domination(sc, "domination", lambda f, b: build_commutator_domination(K, b, f, sc.shells))

    def _check_t_domination(self, sc):
        K = sc.kernel_obj()
        return self._domination(sc, "t_domination", lambda f, b: build_T_domination(K, f, sc.shells))

    def _check_oscillation(self, sc):
        reps, etas = [], []
        for i, b in enumerate(sc.b_suite()):
            osc = build_oscillation_family(b, sc.family(f"family:{i}"), 0.5)
            reps.append(osc.bound)
            etas.append(osc.certificate.eta)
        return CheckReport.combine("oscillation", reps, ceiling=1.0, notes={"eta": etas})

    def _check_key_lemma(self, sc):
        Psi, phi, w = sc.psi(), sc.young(), sc.weight()
        shrink = math.ceil(6 / sc.dim)
        reps = []
        for i, f in enumerate(sc.f_suite()):
            S = sc.family(f"family:{i}", shrink=shrink)
            root = luxemburg_norm(f, S.cubes[-1], Psi)
            if not root > 0:
                continue
            for k in (0, 1):
                g = f * (0.75 * 4.0 ** -k / root)
                F_k = norm_window_family(S, g, Psi, k, window=-1)
                reps.append(key_lemma_check(Psi, sc.Lambda, g, F_k, k, w, g.values != 0, phi, window=-1))
        return CheckReport.combine("key_lemma", reps, ceiling=1.0)

    def _check_holder(self, sc):
        phi = sc.young()
        A, B, C = holder_factor(phi), compose(phi_llogl(), phi), phi_llogl()
        reps = [
            generalized_holder(f, b, random_cubes(f, sc.rng(f"cubes:{i}"), 4), A, B, C)
            for i, (f, b) in enumerate(self._pairs(sc))
        ]
        return CheckReport.combine("holder", reps, ceiling=1.0)

    def _check_young_holder(self, sc):
        phi = sc.young()
        reps = [
            young_holder(f, b, random_cubes(f, sc.rng(f"cubes:{i}"), 4), phi)
            for i, (f, b) in enumerate(self._pairs(sc))
        ]
        return CheckReport.combine("young_holder", reps, ceiling=1.0)

    def _check_fact(self, sc):
        fs = sc.f_suite()
        phis = [sc.young(), sc.psi(), phi_llogl()]
        rng = sc.rng("fact")
        instances = []
        for i in range(10 * sc.suite):
            f = fs[i % len(fs)] * math.exp(rng.between(-3.0, 3.0))
            Q = random_cubes(f, rng, 1)[0]
            instances.append((f, Q, phis[i % len(phis)]))
        return luxemburg_fact_check(instances)

    def _check_duality(self, sc):
        cubes = sc.cube_set()
        reps = [duality_check(sc.weight(which), sc.p, cubes) for which in ("w", "mu", "lambda")]
        return CheckReport.combine("duality", reps, ceiling=1.0)

    def _check_submultiplicativity(self, sc):
        return submultiplicativity_check()

    def _check_composed_constant(self, sc):
        return composed_constant_check(sc.young())

    def _check_osc_llogl(self, sc):
        b = sc.b_suite()[0]
        instances = [
            (f, Q) for i, f in enumerate(sc.f_suite()) for Q in random_cubes(f, sc.rng(f"cubes:{i}"), 4)
        ]
        return osc_llogl_check(b, instances)

    def _check_adjoint_sparse(self, sc):
        return adjoint_sparse_check(sc.family(), sc.b_suite()[0], sc.f_suite())

    def _check_bloom_step(self, sc):
        b = sc.b_suite()[0]
        tilde = build_oscillation_family(b, sc.family(), 0.5).family
        mu, lam = sc.weight("mu"), sc.weight("lambda")
        nu = Weight((mu.values / lam.values) ** (1.0 / sc.p), h=mu.h, origin=mu.origin)
        return bloom_step_check(tilde, b, nu, sc.f_suite())

    def _check_weak_type(self, sc):
        K, fs = sc.kernel_obj(), sc.f_suite()
        reps = [weak_type_check(K, fs, operator) for operator in ("T", "T*", "M_T")]
        return CheckReport.combine("weak_type", reps, notes={"c_t": K.c_t})

    def _check_truncation_bounds(self, sc):
        return truncation_bounds_check(sc.kernel_obj(), sc.f_suite())

    def _check_resolution_drift(self, sc):
        return check_resolution_drift(self.measure, sc, sc.drift)


def run_scenario(path:Path, root_dir:Path=CWD, timings:bool=False, **overrides):
    """
    Load a scenario, run its checks and write the reports.

    Returns
    -------
    (int, list of CheckReport)
        The exit code (0 all pass, 1 a check failed, 2 configuration error,
        3 certificate failure) and the reports.
    """
    try:
        scenario = Scenario.from_file(Path(root_dir) / path, **overrides)
    except ConfigError as e:
        logger.error("%s", e)
        return EXIT_CONFIG, []
    bot = DominationBot(root_dir=root_dir, timings=timings)
    reports = bot.run(scenario)
    bot.write_reports(scenario, reports)
    if bot.structural_failures:
        logger.error("certificate failure in %s", ", ".join(bot.structural_failures))
        return EXIT_STRUCTURAL, reports
    failed = [rep.check_id for rep in reports if not rep.passed]
    if failed:
        logger.warning("checks above their ceiling: %s", ", ".join(failed))
        return EXIT_FAIL, reports
    return EXIT_PASS, reports
