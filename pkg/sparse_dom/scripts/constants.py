# Constants needed for `sparse_dom`
#
# Created On: Oct 19, 2026
#

from .terminal_style import DomStyle

INDENT = "    "

# Version of the JSON report layout
SCHEMA_VERSION = 1

# Relative bracket width at which the Luxemburg bisection stops
LUXEMBURG_RTOL = 1e-10

# Slack allowed on checks whose constant is literal
LITERAL_SLACK = 1e-8

# Points of the default log-spaced lambda grid over [0.01 max, max]
DEFAULT_LAMBDA_COUNT = 24
DEFAULT_LAMBDA_SPAN = 0.01

# Largest accepted drift of an empirical constant when the grid is refined
RESOLUTION_DRIFT = 0.20

CHECK_IDS = {
    "fs": "Fefferman-Stein weak type",
    "orlicz_fs": "Orlicz maximal weak type",
    "weakcomm": "Commutator weak type with an Orlicz maximal weight",
    "cor15": "A1 commutator weak type",
    "bloom": "Two-weight commutator bound",
    "asp": "Weighted sparse operator bound",
    "llogl_sparse": "L log L sparse operator weak type",
    "tbf_weak": "Commutator sparse operator weak type",
    "tbf_measure": "Oscillation level sets against the John-Nirenberg bound",
    "domination": "Pointwise sparse domination of [b,T]",
    "t_domination": "Pointwise sparse domination of T",
    "oscillation": "Oscillation family certificate",
    "key_lemma": "Layered sparse family estimate",
    "holder": "Generalized Hoelder inequality",
    "young_holder": "Hoelder inequality with the complementary function",
    "fact": "Luxemburg norm unit-ball law",
    "duality": "A_p duality identity",
    "submultiplicativity": "Submultiplicativity of t log(e+t)",
    "composed_constant": "Composed inverse integral against C_phi",
    "osc_llogl": "Oscillation against L log L norm",
    "adjoint_sparse": "Adjoint commutator sparse operator against L log L sparse operator",
    "bloom_step": "Iterated sparse bound for the adjoint operator",
    "weak_type": "Weak (1,1) surrogate",
    "truncation_bounds": "Grand maximal truncated operator bounds",
    "resolution_drift": "Stability of an empirical constant under refinement",
}

# Checks whose ceiling is part of the inequality itself
LITERAL_CHECKS = ("orlicz_fs", "holder", "young_holder", "fact", "duality",
                  "submultiplicativity", "oscillation", "key_lemma", "resolution_drift")

# Ceilings come from the scenario; a missing ceiling never fails
DEFAULT_CEILINGS = {check_id: float("inf") for check_id in CHECK_IDS}

KERNEL_NAMES = ("hilbert", "riesz2d_x", "tabulated")

F_GENERATORS = ("indicator", "steps", "spike", "random")
B_GENERATORS = ("sign", "log", "steps", "linear", "constant")
W_GENERATORS = ("constant", "power", "step", "product")

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_STRUCTURAL = 3


def _style():
    return {
        'pass': DomStyle.BOLD + DomStyle.LIME_GREEN,
        'fail': DomStyle.BOLD + DomStyle.RED,
        'id': DomStyle.BOLD + DomStyle.SPRING_GREEN,
        'number': DomStyle.AQUA_MARINE,
        'heading': DomStyle.BOLD + DomStyle.LIGHT_YELLOW,
        'subheading': DomStyle.BOLD + DomStyle.CORAL,
        'value': DomStyle.ITALLIC + DomStyle.PALE_GOLDEN_ROD,
        'error': DomStyle.RED,
        'reset': DomStyle.END,
    }


STYLE = _style()


def restyle():
    """Rebuild `STYLE` after `DomStyle.disable()`."""
    STYLE.update(_style())
