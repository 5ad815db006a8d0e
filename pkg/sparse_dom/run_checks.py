# Command line entry point of `sparse_dom`
#
# Created On: Oct 19, 2026
#
# USAGES:
#     python3 main.py run <scenario.ini> [--seed S] [--grid-cells N] [--json-out F] [--csv-out F]
#     python3 main.py verify-family <family.txt> --eta 0.5
#     python3 main.py dominate --kernel hilbert --f f.txt [--b b.txt] --out out/ [--shells K]
#     python3 main.py template <scenario.ini>
#

from pathlib import Path
import argparse
import logging
import sys

from .analysis.errors import ConfigError, DataError, ParameterError, ResolutionError, SparseDomError, StructuralError
from .dom_bot import DominationBot, run_scenario
from .scripts.constants import *
from .scripts.functions import print_error, print_summary
from .scripts.scenario_templates.golden_scenario import GOLDEN_SCENARIO
from .scripts.terminal_style import DomStyle

logger = logging.getLogger(__name__)

CWD = Path.cwd()

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sparse_dom",
        description="Numerical checks of sparse domination bounds for Calderon-Zygmund commutators.",
    )
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--no-color", action="store_true", help="plain summaries without ANSI codes")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the checks of a scenario file")
    run.add_argument("scenario", type=Path)
    run.add_argument("--seed", type=int)
    run.add_argument("--grid-cells", type=int, dest="cells")
    run.add_argument("--json-out", type=Path)
    run.add_argument("--csv-out", type=Path)
    run.add_argument("--timings", action="store_true", help="keep runtimes in the JSON report")

    verify = sub.add_parser("verify-family", help="certify the sparseness of a family file")
    verify.add_argument("family", type=Path)
    verify.add_argument("--eta", type=float, required=True)

    dominate = sub.add_parser("dominate", help="build the sparse domination of T f or [b, T] f")
    dominate.add_argument("--kernel", required=True)
    dominate.add_argument("--f", type=Path, required=True, dest="f_path")
    dominate.add_argument("--b", type=Path, dest="b_path")
    dominate.add_argument("--out", type=Path, default=Path("domination"))
    dominate.add_argument("--shells", type=int, default=1, help="outer rings beyond 3Q0 (window 3^(shells+1) Q0)")

    template = sub.add_parser("template", help="write the golden scenario file")
    template.add_argument("path", type=Path)
    return parser


def _setup_output(args):
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT)
    if args.no_color or not sys.stdout.isatty():
        DomStyle.disable()
        restyle()


def _run(args, root:Path):
    code, reports = run_scenario(
        args.scenario, root_dir=root, timings=args.timings,
        seed=args.seed, cells=args.cells, json_out=args.json_out, csv_out=args.csv_out,
    )
    if code == EXIT_CONFIG:
        print_error("ConfigError", f"could not load {args.scenario}; see the log")
        return code
    print_summary(reports, heading=f"Scenario {args.scenario}")
    for rep in reports:
        if not rep.passed:
            print_error("FAILED", rep.check_id)
    return code


def _verify(args, root:Path):
    bot = DominationBot(root_dir=root)
    try:
        cert = bot.verify_family(args.family, args.eta)
    except (DataError, ParameterError) as e:
        print_error(type(e).__name__, e.message)
        return EXIT_CONFIG
    status = f"{STYLE['pass']}SPARSE" if cert.success else f"{STYLE['fail']}NOT SPARSE"
    print(f"\n{INDENT}{status}{STYLE['reset']}  eta {STYLE['number']}{cert.eta}{STYLE['reset']}"
          f"  carleson {STYLE['number']}{cert.carleson:.6g}{STYLE['reset']}  via {cert.method}\n")
    if not cert.success:
        print_error("StructuralError", f"worst cube {cert.worst_cube} with ratio {cert.worst_ratio:.6g}")
        return EXIT_STRUCTURAL
    return EXIT_PASS


def _dominate(args, root:Path):
    bot = DominationBot(root_dir=root)
    try:
        result = bot.dominate(args.kernel, args.f_path, args.b_path, args.out, args.shells)
    except StructuralError as e:
        print_error("StructuralError", e.message)
        return EXIT_STRUCTURAL
    except (ResolutionError, ParameterError, DataError) as e:
        print_error(type(e).__name__, e.message)
        return EXIT_CONFIG
    print(f"\n{INDENT}{STYLE['heading']}{result.kind} domination{STYLE['reset']}"
          f"  empirical {STYLE['number']}{result.empirical:.6g}{STYLE['reset']}"
          f"  carleson {STYLE['value']}{[round(c, 6) for c in result.carleson]}{STYLE['reset']}\n")
    return EXIT_PASS


def _template(args, root:Path):
    path = root / args.path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(GOLDEN_SCENARIO)
    print(f"{INDENT}{STYLE['subheading']}wrote{STYLE['reset']} {path}")
    return EXIT_PASS


_COMMANDS = {"run": _run, "verify-family": _verify, "dominate": _dominate, "template": _template}


def main(argv=None, root_dir:Path=None):
    """Parse `argv` and run the command; returns the exit code."""
    args = build_parser().parse_args(argv)
    _setup_output(args)
    root = CWD if root_dir is None else Path(root_dir)
    try:
        return _COMMANDS[args.command](args, root)
    except ConfigError as e:
        print_error("ConfigError", e.message)
        return EXIT_CONFIG
    except SparseDomError as e:
        logger.exception("unexpected failure")
        print_error(type(e).__name__, e.message)
        return EXIT_FAIL


if __name__ == '__main__':
    sys.exit(main())
