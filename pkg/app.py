import argparse
import logging
import sys
from typing import List, Optional

from cli.commands import COMMANDS, VerificationFailed
from cli.run_config import parse_box, parse_counts, parse_vector, resolve_config
from config import LOG_LEVEL, validate_config
from constructions.models import ExampleKind
from measure.models import NumericalFailure

EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VIOLATION = 3

# flags whose values may start with a minus sign
_VALUE_FLAGS = ("--box", "--center")


# ------------- Parser -------------

class _Parser(argparse.ArgumentParser):
    # usage errors share exit code 1 with config errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="Key-value config file; flags override its values.")
    p.add_argument("--manifold", help="Manifold specification file.")
    p.add_argument("--output", help="Report path (default: under the reports directory).")
    p.add_argument("--nodes-per-axis", type=int, dest="nodes_per_axis", help="Quadrature nodes per chart axis.")
    p.add_argument("--tau", type=float, help="Relative tangency tolerance.")
    p.add_argument("--delta", type=float, help="Exceptional-fraction threshold.")
    p.add_argument("--seed", type=int, help="Seed for every random draw.")


def _add_scan_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--box", type=parse_box, help="Center box lo:hi,lo:hi,... (one interval = every axis).")
    p.add_argument("--centers-per-axis", type=parse_counts, dest="centers_per_axis",
                   help="Center grid nodes per axis (one value or one per axis).")
    p.add_argument("--linking-radius", type=float, dest="linking_radius",
                   help="Single-linkage radius (default: 1.5x grid spacing).")


def _add_example_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--count", type=int, help="Number of components.")
    p.add_argument("--eps", type=float, help="Cut and neck parameter (sigma1, sigma2; at most 0.01).")
    p.add_argument("--n", type=int, help="Ambient dimension.")
    p.add_argument("--d", type=int, help="Intrinsic dimension.")
    p.add_argument("--scale", type=float, help="Component radius.")
    p.add_argument("--spacing", type=float, help="Distance between component centers.")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="transverse",
        description="Exceptional centers of sphere-submanifold transversality.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="Critical points, verdicts and measure for one center.")
    _add_common(analyze)
    analyze.add_argument("--center", type=parse_vector, help="Center a1,...,an.")
    analyze.add_argument("--seeds-per-axis", type=int, dest="seeds_per_axis", help="Newton seeds per chart axis.")
    analyze.add_argument("--tau-newton", type=float, dest="tau_newton", help="Newton convergence tolerance.")

    scan = sub.add_parser("scan", help="Scan a center grid and fit exceptional planes.")
    _add_common(scan)
    _add_scan_flags(scan)
    scan.add_argument("--table", help="CSV path for the per-center measure table.")

    example = sub.add_parser("build-example", help="Write a shipped construction as a manifold file.")
    example.add_argument("example", choices=[k.value for k in ExampleKind])
    example.add_argument("--config", help="Key-value config file; flags override its values.")
    example.add_argument("--output", help="Manifold file path.")
    example.add_argument("--point-cloud", dest="point_cloud", help="Optional CSV of sampled points.")
    _add_example_flags(example)

    verify = sub.add_parser("verify", help="Run the diagnostic checks; exit 3 on the first violation.")
    _add_common(verify)
    _add_scan_flags(verify)
    verify.add_argument("--example", choices=[k.value for k in ExampleKind],
                        help="Shipped construction to build and check against its predicted planes.")
    verify.add_argument("--trials", type=int, help="Random (a, P) trials per plane dimension.")
    verify.add_argument("--instances", type=int, help="Dichotomy battery size.")
    _add_example_flags(verify)

    return parser


# ------------- Main -------------

def _join_signed_values(argv: List[str]) -> List[str]:
    """Rewrite `--box -0.6:0.6` as `--box=-0.6:0.6` so argparse does not read the value as an option."""
    out: List[str] = []
    it = iter(argv)
    for token in it:
        if token in _VALUE_FLAGS:
            value = next(it, None)
            if value is not None and value.startswith("-") and not value.startswith("--"):
                out.append(f"{token}={value}")
                continue
            out.append(token)
            if value is not None:
                out.append(value)
            continue
        out.append(token)
    return out


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=LOG_LEVEL,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    args = build_parser().parse_args(_join_signed_values(sys.argv[1:] if argv is None else list(argv)))

    try:
        validate_config()
        cfg = resolve_config(args)
        code, _ = COMMANDS[cfg.command](cfg)
        return code
    except VerificationFailed as e:
        print(f"{e} (report {e.report_path})", file=sys.stderr)
        return EXIT_VIOLATION
    except (NumericalFailure, ArithmeticError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
