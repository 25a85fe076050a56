"""Command-line entry point.

Exit codes: 0 on success, 1 when an invariant check or the spectral-gap
test fails, 2 on usage errors and refused budgets.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .report import (
    CHECK_SUITES,
    MODELS,
    ConfigError,
    RunConfig,
    bound_record,
    dumps,
    figure2,
    run_check,
    run_degeneracy,
    table_rows,
    write_table_csv,
)
from .superop import BudgetError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _baths(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated site indices, got {text!r}") from None


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def _model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("model", choices=MODELS)
    p.add_argument("--sites", type=int, help="number of sites N")
    p.add_argument("--baths", type=_baths, help="network bath sites, e.g. 19,20")
    p.add_argument("--seed", type=int, help="seed for random dissipators (default 0)")
    p.add_argument("--tol", type=float, help="relative rank tolerance (default 1e-10)")
    p.add_argument("--sectors", type=_on_off, help="split by conserved charges: on|off (default on)")
    p.add_argument("--gamma", type=float, help="dissipation rate")
    p.add_argument("--t-hop", dest="t_hop", type=float, help="Hubbard hopping amplitude")
    p.add_argument("--u-int", dest="u_int", type=float, help="Hubbard interaction U")
    p.add_argument("--num-jumps", dest="num_jumps", type=int, help="number of random jump operators")
    p.add_argument("--config", type=Path, help="JSON file with any of the above keys")
    p.add_argument("--json", type=Path, help="also write the JSON record to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symmkernel",
        description="Steady-state degeneracy of Lindbladians from symmetry and from exact kernels.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="analytic lower bound from the irrep decomposition")
    _model_args(p)

    p = sub.add_parser("degeneracy", help="numerical kernel dimension plus bound")
    _model_args(p)
    p.add_argument("--dump", type=Path, help="write the Liouvillian in coordinate text format")

    p = sub.add_parser("table", help="reproduce a table as CSV")
    p.add_argument("which", type=int, choices=(1, 2, 3))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--bound-only", action="store_true", help="skip the exact columns")
    p.add_argument("--out", type=Path, help="write CSV here instead of stdout")

    p = sub.add_parser("figure2", help="stationary-state heatmaps of the quantum network")
    p.add_argument("--dump", type=Path, required=True,
                   help="output prefix; writes PREFIX_config.txt and PREFIX_adapted.txt")
    p.add_argument("--json", type=Path, help="write diagnostics JSON here")

    p = sub.add_parser("check", help="run an invariant suite")
    p.add_argument("suite", choices=tuple(CHECK_SUITES))
    return parser


_CONFIG_FLAGS = ("sites", "baths", "seed", "tol", "sectors", "gamma", "t_hop", "u_int", "num_jumps")


def _config(args) -> RunConfig:
    overrides = {k: getattr(args, k) for k in _CONFIG_FLAGS}
    if args.config is not None:
        return RunConfig.from_json_file(args.config, model=args.model, **overrides)
    if args.sites is None:
        raise ConfigError("--sites is required (or give it in --config)")
    return RunConfig.from_mapping({"model": args.model, **{k: v for k, v in overrides.items() if v is not None}})


def _emit(text: str, path: Path | None) -> None:
    sys.stdout.write(text)
    if path is not None:
        path.write_text(text)


def _cmd_bound(args) -> int:
    _emit(dumps(bound_record(_config(args))), args.json)
    return EXIT_OK


def _cmd_degeneracy(args) -> int:
    report = run_degeneracy(_config(args), dump=args.dump)
    _emit(report.to_json(), args.json)
    if report.uncertain:
        print(f"symmkernel: spectral gap ratio {report.gap_ratio} below threshold; "
              "the kernel dimension is uncertain", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _cmd_table(args) -> int:
    header, rows = table_rows(args.which, seed=args.seed, exact=not args.bound_only, tol=args.tol)
    text = write_table_csv(args.which, header, rows, seed=args.seed, tol=args.tol)
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_figure2(args) -> int:
    config, adapted, diag = figure2()
    prefix = str(args.dump)
    config.write(prefix + "_config.txt")
    adapted.write(prefix + "_adapted.txt")
    _emit(dumps(diag), args.json)
    return EXIT_OK


def _cmd_check(args) -> int:
    results = run_check(args.suite)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{status}  {r.name}"
        if r.detail:
            line += f"  ({r.detail})"
        print(line)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


_COMMANDS = {
    "bound": _cmd_bound,
    "degeneracy": _cmd_degeneracy,
    "table": _cmd_table,
    "figure2": _cmd_figure2,
    "check": _cmd_check,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, BudgetError, ValueError, OSError) as exc:
        print(f"symmkernel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
