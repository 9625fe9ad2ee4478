"""Command-line interface.

Three subcommands: `sweep` runs an attack sweep from a TOML spec and writes
the aggregate CSV; `economy` replays a scripted scenario file and writes the
settlement report plus final balances; `selftest` runs the built-in
invariant suite. Exit codes: 0 success, 1 usage or input problems, 2 a
broken invariant (failed selftest or conservation violation).
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from dataclasses import replace

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from ..errors import ConfigError, InvariantViolation, PubChainError
from ..store import BlobStore
from ..tokenomics import EconomicParams
from .economy import run_scenario, write_balances_csv, write_settlement_csv
from .selftest import run_selftest
from .sweep import SweepSpec, run_sweep, write_csv

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for invariants here
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pubchain", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep",
                           help="run an adversary sweep from a TOML spec")
    sweep.add_argument("--spec", required=True, help="sweep spec file (TOML)")
    sweep.add_argument("--out", default="-", help="output CSV path, '-' for stdout")
    sweep.add_argument("--seed", type=int, default=None, help="override the spec seed")
    sweep.add_argument("--replications", type=int, default=None,
                       help="override the spec replication count")

    economy = sub.add_parser("economy",
                             help="replay a scripted economy scenario")
    economy.add_argument("--scenario", required=True, help="scenario script file")
    economy.add_argument("--params", default=None,
                         help="economic parameters file (TOML, token units)")
    economy.add_argument("--out", default="-",
                         help="settlement CSV path, '-' for stdout")
    economy.add_argument("--store", default=None,
                         help="directory for the content-addressed blob store")

    selftest = sub.add_parser("selftest",
                              help="run the built-in invariant suite")
    selftest.add_argument("--seed", type=int, default=0)
    return parser


def _load_toml(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


@contextlib.contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _cmd_sweep(args) -> int:
    spec = SweepSpec.from_mapping(_load_toml(args.spec))
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    if args.replications is not None:
        spec = replace(spec, replications=args.replications)
    rows = run_sweep(spec)
    with _open_out(args.out) as fh:
        write_csv(rows, fh)
    return EXIT_OK


def _cmd_economy(args) -> int:
    params = EconomicParams.from_config(_load_toml(args.params)) if args.params else None
    store = BlobStore(args.store) if args.store else None
    try:
        with open(args.scenario, "r", encoding="utf-8") as fh:
            result = run_scenario(fh, params, store=store)
    except OSError as exc:
        raise ConfigError(f"cannot read {args.scenario}: {exc.strerror or exc}") from exc
    with _open_out(args.out) as fh:
        write_settlement_csv(result, fh)
    if args.out == "-":
        sys.stdout.write("\n")
    write_balances_csv(result, sys.stdout)
    return EXIT_OK


def _cmd_selftest(args) -> int:
    failures = 0
    for check in run_selftest(seed=args.seed):
        status = "PASS" if check.passed else "FAIL"
        failures += not check.passed
        print(f"{status}  {check.name}: {check.detail}")
    if failures:
        print(f"{failures} check(s) failed")
        return EXIT_INVARIANT
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"sweep": _cmd_sweep, "economy": _cmd_economy, "selftest": _cmd_selftest}
    try:
        return handler[args.command](args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (PubChainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
