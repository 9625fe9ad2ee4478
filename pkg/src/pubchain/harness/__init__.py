"""Experiment harness: attack sweeps, scripted economies, self-checks, CLI."""

from .economy import ScenarioResult, run_scenario, write_balances_csv, write_settlement_csv
from .selftest import CheckResult, run_selftest
from .sweep import SweepRow, SweepSpec, run_sweep, write_csv

__all__ = [
    "CheckResult",
    "ScenarioResult",
    "SweepRow",
    "SweepSpec",
    "run_scenario",
    "run_selftest",
    "run_sweep",
    "write_balances_csv",
    "write_csv",
    "write_settlement_csv",
]
