"""Benchmarks of the three change-detection strategies."""
from bench.exceptions import BenchAssertionFailed, MismatchedOutput
from bench.harness import BenchConfig, BenchResult, measure, summarize, write_csv
from bench.scenarios import SCENARIOS, run_scenario

__all__ = [
    "BenchAssertionFailed",
    "MismatchedOutput",
    "BenchConfig",
    "BenchResult",
    "measure",
    "summarize",
    "write_csv",
    "SCENARIOS",
    "run_scenario",
]
