"""Pytest configuration and fixtures shared by the test suite."""
import os
from itertools import combinations
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import pytest

# Set test environment variables before the settings are imported
os.environ["ENVIRONMENT"] = "test"
os.environ["LOG_LEVEL"] = "CRITICAL"  # Suppress logs during tests
os.environ["LOG_JSON"] = "false"

from aexpr.engine import Engine  # noqa: E402
from config.settings import Settings  # noqa: E402

STRATEGIES = ["convention", "interpretation", "compilation"]
REACTIVE_STRATEGIES = ["interpretation", "compilation"]

TESTS_DIR = Path(__file__).parent
CORPUS_DIR = TESTS_DIR / "corpus"
DEMO_DIR = TESTS_DIR.parent / "demo"


@pytest.fixture(params=STRATEGIES)
def engine(request) -> Engine:
    """A fresh engine for every strategy."""
    return Engine(request.param)


@pytest.fixture(params=REACTIVE_STRATEGIES)
def reactive_engine(request) -> Engine:
    """A fresh engine for the strategies that detect writes immediately."""
    return Engine(request.param)


@pytest.fixture
def convention_engine() -> Engine:
    return Engine("convention")


@pytest.fixture
def interpretation_engine() -> Engine:
    return Engine("interpretation")


@pytest.fixture
def compilation_engine() -> Engine:
    return Engine("compilation")


@pytest.fixture
def polling_settings() -> Settings:
    """Settings with imperative implicit layer activation."""
    return Settings(implicit_layer_mode="polling")


@pytest.fixture
def run_program() -> Callable[..., List[str]]:
    """Run a program in a fresh engine and return its printed lines."""
    def run(source: str, strategy: str = "compilation", **kwargs) -> List[str]:
        settings = kwargs.pop("settings", None)
        engine = Engine(strategy, settings)
        engine.run(source, **kwargs)
        return engine.output
    return run


@pytest.fixture
def corpus_programs() -> List[Path]:
    return sorted(CORPUS_DIR.glob("*.rxl"))


def least_change_solution(
    matrix: np.ndarray, rhs: np.ndarray, current: np.ndarray, pinned: Dict[int, float]
) -> Optional[np.ndarray]:
    """
    Exhaustive reference for the solver's absorber rule.

    Column j is the variable declared j-th. Tries every set of free variables
    that can absorb the system, latest-declared sets first, and solves for the
    first admissible one while all other free variables keep their current
    values. Returns None when the system cannot hold.
    """
    expected = current.astype(float).copy()
    for j, value in pinned.items():
        expected[j] = value
    free = [j for j in range(matrix.shape[1]) if j not in pinned]
    target = rhs - matrix @ np.where(np.isin(np.arange(matrix.shape[1]), list(pinned)), expected, 0.0)
    reduced = matrix[:, free]
    rank = np.linalg.matrix_rank(reduced) if free else 0
    if not free or rank == 0:
        return expected if np.allclose(target, 0.0, atol=1e-9) else None
    if rank != np.linalg.matrix_rank(np.column_stack([reduced, target])):
        return None

    for absorbers in sorted(combinations(free, rank), key=lambda s: sorted(s, reverse=True), reverse=True):
        columns = matrix[:, list(absorbers)]
        if np.linalg.matrix_rank(columns) < rank:
            continue
        kept = [j for j in free if j not in absorbers]
        residual = target - matrix[:, kept] @ expected[kept]
        solution = np.linalg.lstsq(columns, residual, rcond=None)[0]
        expected[list(absorbers)] = solution
        return expected
    return None


@pytest.fixture
def absorber_oracle() -> Callable[..., Optional[np.ndarray]]:
    """Brute-force expected assignment under the latest-declared-absorber rule."""
    return least_change_solution
