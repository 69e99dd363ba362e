"""
Timing protocol: run a trial ``iterations`` times and keep the median and
quartiles of the final ``measured_iterations`` timings.
"""
import csv
import logging
import time
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, TextIO

import numpy as np
from pydantic import BaseModel, Field, validator

from config.settings import Settings, settings as default_settings

logger = logging.getLogger(__name__)

CSV_HEADER = ["scenario", "strategy", "param", "seed", "median_ms", "p25_ms", "p75_ms"]

SCALING_COUNTS = [0, 1, 10, 20, 30, 40, 50, 100, 150, 200, 250, 300]


class BenchConfig(BaseModel):
    """Protocol and scenario sizes; defaults come from the settings."""
    iterations: int = Field(100, description="Timed iterations per configuration", gt=0)
    measured_iterations: int = Field(30, description="Final iterations the statistics use", gt=0)
    seed: int = Field(20170403, description="Seed of the input generator")
    construction_count: int = Field(1000, description="Aexprs created per construction trial", ge=0)
    update_count: int = Field(100000, description="Width assignments per update trial", ge=0)
    sort_size: int = Field(10000, description="Array size of the rewrite-overhead sort", ge=1)
    scaling_size: int = Field(1000, description="Array size of the scaling sort", ge=1)
    scaling_callbacks: int = Field(10, description="No-op callbacks per monitored index", ge=0)
    scaling_counts: List[int] = Field(default_factory=lambda: list(SCALING_COUNTS))

    @validator("measured_iterations")
    def validate_measured(cls, v, values):
        """The measured tail cannot be longer than the run."""
        if "iterations" in values and v > values["iterations"]:
            raise ValueError(f"measured_iterations ({v}) exceeds iterations ({values['iterations']})")
        return v

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None, **overrides) -> "BenchConfig":
        settings = settings or default_settings
        values = {
            "iterations": settings.bench_iterations,
            "measured_iterations": settings.bench_measured_iterations,
            "seed": settings.bench_seed,
            "construction_count": settings.bench_construction_count,
            "update_count": settings.bench_update_count,
            "sort_size": settings.bench_sort_size,
            "scaling_size": settings.bench_scaling_size,
            "scaling_callbacks": settings.bench_scaling_callbacks,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


class BenchResult(BaseModel):
    """Statistics of one scenario configuration."""
    scenario: str
    strategy: str
    param: str
    seed: int
    iterations: int
    measured_iterations: int
    median_ms: float
    p25_ms: float
    p75_ms: float
    timings_ms: List[float] = Field(default_factory=list)

    def csv_row(self) -> List[str]:
        return [
            self.scenario,
            self.strategy,
            self.param,
            str(self.seed),
            f"{self.median_ms:.4f}",
            f"{self.p25_ms:.4f}",
            f"{self.p75_ms:.4f}",
        ]


@dataclass
class Trial:
    """One prepared iteration: ``run`` is timed, ``verify`` is not."""
    run: Callable[[], None]
    verify: Optional[Callable[[], None]] = None


def measure(
    scenario: str,
    strategy: str,
    param: str,
    prepare: Callable[[], Trial],
    config: BenchConfig,
) -> BenchResult:
    """
    Time ``config.iterations`` freshly prepared trials.

    Returns:
        Result with median and quartiles over the final measured iterations
    """
    timings: List[float] = []
    for _ in range(config.iterations):
        trial = prepare()
        start = time.perf_counter()
        trial.run()
        timings.append((time.perf_counter() - start) * 1000.0)
        if trial.verify is not None:
            trial.verify()

    measured = np.asarray(timings[-config.measured_iterations:])
    p25, median, p75 = np.percentile(measured, [25, 50, 75])
    result = BenchResult(
        scenario=scenario,
        strategy=strategy,
        param=param,
        seed=config.seed,
        iterations=config.iterations,
        measured_iterations=len(measured),
        median_ms=float(median),
        p25_ms=float(p25),
        p75_ms=float(p75),
        timings_ms=timings,
    )
    logger.info(f"{scenario}/{strategy}/{param}: median {result.median_ms:.3f} ms")
    return result


def write_csv(results: Iterable[BenchResult], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for result in results:
        writer.writerow(result.csv_row())


def _median(results: Iterable[BenchResult], scenario: str, strategy: str, param: Optional[str] = None) -> Optional[float]:
    for result in results:
        if result.scenario == scenario and result.strategy == strategy and (param is None or result.param == param):
            return result.median_ms
    return None


def summarize(results: List[BenchResult]) -> Dict[str, float]:
    """
    Slowdown ratios of medians.

    Keys:
        ``construction/<strategy>/<param>``: relative to convention
        ``update/<strategy>``: relative to the baseline
        ``rewrite``: rewritten over original
        ``scaling/<n>``: compilation over interpretation
    """
    summary: Dict[str, float] = {}
    for result in results:
        if result.scenario == "construction" and result.strategy != "convention":
            base = _median(results, "construction", "convention", result.param)
            if base:
                summary[f"construction/{result.strategy}/{result.param}"] = result.median_ms / base
        elif result.scenario == "update" and result.strategy != "baseline":
            base = _median(results, "update", "baseline")
            if base:
                summary[f"update/{result.strategy}"] = result.median_ms / base
        elif result.scenario == "rewrite" and result.strategy == "rewritten":
            base = _median(results, "rewrite", "original")
            if base:
                summary["rewrite"] = result.median_ms / base
        elif result.scenario == "scaling" and result.strategy == "compilation":
            base = _median(results, "scaling", "interpretation", result.param)
            if base:
                summary[f"scaling/{result.param}"] = result.median_ms / base
    return summary
