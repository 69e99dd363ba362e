"""
The four benchmark scenarios.

construction  creating aexprs over a rectangle's aspect ratio, on the same or
              on different rectangles
update        random width assignments while an aexpr keeps the aspect ratio
rewrite       quicksort in original and in rewritten form, no aexprs
scaling       quicksort while n array indices are monitored
"""
import logging
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from aexpr.engine import Engine
from aexpr.strategies import StrategyKind
from bench import programs
from bench.exceptions import BenchAssertionFailed, MismatchedOutput
from bench.harness import BenchConfig, BenchResult, Trial, measure
from config.settings import Settings
from rxl.exceptions import AssertionFailed
from rxl.values import to_host

logger = logging.getLogger(__name__)

STRATEGY_NAMES = [kind.value for kind in StrategyKind]
BASELINE = "baseline"


def _random_numbers(config: BenchConfig, size: int, low: int = 0, high: int = 100000) -> List[int]:
    rng = np.random.default_rng(config.seed)
    return rng.integers(low, high, size=size).tolist()


def bench_construction(strategy: str, same_object: bool, config: BenchConfig,
                       settings: Optional[Settings] = None) -> BenchResult:
    """Time the creation of ``construction_count`` aexprs in a fresh engine."""
    source = programs.CONSTRUCT_SAME if same_object else programs.CONSTRUCT_DIFFERENT

    def prepare() -> Trial:
        engine = Engine(strategy, settings)
        engine.run(programs.RECTANGLES, preamble={"count": config.construction_count})
        unit = engine.compile(source)
        return Trial(run=lambda: engine.run(unit))

    param = "same" if same_object else "different"
    return measure("construction", strategy, param, prepare, config)


def bench_update(strategy: str, config: BenchConfig, settings: Optional[Settings] = None) -> BenchResult:
    """
    Time ``update_count`` width assignments, each followed by an aspect-ratio
    assertion. ``baseline`` restores the height inline, without aexprs.

    Raises:
        BenchAssertionFailed: If the aspect ratio is wrong after an assignment
    """
    widths = _random_numbers(config, config.update_count, low=1, high=1000)
    if strategy == BASELINE:
        source = programs.UPDATE_BASELINE
    elif strategy == StrategyKind.CONVENTION.value:
        source = programs.UPDATE_CONVENTION
    else:
        source = programs.UPDATE_REACTIVE

    def prepare() -> Trial:
        engine = Engine(StrategyKind.CONVENTION.value if strategy == BASELINE else strategy, settings)
        engine.run(programs.UPDATE_SETUP, preamble={"widths": widths})
        if strategy != BASELINE:
            engine.run(programs.UPDATE_WATCH)
        unit = engine.compile(source)

        def run() -> None:
            try:
                engine.run(unit)
            except AssertionFailed as error:
                raise BenchAssertionFailed("update", strategy, error.message) from error

        return Trial(run=run)

    return measure("update", strategy, str(config.update_count), prepare, config)


def _sort_trial(engine: Engine, values: Sequence[int], unit, outputs: List[list]) -> Trial:
    expected = sorted(float(v) for v in values)

    def verify() -> None:
        result = to_host(engine.globals.bindings["values"])
        if result != expected:
            raise BenchAssertionFailed("sort", engine.strategy.kind.value, "array is not sorted")
        outputs.append(result)

    return Trial(run=lambda: engine.run(unit), verify=verify)


def bench_rewrite_overhead(config: BenchConfig, settings: Optional[Settings] = None) -> List[BenchResult]:
    """
    Time quicksort in its original and its rewritten form.

    Raises:
        MismatchedOutput: If both forms sort differently
    """
    values = _random_numbers(config, config.sort_size)
    results = []
    outputs: Dict[str, List[list]] = {"original": [], "rewritten": []}
    for form, kind, rewrite in (("original", StrategyKind.CONVENTION, False),
                                ("rewritten", StrategyKind.COMPILATION, True)):

        def prepare(kind=kind, rewrite=rewrite, form=form) -> Trial:
            engine = Engine(kind.value, settings)
            engine.run("", preamble={"values": values})
            unit = engine.compile(programs.QUICKSORT, rewrite=rewrite)
            return _sort_trial(engine, values, unit, outputs[form])

        results.append(measure("rewrite", form, str(config.sort_size), prepare, config))

    if outputs["original"][-1] != outputs["rewritten"][-1]:
        raise MismatchedOutput("rewrite", "original and rewritten quicksort disagree")
    return results


def bench_scaling(monitored: int, config: BenchConfig, settings: Optional[Settings] = None) -> List[BenchResult]:
    """Time quicksort under interpretation and compilation with ``monitored`` watched indices."""
    values = _random_numbers(config, config.scaling_size)
    results = []
    for kind in (StrategyKind.INTERPRETATION, StrategyKind.COMPILATION):

        def prepare(kind=kind) -> Trial:
            engine = Engine(kind.value, settings)
            engine.run(programs.MONITOR_INDICES, preamble={
                "values": values,
                "monitored": min(monitored, config.scaling_size),
                "callbacks": config.scaling_callbacks,
            })
            unit = engine.compile(programs.QUICKSORT)
            return _sort_trial(engine, values, unit, [])

        results.append(measure("scaling", kind.value, str(monitored), prepare, config))
    return results


def _strategies(strategy: str, extra: Sequence[str] = ()) -> List[str]:
    if strategy == "all":
        return list(extra) + STRATEGY_NAMES
    return [strategy]


def run_construction(strategy: str, config: BenchConfig, settings: Optional[Settings] = None) -> List[BenchResult]:
    return [
        bench_construction(name, same, config, settings)
        for name in _strategies(strategy)
        for same in (True, False)
    ]


def run_update(strategy: str, config: BenchConfig, settings: Optional[Settings] = None) -> List[BenchResult]:
    return [bench_update(name, config, settings) for name in _strategies(strategy, extra=[BASELINE])]


def run_rewrite(strategy: str, config: BenchConfig, settings: Optional[Settings] = None) -> List[BenchResult]:
    return bench_rewrite_overhead(config, settings)


def run_scaling(strategy: str, config: BenchConfig, settings: Optional[Settings] = None) -> List[BenchResult]:
    results: List[BenchResult] = []
    for monitored in config.scaling_counts:
        results.extend(bench_scaling(monitored, config, settings))
    return results


SCENARIOS: Dict[str, Callable[..., List[BenchResult]]] = {
    "construction": run_construction,
    "update": run_update,
    "rewrite": run_rewrite,
    "scaling": run_scaling,
}


def run_scenario(name: str, strategy: str = "all", config: Optional[BenchConfig] = None,
                 settings: Optional[Settings] = None) -> List[BenchResult]:
    """
    Run one scenario.

    Raises:
        KeyError: For an unknown scenario name
    """
    config = config or BenchConfig.from_settings(settings)
    logger.info(f"Running {name} benchmark ({strategy}) with seed {config.seed}")
    return SCENARIOS[name](strategy, config, settings)
