"""Change-detection strategies."""
from typing import Dict, Type

from aexpr.strategies.base import Capabilities, Strategy, StrategyKind
from aexpr.strategies.compilation import CompilationStrategy, DependencyMap
from aexpr.strategies.convention import ConventionStrategy
from aexpr.strategies.interpretation import InterpretationStrategy, PropertyInterceptor

STRATEGIES: Dict[StrategyKind, Type[Strategy]] = {
    StrategyKind.CONVENTION: ConventionStrategy,
    StrategyKind.INTERPRETATION: InterpretationStrategy,
    StrategyKind.COMPILATION: CompilationStrategy,
}

__all__ = [
    "Capabilities",
    "CompilationStrategy",
    "ConventionStrategy",
    "DependencyMap",
    "InterpretationStrategy",
    "PropertyInterceptor",
    "STRATEGIES",
    "Strategy",
    "StrategyKind",
]
