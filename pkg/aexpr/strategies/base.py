"""Common interface of the change-detection strategies."""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Optional

from aexpr.keys import DependencyKey
from rxl.values import HeapObject, Value

if TYPE_CHECKING:
    from aexpr.engine import Engine
    from aexpr.handle import AExprHandle


class StrategyKind(str, Enum):
    CONVENTION = "convention"
    INTERPRETATION = "interpretation"
    COMPILATION = "compilation"


@dataclass(frozen=True)
class Capabilities:
    """What state changes a strategy can detect, and when."""
    members: bool
    locals: bool
    globals: bool
    natives: bool  # descends into native built-ins
    explicit_scope: bool  # thunks need a captured locals record
    immediate: bool  # notifies at the write instead of at check()


class Strategy(ABC):
    """
    Base class for change-detection strategies.

    The engine forwards store events to the strategy; the strategy decides
    which handles to hand to the propagator.
    """

    kind: StrategyKind
    capabilities: Capabilities

    def __init__(self, engine: "Engine"):
        self.engine = engine

    @abstractmethod
    def register(self, handle: "AExprHandle") -> None:
        """Seed ``handle.last_result`` and start watching the handle."""

    @abstractmethod
    def unregister(self, handle: "AExprHandle") -> None:
        """Forget every registry entry of the handle."""

    def evaluate(self, handle: "AExprHandle") -> Value:
        return self.engine.call_function(handle.expr, [])

    def after_fire(self, handle: "AExprHandle") -> None:
        """Hook run by the propagator after a handle's result changed."""

    @property
    def recording(self) -> bool:
        return False

    def record_read(self, key: DependencyKey, obj: Optional[HeapObject] = None) -> None:
        pass

    def local_written(self, key: DependencyKey) -> None:
        pass

    def member_written(self, obj: HeapObject, name: str) -> None:
        pass

    def on_member_write(self, obj: HeapObject, name: str) -> None:
        pass

    def registry_size(self) -> int:
        return 0
