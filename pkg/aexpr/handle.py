"""The active expression handle."""
import logging
from enum import Enum
from typing import TYPE_CHECKING, Any, List, Optional, Set

from aexpr.exceptions import DisposedHandle
from aexpr.keys import DependencyKey
from rxl.values import HeapObject, HostObject, Scope, Value, unchanged

if TYPE_CHECKING:
    from aexpr.engine import Engine
    from aexpr.strategies.base import StrategyKind

logger = logging.getLogger(__name__)


class HandleRole(str, Enum):
    """How the propagator schedules a handle."""
    ORDINARY = "ordinary"
    SIGNAL_MONITOR = "signal-monitor"
    BINDING = "binding"


class AExprHandle:
    """
    One active expression: a zero-argument thunk whose result is monitored.

    ``last_result`` always holds the value most recently communicated to the
    callbacks (or the seed value). Callbacks run in registration order and
    receive only the new value.
    """

    def __init__(
        self,
        engine: "Engine",
        aexpr_id: int,
        expr: Value,
        scope: Optional[Scope],
        strategy: "StrategyKind",
        role: HandleRole = HandleRole.ORDINARY,
        locals_record: Optional[HeapObject] = None,
    ):
        self.engine = engine
        self.aexpr_id = aexpr_id
        self.expr = expr
        self.scope = scope
        self.strategy = strategy
        self.role = role
        self.locals_record = locals_record
        self.last_result: Value = None
        self.callbacks: List[Value] = []
        self.disposed = False
        self.dependencies: Set[DependencyKey] = set()
        self.deferred = False
        self.analysis_state: Any = None  # strategy-private
        self.wrapper: Optional[HostObject] = None

    @property
    def label(self) -> str:
        return f"aexpr #{self.aexpr_id}"

    def __repr__(self) -> str:
        state = "disposed" if self.disposed else self.strategy.value
        return f"AExprHandle(#{self.aexpr_id}, {state})"

    def on_change(self, callback: Value) -> "AExprHandle":
        """
        Subscribe a callback; it is not invoked for the current value.

        Raises:
            DisposedHandle: If the handle was disposed
        """
        if self.disposed:
            raise DisposedHandle(self.aexpr_id, "register a callback")
        self.callbacks.append(callback)
        return self

    def now(self) -> Value:
        if self.disposed:
            raise DisposedHandle(self.aexpr_id, "report its value")
        return self.last_result

    def maybe_changed(self, errors: Optional[List[Exception]] = None) -> bool:
        """
        Re-evaluate and notify callbacks if the result changed.

        Callback errors do not stop the remaining callbacks. They are appended
        to ``errors`` when given; otherwise the first one is raised after all
        callbacks ran.

        Returns:
            True if the result changed
        """
        if self.disposed:
            return False
        value = self.engine.strategy.evaluate(self)
        if unchanged(self.last_result, value):
            return False
        self.last_result = value
        collected: List[Exception] = [] if errors is None else errors
        for callback in list(self.callbacks):
            if self.disposed:
                break
            try:
                self.engine.call_function(callback, [value])
            except Exception as error:
                logger.error(f"Callback of aexpr #{self.aexpr_id} failed: {error}")
                collected.append(error)
        if errors is None and collected:
            raise collected[0]
        return True

    def dispose(self) -> None:
        """Unregister from the strategy; idempotent."""
        if self.disposed:
            return
        self.disposed = True
        self.engine.strategy.unregister(self)
        self.engine.handles.pop(self.aexpr_id, None)
        self.callbacks.clear()
        self.dependencies = set()
        self.analysis_state = None
        logger.debug(f"Disposed aexpr #{self.aexpr_id}")
