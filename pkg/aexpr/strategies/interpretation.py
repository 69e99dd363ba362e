"""
Interpretation strategy.

Each handle gets its own analysis interpreter booted from scratch. Evaluating
the thunk there records every member read; the strategy then arms a
``PropertyInterceptor`` on each property read, so later writes to those
properties notify the handle. Local and global variables are never
intercepted.
"""
import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List, Optional, Set

from aexpr.keys import MemberKey
from aexpr.strategies.base import Capabilities, Strategy, StrategyKind
from rxl.interpreter import Interpreter
from rxl.nodes import AstNode
from rxl.parser import parse_expression
from rxl.values import Closure, HeapObject, Scope, Value

if TYPE_CHECKING:
    from aexpr.handle import AExprHandle

logger = logging.getLogger(__name__)


@dataclass
class PropertyInterceptor:
    """Shared by every handle that read ``key``; lives on the heap object."""
    key: MemberKey
    subscribers: Set[int] = field(default_factory=set)


@dataclass
class AnalysisContext:
    aexpr_id: int
    observed: Dict[MemberKey, HeapObject] = field(default_factory=dict)
    depth: int = 0


class ExpressionInterpreter(Interpreter):
    """Interpreter that records member reads into the innermost analysis context."""

    def __init__(self, engine):
        super().__init__(engine)
        self.contexts: List[AnalysisContext] = []
        self.environment: Scope = engine.boot_environment(self, engine.globals)

    def read_member(self, obj: Value, key: str, node: Optional[AstNode] = None) -> Value:
        value = self.engine.read_property(obj, key, node)
        if self.contexts and isinstance(obj, HeapObject):
            self.contexts[-1].observed[MemberKey(obj.object_id, key)] = obj
        return value


@dataclass
class InterpretationState:
    interpreter: ExpressionInterpreter
    thunk: Value
    observed: Dict[MemberKey, HeapObject] = field(default_factory=dict)


class InterpretationStrategy(Strategy):
    kind = StrategyKind.INTERPRETATION
    capabilities = Capabilities(
        members=True, locals=False, globals=False, natives=False,
        explicit_scope=True, immediate=True,
    )

    def __init__(self, engine):
        super().__init__(engine)
        self.states: Dict[int, InterpretationState] = {}
        self.handles: Dict[int, "AExprHandle"] = {}
        self.armed: Dict[MemberKey, HeapObject] = {}

    # Registration

    def register(self, handle: "AExprHandle") -> None:
        self.states[handle.aexpr_id] = self._prepare(handle)
        self.handles[handle.aexpr_id] = handle
        try:
            handle.last_result = self.analyze(handle)
        except Exception:
            self.unregister(handle)
            raise

    def unregister(self, handle: "AExprHandle") -> None:
        state = self.states.pop(handle.aexpr_id, None)
        self.handles.pop(handle.aexpr_id, None)
        if state is not None:
            for key, obj in state.observed.items():
                self._disarm(handle.aexpr_id, key, obj)

    def _prepare(self, handle: "AExprHandle") -> InterpretationState:
        interpreter = ExpressionInterpreter(self.engine)
        thunk = handle.expr
        record = handle.locals_record
        if (isinstance(thunk, Closure) and thunk.node.source and record is not None
                and thunk.scope is handle.scope):
            # re-read the thunk from its source against the captured locals only
            scope = self.engine.heap.new_scope(interpreter.environment, "locals")
            scope.bindings.update(record.properties)
            thunk = interpreter.evaluate(parse_expression(thunk.node.source), scope)
        return InterpretationState(interpreter, thunk)

    # Evaluation

    def evaluate(self, handle: "AExprHandle") -> Value:
        state = self.states[handle.aexpr_id]
        return state.interpreter.call_function(state.thunk, [])

    def analyze(self, handle: "AExprHandle") -> Value:
        """
        Evaluate the thunk under instrumentation and re-arm interceptors.

        Dependencies and interceptors stay untouched when evaluation fails.

        Returns:
            The thunk's result
        """
        state = self.states[handle.aexpr_id]
        interpreter = state.interpreter
        context = AnalysisContext(handle.aexpr_id, depth=len(interpreter.contexts))
        interpreter.contexts.append(context)
        try:
            value = interpreter.call_function(state.thunk, [])
        finally:
            interpreter.contexts.pop()
        self._rearm(handle.aexpr_id, state, context.observed)
        handle.dependencies = set(context.observed)
        return value

    def after_fire(self, handle: "AExprHandle") -> None:
        self.analyze(handle)

    # Interceptors

    def _rearm(self, aexpr_id: int, state: InterpretationState, observed: Dict[MemberKey, HeapObject]) -> None:
        for key, obj in state.observed.items():
            if key not in observed:
                self._disarm(aexpr_id, key, obj)
        for key, obj in observed.items():
            if key not in state.observed:
                self._arm(aexpr_id, key, obj)
        state.observed = observed

    def _arm(self, aexpr_id: int, key: MemberKey, obj: HeapObject) -> None:
        interceptor = obj.interceptors.get(key.name)
        if interceptor is None:
            interceptor = obj.interceptors[key.name] = PropertyInterceptor(key)
            self.armed[key] = obj
        interceptor.subscribers.add(aexpr_id)

    def _disarm(self, aexpr_id: int, key: MemberKey, obj: HeapObject) -> None:
        interceptor = obj.interceptors.get(key.name)
        if interceptor is None:
            return
        interceptor.subscribers.discard(aexpr_id)
        if not interceptor.subscribers:
            del obj.interceptors[key.name]
            self.armed.pop(key, None)

    def on_member_write(self, obj: HeapObject, name: str) -> None:
        interceptor = obj.interceptors.get(name)
        if interceptor is None:
            return
        handles = self.handles
        subscribers = [handles[i] for i in sorted(interceptor.subscribers) if i in handles]
        if subscribers:
            self.engine.propagator.notify(subscribers)

    def registry_size(self) -> int:
        return len(self.states) + len(self.armed)
