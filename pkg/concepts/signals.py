"""
Signals: variables bound to an expression, updated in topological order.

``signal c = a + b;`` declares ``c`` with the current value of ``a + b`` and
creates a monitor aexpr over the expression. When monitors fire during a
propagation batch, the propagator calls ``resolve_pending``: every affected
signal is re-assigned exactly once, upstream before downstream, while
ordinary aexprs stay deferred until the whole graph is consistent.
"""
import heapq
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Dict, List, Set

from aexpr.exceptions import UnsupportedStrategy
from aexpr.handle import AExprHandle, HandleRole
from aexpr.keys import DependencyKey
from aexpr.strategies import StrategyKind
from rxl.exceptions import RxlError
from rxl.nodes import AstNode, NodeKind, make_node
from rxl.values import Scope

if TYPE_CHECKING:
    from aexpr.engine import Engine

logger = logging.getLogger(__name__)


class CyclicSignal(RxlError):
    """Raised when signal dependencies form a cycle."""

    def __init__(self, names: List[str]):
        super().__init__(
            message=f"Cyclic signal: {' -> '.join(names)}",
            details={"signals": names}
        )


@dataclass
class SignalMeta:
    signal_id: int
    name: str
    scope: Scope
    target: DependencyKey
    monitor: AExprHandle
    resolver: Callable[[], None]
    depends_on: Set[int] = field(default_factory=set)


class SignalRegistry:
    """All signals of one engine, in declaration order."""

    def __init__(self, engine: "Engine"):
        self._engine = engine
        self.signals: Dict[int, SignalMeta] = {}
        self._by_target: Dict[DependencyKey, int] = {}
        self.pending: Set[int] = set()
        self.resolve_counts: Counter = Counter()

    def define(self, decl: AstNode, scope: Scope) -> SignalMeta:
        """
        Declare the signal variable and start monitoring its expression.

        Raises:
            UnsupportedStrategy: Outside the compilation strategy
            CyclicSignal: If the new signal closes a dependency cycle
        """
        engine = self._engine
        kind = engine.strategy.kind
        if kind is not StrategyKind.COMPILATION:
            raise UnsupportedStrategy("signal declarations", kind.value)

        name = decl.value
        expression = decl.children[0]
        thunk_node = make_node(NodeKind.FUNCTION_LIT, [expression], like=decl, params=[], arrow=True)
        thunk = engine.heap.new_closure(thunk_node, scope)
        monitor = engine.create_aexpr(thunk, scope=scope, role=HandleRole.SIGNAL_MONITOR)
        engine.declare_local(scope, name, monitor.now())

        signal_id = len(self.signals) + 1

        def resolve() -> None:
            engine.assign_local(scope, name, engine.call_function(thunk, []))

        meta = SignalMeta(signal_id, name, scope, engine.variable_key(scope, name), monitor, resolve)
        self.signals[signal_id] = meta
        self._by_target[meta.target] = signal_id
        monitor.on_change(lambda value: self.pending.add(signal_id))
        # a redeclared name can turn an earlier signal's read into an edge
        for other in self.signals.values():
            other.depends_on = self._edges(other)
        self._check_cycles()
        logger.debug(f"Defined signal {name} depending on {sorted(meta.depends_on)}")
        return meta

    def _edges(self, meta: SignalMeta) -> Set[int]:
        by_target = self._by_target
        return {by_target[key] for key in meta.monitor.dependencies if key in by_target}

    def _check_cycles(self) -> None:
        visited: Set[int] = set()
        stack: List[int] = []

        def has_cycle(signal_id: int) -> bool:
            visited.add(signal_id)
            stack.append(signal_id)
            for dep in sorted(self.signals[signal_id].depends_on):
                if dep in stack:
                    stack.append(dep)
                    return True
                if dep not in visited and has_cycle(dep):
                    return True
            stack.pop()
            return False

        for signal_id in self.signals:
            if signal_id not in visited and has_cycle(signal_id):
                start = stack.index(stack[-1])
                raise CyclicSignal([self.signals[s].name for s in stack[start:]])

    def downstream(self, changed: Set[int]) -> Set[int]:
        """Changed signals plus everything that transitively depends on them."""
        dependents: Dict[int, Set[int]] = {}
        for meta in self.signals.values():
            for dep in meta.depends_on:
                dependents.setdefault(dep, set()).add(meta.signal_id)
        affected = set(changed)
        frontier = list(changed)
        while frontier:
            for dependent in dependents.get(frontier.pop(), ()):
                if dependent not in affected:
                    affected.add(dependent)
                    frontier.append(dependent)
        return affected

    def topological_order(self, affected: Set[int]) -> List[int]:
        """Kahn's algorithm over the affected subgraph; ties go to the earlier declaration."""
        indegree = {s: 0 for s in affected}
        dependents: Dict[int, List[int]] = {s: [] for s in affected}
        for signal_id in affected:
            for dep in self.signals[signal_id].depends_on:
                if dep in affected:
                    indegree[signal_id] += 1
                    dependents[dep].append(signal_id)
        ready = [s for s, degree in indegree.items() if degree == 0]
        heapq.heapify(ready)
        order: List[int] = []
        while ready:
            signal_id = heapq.heappop(ready)
            order.append(signal_id)
            for dependent in dependents[signal_id]:
                indegree[dependent] -= 1
                if indegree[dependent] == 0:
                    heapq.heappush(ready, dependent)
        if len(order) != len(affected):
            remaining = sorted(affected - set(order))
            raise CyclicSignal([self.signals[s].name for s in remaining])
        return order

    def resolve_pending(self) -> None:
        """Run each affected resolver once, upstream first, then re-seed the monitors."""
        changed, self.pending = self.pending, set()
        if not changed:
            return
        order = self.topological_order(self.downstream(changed))
        strategy = self._engine.strategy
        for signal_id in order:
            meta = self.signals[signal_id]
            if meta.monitor.disposed:
                continue
            meta.resolver()
            self.resolve_counts[meta.name] += 1
        for signal_id in order:
            meta = self.signals[signal_id]
            if not meta.monitor.disposed:
                meta.monitor.last_result = strategy.analyze(meta.monitor)
                meta.depends_on = self._edges(meta)
        self._check_cycles()
        logger.debug(f"Resolved signals in order {[self.signals[s].name for s in order]}")
