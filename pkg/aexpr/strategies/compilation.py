"""
Compilation strategy.

Programs are rewritten so that every variable and member access calls a hook
(see ``aexpr.rewriter``). Analysing a handle evaluates its thunk with an
analysis frame on the stack; read hooks hit during that extent are recorded
into a central ``DependencyMap``. Write hooks look up the map and notify.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Set

from aexpr.keys import DependencyKey, LocalKey, MemberKey
from aexpr.strategies.base import Capabilities, Strategy, StrategyKind
from rxl.values import HeapObject, Value

if TYPE_CHECKING:
    from aexpr.handle import AExprHandle

logger = logging.getLogger(__name__)


class DependencyMap:
    """Key -> aexpr ids and aexpr id -> keys, kept as exact inverses."""

    def __init__(self):
        self.forward: Dict[DependencyKey, Set[int]] = defaultdict(set)
        self.reverse: Dict[int, Set[DependencyKey]] = {}

    def replace(self, aexpr_id: int, keys: Iterable[DependencyKey]) -> None:
        new = set(keys)
        old = self.reverse.pop(aexpr_id, set())
        for key in old - new:
            subscribers = self.forward[key]
            subscribers.discard(aexpr_id)
            if not subscribers:
                del self.forward[key]
        for key in new - old:
            self.forward[key].add(aexpr_id)
        if new:
            self.reverse[aexpr_id] = new

    def remove(self, aexpr_id: int) -> None:
        self.replace(aexpr_id, ())

    def dependents(self, key: DependencyKey) -> List[int]:
        subscribers = self.forward.get(key)
        return sorted(subscribers) if subscribers else []

    def __len__(self) -> int:
        return len(self.forward) + len(self.reverse)


@dataclass
class AnalysisFrame:
    """Set only for the dynamic extent of one analysis."""
    aexpr_id: int
    scope_floor: int  # scopes numbered at or above this belong to the thunk itself
    observed: Set[DependencyKey] = field(default_factory=set)


class CompilationStrategy(Strategy):
    kind = StrategyKind.COMPILATION
    capabilities = Capabilities(
        members=True, locals=True, globals=True, natives=False,
        explicit_scope=False, immediate=True,
    )

    def __init__(self, engine):
        super().__init__(engine)
        self.dependencies = DependencyMap()
        self.frames: List[AnalysisFrame] = []
        self.handles: Dict[int, "AExprHandle"] = {}

    def register(self, handle: "AExprHandle") -> None:
        self.handles[handle.aexpr_id] = handle
        try:
            handle.last_result = self.analyze(handle)
        except Exception:
            self.handles.pop(handle.aexpr_id, None)
            raise

    def unregister(self, handle: "AExprHandle") -> None:
        self.handles.pop(handle.aexpr_id, None)
        self.dependencies.remove(handle.aexpr_id)

    def analyze(self, handle: "AExprHandle") -> Value:
        """
        Evaluate the thunk with the analysis flag set and record its reads.

        The previous dependency entries are replaced only when evaluation
        succeeds; the frame is popped either way.
        """
        frame = AnalysisFrame(handle.aexpr_id, self.engine.heap.next_scope_id)
        self.frames.append(frame)
        try:
            value = self.engine.call_function(handle.expr, [])
        finally:
            self.frames.pop()
        self.dependencies.replace(handle.aexpr_id, frame.observed)
        handle.dependencies = set(frame.observed)
        return value

    def after_fire(self, handle: "AExprHandle") -> None:
        self.analyze(handle)

    @property
    def recording(self) -> bool:
        return bool(self.frames)

    def record_read(self, key: DependencyKey, obj: Optional[HeapObject] = None) -> None:
        frame = self.frames[-1]
        if isinstance(key, LocalKey) and key.scope_id >= frame.scope_floor:
            return
        frame.observed.add(key)

    def local_written(self, key: DependencyKey) -> None:
        ids = self.dependencies.dependents(key)
        if ids:
            handles = self.handles
            self.engine.propagator.notify([handles[i] for i in ids if i in handles])

    def member_written(self, obj: HeapObject, name: str) -> None:
        self.local_written(MemberKey(obj.object_id, name))

    def registry_size(self) -> int:
        return len(self.handles) + len(self.dependencies)
