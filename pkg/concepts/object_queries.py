"""
Reactive object queries.

``select(Class, predicate)`` returns a view over every instance of the
class for which the predicate currently holds. Each instance gets its own
aexpr over ``predicate(instance)``; a trigger adds the instance when the
predicate becomes true and removes it when it becomes false. Views can be
refined further with ``map`` and ``filter`` operators.
"""
import itertools
import logging
from collections import Counter
from typing import TYPE_CHECKING, Dict, Hashable, List, Optional

from aexpr.handle import AExprHandle
from concepts.triggers import Trigger
from rxl.exceptions import RxlError
from rxl.values import ClassValue, HeapObject, HostObject, Value, identity_key, type_name

if TYPE_CHECKING:
    from aexpr.engine import Engine

logger = logging.getLogger(__name__)


class UntrackedClass(RxlError):
    """Raised when select() is given something other than a class."""

    def __init__(self, value: Value):
        super().__init__(
            message=f"select() expects a class, got {type_name(value)}",
            details={"type": type_name(value)}
        )


class View:
    """An insertion-ordered live set feeding its downstream operators."""

    def __init__(self, registry: "InstanceRegistry", view_id: int):
        self.registry = registry
        self.view_id = view_id
        self._contents: Dict[Hashable, Value] = {}
        self.downstream: List["Operator"] = []
        self.wrapper: Optional[HostObject] = None

    @property
    def label(self) -> str:
        return f"view #{self.view_id}"

    def __len__(self) -> int:
        return len(self._contents)

    def __contains__(self, item: Value) -> bool:
        return identity_key(item) in self._contents

    def items(self) -> List[Value]:
        return list(self._contents.values())

    def add(self, item: Value) -> None:
        key = identity_key(item)
        if key in self._contents:
            return
        self._contents[key] = item
        for operator in list(self.downstream):
            operator.on_add(item)

    def remove(self, item: Value) -> None:
        key = identity_key(item)
        if key not in self._contents:
            return
        del self._contents[key]
        for operator in list(self.downstream):
            operator.on_remove(item)

    def map(self, mapping: Value) -> "View":
        return self.registry.attach(self, MapOperator(self.registry.engine, mapping))

    def filter(self, predicate: Value) -> "View":
        return self.registry.attach(self, FilterOperator(self.registry.engine, predicate))


class Operator:
    """Maintains ``output`` as a function of its input view."""

    output: View

    def on_add(self, item: Value) -> None:
        raise NotImplementedError

    def on_remove(self, item: Value) -> None:
        raise NotImplementedError


class IdentityOperator(Operator):
    def on_add(self, item: Value) -> None:
        self.output.add(item)

    def on_remove(self, item: Value) -> None:
        self.output.remove(item)


class FilterOperator(Operator):
    """One predicate aexpr plus trigger per input item."""

    def __init__(self, engine: "Engine", predicate: Value):
        self.engine = engine
        self.predicate = predicate
        self.handles: Dict[Hashable, AExprHandle] = {}

    def on_add(self, item: Value) -> None:
        engine = self.engine
        thunk = engine.heap.new_partial(self.predicate, [item])
        handle = engine.create_aexpr(thunk)
        self.handles[identity_key(item)] = handle
        output = self.output
        Trigger(handle).on_become_true(lambda: output.add(item)).on_become_false(lambda: output.remove(item))

    def on_remove(self, item: Value) -> None:
        handle = self.handles.pop(identity_key(item), None)
        if handle is not None:
            handle.dispose()
        self.output.remove(item)


class MapOperator(Operator):
    """Caches item -> mapped value; equal mapped values are reference counted."""

    def __init__(self, engine: "Engine", mapping: Value):
        self.engine = engine
        self.mapping = mapping
        self.mapped: Dict[Hashable, Value] = {}
        self.references: Counter = Counter()

    def on_add(self, item: Value) -> None:
        value = self.engine.call_function(self.mapping, [item])
        self.mapped[identity_key(item)] = value
        self.references[identity_key(value)] += 1
        self.output.add(value)

    def on_remove(self, item: Value) -> None:
        key = identity_key(item)
        if key not in self.mapped:
            return
        value = self.mapped.pop(key)
        value_key = identity_key(value)
        self.references[value_key] -= 1
        if self.references[value_key] <= 0:
            del self.references[value_key]
            self.output.remove(value)


class InstanceRegistry:
    """
    Keeps every constructed instance per class and the base view of each
    selected class. Instances are never released.
    """

    def __init__(self, engine: "Engine"):
        self.engine = engine
        self.instances: Dict[int, List[HeapObject]] = {}
        self.base_views: Dict[int, View] = {}
        self._view_ids = itertools.count(1)

    def on_instance_created(self, instance: HeapObject) -> None:
        cls = instance.cls
        if cls is None:
            return
        self.instances.setdefault(cls.object_id, []).append(instance)
        base = self.base_views.get(cls.object_id)
        if base is not None:
            base.add(instance)

    def new_view(self) -> View:
        return View(self, next(self._view_ids))

    def base_view(self, cls: ClassValue) -> View:
        base = self.base_views.get(cls.object_id)
        if base is None:
            base = self.base_views[cls.object_id] = self.new_view()
            for instance in self.instances.get(cls.object_id, ()):
                base.add(instance)
        return base

    def attach(self, source: View, operator: Operator) -> View:
        """Connect ``operator`` below ``source`` and replay the current contents."""
        operator.output = self.new_view()
        source.downstream.append(operator)
        for item in source.items():
            operator.on_add(item)
        logger.debug(f"Attached {type(operator).__name__} below {source.label}")
        return operator.output

    def select(self, cls: Value, predicate: Value = None) -> View:
        """
        Live view of the instances of ``cls`` satisfying ``predicate``.

        Raises:
            UntrackedClass: If ``cls`` is not a class
        """
        if not isinstance(cls, ClassValue):
            raise UntrackedClass(cls)
        base = self.base_view(cls)
        if predicate is None:
            return self.attach(base, IdentityOperator())
        return self.attach(base, FilterOperator(self.engine, predicate))
