"""
Runtime values, heap objects and scopes.

Primitives map onto Python values (nil -> None, Bool -> bool, Number -> float,
String -> str). Everything with identity lives on the heap and carries an
``object_id`` allocated by the owning engine's ``Heap``.
"""
import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

Value = Any


class HeapObject:
    """Object with stable identity and an ordered property map."""

    __slots__ = ("object_id", "properties", "cls", "interceptors")

    def __init__(self, object_id: int, properties: Optional[Dict[str, Value]] = None,
                 cls: Optional["ClassValue"] = None):
        self.object_id = object_id
        self.properties: Dict[str, Value] = properties if properties is not None else {}
        self.cls = cls
        self.interceptors: Dict[str, Any] = {}

    def get_property(self, key: str) -> Value:
        return self.properties.get(key)

    def has_property(self, key: str) -> bool:
        return key in self.properties

    def set_property(self, key: str, value: Value) -> None:
        self.properties[key] = value

    def keys(self) -> List[str]:
        return list(self.properties)

    def __repr__(self) -> str:
        return f"{type(self).__name__}#{self.object_id}"


def array_index(key: str) -> Optional[int]:
    """Return the element index a property name denotes, if any."""
    if key.isdigit() and (key == "0" or key[0] != "0"):
        return int(key)
    return None


class HeapArray(HeapObject):
    """Array whose elements are properties "0".."n-1" plus ``length``."""

    __slots__ = ("elements",)

    def __init__(self, object_id: int, elements: Optional[List[Value]] = None):
        super().__init__(object_id)
        self.elements: List[Value] = elements if elements is not None else []

    def get_property(self, key: str) -> Value:
        if key == "length":
            return float(len(self.elements))
        index = array_index(key)
        if index is not None:
            return self.elements[index] if index < len(self.elements) else None
        return self.properties.get(key)

    def has_property(self, key: str) -> bool:
        if key == "length":
            return True
        index = array_index(key)
        if index is not None:
            return index < len(self.elements)
        return key in self.properties

    def set_property(self, key: str, value: Value) -> None:
        if key == "length":
            size = int(value) if isinstance(value, float) and value >= 0 else 0
            if size < len(self.elements):
                del self.elements[size:]
            else:
                self.elements.extend([None] * (size - len(self.elements)))
            return
        index = array_index(key)
        if index is None:
            self.properties[key] = value
            return
        if index >= len(self.elements):
            self.elements.extend([None] * (index + 1 - len(self.elements)))
        self.elements[index] = value

    def keys(self) -> List[str]:
        return [str(i) for i in range(len(self.elements))] + list(self.properties)


class Closure(HeapObject):
    """RXL function value: a FunctionLit node plus its defining scope."""

    __slots__ = ("node", "scope")

    def __init__(self, object_id: int, node, scope: "Scope"):
        super().__init__(object_id)
        self.node = node
        self.scope = scope

    @property
    def name(self) -> str:
        return self.node.value or "anonymous"


class NativeFunction(HeapObject):
    """
    Host-implemented function.

    ``fn(engine, this, args)`` or, with ``needs_scope``,
    ``fn(engine, this, args, scope)`` where scope is the caller's scope.
    """

    __slots__ = ("fn", "name", "needs_scope")

    def __init__(self, object_id: int, fn: Callable, name: str, needs_scope: bool = False):
        super().__init__(object_id)
        self.fn = fn
        self.name = name
        self.needs_scope = needs_scope


class PartialApplication(HeapObject):
    """A function with leading arguments already bound."""

    __slots__ = ("function", "args")

    def __init__(self, object_id: int, function: Value, args: List[Value]):
        super().__init__(object_id)
        self.function = function
        self.args = list(args)


class ClassValue(HeapObject):
    __slots__ = ("name", "constructor", "methods")

    def __init__(self, object_id: int, name: str, constructor: Optional[Closure],
                 methods: Dict[str, Closure]):
        super().__init__(object_id)
        self.name = name
        self.constructor = constructor
        self.methods = methods


class HostObject(HeapObject):
    """RXL face of a host object (aexpr handle, trigger, view, layer)."""

    __slots__ = ("host", "methods", "label")

    def __init__(self, object_id: int, host: Any, methods: Dict[str, Callable], label: str):
        super().__init__(object_id)
        self.host = host
        self.methods = methods
        self.label = label


class ScopeRef(HeapObject):
    """Reified scope passed to the local-variable hooks."""

    __slots__ = ("scope",)

    def __init__(self, object_id: int, scope: "Scope"):
        super().__init__(object_id)
        self.scope = scope


FUNCTION_TYPES = (Closure, NativeFunction, PartialApplication)


class Scope:
    """
    Variable environment. Bindings keep declaration order; ``order`` holds the
    engine-wide declaration number of each binding.
    """

    __slots__ = ("scope_id", "bindings", "order", "parent", "name")

    def __init__(self, scope_id: int, parent: Optional["Scope"] = None, name: str = "block"):
        self.scope_id = scope_id
        self.bindings: Dict[str, Value] = {}
        self.order: Dict[str, int] = {}
        self.parent = parent
        self.name = name

    def owner_of(self, name: str) -> Optional["Scope"]:
        scope = self
        while scope is not None:
            if name in scope.bindings:
                return scope
            scope = scope.parent
        return None

    def chain(self) -> Iterator["Scope"]:
        scope = self
        while scope is not None:
            yield scope
            scope = scope.parent

    def __repr__(self) -> str:
        return f"Scope#{self.scope_id}({self.name})"


@dataclass
class Heap:
    """Identity allocator for one engine."""
    _object_ids: Iterator[int] = field(default_factory=lambda: itertools.count(1))
    _declarations: Iterator[int] = field(default_factory=lambda: itertools.count(1))
    next_scope_id: int = 1

    def new_object(self, properties: Optional[Dict[str, Value]] = None,
                   cls: Optional[ClassValue] = None) -> HeapObject:
        return HeapObject(next(self._object_ids), properties, cls)

    def new_array(self, elements: Optional[List[Value]] = None) -> HeapArray:
        return HeapArray(next(self._object_ids), elements)

    def new_closure(self, node, scope: Scope) -> Closure:
        return Closure(next(self._object_ids), node, scope)

    def new_native(self, fn: Callable, name: str, needs_scope: bool = False) -> NativeFunction:
        return NativeFunction(next(self._object_ids), fn, name, needs_scope)

    def new_partial(self, function: Value, args: List[Value]) -> PartialApplication:
        return PartialApplication(next(self._object_ids), function, args)

    def new_class(self, name: str, constructor: Optional[Closure], methods: Dict[str, Closure]) -> ClassValue:
        return ClassValue(next(self._object_ids), name, constructor, methods)

    def new_host(self, host: Any, methods: Dict[str, Callable], label: str) -> HostObject:
        return HostObject(next(self._object_ids), host, methods, label)

    def new_scope_ref(self, scope: Scope) -> ScopeRef:
        return ScopeRef(next(self._object_ids), scope)

    def new_scope(self, parent: Optional[Scope], name: str = "block") -> Scope:
        scope_id = self.next_scope_id
        self.next_scope_id += 1
        return Scope(scope_id, parent, name)

    def next_declaration(self) -> int:
        return next(self._declarations)


def same_value(left: Value, right: Value) -> bool:
    """Equality contract: primitives by value, heap values by identity."""
    if left is right:
        return True
    if type(left) is not type(right):
        return False
    if isinstance(left, (float, str)):
        return left == right
    return False


def unchanged(previous: Value, current: Value) -> bool:
    """Change detection: ``same_value``, except that NaN stays NaN."""
    if same_value(previous, current):
        return True
    return type(previous) is float and type(current) is float and math.isnan(previous) and math.isnan(current)


def truthy(value: Value) -> bool:
    return value is not None and value is not False


def is_callable(value: Value) -> bool:
    return isinstance(value, FUNCTION_TYPES) or (callable(value) and not isinstance(value, HeapObject))


def identity_key(value: Value) -> Tuple[Any, ...]:
    """Hashable key under which ``same_value`` values collide."""
    if isinstance(value, HeapObject):
        return ("heap", value.object_id)
    return (type(value).__name__, value)


def type_name(value: Value) -> str:
    if value is None:
        return "nil"
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, float):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, HeapArray):
        return "array"
    if isinstance(value, FUNCTION_TYPES):
        return "function"
    if isinstance(value, ClassValue):
        return "class"
    return "object"


def format_number(value: float) -> str:
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    if value.is_integer() and abs(value) < 1e21:
        return str(int(value))
    return repr(value)


def property_key(value: Value) -> str:
    """Property name an index or member key denotes."""
    if isinstance(value, str):
        return value
    if isinstance(value, float) and not isinstance(value, bool):
        return format_number(value)
    return format_value(value)


def format_value(value: Value, _active: Optional[set] = None) -> str:
    """Render a value the way ``print`` shows it."""
    if value is None:
        return "nil"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, float):
        return format_number(value)
    if isinstance(value, str):
        return value
    if isinstance(value, Closure):
        return f"<function {value.name}>"
    if isinstance(value, NativeFunction):
        return f"<function {value.name}>"
    if isinstance(value, PartialApplication):
        return "<function partial>"
    if isinstance(value, ClassValue):
        return f"<class {value.name}>"
    if isinstance(value, HostObject):
        return f"<{value.label}>"
    if isinstance(value, ScopeRef):
        return f"<scope {value.scope.scope_id}>"
    if not isinstance(value, HeapObject):
        return f"<host {type(value).__name__}>"

    active = _active if _active is not None else set()
    if value.object_id in active:
        return "[circular]"
    active.add(value.object_id)
    try:
        if isinstance(value, HeapArray):
            return "[" + ", ".join(format_value(v, active) for v in value.elements) + "]"
        body = ", ".join(f"{k}: {format_value(v, active)}" for k, v in value.properties.items())
        text = "{" + body + "}"
        if value.cls is not None:
            return f"{value.cls.name} {text}"
        return text
    finally:
        active.discard(value.object_id)


def to_value(heap: Heap, data: Any) -> Value:
    """Convert host data (numbers, strings, lists, dicts) to RXL values."""
    if data is None or isinstance(data, (bool, str, HeapObject)):
        return data
    if isinstance(data, (int, float)):
        return float(data)
    if isinstance(data, (list, tuple)):
        return heap.new_array([to_value(heap, item) for item in data])
    if isinstance(data, dict):
        return heap.new_object({str(k): to_value(heap, v) for k, v in data.items()})
    if callable(data):
        return data
    raise TypeError(f"cannot convert {type(data).__name__} to an RXL value")


def to_host(value: Value) -> Any:
    """Convert an RXL value to plain host data (inverse of ``to_value``)."""
    if isinstance(value, HeapArray):
        return [to_host(v) for v in value.elements]
    if isinstance(value, HostObject):
        return value.host
    if isinstance(value, HeapObject) and not isinstance(value, (FUNCTION_TYPES, ClassValue, ScopeRef)):
        return {k: to_host(v) for k, v in value.properties.items()}
    return value
