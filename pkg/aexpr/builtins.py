"""
Reactive built-ins: the access hooks used by rewritten programs, the
``aexpr``/``check``/``trigger``/``select``/``layer``/``proceed`` functions and
the methods of the host objects they return.
"""
import logging
from typing import TYPE_CHECKING, Callable, Dict, List, Optional, Type

from aexpr.handle import AExprHandle
from aexpr.keys import GlobalKey, MemberKey
from aexpr.rewriter import SCOPE_HOOK, hook_name
from concepts.layers import Layer
from concepts.object_queries import View
from concepts.triggers import Trigger
from rxl.exceptions import RuntimeErrorKind, RxlRuntimeError
from rxl.interpreter import binary_operation
from rxl.values import HeapArray, HeapObject, HostObject, Scope, ScopeRef, Value, property_key, type_name

if TYPE_CHECKING:
    from aexpr.engine import Engine

logger = logging.getLogger(__name__)

NativeImpl = Callable[..., Value]


def _argument(args: List[Value], position: int) -> Value:
    return args[position] if position < len(args) else None


def unwrap(value: Value, expected: type, name: str):
    """The host object behind an RXL value, or a BadMemberTarget error."""
    if isinstance(value, HostObject) and isinstance(value.host, expected):
        return value.host
    if isinstance(value, expected):
        return value
    raise RxlRuntimeError(
        RuntimeErrorKind.BAD_MEMBER_TARGET,
        f"{name} expects {expected.__name__}, got {type_name(value)}",
    )


def _scope_of(value: Value) -> Scope:
    if not isinstance(value, ScopeRef):
        raise RxlRuntimeError(RuntimeErrorKind.BAD_MEMBER_TARGET, f"expected a scope, got {type_name(value)}")
    return value.scope


def _object(value: Value, key: str) -> HeapObject:
    if not isinstance(value, HeapObject):
        raise RxlRuntimeError(RuntimeErrorKind.BAD_MEMBER_TARGET, f"cannot set {key!r} on {type_name(value)}")
    return value


# Access hooks. Hot path: no logging.

def hook_scope(engine: "Engine", this: Value, args: List[Value], scope: Scope) -> Value:
    return engine.heap.new_scope_ref(scope)


def hook_get_local(engine: "Engine", this: Value, args: List[Value]) -> Value:
    strategy = engine.strategy
    if strategy.recording:
        strategy.record_read(engine.variable_key(_scope_of(args[0]), args[1]))
    return args[2]


def hook_get_global(engine: "Engine", this: Value, args: List[Value]) -> Value:
    strategy = engine.strategy
    if strategy.recording:
        strategy.record_read(GlobalKey(args[0]))
    return args[1]


def hook_set_local(engine: "Engine", this: Value, args: List[Value]) -> Value:
    engine.strategy.local_written(engine.variable_key(_scope_of(args[0]), args[1]))
    return args[2]


def hook_set_global(engine: "Engine", this: Value, args: List[Value]) -> Value:
    engine.strategy.local_written(GlobalKey(args[0]))
    return args[1]


def hook_get_member(engine: "Engine", this: Value, args: List[Value]) -> Value:
    obj = args[0]
    key = property_key(args[1])
    value = engine.read_property(obj, key)
    strategy = engine.strategy
    if strategy.recording and isinstance(obj, HeapObject):
        strategy.record_read(MemberKey(obj.object_id, key), obj)
    return value


def hook_set_member(engine: "Engine", this: Value, args: List[Value]) -> Value:
    key = property_key(args[1])
    obj = _object(args[0], key)
    value = _argument(args, 2)
    op = _argument(args, 3)
    if op is None or op == "=":
        engine.assign_member(obj, key, value)
        return value
    old = engine.read_property(obj, key)
    if op == "++" or op == "--":
        if type(old) is not float:
            raise RxlRuntimeError(RuntimeErrorKind.DIVISION_TYPES, f"operator {op!r} needs a number, got {type_name(old)}")
        engine.assign_member(obj, key, old + (1.0 if op == "++" else -1.0))
        return old
    value = binary_operation(op[0], old, value)
    engine.assign_member(obj, key, value)
    return value


def hook_call_member(engine: "Engine", this: Value, args: List[Value], scope: Scope) -> Value:
    receiver = args[0]
    key = property_key(args[1])
    fn = hook_get_member(engine, None, [receiver, key])
    return engine.interpreter.call_member(receiver, key, fn, list(args[2:]), scope, None)


HOOKS: Dict[str, NativeImpl] = {
    hook_name("get_member"): hook_get_member,
    hook_name("set_member"): hook_set_member,
    hook_name("call_member"): hook_call_member,
    hook_name("get_local"): hook_get_local,
    hook_name("set_local"): hook_set_local,
    hook_name("get_global"): hook_get_global,
    hook_name("set_global"): hook_set_global,
    SCOPE_HOOK: hook_scope,
}

SCOPED_HOOKS = frozenset({SCOPE_HOOK, hook_name("call_member")})


# Reactive functions

def native_aexpr(engine: "Engine", this: Value, args: List[Value], scope: Scope) -> Value:
    record = _argument(args, 1)
    handle = engine.create_aexpr(
        _argument(args, 0),
        scope=scope,
        locals=record if isinstance(record, HeapObject) else None,
    )
    return engine.wrap(handle)


def native_check(engine: "Engine", this: Value, args: List[Value]) -> Value:
    subset = _argument(args, 0)
    handles: Optional[List[AExprHandle]] = None
    if subset is not None:
        if not isinstance(subset, HeapArray):
            raise RxlRuntimeError(RuntimeErrorKind.BAD_MEMBER_TARGET, f"check() expects an array, got {type_name(subset)}")
        handles = [unwrap(item, AExprHandle, "check()") for item in subset.elements]
    return float(engine.check(handles))


def native_trigger(engine: "Engine", this: Value, args: List[Value]) -> Value:
    return engine.wrap(Trigger(unwrap(_argument(args, 0), AExprHandle, "trigger()")))


def native_select(engine: "Engine", this: Value, args: List[Value]) -> Value:
    return engine.wrap(engine.queries.select(_argument(args, 0), _argument(args, 1)))


def native_layer(engine: "Engine", this: Value, args: List[Value]) -> Value:
    return engine.wrap(engine.layers.create_layer())


def native_proceed(engine: "Engine", this: Value, args: List[Value]) -> Value:
    return engine.layers.proceed(list(args))


REACTIVE_NATIVES: Dict[str, NativeImpl] = {
    "aexpr": native_aexpr,
    "check": native_check,
    "trigger": native_trigger,
    "select": native_select,
    "layer": native_layer,
    "proceed": native_proceed,
}

SCOPED_NATIVES = frozenset({"aexpr"})


# Host object methods; ``this`` is the HostObject wrapper

def handle_on_change(engine: "Engine", this: Value, args: List[Value]) -> Value:
    unwrap(this, AExprHandle, "onChange()").on_change(_argument(args, 0))
    return this


def handle_now(engine: "Engine", this: Value, args: List[Value]) -> Value:
    return unwrap(this, AExprHandle, "now()").now()


def handle_dispose(engine: "Engine", this: Value, args: List[Value]) -> Value:
    unwrap(this, AExprHandle, "dispose()").dispose()
    return None


def trigger_on_become_true(engine: "Engine", this: Value, args: List[Value]) -> Value:
    unwrap(this, Trigger, "onBecomeTrue()").on_become_true(_argument(args, 0))
    return this


def trigger_on_become_false(engine: "Engine", this: Value, args: List[Value]) -> Value:
    unwrap(this, Trigger, "onBecomeFalse()").on_become_false(_argument(args, 0))
    return this


def view_map(engine: "Engine", this: Value, args: List[Value]) -> Value:
    return engine.wrap(unwrap(this, View, "map()").map(_argument(args, 0)))


def view_filter(engine: "Engine", this: Value, args: List[Value]) -> Value:
    return engine.wrap(unwrap(this, View, "filter()").filter(_argument(args, 0)))


def view_items(engine: "Engine", this: Value, args: List[Value]) -> Value:
    return engine.heap.new_array(unwrap(this, View, "items()").items())


def view_size(engine: "Engine", this: Value, args: List[Value]) -> Value:
    return float(len(unwrap(this, View, "size()")))


def layer_refine_object(engine: "Engine", this: Value, args: List[Value]) -> Value:
    layer = unwrap(this, Layer, "refineObject()")
    engine.layers.refine_object(layer, _argument(args, 0), _argument(args, 1))
    return this


def layer_active_while(engine: "Engine", this: Value, args: List[Value]) -> Value:
    layer = unwrap(this, Layer, "activeWhile()")
    condition = _argument(args, 0)
    if isinstance(condition, HostObject) and isinstance(condition.host, AExprHandle):
        condition = condition.host
    engine.layers.active_while(layer, condition)
    return this


def layer_be_global(engine: "Engine", this: Value, args: List[Value]) -> Value:
    engine.layers.be_global(unwrap(this, Layer, "beGlobal()"))
    return this


def layer_be_not_global(engine: "Engine", this: Value, args: List[Value]) -> Value:
    engine.layers.be_not_global(unwrap(this, Layer, "beNotGlobal()"))
    return this


def layer_is_active(engine: "Engine", this: Value, args: List[Value]) -> Value:
    return engine.layers.is_active(unwrap(this, Layer, "isActive()"))


HOST_METHODS: Dict[Type, Dict[str, NativeImpl]] = {
    AExprHandle: {
        "onChange": handle_on_change,
        "now": handle_now,
        "dispose": handle_dispose,
    },
    Trigger: {
        "onBecomeTrue": trigger_on_become_true,
        "onBecomeFalse": trigger_on_become_false,
    },
    View: {
        "map": view_map,
        "filter": view_filter,
        "items": view_items,
        "size": view_size,
    },
    Layer: {
        "refineObject": layer_refine_object,
        "activeWhile": layer_active_while,
        "beGlobal": layer_be_global,
        "beNotGlobal": layer_be_not_global,
        "isActive": layer_is_active,
    },
}


def install_reactive_natives(engine: "Engine", scope: Scope) -> None:
    """Bind hooks and reactive functions into an environment scope."""
    heap = engine.heap
    bindings = scope.bindings
    for name, fn in HOOKS.items():
        bindings[name] = heap.new_native(fn, name, needs_scope=name in SCOPED_HOOKS)
    for name, fn in REACTIVE_NATIVES.items():
        bindings[name] = heap.new_native(fn, name, needs_scope=name in SCOPED_NATIVES)
