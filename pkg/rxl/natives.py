"""Language-level built-in functions and array methods."""
import math
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Dict, List

from rxl.exceptions import AssertionFailed, RuntimeErrorKind, RxlRuntimeError
from rxl.values import HeapArray, HeapObject, Scope, Value, format_value, truthy, type_name

if TYPE_CHECKING:
    from aexpr.engine import Engine

NativeImpl = Callable[..., Value]


def _argument(args: List[Value], position: int) -> Value:
    return args[position] if position < len(args) else None


def _number(name: str, value: Value) -> float:
    if type(value) is not float:
        raise RxlRuntimeError(RuntimeErrorKind.DIVISION_TYPES, f"{name}() needs a number, got {type_name(value)}")
    return value


def _math(name: str, fn: Callable[[float], float], rounds: bool = False) -> NativeImpl:
    def native(engine: "Engine", this: Value, args: List[Value]) -> Value:
        value = _number(name, _argument(args, 0))
        # rounding leaves infinities and NaN as they are
        if rounds and not math.isfinite(value):
            return value
        return float(fn(value))
    return native


def _sqrt(value: float) -> float:
    return math.sqrt(value) if value >= 0 else math.nan


def native_print(engine: "Engine", this: Value, args: List[Value]) -> Value:
    engine.emit(" ".join(format_value(arg) for arg in args))
    return None


def native_assert(engine: "Engine", this: Value, args: List[Value]) -> Value:
    if not truthy(_argument(args, 0)):
        message = _argument(args, 1)
        raise AssertionFailed(format_value(message) if message is not None else "assertion failed")
    return None


def native_str(engine: "Engine", this: Value, args: List[Value]) -> Value:
    return format_value(_argument(args, 0))


def native_len(engine: "Engine", this: Value, args: List[Value]) -> Value:
    value = _argument(args, 0)
    if isinstance(value, str):
        return float(len(value))
    if isinstance(value, HeapArray):
        return float(len(value.elements))
    if isinstance(value, HeapObject):
        return float(len(value.properties))
    raise RxlRuntimeError(RuntimeErrorKind.BAD_MEMBER_TARGET, f"len() of {type_name(value)}")


def _array_receiver(name: str, this: Value) -> HeapArray:
    if not isinstance(this, HeapArray):
        raise RxlRuntimeError(RuntimeErrorKind.BAD_MEMBER_TARGET, f"{name}() called on {type_name(this)}")
    return this


def array_push(engine: "Engine", this: Value, args: List[Value]) -> Value:
    array = _array_receiver("push", this)
    for value in args:
        size = len(array.elements)
        # the element write grows the array and reports the new length
        engine.assign_member(array, str(size), value)
    return float(len(array.elements))


def array_pop(engine: "Engine", this: Value, args: List[Value]) -> Value:
    array = _array_receiver("pop", this)
    if not array.elements:
        return None
    size = len(array.elements)
    value = array.elements[-1]
    engine.assign_member(array, str(size - 1), None)
    engine.assign_member(array, "length", float(size - 1))
    return value


LANGUAGE_NATIVES: Dict[str, NativeImpl] = {
    "print": native_print,
    "assert": native_assert,
    "floor": _math("floor", math.floor, rounds=True),
    "ceil": _math("ceil", math.ceil, rounds=True),
    "abs": _math("abs", abs),
    "sqrt": _math("sqrt", _sqrt),
    "str": native_str,
    "len": native_len,
}

ARRAY_METHODS: Dict[str, NativeImpl] = {
    "push": array_push,
    "pop": array_pop,
}


PRELUDE_PATH = Path(__file__).with_name("prelude.rxl")


def load_prelude() -> str:
    return PRELUDE_PATH.read_text(encoding="utf-8")


def install_language_natives(engine: "Engine", scope: Scope) -> None:
    for name, fn in LANGUAGE_NATIVES.items():
        scope.bindings[name] = engine.heap.new_native(fn, name)
