"""Tree-walking evaluator for RXL."""
import logging
import math
from typing import TYPE_CHECKING, Callable, Dict, List, Optional

from rxl.exceptions import RuntimeErrorKind, RxlRuntimeError
from rxl.nodes import AstNode, NodeKind
from rxl.values import (
    ClassValue, Closure, HeapArray, HeapObject, NativeFunction, PartialApplication, Scope,
    Value, format_value, is_callable, property_key, same_value, truthy, type_name,
)

if TYPE_CHECKING:
    from aexpr.engine import Engine

logger = logging.getLogger(__name__)


class ReturnSignal(Exception):
    """Unwinds a function body on ``return``."""

    __slots__ = ("value",)

    def __init__(self, value: Value):
        super().__init__()
        self.value = value


def runtime_error(kind: RuntimeErrorKind, message: str, node: Optional[AstNode] = None) -> RxlRuntimeError:
    if node is None:
        return RxlRuntimeError(kind, message)
    return RxlRuntimeError(kind, message, node.line, node.column)


def _numbers(op: str, left: Value, right: Value, node: Optional[AstNode]) -> None:
    if type(left) is not float or type(right) is not float:
        raise runtime_error(
            RuntimeErrorKind.DIVISION_TYPES,
            f"operator {op!r} needs numbers, got {type_name(left)} and {type_name(right)}",
            node,
        )


def _divide(left: float, right: float) -> float:
    if right == 0.0:
        if left == 0.0 or math.isnan(left):
            return math.nan
        return math.copysign(math.inf, left) * math.copysign(1.0, right)
    return left / right


def _remainder(left: float, right: float) -> float:
    if right == 0.0 or math.isinf(left):
        return math.nan
    return math.fmod(left, right)


ARITHMETIC: Dict[str, Callable[[float, float], float]] = {
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _divide,
    "%": _remainder,
}

COMPARISON: Dict[str, Callable[[Value, Value], bool]] = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def binary_operation(op: str, left: Value, right: Value, node: Optional[AstNode] = None) -> Value:
    """Apply a non-short-circuit binary operator."""
    if op == "+":
        if type(left) is float and type(right) is float:
            return left + right
        if isinstance(left, str) or isinstance(right, str):
            return format_value(left) + format_value(right)
        _numbers(op, left, right, node)
    if op == "==":
        return same_value(left, right)
    if op == "!=":
        return not same_value(left, right)
    arithmetic = ARITHMETIC.get(op)
    if arithmetic is not None:
        _numbers(op, left, right, node)
        return arithmetic(left, right)
    comparison = COMPARISON[op]
    if isinstance(left, str) and isinstance(right, str):
        return comparison(left, right)
    _numbers(op, left, right, node)
    return comparison(left, right)


class Interpreter:
    """
    Evaluates RXL syntax trees against an engine.

    Every variable and member mutation goes through the engine's store
    operations. Member reads go through ``read_member`` so subclasses can
    observe them.
    """

    def __init__(self, engine: "Engine"):
        self.engine = engine
        self.heap = engine.heap
        self._dispatch: Dict[NodeKind, Callable[[AstNode, Scope], Value]] = {
            NodeKind.LITERAL: self._literal,
            NodeKind.IDENT: self._ident,
            NodeKind.BINARY: self._binary,
            NodeKind.UNARY: self._unary,
            NodeKind.CONDITIONAL: self._conditional,
            NodeKind.ASSIGN: self._assign,
            NodeKind.UPDATE: self._update,
            NodeKind.MEMBER: self._member,
            NodeKind.INDEX: self._index,
            NodeKind.CALL: self._call,
            NodeKind.NEW: self._new,
            NodeKind.FUNCTION_LIT: self._function,
            NodeKind.OBJECT_LIT: self._object,
            NodeKind.ARRAY_LIT: self._array,
            NodeKind.VAR_DECL: self._var_decl,
            NodeKind.SIGNAL_DECL: self._signal_decl,
            NodeKind.ALWAYS_STMT: self._always,
            NodeKind.CLASS_DECL: self._class_decl,
            NodeKind.IF: self._if,
            NodeKind.WHILE: self._while,
            NodeKind.FOR_OF: self._for_of,
            NodeKind.RETURN: self._return,
            NodeKind.BLOCK: self._block,
            NodeKind.LABEL: self._label,
            NodeKind.COMMENT: self._comment,
        }

    # Entry points

    def execute_program(self, program: AstNode, scope: Scope) -> Value:
        """Run a Program node; returns the value of its last expression statement."""
        statements = program.children
        self._hoist(statements, scope)
        result = None
        for statement in statements:
            value = self.evaluate(statement, scope)
            if statement.is_expression_statement:
                result = value
        return result

    def evaluate(self, node: AstNode, scope: Scope) -> Value:
        return self._dispatch[node.kind](node, scope)

    def execute_statements(self, statements: List[AstNode], scope: Scope) -> None:
        self._hoist(statements, scope)
        evaluate = self.evaluate
        for statement in statements:
            evaluate(statement, scope)

    def _hoist(self, statements: List[AstNode], scope: Scope) -> None:
        for statement in statements:
            if statement.kind is NodeKind.FUNCTION_LIT and statement.declaration:
                self.engine.declare_local(scope, statement.value, self.heap.new_closure(statement, scope))

    # Calls

    def call_function(self, fn: Value, args: List[Value], this: Value = None,
                      scope: Optional[Scope] = None, node: Optional[AstNode] = None) -> Value:
        if isinstance(fn, Closure):
            return self.call_closure(fn, args, this)
        if isinstance(fn, NativeFunction):
            if fn.needs_scope:
                return fn.fn(self.engine, this, args, scope)
            return fn.fn(self.engine, this, args)
        if isinstance(fn, PartialApplication):
            return self.call_function(fn.function, fn.args + list(args), this, scope, node)
        if is_callable(fn):
            return fn(*args)
        raise runtime_error(RuntimeErrorKind.NOT_CALLABLE, f"{format_value(fn)} is not a function", node)

    def call_closure(self, fn: Closure, args: List[Value], this: Value = None) -> Value:
        node = fn.node
        scope = self.heap.new_scope(fn.scope, node.value or "function")
        bindings = scope.bindings
        params = node.params
        for position, param in enumerate(params):
            bindings[param] = args[position] if position < len(args) else None
        if not node.arrow:
            bindings["this"] = this
        body = node.children[0]
        if body.kind is not NodeKind.BLOCK:
            return self.evaluate(body, scope)
        try:
            self.execute_statements(body.children, scope)
        except ReturnSignal as signal:
            return signal.value
        return None

    def call_member(self, receiver: Value, key: str, fn: Value, args: List[Value],
                    scope: Optional[Scope], node: Optional[AstNode]) -> Value:
        layers = self.engine.layers
        if layers.refined and isinstance(receiver, HeapObject) and layers.is_refined(receiver, key):
            return layers.dispatch(receiver, key, fn, args, self)
        if not is_callable(fn):
            raise runtime_error(RuntimeErrorKind.NOT_CALLABLE, f"{key!r} is not a function", node)
        return self.call_function(fn, args, receiver, scope, node)

    # Member access

    def read_member(self, obj: Value, key: str, node: Optional[AstNode] = None) -> Value:
        return self.engine.read_property(obj, key, node)

    def _member_target(self, obj: Value, key: str, node: AstNode) -> HeapObject:
        if not isinstance(obj, HeapObject):
            raise runtime_error(
                RuntimeErrorKind.BAD_MEMBER_TARGET, f"cannot set {key!r} on {type_name(obj)}", node
            )
        return obj

    def _target_slot(self, target: AstNode, scope: Scope):
        """Evaluate the object and key of a member or index target."""
        obj = self.evaluate(target.children[0], scope)
        if target.kind is NodeKind.MEMBER:
            return obj, target.value
        return obj, property_key(self.evaluate(target.children[1], scope))

    # Expressions

    def _literal(self, node: AstNode, scope: Scope) -> Value:
        return node.value

    def _ident(self, node: AstNode, scope: Scope) -> Value:
        name = node.value
        current = scope
        while current is not None:
            bindings = current.bindings
            if name in bindings:
                return bindings[name]
            current = current.parent
        if name == "this":
            return None
        raise runtime_error(RuntimeErrorKind.UNDEFINED_VARIABLE, f"{name} is not defined", node)

    def _binary(self, node: AstNode, scope: Scope) -> Value:
        op = node.value
        left = self.evaluate(node.children[0], scope)
        if op == "&&":
            return self.evaluate(node.children[1], scope) if truthy(left) else left
        if op == "||":
            return left if truthy(left) else self.evaluate(node.children[1], scope)
        right = self.evaluate(node.children[1], scope)
        if op == "+" and type(left) is float and type(right) is float:
            return left + right
        return binary_operation(op, left, right, node)

    def _unary(self, node: AstNode, scope: Scope) -> Value:
        operand = self.evaluate(node.children[0], scope)
        if node.value == "!":
            return not truthy(operand)
        if type(operand) is not float:
            raise runtime_error(RuntimeErrorKind.DIVISION_TYPES, f"cannot negate {type_name(operand)}", node)
        return -operand

    def _conditional(self, node: AstNode, scope: Scope) -> Value:
        cond, then, otherwise = node.children
        return self.evaluate(then if truthy(self.evaluate(cond, scope)) else otherwise, scope)

    def _assign(self, node: AstNode, scope: Scope) -> Value:
        target, rhs = node.children
        op = node.value
        if target.kind is NodeKind.IDENT:
            name = target.value
            owner = scope.owner_of(name)
            if op == "=":
                value = self.evaluate(rhs, scope)
            else:
                if owner is None:
                    raise runtime_error(RuntimeErrorKind.UNDEFINED_VARIABLE, f"{name} is not defined", target)
                old = owner.bindings[name]
                value = binary_operation(op[0], old, self.evaluate(rhs, scope), node)
            # writes to undeclared names create globals
            self.engine.store_local(owner or self.engine.globals, name, value)
            return value
        obj, key = self._target_slot(target, scope)
        value = self.evaluate(rhs, scope)
        obj = self._member_target(obj, key, target)
        if op != "=":
            value = binary_operation(op[0], self.read_member(obj, key, target), value, node)
        self.engine.store_member(obj, key, value)
        return value

    def _update(self, node: AstNode, scope: Scope) -> Value:
        target = node.children[0]
        delta = 1.0 if node.value == "++" else -1.0
        if target.kind is NodeKind.IDENT:
            name = target.value
            owner = scope.owner_of(name)
            if owner is None:
                raise runtime_error(RuntimeErrorKind.UNDEFINED_VARIABLE, f"{name} is not defined", target)
            old = owner.bindings[name]
            _numbers(node.value, old, delta, node)
            self.engine.store_local(owner, name, old + delta)
            return old
        obj, key = self._target_slot(target, scope)
        obj = self._member_target(obj, key, target)
        old = self.read_member(obj, key, target)
        _numbers(node.value, old, delta, node)
        self.engine.store_member(obj, key, old + delta)
        return old

    def _member(self, node: AstNode, scope: Scope) -> Value:
        return self.read_member(self.evaluate(node.children[0], scope), node.value, node)

    def _index(self, node: AstNode, scope: Scope) -> Value:
        obj = self.evaluate(node.children[0], scope)
        key = property_key(self.evaluate(node.children[1], scope))
        return self.read_member(obj, key, node)

    def _call(self, node: AstNode, scope: Scope) -> Value:
        callee = node.children[0]
        if callee.kind is NodeKind.MEMBER or callee.kind is NodeKind.INDEX:
            receiver, key = self._target_slot(callee, scope)
            fn = self.read_member(receiver, key, callee)
            args = [self.evaluate(arg, scope) for arg in node.children[1:]]
            return self.call_member(receiver, key, fn, args, scope, node)
        fn = self.evaluate(callee, scope)
        args = [self.evaluate(arg, scope) for arg in node.children[1:]]
        return self.call_function(fn, args, None, scope, node)

    def _new(self, node: AstNode, scope: Scope) -> Value:
        cls = self.evaluate(node.children[0], scope)
        args = [self.evaluate(arg, scope) for arg in node.children[1:]]
        if not isinstance(cls, ClassValue):
            raise runtime_error(RuntimeErrorKind.NOT_CALLABLE, f"{format_value(cls)} is not a class", node)
        instance = self.heap.new_object(cls=cls)
        if cls.constructor is not None:
            self.call_closure(cls.constructor, args, instance)
        self.engine.queries.on_instance_created(instance)
        return instance

    def _function(self, node: AstNode, scope: Scope) -> Value:
        if node.declaration:
            return None
        return self.heap.new_closure(node, scope)

    def _object(self, node: AstNode, scope: Scope) -> Value:
        properties = {}
        for key, child in zip(node.value, node.children):
            properties[key] = self.evaluate(child, scope)
        return self.heap.new_object(properties)

    def _array(self, node: AstNode, scope: Scope) -> Value:
        return self.heap.new_array([self.evaluate(child, scope) for child in node.children])

    # Statements

    def _var_decl(self, node: AstNode, scope: Scope) -> Value:
        value = self.evaluate(node.children[0], scope) if node.children else None
        self.engine.declare_local(scope, node.value, value)
        return None

    def _signal_decl(self, node: AstNode, scope: Scope) -> Value:
        self.engine.signals.define(node, scope)
        return None

    def _always(self, node: AstNode, scope: Scope) -> Value:
        self.engine.constraints.declare(node, scope)
        return None

    def _class_decl(self, node: AstNode, scope: Scope) -> Value:
        methods = {method.value: self.heap.new_closure(method, scope) for method in node.children}
        constructor = methods.pop("constructor", None)
        cls = self.heap.new_class(node.value, constructor, methods)
        self.engine.declare_local(scope, node.value, cls)
        return None

    def _if(self, node: AstNode, scope: Scope) -> Value:
        if truthy(self.evaluate(node.children[0], scope)):
            self.evaluate(node.children[1], scope)
        elif len(node.children) > 2:
            self.evaluate(node.children[2], scope)
        return None

    def _while(self, node: AstNode, scope: Scope) -> Value:
        cond, body = node.children
        evaluate = self.evaluate
        while truthy(evaluate(cond, scope)):
            evaluate(body, scope)
        return None

    def _for_of(self, node: AstNode, scope: Scope) -> Value:
        iterable_node, body = node.children
        iterable = self.evaluate(iterable_node, scope)
        if not isinstance(iterable, HeapArray):
            raise runtime_error(
                RuntimeErrorKind.BAD_MEMBER_TARGET, f"cannot iterate over {type_name(iterable)}", iterable_node
            )
        index = 0
        while index < self.read_member(iterable, "length", iterable_node):
            item = self.read_member(iterable, str(index), iterable_node)
            loop_scope = self.heap.new_scope(scope, "for-of")
            self.engine.declare_local(loop_scope, node.value, item)
            if body.kind is NodeKind.BLOCK:
                self.execute_statements(body.children, loop_scope)
            else:
                self.evaluate(body, loop_scope)
            index += 1
        return None

    def _return(self, node: AstNode, scope: Scope) -> Value:
        raise ReturnSignal(self.evaluate(node.children[0], scope) if node.children else None)

    def _block(self, node: AstNode, scope: Scope) -> Value:
        self.execute_statements(node.children, self.heap.new_scope(scope, "block"))
        return None

    def _label(self, node: AstNode, scope: Scope) -> Value:
        self.evaluate(node.children[0], scope)
        return None

    def _comment(self, node: AstNode, scope: Scope) -> Value:
        return None
