"""
The engine: one heap, one strategy, one global environment.

Every store operation of the interpreter ends up here. The engine applies the
write, informs registered write observers, and forwards the event to its
strategy, which decides which active expressions to hand to the propagator.
"""
import itertools
import logging
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Union

from aexpr.builtins import HOST_METHODS, install_reactive_natives
from aexpr.exceptions import UnsupportedStrategy
from aexpr.handle import AExprHandle, HandleRole
from aexpr.keys import DependencyKey, GlobalKey, LocalKey, MemberKey
from aexpr.propagation import Propagator
from aexpr.rewriter import rewrite as rewrite_program
from aexpr.strategies import STRATEGIES, StrategyKind
from concepts.constraints import ConstraintSystem
from concepts.layers import LayerManager
from concepts.object_queries import InstanceRegistry
from concepts.signals import SignalRegistry
from config.settings import Settings, settings as default_settings
from config.structured_logging import LogContext
from rxl.exceptions import RuntimeErrorKind
from rxl.interpreter import Interpreter, runtime_error
from rxl.natives import ARRAY_METHODS, install_language_natives, load_prelude
from rxl.nodes import AstNode
from rxl.parser import HOOK_DIRECTIVE, parse
from rxl.values import (
    Heap, HeapArray, HeapObject, HostObject, NativeFunction, Scope, Value,
    array_index, is_callable, to_value, type_name,
)

logger = logging.getLogger(__name__)

WriteObserver = Callable[[DependencyKey, Value], None]


class Engine:
    """
    Runs RXL programs under exactly one change-detection strategy.

    Args:
        strategy: Strategy name or kind; defaults to ``settings.default_strategy``
        settings: Settings to use instead of the global instance
        sink: Called with every line the program prints
    """

    def __init__(
        self,
        strategy: Union[str, StrategyKind, None] = None,
        settings: Optional[Settings] = None,
        sink: Optional[Callable[[str], None]] = None,
    ):
        self.settings = settings or default_settings
        kind = StrategyKind(strategy or self.settings.default_strategy)
        self.heap = Heap()
        self.output: List[str] = []
        self.handles: Dict[int, AExprHandle] = {}
        self._aexpr_ids = itertools.count(1)
        self._write_observers: List[WriteObserver] = []
        self._sink = sink

        self.propagator = Propagator(self, self.settings.propagation_round_limit)
        self.signals = SignalRegistry(self)
        self.constraints = ConstraintSystem(self, self.settings.constraint_tolerance)
        self.queries = InstanceRegistry(self)
        self.layers = LayerManager(self, self.settings.implicit_layer_mode)
        self.strategy = STRATEGIES[kind](self)
        self.interpreter = Interpreter(self)

        self._array_methods: Dict[str, NativeFunction] = {
            name: self.heap.new_native(fn, name) for name, fn in ARRAY_METHODS.items()
        }
        self._host_methods: Dict[type, Dict[str, NativeFunction]] = {
            host_type: {name: self.heap.new_native(fn, name) for name, fn in methods.items()}
            for host_type, methods in HOST_METHODS.items()
        }
        self.globals: Optional[Scope] = None
        self.globals = self.boot_environment(self.interpreter, None)
        self.program_scope: Optional[Scope] = None
        logger.debug(f"Engine booted with {kind.value} strategy")

    def __repr__(self) -> str:
        return f"Engine({self.strategy.kind.value}, aexprs={len(self.handles)})"

    # Environments and programs

    def boot_environment(self, interpreter: Interpreter, parent: Optional[Scope]) -> Scope:
        """
        Create an environment scope holding the natives and the prelude.

        The prelude is parsed and executed on every boot, in the strategy's
        program form.
        """
        scope = self.heap.new_scope(parent, "globals" if parent is None else "environment")
        install_language_natives(self, scope)
        install_reactive_natives(self, scope)
        prelude = parse(load_prelude())
        if self.strategy.kind is StrategyKind.COMPILATION:
            prelude = rewrite_program(prelude)
        interpreter.execute_program(prelude, scope)
        return scope

    def compile(self, source: Union[str, AstNode], rewrite: Optional[bool] = None) -> AstNode:
        """
        Parse and, if requested, instrument a program unit for this engine.

        Args:
            source: Program text or an already parsed Program node
            rewrite: Instrument the unit with access hooks; by default only
                under the compilation strategy. ``False`` keeps the unit as is,
                which keeps its accesses invisible to the compilation strategy.
        """
        kind = self.strategy.kind
        if isinstance(source, AstNode):
            program = source
        else:
            capture = kind is StrategyKind.INTERPRETATION and self.settings.capture_interpretation_locals
            program = parse(source, capture_locals=capture)
        if rewrite is None:
            rewrite = kind is StrategyKind.COMPILATION
        if rewrite and HOOK_DIRECTIVE not in (program.value or ()):
            program = rewrite_program(program)
        return program

    def run(
        self,
        source: Union[str, AstNode],
        preamble: Optional[Mapping[str, Any]] = None,
        rewrite: Optional[bool] = None,
    ) -> Value:
        """
        Execute a program unit in a fresh program scope below the globals.

        Args:
            source: Program text or an already parsed Program node
            preamble: Host values bound as globals before the program runs
            rewrite: See ``compile``

        Returns:
            Value of the last expression statement, or None

        Raises:
            RxlError: On syntax, rewrite or runtime errors
        """
        kind = self.strategy.kind
        program = self.compile(source, rewrite)
        for name, data in (preamble or {}).items():
            self.declare_local(self.globals, name, to_value(self.heap, data))

        with LogContext(strategy=kind.value):
            scope = self.heap.new_scope(self.globals, "program")
            self.program_scope = scope
            logger.debug(f"Running program unit with {len(program.children)} statements")
            return self.interpreter.execute_program(program, scope)

    def emit(self, line: str) -> None:
        self.output.append(line)
        if self._sink is not None:
            self._sink(line)

    def call_function(self, fn: Value, args: Iterable[Value], this: Value = None) -> Value:
        return self.interpreter.call_function(fn, list(args), this)

    # Store operations

    def add_write_observer(self, observer: WriteObserver) -> None:
        """Register ``observer(key, value)``, called once per mutation."""
        self._write_observers.append(observer)

    def _observe(self, key: DependencyKey, value: Value) -> None:
        for observer in self._write_observers:
            observer(key, value)

    def variable_key(self, scope: Scope, name: str) -> DependencyKey:
        if scope is self.globals:
            return GlobalKey(name)
        return LocalKey(scope.scope_id, name)

    def read_property(self, obj: Value, key: str, node: Optional[AstNode] = None) -> Value:
        if isinstance(obj, HeapObject):
            return self.load_member(obj, key)
        if isinstance(obj, str):
            if key == "length":
                return float(len(obj))
            index = array_index(key)
            return obj[index] if index is not None and index < len(obj) else None
        raise runtime_error(RuntimeErrorKind.BAD_MEMBER_TARGET, f"cannot read {key!r} of {type_name(obj)}", node)

    def load_member(self, obj: HeapObject, key: str) -> Value:
        """Own property first, then class methods and built-in methods."""
        value = obj.get_property(key)
        if value is None and not obj.has_property(key):
            if obj.cls is not None and key in obj.cls.methods:
                return obj.cls.methods[key]
            if isinstance(obj, HeapArray):
                return self._array_methods.get(key)
            if isinstance(obj, HostObject):
                return obj.methods.get(key)
        return value

    def store_member(self, obj: HeapObject, key: str, value: Value) -> bool:
        """
        Write a property. Write observers and armed interceptors are informed.

        Returns:
            True if an element write changed the length of an array
        """
        size = len(obj.elements) if isinstance(obj, HeapArray) else None
        obj.set_property(key, value)
        resized = size is not None and key != "length" and len(obj.elements) != size
        if self._write_observers:
            self._observe(MemberKey(obj.object_id, key), value)
        interceptors = obj.interceptors
        if interceptors:
            if key in interceptors:
                self.strategy.on_member_write(obj, key)
            if resized and "length" in interceptors:
                self.strategy.on_member_write(obj, "length")
        return resized

    def assign_member(self, obj: HeapObject, key: str, value: Value) -> None:
        """store_member plus a hooked-write notification."""
        resized = self.store_member(obj, key, value)
        self.strategy.member_written(obj, key)
        if resized:
            self.strategy.member_written(obj, "length")

    def store_local(self, owner: Scope, name: str, value: Value) -> None:
        if name not in owner.bindings:
            owner.order[name] = self.heap.next_declaration()
        owner.bindings[name] = value
        if self._write_observers:
            self._observe(self.variable_key(owner, name), value)

    def assign_local(self, owner: Scope, name: str, value: Value) -> None:
        """store_local plus a hooked-write notification."""
        self.store_local(owner, name, value)
        self.strategy.local_written(self.variable_key(owner, name))

    def declare_local(self, scope: Scope, name: str, value: Value) -> None:
        scope.bindings[name] = value
        scope.order[name] = self.heap.next_declaration()

    def tracked_read_local(self, scope: Scope, name: str) -> Value:
        owner = scope.owner_of(name)
        if owner is None:
            raise runtime_error(RuntimeErrorKind.UNDEFINED_VARIABLE, f"{name} is not defined")
        if self.strategy.recording:
            self.strategy.record_read(self.variable_key(owner, name))
        return owner.bindings[name]

    def tracked_read_member(self, obj: HeapObject, key: str) -> Value:
        value = self.read_property(obj, key)
        if self.strategy.recording:
            self.strategy.record_read(MemberKey(obj.object_id, key), obj)
        return value

    # Active expressions

    def create_aexpr(
        self,
        expr: Value,
        scope: Optional[Scope] = None,
        locals: Optional[HeapObject] = None,
        role: HandleRole = HandleRole.ORDINARY,
    ) -> AExprHandle:
        """
        Create an active expression and seed its last result.

        Raises:
            RxlRuntimeError: NotCallable for non-function thunks, or any error
                of the seed evaluation (the handle is not registered then)
        """
        if not is_callable(expr):
            raise runtime_error(RuntimeErrorKind.NOT_CALLABLE, f"aexpr() expects a function, got {type_name(expr)}")
        handle = AExprHandle(self, next(self._aexpr_ids), expr, scope, self.strategy.kind, role, locals)
        self.strategy.register(handle)
        self.handles[handle.aexpr_id] = handle
        logger.debug(f"Created aexpr #{handle.aexpr_id} ({role.value})")
        return handle

    def check(self, subset: Optional[Iterable[AExprHandle]] = None) -> int:
        """
        Convention strategy check point.

        Raises:
            UnsupportedStrategy: Under the other strategies
            ForeignHandle: If a subset handle belongs to another engine
        """
        if self.strategy.kind is not StrategyKind.CONVENTION:
            raise UnsupportedStrategy("check()", self.strategy.kind.value)
        return self.strategy.check(subset)

    def registry_size(self) -> int:
        return len(self.handles) + self.strategy.registry_size()

    def wrap(self, host: Any) -> HostObject:
        """RXL face of a host object; created once per host object."""
        wrapper = getattr(host, "wrapper", None)
        if wrapper is None:
            methods = self._host_methods[type(host)]
            wrapper = host.wrapper = self.heap.new_host(host, methods, host.label)
        return wrapper
