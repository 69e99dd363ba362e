"""
Layers with implicit activation.

A layer holds partial methods for individual objects. Calling a refined
method runs the partial methods of the active layers, newest activation
first; ``proceed(...)`` inside a partial method continues with the next one
and finally the base method. ``activeWhile`` keeps a layer globally active
exactly while a condition holds, either tracked reactively through a trigger
or (``polling`` mode) re-checked at every refined dispatch.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple

from aexpr.exceptions import DisposedHandle
from aexpr.handle import AExprHandle
from concepts.triggers import Trigger
from rxl.exceptions import RuntimeErrorKind, RxlError, RxlRuntimeError
from rxl.values import HeapObject, HostObject, Value, is_callable, truthy, type_name

if TYPE_CHECKING:
    from aexpr.engine import Engine
    from rxl.interpreter import Interpreter

logger = logging.getLogger(__name__)

REACTIVE = "reactive"
POLLING = "polling"


class NoSuchBaseMethod(RxlError):
    """Raised when a layer refines a method its target does not have."""

    def __init__(self, name: str):
        super().__init__(
            message=f"Cannot refine {name!r}: the target has no such method",
            details={"method": name}
        )


class Layer:
    """Partial methods keyed by (object id, method name)."""

    def __init__(self, layer_id: int):
        self.layer_id = layer_id
        self.refinements: Dict[Tuple[int, str], Value] = {}
        self.conditions: List[Value] = []
        self.wrapper: Optional[HostObject] = None

    @property
    def label(self) -> str:
        return f"layer #{self.layer_id}"

    def __repr__(self) -> str:
        return f"Layer(#{self.layer_id}, refinements={len(self.refinements)})"


@dataclass
class DispatchFrame:
    receiver: HeapObject
    chain: List[Value]
    interpreter: "Interpreter"
    position: int = 0
    args: List[Value] = field(default_factory=list)


class LayerManager:
    """Layer composition and refined-method dispatch for one engine."""

    def __init__(self, engine: "Engine", mode: str = REACTIVE):
        if mode not in (REACTIVE, POLLING):
            raise ValueError(f"Unknown implicit layer mode: {mode}")
        self._engine = engine
        self.mode = mode
        self.layers: List[Layer] = []
        self.active: List[Layer] = []
        self.refined = False
        self._slots: Dict[Tuple[int, str], int] = {}
        self._frames: List[DispatchFrame] = []
        self._layer_ids = itertools.count(1)

    def create_layer(self) -> Layer:
        layer = Layer(next(self._layer_ids))
        self.layers.append(layer)
        return layer

    def refine_object(self, layer: Layer, target: Value, methods: Value) -> Layer:
        """
        Store partial methods of ``target`` in ``layer``.

        Raises:
            RxlRuntimeError: BadMemberTarget if target or methods are not objects
            NoSuchBaseMethod: If the target lacks a refined method
        """
        if not isinstance(target, HeapObject) or not isinstance(methods, HeapObject):
            raise RxlRuntimeError(
                RuntimeErrorKind.BAD_MEMBER_TARGET,
                f"refineObject() expects two objects, got {type_name(target)} and {type_name(methods)}",
            )
        for name in methods.keys():
            if not is_callable(self._engine.load_member(target, name)):
                raise NoSuchBaseMethod(name)
            slot = (target.object_id, name)
            if slot not in layer.refinements:
                self._slots[slot] = self._slots.get(slot, 0) + 1
            layer.refinements[slot] = methods.get_property(name)
        self.refined = bool(self._slots)
        logger.debug(f"{layer.label} refines {methods.keys()} of object #{target.object_id}")
        return layer

    def active_while(self, layer: Layer, condition: Value) -> Layer:
        """
        Keep ``layer`` globally active exactly while ``condition`` holds.

        Args:
            condition: An aexpr handle or a zero-argument function

        Raises:
            DisposedHandle: If the handle was disposed
        """
        if self.mode == POLLING:
            if isinstance(condition, AExprHandle):
                if condition.disposed:
                    raise DisposedHandle(condition.aexpr_id, "drive a layer")
                condition = condition.expr
            layer.conditions.append(condition)
            return layer
        handle = condition if isinstance(condition, AExprHandle) else self._engine.create_aexpr(condition)
        Trigger(handle).on_become_true(lambda: self.be_global(layer)).on_become_false(lambda: self.be_not_global(layer))
        return layer

    def be_global(self, layer: Layer) -> Layer:
        if layer not in self.active:
            self.active.append(layer)
            logger.debug(f"{layer.label} activated")
        return layer

    def be_not_global(self, layer: Layer) -> Layer:
        if layer in self.active:
            self.active.remove(layer)
            logger.debug(f"{layer.label} deactivated")
        return layer

    def current_layers(self) -> List[Layer]:
        """Active layers in activation order; in polling mode implicit layers follow the global ones."""
        composition = list(self.active)
        if self.mode == POLLING:
            engine = self._engine
            for layer in self.layers:
                if layer in composition or not layer.conditions:
                    continue
                if any(truthy(engine.call_function(condition, [])) for condition in layer.conditions):
                    composition.append(layer)
        return composition

    def is_active(self, layer: Layer) -> bool:
        return layer in self.current_layers()

    def is_refined(self, receiver: HeapObject, key: str) -> bool:
        return (receiver.object_id, key) in self._slots

    def dispatch(self, receiver: HeapObject, key: str, base: Value, args: List[Value],
                 interpreter: Optional["Interpreter"] = None) -> Value:
        """Call ``receiver.key`` through the partial methods of the current composition."""
        slot = (receiver.object_id, key)
        chain = [layer.refinements[slot] for layer in reversed(self.current_layers()) if slot in layer.refinements]
        chain.append(base)
        frame = DispatchFrame(receiver, chain, interpreter or self._engine.interpreter, args=list(args))
        self._frames.append(frame)
        try:
            return self._call(frame, frame.args)
        finally:
            self._frames.pop()

    def proceed(self, args: List[Value]) -> Value:
        """
        Continue with the next partial method, or the base method.

        Raises:
            RxlRuntimeError: NotCallable outside a refined method
        """
        if not self._frames:
            raise RxlRuntimeError(RuntimeErrorKind.NOT_CALLABLE, "proceed() called outside a layered method")
        frame = self._frames[-1]
        if frame.position + 1 >= len(frame.chain):
            raise RxlRuntimeError(RuntimeErrorKind.NOT_CALLABLE, "proceed() past the base method")
        frame.position += 1
        try:
            return self._call(frame, args)
        finally:
            frame.position -= 1

    def _call(self, frame: DispatchFrame, args: List[Value]) -> Value:
        fn = frame.chain[frame.position]
        if not is_callable(fn):
            raise RxlRuntimeError(RuntimeErrorKind.NOT_CALLABLE, f"{type_name(fn)} is not a function")
        return frame.interpreter.call_function(fn, list(args), frame.receiver)
