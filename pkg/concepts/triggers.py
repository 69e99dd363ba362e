"""Boolean edge callbacks over an active expression."""
from typing import Optional

from aexpr.exceptions import DisposedHandle
from aexpr.handle import AExprHandle
from rxl.values import HostObject, Value, truthy


class Trigger:
    """
    Wraps a handle and turns result changes into become-true/become-false
    events. Each registration also fires once immediately when the current
    result already matches.
    """

    label = "trigger"

    def __init__(self, handle: AExprHandle):
        if handle.disposed:
            raise DisposedHandle(handle.aexpr_id, "be wrapped by a trigger")
        self.aexpr = handle
        self.wrapper: Optional[HostObject] = None

    def on_become_true(self, callback: Value) -> "Trigger":
        return self._on_edge(callback, expected=True)

    def on_become_false(self, callback: Value) -> "Trigger":
        return self._on_edge(callback, expected=False)

    def _on_edge(self, callback: Value, expected: bool) -> "Trigger":
        handle = self.aexpr
        engine = handle.engine
        state = {"truthy": truthy(handle.now())}

        def on_change(value: Value) -> None:
            was, now = state["truthy"], truthy(value)
            state["truthy"] = now
            # 1 -> 2 changes the result but is no edge
            if now is expected and was is not expected:
                engine.call_function(callback, [])

        handle.on_change(on_change)
        if state["truthy"] is expected:
            engine.call_function(callback, [])
        return self


def trigger(handle: AExprHandle) -> Trigger:
    return Trigger(handle)
