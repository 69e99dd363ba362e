"""Tests for become-true/become-false triggers."""
import random

import pytest

from aexpr.engine import Engine
from aexpr.exceptions import DisposedHandle
from concepts.triggers import Trigger, trigger
from rxl.exceptions import RuntimeErrorKind, RxlRuntimeError
from tests.conftest import STRATEGIES

VALUES = ["true", "false", "null", "0", "1", "2", '"x"']
FALSY = {"false", "null"}


def expected_edges(initial: str, sequence) -> list:
    state = initial not in FALSY
    # registering fires once when the current result already matches
    lines = ["T" if state else "F"]
    for value in sequence:
        now = value not in FALSY
        if now != state:
            lines.append("T" if now else "F")
        state = now
    return lines


class TestTriggerEdges:
    """Edges follow truthiness, not value changes."""

    @pytest.mark.parametrize("strategy", STRATEGIES)
    @pytest.mark.parametrize("seed", range(15))
    def test_random_sequences(self, strategy, seed):
        rng = random.Random(seed)
        initial = rng.choice(VALUES)
        sequence = [rng.choice(VALUES) for _ in range(rng.randint(1, 30))]
        separator = " check();\n" if strategy == "convention" else "\n"
        writes = separator.join(f"o.v = {value};" for value in sequence)
        if strategy == "convention":
            writes += " check();"
        engine = Engine(strategy)
        engine.run(f"""
        let o = {{v: {initial}}};
        let t = trigger(aexpr(() => o.v));
        t.onBecomeTrue(() => print("T"));
        t.onBecomeFalse(() => print("F"));
        {writes}
        """)
        assert engine.output == expected_edges(initial, sequence)

    def test_value_change_without_edge(self, compilation_engine):
        compilation_engine.run("""
        let o = {v: 1};
        trigger(aexpr(() => o.v)).onBecomeTrue(() => print("true again"));
        o.v = 2;
        o.v = 3;
        """)
        assert compilation_engine.output == ["true again"]

    def test_comparison_trigger(self, reactive_engine):
        reactive_engine.run("""
        let tank = {level: 10};
        trigger(aexpr(() => tank.level < 3))
          .onBecomeTrue(() => print("refill at " + tank.level))
          .onBecomeFalse(() => print("ok at " + tank.level));
        tank.level = 5;
        tank.level = 2;
        tank.level = 1;
        tank.level = 8;
        """)
        assert reactive_engine.output == ["ok at 10", "refill at 2", "ok at 8"]


class TestTriggerApi:
    """Host-side construction."""

    def test_python_callbacks(self, compilation_engine, mocker):
        engine = compilation_engine
        engine.run("o = {v: false};")
        obj = engine.globals.bindings["o"]
        became_true = mocker.Mock()
        t = trigger(engine.create_aexpr(lambda: engine.tracked_read_member(obj, "v")))
        assert isinstance(t, Trigger)
        t.on_become_true(became_true)
        became_true.assert_not_called()
        engine.run("o.v = true;")
        became_true.assert_called_once_with()

    def test_disposed_handle(self, compilation_engine):
        handle = compilation_engine.create_aexpr(lambda: True)
        handle.dispose()
        with pytest.raises(DisposedHandle, match="be wrapped by a trigger"):
            Trigger(handle)

    def test_trigger_needs_a_handle(self, compilation_engine):
        with pytest.raises(RxlRuntimeError, match="trigger\\(\\) expects AExprHandle") as exc_info:
            compilation_engine.run("trigger(5);")
        assert exc_info.value.kind is RuntimeErrorKind.BAD_MEMBER_TARGET
