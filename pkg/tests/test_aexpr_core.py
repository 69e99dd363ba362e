"""Tests for active expression handles and change propagation."""
import pytest

from aexpr.engine import Engine
from aexpr.exceptions import DisposedHandle, ForeignHandle, PropagationLoop, UnsupportedStrategy
from aexpr.handle import AExprHandle
from aexpr.keys import GlobalKey, LocalKey, MemberKey
from config.settings import Settings
from rxl.exceptions import RuntimeErrorKind, RxlRuntimeError
from tests.conftest import STRATEGIES


class TestHandleBasics:
    """create, now, onChange and dispose from RXL."""

    def test_now_reports_seed_value(self, engine):
        engine.run("let o = {x: 1}; let h = aexpr(() => o.x * 2); print(h.now());")
        assert engine.output == ["2"]

    def test_on_change_fires_on_member_write(self, reactive_engine):
        reactive_engine.run("""
        let o = {x: 1};
        aexpr(() => o.x).onChange((v) => print("x = " + v));
        o.x = 2;
        o.x = 2;
        o.x = 3;
        """)
        assert reactive_engine.output == ["x = 2", "x = 3"]

    def test_nan_result_stays_unchanged(self, reactive_engine):
        reactive_engine.run("""
        let o = {x: 0, y: 0};
        aexpr(() => o.x / o.y).onChange((v) => print(v));
        o.x = 0;
        o.y = 0;
        print(o.x / o.y == o.x / o.y);
        o.x = 1;
        """)
        assert reactive_engine.output == ["false", "Infinity"]

    def test_callback_is_not_called_for_current_value(self, engine):
        engine.run('let o = {x: 1}; aexpr(() => o.x).onChange((v) => print("changed"));')
        assert engine.output == []

    def test_callbacks_run_in_registration_order(self, reactive_engine):
        reactive_engine.run("""
        let o = {x: 1};
        let h = aexpr(() => o.x);
        h.onChange((v) => print("first " + v)).onChange((v) => print("second " + v));
        o.x = 5;
        """)
        assert reactive_engine.output == ["first 5", "second 5"]

    def test_handles_fire_in_creation_order(self, reactive_engine):
        reactive_engine.run("""
        let o = {x: 1};
        aexpr(() => o.x + 1).onChange((v) => print("a"));
        aexpr(() => o.x + 2).onChange((v) => print("b"));
        aexpr(() => o.x + 3).onChange((v) => print("c"));
        o.x = 0;
        """)
        assert reactive_engine.output == ["a", "b", "c"]

    def test_compilation_detects_local_writes(self, compilation_engine):
        compilation_engine.run("""
        let x = 1;
        aexpr(() => x).onChange((v) => print(v));
        x = 2;
        x += 3;
        x++;
        """)
        assert compilation_engine.output == ["2", "5", "6"]

    def test_interpretation_ignores_local_writes(self, interpretation_engine):
        interpretation_engine.run("""
        let x = 1;
        aexpr(() => x).onChange((v) => print(v));
        x = 2;
        """)
        assert interpretation_engine.output == []

    def test_dispose(self, reactive_engine):
        reactive_engine.run("""
        let o = {x: 1};
        let h = aexpr(() => o.x);
        h.onChange((v) => print(v));
        o.x = 2;
        h.dispose();
        h.dispose();
        o.x = 3;
        """)
        assert reactive_engine.output == ["2"]

    def test_disposed_handle_rejects_use(self, engine):
        engine.run("let o = {x: 1}; h = aexpr(() => o.x); h.dispose();")
        with pytest.raises(DisposedHandle, match="Disposed aexpr: #1 cannot report its value"):
            engine.run("h.now();")
        with pytest.raises(DisposedHandle, match="register a callback"):
            engine.run("h.onChange((v) => v);")

    def test_dispose_inside_callback_stops_remaining_callbacks(self, reactive_engine):
        reactive_engine.run("""
        let o = {x: 1};
        let h = aexpr(() => o.x);
        h.onChange((v) => { h.dispose(); });
        h.onChange((v) => print("late"));
        o.x = 2;
        """)
        assert reactive_engine.output == []

    def test_aexpr_needs_a_function(self, engine):
        with pytest.raises(RxlRuntimeError, match="aexpr\\(\\) expects a function") as exc_info:
            engine.run("aexpr(42);")
        assert exc_info.value.kind is RuntimeErrorKind.NOT_CALLABLE

    def test_failed_seed_evaluation_registers_nothing(self, engine):
        start = engine.registry_size()
        with pytest.raises(RxlRuntimeError, match="UndefinedVariable"):
            engine.run("aexpr(() => missing.x);")
        assert engine.registry_size() == start
        assert engine.handles == {}

    def test_registry_returns_to_start_after_create_and_dispose(self, engine):
        engine.run("o = {x: 1, y: 2};")
        start = engine.registry_size()
        engine.run("""
        let i = 0;
        while (i < 1000) {
          let h = aexpr(() => o.x + o.y);
          h.onChange((v) => v);
          h.dispose();
          i++;
        }
        """)
        assert engine.registry_size() == start
        assert engine.handles == {}


class TestPythonHandles:
    """Handles created through the engine API."""

    def test_python_thunk_and_callback(self, compilation_engine, mocker):
        engine = compilation_engine
        engine.run("o = {x: 1};")
        obj = engine.globals.bindings["o"]
        callback = mocker.Mock()
        handle = engine.create_aexpr(lambda: engine.tracked_read_member(obj, "x"))
        assert isinstance(handle, AExprHandle)
        handle.on_change(callback)
        engine.run("o.x = 7;")
        callback.assert_called_once_with(7.0)
        assert handle.now() == 7.0
        assert handle.dependencies == {MemberKey(obj.object_id, "x")}

    def test_non_callable_thunk(self, engine):
        with pytest.raises(RxlRuntimeError, match="NotCallable"):
            engine.create_aexpr(3.0)

    def test_maybe_changed_without_change(self, convention_engine):
        engine = convention_engine
        engine.run("o = {x: 1};")
        obj = engine.globals.bindings["o"]
        handle = engine.create_aexpr(lambda: obj.get_property("x"))
        assert handle.maybe_changed() is False
        obj.set_property("x", 2.0)
        assert handle.maybe_changed() is True
        assert handle.now() == 2.0

    def test_wrap_is_stable(self, engine):
        handle = engine.create_aexpr(lambda: 1.0)
        assert engine.wrap(handle) is engine.wrap(handle)
        assert repr(handle) == f"AExprHandle(#{handle.aexpr_id}, {engine.strategy.kind.value})"


class TestPropagation:
    """Batching, re-entrancy and error handling."""

    def test_writes_from_callbacks_run_after_the_current_batch(self, reactive_engine):
        reactive_engine.run("""
        let o = {x: 0, y: 0};
        aexpr(() => o.x).onChange((v) => { o.y = v * 10; });
        aexpr(() => o.y).onChange((v) => print("y " + v));
        aexpr(() => o.x).onChange((v) => print("x " + v));
        o.x = 1;
        """)
        assert reactive_engine.output == ["x 1", "y 10"]

    def test_propagation_loop(self):
        engine = Engine("compilation", Settings(propagation_round_limit=50))
        with pytest.raises(PropagationLoop, match="no quiescence after 50 rounds") as exc_info:
            engine.run("""
            let o = {x: 0};
            aexpr(() => o.x).onChange((v) => { o.x = v + 1; });
            o.x = 1;
            """)
        assert exc_info.value.details["rounds"] == 50
        assert not engine.propagator.running

    def test_bounded_feedback_settles(self, reactive_engine):
        reactive_engine.run("""
        let o = {x: 0};
        aexpr(() => o.x).onChange((v) => { if (v < 5) { o.x = v + 1; } });
        o.x = 1;
        print(o.x);
        """)
        assert reactive_engine.output == ["5"]

    def test_callback_errors_do_not_stop_other_callbacks(self, reactive_engine):
        with pytest.raises(RxlRuntimeError, match="broken is not defined"):
            reactive_engine.run("""
            let o = {x: 1};
            aexpr(() => o.x).onChange((v) => broken());
            aexpr(() => o.x).onChange((v) => print("second " + v));
            o.x = 2;
            """)
        assert reactive_engine.output == ["second 2"]

    def test_first_error_is_raised(self, reactive_engine):
        with pytest.raises(RxlRuntimeError, match="first is not defined"):
            reactive_engine.run("""
            let o = {x: 1};
            let h = aexpr(() => o.x);
            h.onChange((v) => first());
            h.onChange((v) => second());
            o.x = 2;
            """)


class TestConventionCheck:
    """Explicit check points."""

    def test_intermediate_states_are_coalesced(self, convention_engine):
        convention_engine.run("""
        let o = {x: 1};
        aexpr(() => o.x).onChange((v) => print("x = " + v));
        o.x = 2;
        o.x = 1;
        print(check());
        o.x = 5;
        o.x = 6;
        print(check());
        """)
        assert convention_engine.output == ["0", "x = 6", "1"]

    def test_check_subset(self, convention_engine):
        convention_engine.run("""
        let o = {x: 1};
        let a = aexpr(() => o.x);
        let b = aexpr(() => o.x + 1);
        a.onChange((v) => print("a " + v));
        b.onChange((v) => print("b " + v));
        o.x = 2;
        check([b]);
        check();
        """)
        assert convention_engine.output == ["b 3", "a 2"]

    def test_check_detects_local_changes(self, convention_engine):
        convention_engine.run("""
        let x = 1;
        aexpr(() => x).onChange((v) => print(v));
        x = 2;
        check();
        """)
        assert convention_engine.output == ["2"]

    def test_foreign_handle(self):
        first = Engine("convention")
        second = Engine("convention")
        foreign = second.create_aexpr(lambda: 1.0)
        with pytest.raises(ForeignHandle, match="belongs to another engine"):
            first.check([foreign])

    def test_check_needs_convention_strategy(self, reactive_engine):
        with pytest.raises(UnsupportedStrategy, match="check\\(\\) is not available"):
            reactive_engine.check()
        with pytest.raises(UnsupportedStrategy):
            reactive_engine.run("check();")


@pytest.mark.parametrize("strategy", STRATEGIES)
class TestWriteObservers:
    """Observers see every mutation exactly once."""

    def test_observer_sees_each_mutation(self, strategy, mocker):
        engine = Engine(strategy)
        observer = mocker.Mock()
        engine.add_write_observer(observer)
        engine.run("o = {x: 1}; o.x = 2; let y = 3; y = 4;")
        obj = engine.globals.bindings["o"]
        keys = [call.args[0] for call in observer.call_args_list]
        assert keys == [GlobalKey("o"), MemberKey(obj.object_id, "x"), LocalKey(engine.program_scope.scope_id, "y")]
        assert [call.args[1] for call in observer.call_args_list][1:] == [2.0, 4.0]

    def test_push_is_one_mutation(self, strategy, mocker):
        engine = Engine(strategy)
        engine.run("a = [];")
        array = engine.globals.bindings["a"]
        observer = mocker.Mock()
        engine.add_write_observer(observer)
        engine.run("a.push(7);")
        assert [call.args[0] for call in observer.call_args_list] == [MemberKey(array.object_id, "0")]

    def test_push_reports_length_once(self, strategy, mocker):
        engine = Engine(strategy)
        engine.run("a = [];")
        written = mocker.spy(engine.strategy, "member_written")
        engine.run("a.push(7);")
        assert [call.args[1] for call in written.call_args_list] == ["0", "length"]

    def test_observer_driven_checks_behave_like_reactive_strategies(self, strategy):
        if strategy != "convention":
            pytest.skip("observer-driven checks need the convention strategy")
        engine = Engine(strategy)
        engine.add_write_observer(lambda key, value: engine.check())
        engine.run("""
        let o = {x: 1};
        aexpr(() => o.x).onChange((v) => print(v));
        o.x = 2;
        o.x = 3;
        """)
        assert engine.output == ["2", "3"]
