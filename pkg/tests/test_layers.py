"""Tests for layers, partial methods and implicit activation."""
import pytest

from aexpr.engine import Engine
from concepts.layers import POLLING, REACTIVE, Layer, LayerManager, NoSuchBaseMethod
from config.settings import Settings
from rxl.exceptions import RuntimeErrorKind, RxlRuntimeError
from tests.conftest import DEMO_DIR

GREETER = """
let greeter = {
  greet(name) { return "hello " + name; }
};
"""


@pytest.fixture(params=[REACTIVE, POLLING])
def layer_engine(request):
    return Engine("compilation", Settings(implicit_layer_mode=request.param))


class TestComposition:
    """Explicit activation and proceed()."""

    def test_inactive_layer_is_ignored(self, layer_engine):
        layer_engine.run(GREETER + """
        layer().refineObject(greeter, { greet(name) { return "layered"; } });
        print(greeter.greet("ada"));
        """)
        assert layer_engine.output == ["hello ada"]

    def test_global_layer_wraps_base_method(self, layer_engine):
        layer_engine.run(GREETER + """
        let loud = layer().refineObject(greeter, {
          greet(name) { return proceed(name) + "!"; }
        });
        loud.beGlobal();
        print(greeter.greet("ada"));
        print(loud.isActive());
        loud.beNotGlobal();
        print(greeter.greet("ada"));
        print(loud.isActive());
        """)
        assert layer_engine.output == ["hello ada!", "true", "hello ada", "false"]

    def test_newest_activation_runs_first(self, layer_engine):
        layer_engine.run(GREETER + """
        let outer = layer().refineObject(greeter, { greet(name) { return "[" + proceed(name) + "]"; } });
        let inner = layer().refineObject(greeter, { greet(name) { return "<" + proceed(name) + ">"; } });
        outer.beGlobal();
        inner.beGlobal();
        print(greeter.greet("x"));
        """)
        assert layer_engine.output == ["[<hello x>]"]

    def test_proceed_can_change_arguments(self, layer_engine):
        layer_engine.run(GREETER + """
        layer().refineObject(greeter, { greet(name) { return proceed("dr " + name); } }).beGlobal();
        print(greeter.greet("who"));
        """)
        assert layer_engine.output == ["hello dr who"]

    def test_partial_methods_see_the_receiver(self, layer_engine):
        layer_engine.run("""
        let counter = {
          count: 0,
          bump() { this.count += 1; return this.count; }
        };
        layer().refineObject(counter, { bump() { this.count += 10; return proceed(); } }).beGlobal();
        print(counter.bump());
        """)
        assert layer_engine.output == ["11"]

    def test_other_objects_are_unaffected(self, layer_engine):
        layer_engine.run(GREETER + """
        let other = { greet(name) { return "hi " + name; } };
        layer().refineObject(greeter, { greet(name) { return "layered"; } }).beGlobal();
        print(other.greet("ada"));
        """)
        assert layer_engine.output == ["hi ada"]


class TestImplicitActivation:
    """activeWhile() in both modes."""

    def test_follows_condition(self, layer_engine):
        layer_engine.run(GREETER + """
        let formal = false;
        let polite = layer().refineObject(greeter, {
          greet(name) { return proceed("dear " + name); }
        }).activeWhile(() => formal);
        print(greeter.greet("a"));
        formal = true;
        print(greeter.greet("b"));
        formal = false;
        print(greeter.greet("c"));
        """)
        assert layer_engine.output == ["hello a", "hello dear b", "hello c"]

    def test_condition_as_handle(self, layer_engine):
        layer_engine.run(GREETER + """
        let settings = {formal: true};
        layer().refineObject(greeter, { greet(name) { return "sir " + name; } })
          .activeWhile(aexpr(() => settings.formal));
        print(greeter.greet("a"));
        settings.formal = false;
        print(greeter.greet("b"));
        """)
        assert layer_engine.output == ["sir a", "hello b"]

    def test_reactive_mode_changes_activation_on_write(self):
        engine = Engine("compilation", Settings(implicit_layer_mode=REACTIVE))
        engine.run(GREETER + """
        flag = false;
        l = layer().refineObject(greeter, { greet(name) { return "x"; } }).activeWhile(() => flag);
        """)
        layer = engine.globals.bindings["l"].host
        assert engine.layers.active == []
        engine.run("flag = true;")
        assert engine.layers.active == [layer]

    def test_polling_mode_checks_at_dispatch(self, polling_settings):
        engine = Engine("compilation", polling_settings)
        engine.run(GREETER + """
        flag = true;
        l = layer().refineObject(greeter, { greet(name) { return "x"; } }).activeWhile(() => flag);
        """)
        layer = engine.globals.bindings["l"].host
        assert engine.layers.active == []
        assert engine.layers.current_layers() == [layer]
        assert len(engine.handles) == 0

    def test_demo_agrees_across_modes(self):
        source = (DEMO_DIR / "layers.rxl").read_text()
        outputs = []
        for mode in (REACTIVE, POLLING):
            engine = Engine("compilation", Settings(implicit_layer_mode=mode))
            engine.run(source)
            outputs.append(engine.output)
        assert outputs[0] == outputs[1]
        assert outputs[0] == (DEMO_DIR / "layers.out").read_text().splitlines()


class TestLayerErrors:
    """Misuse of layers."""

    def test_refining_missing_method(self, layer_engine):
        with pytest.raises(NoSuchBaseMethod, match="Cannot refine 'wave'"):
            layer_engine.run(GREETER + "layer().refineObject(greeter, { wave() { return 1; } });")

    def test_refining_non_object(self, layer_engine):
        with pytest.raises(RxlRuntimeError, match="refineObject\\(\\) expects two objects") as exc_info:
            layer_engine.run("layer().refineObject(5, {});")
        assert exc_info.value.kind is RuntimeErrorKind.BAD_MEMBER_TARGET

    def test_proceed_outside_layered_method(self, layer_engine):
        with pytest.raises(RxlRuntimeError, match="outside a layered method"):
            layer_engine.run("proceed();")

    def test_unknown_mode(self, compilation_engine):
        with pytest.raises(ValueError, match="Unknown implicit layer mode"):
            LayerManager(compilation_engine, "sometimes")

    def test_layer_label(self):
        layer = Layer(3)
        assert layer.label == "layer #3"
        assert repr(layer) == "Layer(#3, refinements=0)"
