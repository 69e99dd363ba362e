"""Demo programs against their recorded output."""
import re

import pytest

from tests.conftest import DEMO_DIR

DEMOS = sorted(DEMO_DIR.glob("*.rxl"))
STRATEGY_HEADER = re.compile(r"^// strategy: (\w+)")


def declared_strategy(source: str) -> str:
    match = STRATEGY_HEADER.match(source)
    assert match, "demo lacks a strategy header"
    return match.group(1)


@pytest.mark.integration
class TestDemos:
    """Every demo prints exactly its .out file."""

    def test_demos_exist(self):
        assert {path.stem for path in DEMOS} >= {
            "on_change", "convention_check", "vector", "signals", "glitch",
            "constraints", "object_queries", "layers",
        }

    @pytest.mark.parametrize("path", DEMOS, ids=lambda p: p.stem)
    def test_demo_output(self, path, run_program):
        source = path.read_text()
        expected = path.with_suffix(".out").read_text().splitlines()
        assert run_program(source, strategy=declared_strategy(source)) == expected

    @pytest.mark.parametrize("path", DEMOS, ids=lambda p: p.stem)
    def test_demo_polling_layers(self, path, run_program, polling_settings):
        source = path.read_text()
        expected = path.with_suffix(".out").read_text().splitlines()
        strategy = declared_strategy(source)
        assert run_program(source, strategy=strategy, settings=polling_settings) == expected

    def test_convention_demo_without_check(self, run_program):
        source = (DEMO_DIR / "convention_check.rxl").read_text().replace("check();", "")
        assert run_program(source, strategy="convention") == []
