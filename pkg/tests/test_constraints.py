"""Tests for always: constraints over program variables."""
import random
from typing import List, Tuple

import numpy as np
import pytest

from aexpr.engine import Engine
from aexpr.exceptions import UnsupportedStrategy
from concepts.constraints import NonlinearConstraint, UnsupportedRelation
from concepts.solver import UnsatisfiableSystem

VARIABLE_COUNT = 6
SEED_COUNT = 25
ASSIGNMENTS_PER_SEED = 40

DEMO = """
let a = 1;
let b = 1;
let c = 1;
always: a + b == c;
"""


def equation(row: np.ndarray, target: float) -> str:
    text = ""
    for j, coef in enumerate(row):
        if coef == 0.0:
            continue
        term = f"{abs(int(coef))} * x{j}"
        if not text:
            text = term if coef > 0 else f"-{term}"
        else:
            text += f" + {term}" if coef > 0 else f" - {term}"
    return f"always: {text} == {int(target)};"


def random_system(rng: random.Random) -> Tuple[np.ndarray, np.ndarray]:
    rows: List[List[float]] = []
    for _ in range(rng.randint(1, 3)):
        row = [0.0] * VARIABLE_COUNT
        while not any(row):
            row = [float(rng.choice([-2, -1, 0, 0, 1, 2, 3])) for _ in range(VARIABLE_COUNT)]
        rows.append(row)
    matrix = np.array(rows)
    witness = np.array([float(rng.randint(-4, 4)) for _ in range(VARIABLE_COUNT)])
    return matrix, matrix @ witness


def assignable(matrix: np.ndarray) -> List[int]:
    """Variables that can take any value while the system stays satisfiable."""
    rank = np.linalg.matrix_rank(matrix)
    return [
        j for j in range(VARIABLE_COUNT)
        if matrix[:, j].any() and np.linalg.matrix_rank(np.delete(matrix, j, axis=1)) == rank
    ]


def bindings(engine: Engine) -> np.ndarray:
    return np.array([engine.globals.bindings[f"x{j}"] for j in range(VARIABLE_COUNT)])


class TestConstraintBasics:
    """Declaring and maintaining a single equation."""

    def test_declaration_solves_immediately(self, compilation_engine):
        compilation_engine.run(DEMO + 'print(a + " " + b + " " + c);')
        assert compilation_engine.output == ["1 1 2"]

    def test_assignment_keeps_the_equation(self, compilation_engine):
        compilation_engine.run(DEMO + 'c = 5; print(a + " " + b + " " + c);')
        assert compilation_engine.output == ["1 4 5"]

    def test_compound_assignment(self, compilation_engine):
        compilation_engine.run(DEMO + 'c += 3; print(a + " " + b + " " + c);')
        assert compilation_engine.output == ["1 4 5"]

    def test_constraint_variables_mirror_program_variables(self, compilation_engine):
        engine = compilation_engine
        engine.run(DEMO + "a = 10;")
        scope = engine.program_scope
        for cv in engine.constraints.variables.values():
            assert cv.value == scope.bindings[cv.name]
        assert scope.bindings["a"] + scope.bindings["b"] == scope.bindings["c"]

    def test_scaled_and_constant_terms(self, compilation_engine):
        compilation_engine.run("""
        let celsius = 0;
        let fahrenheit = 0;
        always: fahrenheit == celsius * 9 / 5 + 32;
        celsius = 100;
        print(fahrenheit);
        fahrenheit = 50;
        print(celsius);
        """)
        assert compilation_engine.output == ["212", "10"]

    def test_tautology_adds_no_row(self, compilation_engine):
        compilation_engine.run("let a = 1; always: a == a;")
        assert compilation_engine.constraints.solver.constraints == []

    def test_each_assignment_solves(self, compilation_engine):
        engine = compilation_engine
        engine.run(DEMO)
        before = engine.constraints.solve_count
        engine.run("c = 7;")
        assert engine.constraints.solve_count > before


class TestConstraintErrors:
    """Rejected constraints and impossible assignments."""

    def test_contradiction(self, compilation_engine):
        with pytest.raises(UnsatisfiableSystem, match="contradiction"):
            compilation_engine.run("always: 1 == 2;")

    @pytest.mark.parametrize("relation", ["<", "<=", ">", ">=", "!="])
    def test_unsupported_relation(self, compilation_engine, relation):
        with pytest.raises(UnsupportedRelation, match="Only '==' constraints are supported"):
            compilation_engine.run(f"let a = 1; let b = 2; always: a {relation} b;")

    @pytest.mark.parametrize("expression", ["a * b == 1", "a / b == 1", 'a == "x"', "a"])
    def test_nonlinear(self, compilation_engine, expression):
        with pytest.raises(NonlinearConstraint):
            compilation_engine.run(f"let a = 1; let b = 2; always: {expression};")

    def test_non_number_variable(self, compilation_engine):
        with pytest.raises(NonlinearConstraint, match="holds string"):
            compilation_engine.run('let a = "one"; always: a == 1;')

    def test_assigning_non_number(self, compilation_engine):
        with pytest.raises(NonlinearConstraint, match="was assigned"):
            compilation_engine.run(DEMO + 'a = "lots";')

    def test_pinned_value_cannot_hold(self, compilation_engine):
        with pytest.raises(UnsatisfiableSystem, match="cannot hold"):
            compilation_engine.run("let a = 3; always: a == 3; a = 4;")

    @pytest.mark.parametrize("strategy", ["convention", "interpretation"])
    def test_needs_compilation_strategy(self, strategy):
        with pytest.raises(UnsupportedStrategy, match="always: constraints"):
            Engine(strategy).run(DEMO)


class TestRandomAssignments:
    """Random linear systems stay satisfied under assignments to free variables."""

    @pytest.mark.parametrize("seed", range(SEED_COUNT))
    def test_random_assignments(self, seed, absorber_oracle):
        rng = random.Random(seed)
        matrix, rhs = random_system(rng)
        candidates = assignable(matrix)
        if not candidates:
            pytest.skip("no variable can be assigned freely")

        preamble = {f"x{j}": float(rng.randint(-4, 4)) for j in range(VARIABLE_COUNT)}
        engine = Engine("compilation")
        engine.run("\n".join(equation(row, target) for row, target in zip(matrix, rhs)), preamble=preamble)
        np.testing.assert_allclose(matrix @ bindings(engine), rhs, atol=1e-9)

        for _ in range(ASSIGNMENTS_PER_SEED):
            j = rng.choice(candidates)
            value = rng.randint(-10, 10)
            before = bindings(engine)
            engine.run(f"x{j} = {value};")

            values = bindings(engine)
            np.testing.assert_allclose(matrix @ values, rhs, atol=1e-9)
            assert values[j] == pytest.approx(value, abs=1e-9)
            expected = absorber_oracle(matrix, rhs, before, {j: float(value)})
            np.testing.assert_allclose(values, expected, atol=1e-9)
            moved = {k for k in range(VARIABLE_COUNT) if abs(values[k] - before[k]) > 1e-9}
            assert moved == {k for k in range(VARIABLE_COUNT) if abs(expected[k] - before[k]) > 1e-9}
            for cv in engine.constraints.variables.values():
                assert cv.value == engine.globals.bindings[cv.name]
