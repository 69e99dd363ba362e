"""Tests for the linear-equality solver."""
import random

import numpy as np
import pytest

from concepts.solver import LinearConstraint, SolverState, UnsatisfiableSystem


def state_with(variable_count: int, *constraints: LinearConstraint) -> SolverState:
    state = SolverState()
    for cv_id in range(1, variable_count + 1):
        state.add_variable(cv_id, cv_id)
    for constraint in constraints:
        state.add_constraint(constraint)
    return state


class TestSolverBasics:
    """Subject choice and pinning."""

    def test_latest_declared_variable_absorbs_the_change(self):
        # a + b - c == 0
        state = state_with(3, LinearConstraint({1: 1.0, 2: 1.0, 3: -1.0}))
        assert state.solve({1: 1.0, 2: 1.0, 3: 1.0}) == {1: 1.0, 2: 1.0, 3: 2.0}

    def test_pinned_variable_is_kept(self):
        state = state_with(3, LinearConstraint({1: 1.0, 2: 1.0, 3: -1.0}))
        assert state.solve({1: 1.0, 2: 1.0, 3: 2.0}, pinned={3: 5.0}) == {1: 1.0, 2: 4.0, 3: 5.0}

    def test_two_equations(self):
        # x + y == 10, x - y == 2
        state = state_with(
            2,
            LinearConstraint({1: 1.0, 2: 1.0}, -10.0),
            LinearConstraint({1: 1.0, 2: -1.0}, -2.0),
        )
        result = state.solve({1: 0.0, 2: 0.0})
        assert result[1] == pytest.approx(6.0)
        assert result[2] == pytest.approx(4.0)

    def test_unconstrained_variables_keep_their_values(self):
        state = state_with(3, LinearConstraint({1: 2.0}, -4.0))
        assert state.solve({1: 0.0, 2: 7.0, 3: -1.0}) == {1: 2.0, 2: 7.0, 3: -1.0}

    def test_redundant_equation_is_accepted(self):
        state = state_with(
            2,
            LinearConstraint({1: 1.0, 2: 1.0}, -3.0),
            LinearConstraint({1: 2.0, 2: 2.0}, -6.0),
        )
        result = state.solve({1: 1.0, 2: 1.0})
        assert result[1] + result[2] == pytest.approx(3.0)

    def test_contradiction_with_pinned_value(self):
        state = state_with(1, LinearConstraint({1: 1.0}, -3.0))
        with pytest.raises(UnsatisfiableSystem, match="Constraint cannot hold") as exc_info:
            state.solve({1: 3.0}, pinned={1: 4.0})
        assert exc_info.value.details["pinned"] == [1]

    def test_inconsistent_rows(self):
        state = state_with(
            2,
            LinearConstraint({1: 1.0, 2: 1.0}, -3.0),
            LinearConstraint({1: 1.0, 2: 1.0}, -4.0),
        )
        with pytest.raises(UnsatisfiableSystem):
            state.solve({1: 0.0, 2: 0.0})

    def test_next_latest_variable_absorbs_when_the_latest_is_determined(self):
        # c == 1, a + b + c == 6
        state = state_with(
            3,
            LinearConstraint({3: 1.0}, -1.0),
            LinearConstraint({1: 1.0, 2: 1.0, 3: 1.0}, -6.0),
        )
        assert state.solve({1: 0.0, 2: 0.0, 3: 0.0}) == {1: 0.0, 2: 5.0, 3: 1.0}

    def test_residual(self):
        constraint = LinearConstraint({1: 2.0, 2: -1.0}, 1.0)
        assert constraint.residual({1: 3.0, 2: 7.0}) == 0.0



def random_matrix(rng: random.Random, variable_count: int) -> np.ndarray:
    rows = []
    for _ in range(rng.randint(1, 4)):
        row = [0.0] * variable_count
        while not any(row):
            row = [float(rng.randint(-3, 3)) for _ in range(variable_count)]
        rows.append(row)
    return np.array(rows)


class TestRandomSystems:
    """Feasibility agrees with a rank test; feasible solutions satisfy every row."""

    @pytest.mark.parametrize("seed", range(200))
    def test_random_system(self, seed, absorber_oracle):
        rng = random.Random(seed)
        variable_count = rng.randint(2, 6)
        matrix = random_matrix(rng, variable_count)
        witness = np.array([float(rng.randint(-5, 5)) for _ in range(variable_count)])
        rhs = matrix @ witness
        if rng.random() < 0.2:
            rhs[rng.randrange(len(rhs))] += 1.0

        constraints = [
            LinearConstraint({j + 1: coef for j, coef in enumerate(row) if coef != 0.0}, -float(target))
            for row, target in zip(matrix, rhs)
        ]
        state = state_with(variable_count, *constraints)
        current = {j + 1: float(rng.randint(-5, 5)) for j in range(variable_count)}
        pinned = {}
        if rng.random() < 0.5:
            pinned[rng.randint(1, variable_count)] = float(rng.randint(-5, 5))

        free_columns = [j for j in range(variable_count) if j + 1 not in pinned]
        reduced = matrix[:, free_columns]
        target = rhs.copy()
        for cv_id, value in pinned.items():
            target -= matrix[:, cv_id - 1] * value
        rank = np.linalg.matrix_rank(reduced)
        feasible = rank == np.linalg.matrix_rank(np.column_stack([reduced, target]))

        if not feasible:
            with pytest.raises(UnsatisfiableSystem):
                state.solve(current, pinned)
            return

        result = state.solve(current, pinned)
        values = np.array([result[j + 1] for j in range(variable_count)])
        np.testing.assert_allclose(matrix @ values, rhs, atol=1e-8)
        for cv_id, value in pinned.items():
            assert result[cv_id] == value
        for j in range(variable_count):
            if not matrix[:, j].any() and j + 1 not in pinned:
                assert result[j + 1] == current[j + 1]
        changed = [cv_id for cv_id in result if cv_id not in pinned and result[cv_id] != current[cv_id]]
        assert len(changed) <= rank

        expected = absorber_oracle(
            matrix, rhs, np.array([current[j + 1] for j in range(variable_count)]),
            {cv_id - 1: value for cv_id, value in pinned.items()},
        )
        np.testing.assert_allclose(values, expected, atol=1e-8)
        moved = {j + 1 for j in range(variable_count) if abs(values[j] - current[j + 1]) > 1e-9}
        expected_moved = {j + 1 for j in range(variable_count) if abs(expected[j] - current[j + 1]) > 1e-9}
        assert moved == expected_moved
