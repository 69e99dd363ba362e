"""
A minimal deterministic linear-equality solver.

Rows are reduced Gauss-Jordan style in declaration order. Each row picks as
its subject the free variable with the highest declaration index; every
variable that ends up without a row keeps its current value, so a single
underdetermined equation is absorbed by its latest-declared variable.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional

import numpy as np

from rxl.exceptions import RxlError

logger = logging.getLogger(__name__)


class UnsatisfiableSystem(RxlError):
    """Raised when the constraints (with the pinned values) have no solution."""

    def __init__(self, message: str, details: Optional[dict] = None):
        super().__init__(message=message, details=details or {})


@dataclass
class LinearConstraint:
    """``sum(coefficient * var) + constant == 0``"""
    terms: Dict[int, float]
    constant: float = 0.0
    relation: str = "=="

    def residual(self, values: Mapping[int, float]) -> float:
        return sum(coef * values[cv_id] for cv_id, coef in self.terms.items()) + self.constant


@dataclass
class SolverState:
    """Variables (cv-id to declaration index) and constraints in declaration order."""
    tolerance: float = 1e-9
    variables: Dict[int, int] = field(default_factory=dict)
    constraints: List[LinearConstraint] = field(default_factory=list)

    def add_variable(self, cv_id: int, declaration_index: int) -> None:
        self.variables.setdefault(cv_id, declaration_index)

    def add_constraint(self, constraint: LinearConstraint) -> None:
        self.constraints.append(constraint)

    def solve(self, current: Mapping[int, float], pinned: Optional[Mapping[int, float]] = None) -> Dict[int, float]:
        """
        Find values for all variables satisfying every constraint.

        Args:
            current: Current value of every variable
            pinned: Variables whose values must not change

        Returns:
            New value for every variable

        Raises:
            UnsatisfiableSystem: If a row reduces to a nonzero constant
        """
        pinned = dict(pinned or {})
        tol = self.tolerance
        # columns sorted by declaration index; the last free column is the latest declared
        free = sorted((v for v in self.variables if v not in pinned), key=self.variables.__getitem__)
        column = {cv_id: i for i, cv_id in enumerate(free)}
        rows: List[np.ndarray] = []
        rhs: List[float] = []
        subjects: List[int] = []

        for constraint in self.constraints:
            row = np.zeros(len(free))
            target = -constraint.constant
            for cv_id, coef in constraint.terms.items():
                if cv_id in pinned:
                    target -= coef * pinned[cv_id]
                else:
                    row[column[cv_id]] += coef
            for i, subject in enumerate(subjects):
                factor = row[subject]
                if factor != 0.0:
                    row = row - factor * rows[i]
                    target -= factor * rhs[i]
            nonzero = np.flatnonzero(np.abs(row) > tol)
            if nonzero.size == 0:
                if abs(target) > tol:
                    raise UnsatisfiableSystem(
                        f"Constraint cannot hold: residual {target:g}",
                        details={"terms": dict(constraint.terms), "pinned": sorted(pinned)},
                    )
                continue
            subject = int(nonzero[-1])
            pivot = row[subject]
            row = row / pivot
            target /= pivot
            for i in range(len(rows)):
                factor = rows[i][subject]
                if factor != 0.0:
                    rows[i] = rows[i] - factor * row
                    rhs[i] -= factor * target
            rows.append(row)
            rhs.append(target)
            subjects.append(subject)

        values = np.array([float(current[cv_id]) for cv_id in free])
        solved = values.copy()
        for row, target, subject in zip(rows, rhs, subjects):
            others = row.copy()
            others[subjects] = 0.0
            solved[subject] = target - float(others @ values)

        result = {cv_id: float(current[cv_id]) for cv_id in self.variables}
        result.update(pinned)
        for cv_id, i in column.items():
            result[cv_id] = float(solved[i])
        logger.debug(f"Solved {len(self.constraints)} constraints with {len(pinned)} pinned")
        return result
