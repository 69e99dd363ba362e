"""
``always:`` constraints.

Each referenced variable gets a constraint variable (a heap object with a
``value`` property) kept in sync by two binding aexprs. Assigning a bound
variable pins its constraint variable and re-solves; solved values flow
back into the program variables through the second binding. A sentinel
trigger over the constraint re-solves whenever it stops holding.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple

from aexpr.exceptions import UnsupportedStrategy
from aexpr.handle import AExprHandle, HandleRole
from aexpr.keys import DependencyKey
from aexpr.strategies import StrategyKind
from concepts.solver import LinearConstraint, SolverState, UnsatisfiableSystem
from concepts.triggers import Trigger
from rxl.exceptions import RuntimeErrorKind, RxlError
from rxl.interpreter import runtime_error
from rxl.nodes import AstNode, NodeKind
from rxl.printer import print_program
from rxl.values import HeapObject, Scope, Value, type_name, unchanged

if TYPE_CHECKING:
    from aexpr.engine import Engine

logger = logging.getLogger(__name__)

COMPARISONS = {"!=", "<", "<=", ">", ">="}

# variable key -> coefficient, plus the constant term
LinearForm = Tuple[Dict[DependencyKey, float], float]


class NonlinearConstraint(RxlError):
    """Raised when an ``always`` expression is not a linear equation over numbers."""

    def __init__(self, message: str):
        super().__init__(message=message)


class UnsupportedRelation(RxlError):
    """Raised for ``always`` relations other than equality."""

    def __init__(self, relation: str):
        super().__init__(
            message=f"Only '==' constraints are supported, got {relation!r}",
            details={"relation": relation}
        )


@dataclass
class ConstraintVar:
    cv_id: int
    source: DependencyKey
    scope: Scope
    name: str
    cell: HeapObject
    declaration_index: int
    bindings: List[AExprHandle] = field(default_factory=list)

    @property
    def value(self) -> float:
        return self.cell.get_property("value")


class ConstraintSystem:
    """The engine's shared solver plus the constraint variables it drives."""

    def __init__(self, engine: "Engine", tolerance: float = 1e-9):
        self._engine = engine
        self.tolerance = tolerance
        self.solver = SolverState(tolerance)
        self.variables: Dict[DependencyKey, ConstraintVar] = {}
        self._by_id: Dict[int, ConstraintVar] = {}
        self._cv_ids = itertools.count(1)
        self.solve_count = 0

    def declare(self, stmt: AstNode, scope: Scope) -> Optional[LinearConstraint]:
        """
        Add the statement's equation to the system and solve immediately.

        Returns:
            The lifted constraint, or None for a tautology

        Raises:
            UnsupportedStrategy: Outside the compilation strategy
            UnsupportedRelation: For comparisons other than ``==``
            NonlinearConstraint: If the equation is not linear
            UnsatisfiableSystem: If the system has no solution
        """
        engine = self._engine
        kind = engine.strategy.kind
        if kind is not StrategyKind.COMPILATION:
            raise UnsupportedStrategy("always: constraints", kind.value)

        expression = stmt.children[0]
        if expression.kind is NodeKind.BINARY and expression.value in COMPARISONS:
            raise UnsupportedRelation(expression.value)
        if expression.kind is not NodeKind.BINARY or expression.value != "==":
            raise NonlinearConstraint("always: expects an equation 'left == right'")

        owners: Dict[DependencyKey, Tuple[Scope, str]] = {}
        left_terms, left_constant = self._linearize(expression.children[0], scope, owners)
        right_terms, right_constant = self._linearize(expression.children[1], scope, owners)
        terms = dict(left_terms)
        for key, coef in right_terms.items():
            terms[key] = terms.get(key, 0.0) - coef
        constant = left_constant - right_constant

        cvs = {key: self._variable_for(key, *owners[key]) for key in owners}
        lifted = {cvs[key].cv_id: coef for key, coef in terms.items() if abs(coef) > self.tolerance}
        if not lifted:
            if abs(constant) > self.tolerance:
                raise UnsatisfiableSystem(f"Constraint is a contradiction: {constant:g} == 0")
            logger.debug("Tautological constraint adds no row")
            return None

        constraint = LinearConstraint(lifted, constant)
        self.solver.add_constraint(constraint)
        self.solve()

        sentinel = engine.create_aexpr(lambda: self._satisfied(constraint), role=HandleRole.BINDING)
        Trigger(sentinel).on_become_false(lambda: self.solve())
        logger.debug(f"Declared constraint over {len(lifted)} variables")
        return constraint

    def _linearize(self, node: AstNode, scope: Scope, owners: Dict[DependencyKey, Tuple[Scope, str]]) -> LinearForm:
        kind = node.kind
        if kind is NodeKind.LITERAL:
            if type(node.value) is not float:
                raise NonlinearConstraint(f"{print_program(node)} is not a number")
            return {}, node.value
        if kind is NodeKind.IDENT:
            name = node.value
            owner = scope.owner_of(name)
            if owner is None:
                raise runtime_error(RuntimeErrorKind.UNDEFINED_VARIABLE, f"{name} is not defined", node)
            value = owner.bindings[name]
            if type(value) is not float:
                raise NonlinearConstraint(f"{name} holds {type_name(value)}, not a number")
            key = self._engine.variable_key(owner, name)
            owners[key] = (owner, name)
            return {key: 1.0}, 0.0
        if kind is NodeKind.UNARY and node.value == "-":
            terms, constant = self._linearize(node.children[0], scope, owners)
            return _scale(terms, constant, -1.0)
        if kind is NodeKind.BINARY and node.value in ("+", "-"):
            left_terms, left_constant = self._linearize(node.children[0], scope, owners)
            right_terms, right_constant = self._linearize(node.children[1], scope, owners)
            sign = 1.0 if node.value == "+" else -1.0
            terms = dict(left_terms)
            for key, coef in right_terms.items():
                terms[key] = terms.get(key, 0.0) + sign * coef
            return terms, left_constant + sign * right_constant
        if kind is NodeKind.BINARY and node.value == "*":
            left = self._linearize(node.children[0], scope, owners)
            right = self._linearize(node.children[1], scope, owners)
            if not left[0]:
                return _scale(*right, left[1])
            if not right[0]:
                return _scale(*left, right[1])
        elif kind is NodeKind.BINARY and node.value == "/":
            left = self._linearize(node.children[0], scope, owners)
            right = self._linearize(node.children[1], scope, owners)
            if not right[0] and right[1] != 0.0:
                return _scale(*left, 1.0 / right[1])
        raise NonlinearConstraint(f"{print_program(node)} is not linear")

    def _variable_for(self, key: DependencyKey, owner: Scope, name: str) -> ConstraintVar:
        cv = self.variables.get(key)
        if cv is not None:
            return cv
        engine = self._engine
        cell = engine.heap.new_object({"value": owner.bindings[name]})
        cv = ConstraintVar(next(self._cv_ids), key, owner, name, cell, owner.order.get(name, 0))
        self.variables[key] = cv
        self._by_id[cv.cv_id] = cv
        self.solver.add_variable(cv.cv_id, cv.declaration_index)

        to_solver = engine.create_aexpr(lambda: engine.tracked_read_local(owner, name), role=HandleRole.BINDING)
        to_solver.on_change(lambda value: self.on_variable_assign(cv, value))
        to_program = engine.create_aexpr(lambda: engine.tracked_read_member(cell, "value"), role=HandleRole.BINDING)
        to_program.on_change(lambda value: engine.assign_local(owner, name, value))
        cv.bindings = [to_solver, to_program]
        return cv

    def _satisfied(self, constraint: LinearConstraint) -> bool:
        engine = self._engine
        values = {}
        for cv_id in constraint.terms:
            cv = self._by_id[cv_id]
            value = engine.tracked_read_local(cv.scope, cv.name)
            if type(value) is not float:
                return False
            values[cv_id] = value
        return abs(constraint.residual(values)) <= self.tolerance

    def on_variable_assign(self, cv: ConstraintVar, value: Value) -> None:
        """
        A bound program variable was assigned: pin it and re-solve.

        Raises:
            NonlinearConstraint: If the variable was given a non-number
            UnsatisfiableSystem: If the pinned value cannot be satisfied
        """
        if unchanged(cv.value, value):
            return
        if type(value) is not float:
            raise NonlinearConstraint(f"{cv.name} was assigned {type_name(value)}, not a number")
        self.solve({cv.cv_id: value})

    def solve(self, pinned: Optional[Dict[int, float]] = None) -> None:
        """Solve the whole system and write changed values into the constraint variables."""
        current = {cv_id: cv.value for cv_id, cv in self._by_id.items()}
        result = self.solver.solve(current, pinned)
        self.solve_count += 1
        changed = []
        for cv_id, value in result.items():
            cv = self._by_id[cv_id]
            if abs(value - current[cv_id]) > self.tolerance:
                changed.append(cv.name)
                self._engine.assign_member(cv.cell, "value", value)
        logger.debug(f"Solver run changed {changed}")


def _scale(terms: Dict[DependencyKey, float], constant: float, factor: float) -> LinearForm:
    return {key: coef * factor for key, coef in terms.items()}, constant * factor
