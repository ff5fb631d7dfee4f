"""
Linear programs over the rationals and their solutions.

Constraint rows are sparse: a map from variable index to coefficient.
Every program maximizes and every variable is nonnegative.
"""

from fractions import Fraction
from typing import Dict, Optional, Tuple

from pydantic import Field, model_validator

from app.models.base import FrozenModel, Rational
from app.schemas.common import LpStatus, Relation


class Constraint(FrozenModel):
    coefficients: Dict[int, Rational]
    relation: Relation
    rhs: Rational
    name: str = ""

    def lhs(self, assignment: Tuple[Fraction, ...]) -> Fraction:
        return sum((value * assignment[index] for index, value in self.coefficients.items()), Fraction(0))

    def holds(self, assignment: Tuple[Fraction, ...]) -> bool:
        left = self.lhs(assignment)
        if self.relation == Relation.LE:
            return left <= self.rhs
        if self.relation == Relation.GE:
            return left >= self.rhs
        return left == self.rhs


class LinearProgram(FrozenModel):
    """maximize objective . x  subject to the constraints and x >= 0"""

    num_vars: int = Field(ge=1)
    objective: Dict[int, Rational]
    constraints: Tuple[Constraint, ...] = ()
    var_names: Optional[Tuple[str, ...]] = None

    @model_validator(mode="after")
    def _check(self) -> "LinearProgram":
        for index in self.objective:
            if not 0 <= index < self.num_vars:
                raise ValueError("objective index outside the variable range")
        for row in self.constraints:
            for index in row.coefficients:
                if not 0 <= index < self.num_vars:
                    raise ValueError(f"constraint {row.name or '?'} has an index outside the variable range")
        if self.var_names is not None and len(self.var_names) != self.num_vars:
            raise ValueError("var_names length differs from num_vars")
        return self

    def name_of(self, index: int) -> str:
        return self.var_names[index] if self.var_names else f"x{index}"

    def value_of(self, assignment: Tuple[Fraction, ...]) -> Fraction:
        return sum((value * assignment[index] for index, value in self.objective.items()), Fraction(0))

    def is_feasible(self, assignment: Tuple[Fraction, ...]) -> bool:
        """True iff the assignment is nonnegative and satisfies every row exactly."""
        if len(assignment) != self.num_vars or any(value < 0 for value in assignment):
            return False
        return all(row.holds(assignment) for row in self.constraints)


class LpSolution(FrozenModel):
    status: LpStatus
    value: Optional[Rational] = None
    assignment: Tuple[Rational, ...] = ()
    basis: Tuple[int, ...] = ()  # basic column per row of the final tableau
    dual: Tuple[Rational, ...] = ()  # one multiplier per constraint row
    pivots: int = 0
