"""
Exact two-phase primal simplex over Fractions with Bland's rule.

Rows are kept as sparse dicts. Phase 1 minimizes the sum of artificial
variables; phase 2 optimizes the real objective with artificials barred
from entering. An optimal answer is returned only after the assignment and
the dual certificate have been re-checked against the original program.
"""

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Set, Tuple

from app.core.errors import InternalError
from app.models.lp import LinearProgram, LpSolution
from app.schemas.common import LpStatus, Relation
from app.utils.rationals import format_rational

logger = logging.getLogger(__name__)

Row = Dict[int, Fraction]


class _Tableau:
    """Standard-form tableau: every row is an equality with a basic column."""

    def __init__(self, lp: LinearProgram):
        self.num_vars = lp.num_vars
        self.rows: List[Row] = []
        self.rhs: List[Fraction] = []
        self.basis: List[int] = []
        self.signs: List[int] = []  # tableau row = sign * original row
        self.markers: List[int] = []  # slack or artificial column with +1 in this row only
        self.artificials: Set[int] = set()
        self.pivots = 0

        column = lp.num_vars
        for constraint in lp.constraints:
            coefficients = {index: Fraction(value) for index, value in constraint.coefficients.items() if value}
            rhs = Fraction(constraint.rhs)
            sign = 1
            relation = constraint.relation
            if relation == Relation.GE:
                coefficients = {index: -value for index, value in coefficients.items()}
                rhs, sign, relation = -rhs, -1, Relation.LE
            slack_coefficient = 1 if relation == Relation.LE else 0
            if rhs < 0:
                coefficients = {index: -value for index, value in coefficients.items()}
                rhs, sign, slack_coefficient = -rhs, -sign, -slack_coefficient

            row = dict(coefficients)
            marker = None
            if slack_coefficient:
                row[column] = Fraction(slack_coefficient)
                if slack_coefficient == 1:
                    marker = column
                column += 1
            if marker is None:
                row[column] = Fraction(1)
                self.artificials.add(column)
                marker = column
                column += 1
            self.rows.append(row)
            self.rhs.append(rhs)
            self.basis.append(marker)
            self.signs.append(sign)
            self.markers.append(marker)
        self.num_columns = column
        self.costs: Row = {}
        self.value = Fraction(0)

    def price(self, costs: Row) -> None:
        """Reduced costs d_j = c_j - c_B B^-1 A_j for the current basis."""
        reduced: Row = dict(costs)
        value = Fraction(0)
        for row, rhs, basic in zip(self.rows, self.rhs, self.basis):
            weight = costs.get(basic, Fraction(0))
            if not weight:
                continue
            value += weight * rhs
            for index, coefficient in row.items():
                reduced[index] = reduced.get(index, Fraction(0)) - weight * coefficient
        self.costs = {index: cost for index, cost in reduced.items() if cost}
        self.value = value

    def pivot(self, leaving_row: int, entering: int) -> None:
        row = self.rows[leaving_row]
        element = row[entering]
        if element != 1:
            row = {index: value / element for index, value in row.items()}
            self.rows[leaving_row] = row
            self.rhs[leaving_row] /= element
        rhs = self.rhs[leaving_row]

        for position, other in enumerate(self.rows):
            if position == leaving_row:
                continue
            factor = other.get(entering)
            if not factor:
                continue
            for index, value in row.items():
                updated = other.get(index, Fraction(0)) - factor * value
                if updated:
                    other[index] = updated
                else:
                    other.pop(index, None)
            self.rhs[position] -= factor * rhs

        factor = self.costs.get(entering)
        if factor:
            for index, value in row.items():
                updated = self.costs.get(index, Fraction(0)) - factor * value
                if updated:
                    self.costs[index] = updated
                else:
                    self.costs.pop(index, None)
            self.value += factor * rhs

        self.basis[leaving_row] = entering
        self.pivots += 1

    def entering_column(self, barred: Set[int]) -> Optional[int]:
        # Bland: lowest-index column with positive reduced cost
        candidates = [index for index, cost in self.costs.items() if cost > 0 and index not in barred]
        return min(candidates) if candidates else None

    def leaving_row(self, entering: int) -> Optional[int]:
        best: Optional[Tuple[Fraction, int, int]] = None
        for position, row in enumerate(self.rows):
            coefficient = row.get(entering)
            if coefficient is None or coefficient <= 0:
                continue
            key = (self.rhs[position] / coefficient, self.basis[position], position)
            if best is None or key < best:
                best = key
        return None if best is None else best[2]

    def run(self, barred: Set[int]) -> bool:
        """Pivot to optimality; False when the objective is unbounded."""
        while True:
            entering = self.entering_column(barred)
            if entering is None:
                return True
            leaving = self.leaving_row(entering)
            if leaving is None:
                return False
            logger.debug(f"pivot {self.pivots}: column {entering} enters, row {leaving} leaves")
            self.pivot(leaving, entering)

    def drive_out_artificials(self) -> None:
        """Replace zero-level basic artificials by real columns where the row allows."""
        for position, basic in enumerate(self.basis):
            if basic not in self.artificials:
                continue
            candidates = [
                index for index, value in self.rows[position].items()
                if value and index not in self.artificials
            ]
            if candidates:
                self.pivot(position, min(candidates))

    def assignment(self) -> Tuple[Fraction, ...]:
        values = [Fraction(0)] * self.num_vars
        for basic, rhs in zip(self.basis, self.rhs):
            if basic < self.num_vars:
                values[basic] = rhs
        return tuple(values)

    def duals(self) -> Tuple[Fraction, ...]:
        # marker columns start as +e_r with cost 0, so y'_r = -d_marker
        return tuple(
            -self.costs.get(marker, Fraction(0)) * sign
            for marker, sign in zip(self.markers, self.signs)
        )


def verify_certificate(lp: LinearProgram, assignment: Tuple[Fraction, ...], dual: Tuple[Fraction, ...], value: Fraction) -> bool:
    """
    Primal feasibility, dual feasibility and equal objectives.

    Dual feasibility for a maximization with x >= 0: y_r >= 0 on <= rows,
    y_r <= 0 on >= rows, and sum_r y_r A_rj >= c_j for every variable j.
    """
    if not lp.is_feasible(assignment) or lp.value_of(assignment) != value:
        return False
    if len(dual) != len(lp.constraints):
        return False
    reduced: Row = {}
    for multiplier, row in zip(dual, lp.constraints):
        if row.relation == Relation.LE and multiplier < 0:
            return False
        if row.relation == Relation.GE and multiplier > 0:
            return False
        if multiplier:
            for index, coefficient in row.coefficients.items():
                reduced[index] = reduced.get(index, Fraction(0)) + multiplier * coefficient
    for index in range(lp.num_vars):
        if reduced.get(index, Fraction(0)) < lp.objective.get(index, Fraction(0)):
            return False
    bound = sum((multiplier * row.rhs for multiplier, row in zip(dual, lp.constraints)), Fraction(0))
    return bound == value


def solve(lp: LinearProgram) -> LpSolution:
    """
    Exact optimum of a linear program.

    Returns:
        LpSolution with status optimal, infeasible or unbounded. Optimal
        solutions carry the assignment, the final basis and a verified dual.

    Raises:
        InternalError: the optimal basis fails re-verification
    """
    tableau = _Tableau(lp)

    if tableau.artificials:
        tableau.price({index: Fraction(-1) for index in tableau.artificials})
        tableau.run(barred=set())
        if tableau.value < 0:
            logger.info(f"LP infeasible after {tableau.pivots} pivots ({lp.num_vars} vars, {len(lp.constraints)} rows)")
            return LpSolution(status=LpStatus.INFEASIBLE, pivots=tableau.pivots)
        tableau.drive_out_artificials()

    tableau.price({index: Fraction(value) for index, value in lp.objective.items() if value})
    if not tableau.run(barred=tableau.artificials):
        logger.info(f"LP unbounded after {tableau.pivots} pivots")
        return LpSolution(status=LpStatus.UNBOUNDED, pivots=tableau.pivots)

    assignment = tableau.assignment()
    dual = tableau.duals()
    value = tableau.value
    if not verify_certificate(lp, assignment, dual, value):
        raise InternalError("LP optimum failed certificate verification", value=format_rational(value))
    logger.debug(
        f"LP solved: {lp.num_vars} vars, {len(lp.constraints)} rows, "
        f"{tableau.pivots} pivots, value {format_rational(value)}"
    )
    return LpSolution(
        status=LpStatus.OPTIMAL,
        value=value,
        assignment=assignment,
        basis=tuple(tableau.basis),
        dual=dual,
        pivots=tableau.pivots,
    )


def _format_terms(lp: LinearProgram, coefficients: Dict[int, Fraction]) -> str:
    terms = [f"{format_rational(value)} {lp.name_of(index)}" for index, value in sorted(coefficients.items()) if value]
    return " + ".join(terms) if terms else "0"


def export_lp(lp: LinearProgram) -> str:
    """Plain-text dump: objective line, one constraint per line, exact rationals."""
    lines = [f"maximize: {_format_terms(lp, lp.objective)}"]
    for position, row in enumerate(lp.constraints):
        label = row.name or f"c{position}"
        lines.append(f"{label}: {_format_terms(lp, row.coefficients)} {row.relation.value} {format_rational(row.rhs)}")
    lines.append(f"bounds: all {lp.num_vars} variables >= 0")
    return "\n".join(lines) + "\n"
