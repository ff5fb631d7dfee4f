"""
Persuasion instance: prior, persuasion levels and sender utility.
"""

from fractions import Fraction
from typing import Sequence, Tuple

from pydantic import Field, model_validator

from app.core.errors import InputError
from app.models.base import FrozenModel, Rational
from app.models.utility import UtilityFunction


def theta_from_belief(lam: Fraction, p: Fraction) -> Fraction:
    """
    Persuasion level of a receiver who adopts when Pr[w1 | signal] >= p.

    theta = lam / (1 - lam) * p / (1 - p)

    Raises:
        InputError: lam outside (0, 1) or p outside [0, 1)
    """
    lam, p = Fraction(lam), Fraction(p)
    if not 0 < lam < 1:
        raise InputError(f"lambda {lam} outside (0, 1)")
    if not 0 <= p < 1:
        raise InputError(f"belief threshold {p} outside [0, 1)")
    return lam / (1 - lam) * p / (1 - p)


class Instance(FrozenModel):
    """Receivers 1..n with 1 >= theta_1 >= ... >= theta_n >= 0."""

    n: int = Field(ge=1)
    lam: Rational = Field(alias="lambda")
    theta: Tuple[Rational, ...]
    utility: UtilityFunction

    @model_validator(mode="after")
    def _check(self) -> "Instance":
        if not 0 < self.lam < 1:
            raise ValueError("lambda outside (0, 1)")
        if len(self.theta) != self.n:
            raise ValueError("theta length differs from n")
        if any(a < b for a, b in zip(self.theta, self.theta[1:])):
            raise ValueError("theta not sorted descending")
        if self.theta and not (self.theta[0] <= 1 and self.theta[-1] >= 0):
            raise ValueError("theta outside [0, 1]")
        if self.utility.n != self.n:
            raise ValueError("utility receiver count differs from n")
        return self

    @classmethod
    def from_beliefs(cls, lam: Fraction, beliefs: Sequence[Fraction], utility: UtilityFunction) -> "Instance":
        """Build an instance from belief thresholds p_i instead of theta_i."""
        theta = tuple(theta_from_belief(lam, p) for p in beliefs)
        return cls(n=len(theta), lam=lam, theta=theta, utility=utility)

    def theta_at(self, index: int) -> Fraction:
        """theta_i for 1-based i with theta_0 = 1 and theta_{n+1} = 0."""
        if index <= 0:
            return Fraction(1)
        if index > self.n:
            return Fraction(0)
        return self.theta[index - 1]

    def prefix_value(self, length: int) -> Fraction:
        """V([length])."""
        return self.utility.value((1 << length) - 1)
