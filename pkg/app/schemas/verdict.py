"""
Verdict documents returned by the persuasiveness checkers.
"""

from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from app.models.base import Rational
from app.schemas.common import CheckKind
from app.utils.rationals import format_rational


class Violation(BaseModel):
    """First failing observation, receivers 1-based, symbols as indices"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    receiver: int
    signal: int
    leaked: List[Tuple[int, int]] = []
    m0: Rational
    m1: Rational

    def __str__(self) -> str:
        return (
            f"receiver {self.receiver}, signal {self.signal}, leaked {self.leaked}, "
            f"m0={format_rational(self.m0)}, m1={format_rational(self.m1)}"
        )


class Verdict(BaseModel):
    """Outcome of a persuasiveness check"""
    ok: bool
    check: CheckKind
    k: Optional[int] = None
    violation: Optional[Violation] = None
    checked: int = 0  # observations examined
    zero_mass: int = 0  # observations with m0 = m1 = 0 resolved to adopt
