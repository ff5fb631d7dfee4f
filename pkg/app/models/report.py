"""
Benchmark and lower-bound reports.
"""

from fractions import Fraction
from typing import List, Optional

from pydantic import BaseModel, computed_field, model_validator

from app.models.base import Rational
from app.utils.rationals import format_rational


class Bound(BaseModel):
    """Closed interval [low, high]; low == high for an exact value"""
    low: Rational
    high: Rational

    @model_validator(mode="after")
    def _check(self) -> "Bound":
        if self.low > self.high:
            raise ValueError("interval bounds out of order")
        return self

    @classmethod
    def exact(cls, value: Fraction) -> "Bound":
        return cls(low=value, high=value)

    @property
    def is_exact(self) -> bool:
        return self.low == self.high

    def __str__(self) -> str:
        if self.is_exact:
            return format_rational(self.low)
        return f"[{format_rational(self.low)},{format_rational(self.high)}]"


class BenchmarkRow(BaseModel):
    instance_id: str
    n: int
    k: int
    model: str
    opt_private: Rational
    opt_persuasive_k: Rational
    opt_public: Rational
    opt_expected: Bound
    powr_k: Optional[Rational] = None  # undefined when OPT_k = 0
    podr: Optional[Bound] = None
    consistent: Optional[bool] = None  # OPT_private >= OPT_expected >= OPT_k >= OPT_public where checkable
    method: str
    seed: Optional[int] = None


class BenchmarkReport(BaseModel):
    tool_version: str
    instance_hash: str
    seed: Optional[int] = None
    samples: Optional[int] = None
    method: str
    rows: List[BenchmarkRow] = []


class BoundCheck(BaseModel):
    """One asserted inequality value <= bound"""
    name: str
    value: Rational
    bound: Rational
    holds: bool


class LowerBoundReport(BaseModel):
    family: str
    instance_id: str
    n: int
    k: int
    opt_private: Rational
    opt_persuasive_k: Rational
    opt_public: Rational
    powr_k: Optional[Rational] = None
    checks: List[BoundCheck] = []

    @computed_field
    @property
    def ok(self) -> bool:
        return all(check.holds for check in self.checks)


class ReproductionCheck(BaseModel):
    name: str
    value: Rational
    expected: Rational
    passed: bool


class ReproductionReport(BaseModel):
    tool_version: str
    checks: List[ReproductionCheck] = []

    @computed_field
    @property
    def ok(self) -> bool:
        return all(check.passed for check in self.checks)
