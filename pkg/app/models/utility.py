"""
Sender utility functions V: 2^N -> Q.

Every variant is monotone with V(empty) = 0 and evaluates on a receiver
bitmask (bit i - 1 for receiver i). The `kind` field is the JSON tag.
"""

from fractions import Fraction
from typing import Annotated, Any, Dict, Iterable, Literal, Tuple, Union

from pydantic import Field, field_serializer, model_validator

from app.core.config import settings
from app.core.errors import InputError, SizeLimitError
from app.models.base import FrozenModel, Rational
from app.utils.profiles import binary_profiles, decode_profile, encode_profile, mask_of, members, popcount
from app.utils.rationals import format_rational, parse_rational

_BINARY = ("0", "1")


class TableUtility(FrozenModel):
    """Explicit value per subset, indexed by receiver bitmask."""

    kind: Literal["table"] = "table"
    n: int = Field(ge=1, le=20)
    values: Tuple[Rational, ...]

    @model_validator(mode="before")
    @classmethod
    def _from_profile_map(cls, data: Any) -> Any:
        # Documents key the table by binary profile strings "s1...sn".
        if isinstance(data, dict) and isinstance(data.get("values"), dict):
            data = dict(data)
            n = int(data["n"])
            table = [None] * (1 << n)
            for text, value in data["values"].items():
                table[mask_of(decode_profile(text, [_BINARY] * n))] = parse_rational(value)
            if any(entry is None for entry in table):
                raise ValueError("utility table incomplete")
            data["values"] = tuple(table)
        return data

    @model_validator(mode="after")
    def _check(self) -> "TableUtility":
        if len(self.values) != 1 << self.n:
            raise ValueError("utility table incomplete")
        if self.values[0] != 0:
            raise ValueError("utility of empty set must be 0")
        for mask in range(1 << self.n):
            for index in range(self.n):
                bit = 1 << index
                if not mask & bit and self.values[mask] > self.values[mask | bit]:
                    raise ValueError("utility not monotone")
        return self

    @field_serializer("values")
    def _dump_values(self, values: Tuple[Fraction, ...]) -> Dict[str, str]:
        return {
            encode_profile(profile, [_BINARY] * self.n): format_rational(values[mask_of(profile)])
            for profile in binary_profiles(self.n)
        }

    def value(self, mask: int) -> Fraction:
        return self.values[mask]


class PrefixUtility(FrozenModel):
    """V(S) = w[length of the longest prefix [i] contained in S]."""

    kind: Literal["prefix"] = "prefix"
    n: int = Field(ge=1)
    weights: Tuple[Rational, ...]

    @model_validator(mode="after")
    def _check(self) -> "PrefixUtility":
        if len(self.weights) != self.n + 1:
            raise ValueError("prefix weights must have n+1 entries")
        if self.weights[0] != 0:
            raise ValueError("utility of empty set must be 0")
        if any(a > b for a, b in zip(self.weights, self.weights[1:])):
            raise ValueError("utility not monotone")
        return self

    def value(self, mask: int) -> Fraction:
        # number of consecutive receivers 1, 2, ... present in the mask
        length = ((~mask) & (mask + 1)).bit_length() - 1
        return self.weights[min(length, self.n)]


class AnonymousUtility(FrozenModel):
    """V(S) = f(|S|) for a concave nondecreasing f."""

    kind: Literal["anonymous"] = "anonymous"
    n: int = Field(ge=1)
    values: Tuple[Rational, ...]

    @model_validator(mode="after")
    def _check(self) -> "AnonymousUtility":
        if len(self.values) != self.n + 1:
            raise ValueError("anonymous values must have n+1 entries")
        if self.values[0] != 0:
            raise ValueError("utility of empty set must be 0")
        steps = [b - a for a, b in zip(self.values, self.values[1:])]
        if any(step < 0 for step in steps):
            raise ValueError("utility not monotone")
        if any(later > earlier for earlier, later in zip(steps, steps[1:])):
            raise ValueError("anonymous utility not concave")
        return self

    def value(self, mask: int) -> Fraction:
        return self.values[popcount(mask)]


class XosUtility(FrozenModel):
    """V(S) = max over additive clauses of the clause weight of S."""

    kind: Literal["xos"] = "xos"
    n: int = Field(ge=1)
    clauses: Tuple[Tuple[Rational, ...], ...] = Field(min_length=1)

    @model_validator(mode="after")
    def _check(self) -> "XosUtility":
        for clause in self.clauses:
            if len(clause) != self.n:
                raise ValueError("xos clause must have n entries")
            if any(weight < 0 for weight in clause):
                raise ValueError("utility not monotone")
        return self

    def value(self, mask: int) -> Fraction:
        chosen = list(members(mask))
        return max(sum((clause[index] for index in chosen), Fraction(0)) for clause in self.clauses)


class AdditiveUtility(FrozenModel):
    kind: Literal["additive"] = "additive"
    n: int = Field(ge=1)
    weights: Tuple[Rational, ...]

    @model_validator(mode="after")
    def _check(self) -> "AdditiveUtility":
        if len(self.weights) != self.n:
            raise ValueError("additive weights must have n entries")
        if any(weight < 0 for weight in self.weights):
            raise ValueError("utility not monotone")
        return self

    def value(self, mask: int) -> Fraction:
        return sum((self.weights[index] for index in members(mask)), Fraction(0))


UtilityFunction = Annotated[
    Union[TableUtility, PrefixUtility, AnonymousUtility, XosUtility, AdditiveUtility],
    Field(discriminator="kind"),
]


def evaluate_utility(utility: UtilityFunction, subset: Iterable[int]) -> Fraction:
    """
    Evaluate V on a set of 1-based receiver indices.

    Raises:
        InputError: an index outside 1..n
    """
    mask = 0
    for receiver in subset:
        if not 1 <= receiver <= utility.n:
            raise InputError(f"receiver {receiver} out of range 1..{utility.n}")
        mask |= 1 << (receiver - 1)
    return utility.value(mask)


def materialize(utility: UtilityFunction) -> TableUtility:
    """Explicit table of any utility (n <= TABLE_MAX_N)."""
    if utility.n > settings.TABLE_MAX_N:
        raise SizeLimitError("utility table", 1 << utility.n, 1 << settings.TABLE_MAX_N)
    return TableUtility(n=utility.n, values=tuple(utility.value(mask) for mask in range(1 << utility.n)))
