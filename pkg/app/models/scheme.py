"""
Signaling schemes: state-conditional distributions over signal profiles.
"""

from fractions import Fraction
from typing import Any, Dict, Mapping, Tuple

from pydantic import Field, field_serializer, model_validator

from app.models.base import FrozenModel, Rational
from app.utils.profiles import BINARY_ALPHABET, Profile, decode_profile, encode_profile, prefix_profile
from app.utils.rationals import format_rational, parse_rational


def normalize_alphabet(entry: Any) -> Tuple[str, ...]:
    if isinstance(entry, int):
        if not 1 <= entry <= 10:
            raise ValueError("alphabet size must be within 1..10 when given as a count")
        return tuple(str(symbol) for symbol in range(entry))
    symbols = tuple(str(symbol) for symbol in entry)
    if not symbols:
        raise ValueError("alphabet must not be empty")
    if any(len(symbol) != 1 for symbol in symbols):
        raise ValueError("alphabet symbols must be single characters")
    if len(set(symbols)) != len(symbols):
        raise ValueError("alphabet symbols must be distinct")
    return symbols


def _normalize_distribution(raw: Mapping, alphabets: Tuple[Tuple[str, ...], ...]) -> Dict[Profile, Fraction]:
    distribution: Dict[Profile, Fraction] = {}
    for key, value in raw.items():
        if isinstance(key, str):
            profile = decode_profile(key, alphabets)
        else:
            profile = tuple(int(symbol) for symbol in key)
        mass = parse_rational(value)
        if mass == 0:
            continue
        distribution[profile] = distribution.get(profile, Fraction(0)) + mass
    return {profile: distribution[profile] for profile in sorted(distribution)}


class SignalingScheme(FrozenModel):
    """
    Pair (mu0, mu1) of sparse distributions over signal profiles.

    Profiles are tuples of symbol indices into the per-receiver alphabets.
    Zero entries are dropped on construction and keys are kept in
    lexicographic order, so equal schemes compare equal.
    """

    alphabets: Tuple[Tuple[str, ...], ...] = Field(min_length=1)
    mu0: Dict[Tuple[int, ...], Rational]
    mu1: Dict[Tuple[int, ...], Rational]

    @model_validator(mode="before")
    @classmethod
    def _normalize(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        alphabets = tuple(normalize_alphabet(entry) for entry in data.get("alphabets", ()))
        data["alphabets"] = alphabets
        for field in ("mu0", "mu1"):
            if isinstance(data.get(field), Mapping):
                data[field] = _normalize_distribution(data[field], alphabets)
        return data

    @model_validator(mode="after")
    def _check(self) -> "SignalingScheme":
        sizes = self.sizes
        for name, distribution in (("mu0", self.mu0), ("mu1", self.mu1)):
            for profile, mass in distribution.items():
                if len(profile) != len(sizes) or any(not 0 <= s < a for s, a in zip(profile, sizes)):
                    raise ValueError(f"{name} profile outside the alphabets")
                if mass < 0:
                    raise ValueError(f"{name} has a negative probability")
            if sum(distribution.values(), Fraction(0)) != 1:
                raise ValueError(f"{name} does not sum to 1")
        return self

    @field_serializer("mu0", "mu1")
    def _dump_distribution(self, distribution: Dict[Profile, Fraction]) -> Dict[str, str]:
        return {
            encode_profile(profile, self.alphabets): format_rational(mass)
            for profile, mass in sorted(distribution.items())
        }

    @property
    def n(self) -> int:
        return len(self.alphabets)

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(alphabet) for alphabet in self.alphabets)

    @property
    def is_binary(self) -> bool:
        return all(alphabet == BINARY_ALPHABET for alphabet in self.alphabets)

    def distribution(self, state: int) -> Dict[Profile, Fraction]:
        return self.mu1 if state else self.mu0

    @classmethod
    def binary(cls, n: int, mu0: Mapping[Profile, Fraction], mu1: Mapping[Profile, Fraction]) -> "SignalingScheme":
        """Direct scheme over {0, 1}^n."""
        return cls(alphabets=(BINARY_ALPHABET,) * n, mu0=dict(mu0), mu1=dict(mu1))


class PrefixScheme(FrozenModel):
    """Scheme supported on the empty set and the prefixes [j] = {1..j}."""

    n: int = Field(ge=1)
    mu0: Tuple[Rational, ...]
    mu1: Tuple[Rational, ...]

    @model_validator(mode="after")
    def _check(self) -> "PrefixScheme":
        for name, masses in (("mu0", self.mu0), ("mu1", self.mu1)):
            if len(masses) != self.n + 1:
                raise ValueError(f"{name} must have n+1 prefix masses")
            if any(mass < 0 for mass in masses):
                raise ValueError(f"{name} has a negative probability")
            if sum(masses, Fraction(0)) != 1:
                raise ValueError(f"{name} does not sum to 1")
        return self

    def masses(self, state: int) -> Tuple[Fraction, ...]:
        return self.mu1 if state else self.mu0

    def to_scheme(self) -> SignalingScheme:
        return SignalingScheme.binary(
            self.n,
            {prefix_profile(self.n, j): mass for j, mass in enumerate(self.mu0) if mass},
            {prefix_profile(self.n, j): mass for j, mass in enumerate(self.mu1) if mass},
        )


class MaskMatchParams(FrozenModel):
    """Masking-by-matching parameters: 0 < c0 <= c1 < 1, c0 + c1 <= 1, cutoff m."""

    c0: Rational
    c1: Rational
    m: int = Field(ge=1)

    @model_validator(mode="after")
    def _check(self) -> "MaskMatchParams":
        if not 0 < self.c0 <= self.c1 < 1:
            raise ValueError("mask-match parameters need 0 < c0 <= c1 < 1")
        if self.c0 + self.c1 > 1:
            raise ValueError("mask-match parameters need c0 + c1 <= 1")
        return self
