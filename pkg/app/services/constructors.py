"""
Closed-form signaling schemes: the optimal private scheme, full information,
public prefixes, the two subsampling transforms, both masking schemes and
the hand-built three-receiver schemes shipped as data files.
"""

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np

from app.core.config import settings
from app.core.errors import InputError, InternalError, PreconditionError, SizeLimitError
from app.models.instance import Instance
from app.models.scheme import MaskMatchParams, PrefixScheme, SignalingScheme
from app.models.utility import UtilityFunction
from app.services.persuasiveness import check_private
from app.utils.profiles import Profile, binary_profiles, mask_of, popcount, prefix_length, submasks
from app.utils.rationals import binomial, describe

logger = logging.getLogger(__name__)

APPENDIX_C_DIR = Path(__file__).resolve().parent.parent / "data" / "appendix_c"
APPENDIX_C_NAMES = ("somewhat_indirect", "three_signal", "best_two_signal")

BaseScheme = Union[SignalingScheme, PrefixScheme]


def _as_scheme(base: BaseScheme) -> SignalingScheme:
    return base.to_scheme() if isinstance(base, PrefixScheme) else base


def _profile_of_mask(n: int, mask: int) -> Profile:
    return tuple((mask >> index) & 1 for index in range(n))


def optimal_private_value(instance: Instance) -> Fraction:
    """lambda * V(N) + (1 - lambda) * sum_i (theta_i - theta_{i+1}) * V([i])."""
    return instance.lam * instance.prefix_value(instance.n) + omega0_private_value(instance)


def omega0_private_value(instance: Instance) -> Fraction:
    """State-w0 part of the optimal private utility."""
    total = sum(
        ((instance.theta_at(i) - instance.theta_at(i + 1)) * instance.prefix_value(i)
         for i in range(1, instance.n + 1)),
        Fraction(0),
    )
    return (1 - instance.lam) * total


def optimal_private(instance: Instance) -> PrefixScheme:
    """mu1 on N; mu0 puts theta_j - theta_{j+1} on each prefix [j]."""
    n = instance.n
    mu0 = tuple(instance.theta_at(j) - instance.theta_at(j + 1) for j in range(n + 1))
    mu1 = (Fraction(0),) * n + (Fraction(1),)
    scheme = PrefixScheme(n=n, mu0=mu0, mu1=mu1)
    logger.info(f"optimal private scheme built, n={n}, value {describe(optimal_private_value(instance))}")
    return scheme


def full_information(instance: Instance) -> SignalingScheme:
    n = instance.n
    return SignalingScheme.binary(n, {(0,) * n: Fraction(1)}, {(1,) * n: Fraction(1)})


def _public_prefix(instance: Instance, i_star: int) -> PrefixScheme:
    n = instance.n
    if not 1 <= i_star <= n:
        raise InputError(f"prefix index {i_star} outside 1..{n}")
    theta = instance.theta_at(i_star)
    mu0 = [Fraction(0)] * (n + 1)
    mu1 = [Fraction(0)] * (n + 1)
    mu0[0] = 1 - theta
    mu0[i_star] += theta
    mu1[i_star] = Fraction(1)
    return PrefixScheme(n=n, mu0=tuple(mu0), mu1=tuple(mu1))


def public_prefix(instance: Instance, i_star: int) -> SignalingScheme:
    """
    Publicly persuasive scheme recommending the prefix [i*] or nothing.

    mu0([i*]) = theta_{i*}, mu0(empty) = 1 - theta_{i*}, mu1([i*]) = 1.
    """
    return _public_prefix(instance, i_star).to_scheme()


def best_public_prefix_index(instance: Instance) -> int:
    """argmax_i (theta_i - theta_{i+1}) * V([i]), smallest index on ties."""
    best_index, best_score = 1, None
    for i in range(1, instance.n + 1):
        score = (instance.theta_at(i) - instance.theta_at(i + 1)) * instance.prefix_value(i)
        if best_score is None or score > best_score:
            best_index, best_score = i, score
    return best_index


def best_public_prefix(instance: Instance) -> SignalingScheme:
    return public_prefix(instance, best_public_prefix_index(instance))


def single_receiver_optimum(instance: Instance) -> Fraction:
    """(lambda + (1 - lambda) * theta_1) * V({1}) for a single receiver."""
    if instance.n != 1:
        raise InputError("single-receiver optimum needs n = 1")
    return (instance.lam + (1 - instance.lam) * instance.theta[0]) * instance.utility.value(1)


def _check_subsample_base(instance: Instance, base: SignalingScheme, k: int) -> None:
    if base.n != instance.n or not base.is_binary:
        raise PreconditionError("subsampling needs a binary base scheme over the instance's receivers")
    if not 0 <= k <= instance.n - 1:
        raise InputError(f"k = {k} outside 0..{instance.n - 1}")
    if base.mu1 != {(1,) * instance.n: Fraction(1)}:
        raise PreconditionError("subsampling needs a base scheme with mu1 concentrated on N")
    verdict = check_private(instance, base)
    if not verdict.ok:
        raise PreconditionError("base scheme is not privately persuasive", verdict=verdict)
    if instance.n > settings.TABLE_MAX_N:
        raise SizeLimitError("subsampled scheme profiles", 1 << instance.n, 1 << settings.TABLE_MAX_N)


def subsample_half(instance: Instance, base: BaseScheme, k: int) -> SignalingScheme:
    """
    Subsampling at rate 1/2.

    mu1 is uniform over {0,1}^n and mu0(s) = 2^-(k+1) * base_mu0(s) for every
    nonzero s, with the remaining mass on the all-zeros profile.

    Raises:
        PreconditionError: base not privately persuasive or mu1 not on N
    """
    base = _as_scheme(base)
    _check_subsample_base(instance, base, k)
    n = instance.n
    zero = (0,) * n
    scale = Fraction(1, 2 ** (k + 1))
    mu0: Dict[Profile, Fraction] = {
        profile: scale * mass for profile, mass in base.mu0.items() if profile != zero
    }
    mu0[zero] = 1 - sum(mu0.values(), Fraction(0))
    uniform = Fraction(1, 2 ** n)
    mu1 = {profile: uniform for profile in binary_profiles(n)}
    logger.info(f"subsample-half scheme built, n={n}, k={k}")
    return SignalingScheme.binary(n, mu0, mu1)


def subsample_rate(instance: Instance, base: BaseScheme, k: int, gamma: Fraction) -> SignalingScheme:
    """
    Subsampling at a general rate gamma.

    mu1 is the product-Bernoulli(gamma) distribution. mu0 zeroes the whole
    recommendation with probability 1 - (1-gamma)^k and otherwise keeps each
    recommended adopter of the base independently with probability gamma.
    """
    gamma = Fraction(gamma)
    if not 0 < gamma < 1:
        raise InputError(f"gamma = {gamma} outside (0, 1)")
    base = _as_scheme(base)
    _check_subsample_base(instance, base, k)
    n = instance.n
    keep = (1 - gamma) ** k

    mu0: Dict[int, Fraction] = {0: 1 - keep}
    for profile, mass in base.mu0.items():
        full = mask_of(profile)
        size = popcount(full)
        for sub in submasks(full):
            kept = popcount(sub)
            weight = keep * mass * gamma ** kept * (1 - gamma) ** (size - kept)
            if weight:
                mu0[sub] = mu0.get(sub, Fraction(0)) + weight
    mu1 = {}
    for profile in binary_profiles(n):
        ones = sum(profile)
        weight = gamma ** ones * (1 - gamma) ** (n - ones)
        if weight:
            mu1[profile] = weight
    logger.info(f"subsample-rate scheme built, n={n}, k={k}, gamma={gamma}")
    return SignalingScheme.binary(n, {_profile_of_mask(n, mask): mass for mask, mass in mu0.items()}, mu1)


def subsampled_value(utility: UtilityFunction, subset_mask: int, gamma: Fraction) -> Fraction:
    """E[V(S')] when each member of S is kept independently with probability gamma."""
    gamma = Fraction(gamma)
    if not 0 <= gamma <= 1:
        raise InputError(f"gamma = {gamma} outside [0, 1]")
    size = popcount(subset_mask)
    return sum(
        (gamma ** popcount(sub) * (1 - gamma) ** (size - popcount(sub)) * utility.value(sub)
         for sub in submasks(subset_mask)),
        Fraction(0),
    )


def subsample_rate_sample(base: BaseScheme, gamma: Fraction, k: int, rng: np.random.Generator) -> Profile:
    """Draw one state-w0 profile by running the subsampling procedure on the base."""
    base = _as_scheme(base)
    profiles = list(base.mu0)
    weights = np.array([float(base.mu0[profile]) for profile in profiles])
    drawn = profiles[int(rng.choice(len(profiles), p=weights / weights.sum()))]
    if rng.random() < 1 - float(1 - Fraction(gamma)) ** k:
        return (0,) * base.n
    return tuple(int(symbol and rng.random() < float(gamma)) for symbol in drawn)


def mask_remove(instance: Instance, i: int, k: int) -> PrefixScheme:
    """
    Masking by removing randomness around the window [i, i + floor(n/k)].

    mu1 sends 1 to every receiver up to the window top; mu0 keeps the optimal
    private prefix masses inside the window and moves the rest to the empty
    set. The window top is clamped at n.
    """
    n = instance.n
    if k < 1 or k > max(1, n // 2):
        raise InputError(f"k = {k} outside 1..{max(1, n // 2)}")
    if not 1 <= i <= n:
        raise InputError(f"window start {i} outside 1..{n}")
    top = min(i + n // k, n)
    mu0 = [Fraction(0)] * (n + 1)
    for j in range(i, top + 1):
        mu0[j] = instance.theta_at(j) - instance.theta_at(j + 1)
    mu0[0] = 1 - (instance.theta_at(i) - instance.theta_at(top + 1))
    mu1 = [Fraction(0)] * (n + 1)
    mu1[top] = Fraction(1)
    return PrefixScheme(n=n, mu0=tuple(mu0), mu1=tuple(mu1))


def mask_remove_window(n: int, i: int, k: int) -> int:
    """Number of receivers covered by the mask-remove window."""
    return min(i + n // k, n) - i + 1


def mask_remove_preservation_probability(n: int, k: int, window: int) -> Fraction:
    """Probability that a uniform size-k leaker set misses a window of receivers."""
    if not 0 <= window <= n or not 0 <= k <= n:
        raise InputError("window and k must lie within 0..n")
    return Fraction(binomial(n - window, k), binomial(n, k))


def mask_match_properties(instance: Instance, scheme: PrefixScheme, m: int) -> Tuple[bool, bool]:
    """
    Check the two masking-by-matching guarantees on prefix masses.

    (1) every receiver with signal 1 adopts without leakage;
    (2) mu0([j]) <= theta_i * mu1([j]) for all i <= m <= j.
    """
    n = instance.n
    first = all(
        sum(scheme.mu0[i:], Fraction(0)) <= instance.theta_at(i) * sum(scheme.mu1[i:], Fraction(0))
        for i in range(1, n + 1)
    )
    second = all(
        scheme.mu0[j] <= instance.theta_at(i) * scheme.mu1[j]
        for i in range(1, m + 1)
        for j in range(m, n + 1)
    )
    return first, second


def mask_match(instance: Instance, params: MaskMatchParams) -> PrefixScheme:
    """
    Masking by matching randomness with cutoff m.

    mu0([i]) = c0 (theta_i - theta_{i+1}), mu0(empty) = 1 - c0 theta_1;
    mu1([i]) = (c1 / theta_m)(theta_i - theta_{i+1}) for m <= i < n and
    mu1(N) = 1 - c1 + c1 theta_n / theta_m.

    Raises:
        InputError: m outside 1..n or theta_m = 0
        InternalError: a masking guarantee fails on the built scheme
    """
    n, m = instance.n, params.m
    if m > n:
        raise InputError(f"cutoff m = {m} outside 1..{n}")
    theta_m = instance.theta_at(m)
    if theta_m == 0:
        raise InputError("mask-match needs theta_m > 0")
    c0, c1 = params.c0, params.c1

    mu0 = [c0 * (instance.theta_at(i) - instance.theta_at(i + 1)) for i in range(n + 1)]
    mu0[0] = 1 - c0 * instance.theta_at(1)
    mu1 = [Fraction(0)] * (n + 1)
    for i in range(m, n):
        mu1[i] = c1 / theta_m * (instance.theta_at(i) - instance.theta_at(i + 1))
    mu1[n] = 1 - c1 + c1 * instance.theta_at(n) / theta_m
    scheme = PrefixScheme(n=n, mu0=tuple(mu0), mu1=tuple(mu1))

    first, second = mask_match_properties(instance, scheme, m)
    if not (first and second):
        raise InternalError("mask-match guarantee failed", first=first, second=second)
    return scheme


def mask_match_star(instance: Instance) -> PrefixScheme:
    """Cutoff floor(n/2) + 1 with c0 = c1 = 1/2."""
    params = MaskMatchParams(c0=Fraction(1, 2), c1=Fraction(1, 2), m=instance.n // 2 + 1)
    return mask_match(instance, params)


def mask_match_general(instance: Instance, alpha: Fraction = Fraction(2, 5)) -> PrefixScheme:
    """Cutoff floor(alpha * n) + 1 with c0 = c1 = 1/2, for stars with few leaves."""
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise InputError(f"alpha = {alpha} outside (0, 1)")
    m = min(int(alpha * instance.n) + 1, instance.n)
    return mask_match(instance, MaskMatchParams(c0=Fraction(1, 2), c1=Fraction(1, 2), m=m))


def load_appendix_c_scheme(name: str) -> SignalingScheme:
    if name not in APPENDIX_C_NAMES:
        raise InputError(f"unknown hand-built scheme {name!r}; expected one of {', '.join(APPENDIX_C_NAMES)}")
    path = APPENDIX_C_DIR / f"{name}.json"
    with path.open() as handle:
        return SignalingScheme.model_validate(json.load(handle))


def appendix_c_schemes() -> Dict[str, SignalingScheme]:
    """The somewhat-indirect, three-signal and best two-signal schemes."""
    return {name: load_appendix_c_scheme(name) for name in APPENDIX_C_NAMES}


def to_prefix_scheme(scheme: SignalingScheme) -> PrefixScheme:
    """Prefix masses of a binary scheme supported on the empty set and prefixes."""
    if not scheme.is_binary:
        raise InputError("prefix schemes are binary")
    masses = ([Fraction(0)] * (scheme.n + 1), [Fraction(0)] * (scheme.n + 1))
    for state in (0, 1):
        for profile, mass in scheme.distribution(state).items():
            length = prefix_length(profile)
            if length < 0:
                raise InputError("scheme is not prefix-supported")
            masses[state][length] += mass
    return PrefixScheme(n=scheme.n, mu0=tuple(masses[0]), mu1=tuple(masses[1]))


SCHEME_NAMES = (
    "optimal-private", "full-information", "public-prefix", "best-public-prefix",
    "subsample-half", "subsample-rate", "mask-remove", "mask-match", "mask-match-star", "mask-match-general",
) + tuple(f"appendix-c:{name}" for name in APPENDIX_C_NAMES)


def construct(
    name: str,
    instance: Instance,
    base: Optional[BaseScheme] = None,
    k: Optional[int] = None,
    gamma: Optional[Fraction] = None,
    i: Optional[int] = None,
    m: Optional[int] = None,
    c0: Fraction = Fraction(1, 2),
    c1: Fraction = Fraction(1, 2),
) -> SignalingScheme:
    """
    Build a scheme by name for the CLI and the API.

    Subsampling defaults to the optimal private base; subsample-rate defaults
    to gamma = 1/k, or 1/2 when k <= 1.
    """
    def need(value, label: str):
        if value is None:
            raise InputError(f"scheme {name} needs {label}")
        return value

    if name == "optimal-private":
        return optimal_private(instance).to_scheme()
    if name == "full-information":
        return full_information(instance)
    if name == "public-prefix":
        return public_prefix(instance, need(i, "i"))
    if name == "best-public-prefix":
        return best_public_prefix(instance)
    if name in ("subsample-half", "subsample-rate"):
        k = need(k, "k")
        base = optimal_private(instance) if base is None else base
        if name == "subsample-half":
            return subsample_half(instance, base, k)
        if gamma is None:
            gamma = Fraction(1, k) if k >= 2 else Fraction(1, 2)
        return subsample_rate(instance, base, k, gamma)
    if name == "mask-remove":
        return mask_remove(instance, need(i, "i"), need(k, "k")).to_scheme()
    if name == "mask-match":
        return mask_match(instance, MaskMatchParams(c0=c0, c1=c1, m=need(m, "m"))).to_scheme()
    if name == "mask-match-star":
        return mask_match_star(instance).to_scheme()
    if name == "mask-match-general":
        return mask_match_general(instance).to_scheme()
    if name.startswith("appendix-c:"):
        return load_appendix_c_scheme(name.split(":", 1)[1])
    raise InputError(f"unknown scheme {name!r}; expected one of {', '.join(SCHEME_NAMES)}")
