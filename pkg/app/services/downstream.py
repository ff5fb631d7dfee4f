"""
Expected downstream utility of a scheme under leakage.

A fixed pattern is evaluated by enumerating the scheme's support. A random
model is evaluated either exactly, as the probability-weighted sum over its
pattern support, or by Monte Carlo over seeded pattern draws.
"""

import logging
from fractions import Fraction
from math import sqrt
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.config import settings
from app.core.errors import InputError, SizeLimitError
from app.models.instance import Instance
from app.models.leakage import LeakageModel, LeakagePattern
from app.models.scheme import PrefixScheme, SignalingScheme
from app.schemas.common import BestResponseMode, EvalMethod
from app.schemas.evaluation import MonteCarloEstimate
from app.services.best_response import ResponseOracle
from app.utils.profiles import Profile, prefix_profile, profile_count
from app.utils.rationals import describe
from app.utils.rng import generator

logger = logging.getLogger(__name__)

# (state weight * mass, profile, no-leak adopter mask)
_Entry = Tuple[Fraction, Profile, int]


def _check_profiles(scheme: SignalingScheme) -> None:
    total = profile_count(scheme.sizes)
    if total > settings.PROFILE_CAP:
        raise SizeLimitError("signal profiles", total, settings.PROFILE_CAP)


def _check_pattern(instance: Instance, pattern: LeakagePattern) -> None:
    if pattern.n != instance.n:
        raise InputError(f"pattern has {pattern.n} receivers, instance has {instance.n}")


def sample_pattern(model: LeakageModel, seed: int, index: int) -> LeakagePattern:
    """Pattern number `index` of the stream seeded by `seed`."""
    return model.draw(generator(seed, index))


class PatternEvaluator:
    """
    Downstream utility of one scheme under many patterns.

    The no-leak adopter mask of every support profile is computed once; a
    pattern only re-evaluates receivers with at least one in-neighbor.
    Values are cached per edge set.
    """

    def __init__(self, instance: Instance, scheme: SignalingScheme, mode: BestResponseMode = BestResponseMode.STANDARD):
        _check_profiles(scheme)
        self.instance = instance
        self.oracle = ResponseOracle(instance, scheme, mode)
        self.entries: List[List[_Entry]] = [[], []]
        no_leak = ((),) * instance.n
        for state, weight in ((0, 1 - instance.lam), (1, instance.lam)):
            for profile, mass in scheme.distribution(state).items():
                mask = self.oracle.adopters(profile, no_leak)
                self.entries[state].append((weight * mass, profile, mask))
        self._cache: Dict[Tuple, Tuple[Fraction, Fraction]] = {}

    @property
    def zero_mass(self) -> int:
        return self.oracle.zero_mass

    def parts(self, pattern: LeakagePattern) -> Tuple[Fraction, Fraction]:
        """(w0 part, w1 part) of the downstream utility under a pattern."""
        cached = self._cache.get(pattern.edges)
        if cached is not None:
            return cached
        affected = [(receiver, sources) for receiver, sources in enumerate(pattern.in_neighbors()) if sources]
        parts = []
        for entries in self.entries:
            total = Fraction(0)
            for weight, profile, mask in entries:
                for receiver, sources in affected:
                    leaks = tuple((j, profile[j]) for j in sources)
                    if self.oracle.respond(receiver, profile[receiver], leaks):
                        mask |= 1 << receiver
                    else:
                        mask &= ~(1 << receiver)
                total += weight * self.instance.utility.value(mask)
            parts.append(total)
        result = (parts[0], parts[1])
        self._cache[pattern.edges] = result
        return result

    def value(self, pattern: LeakagePattern) -> Fraction:
        omega0, omega1 = self.parts(pattern)
        return omega0 + omega1


def downstream_utility_fixed(
    instance: Instance,
    scheme: SignalingScheme,
    pattern: LeakagePattern,
    mode: BestResponseMode = BestResponseMode.STANDARD,
) -> Fraction:
    """
    sum over states and profiles of Pr[state] * mu_state(s) * V(adopters at s)
    where adopters best-respond to their own symbol plus their in-neighbors'.
    """
    _check_pattern(instance, pattern)
    return PatternEvaluator(instance, scheme, mode).value(pattern)


def omega_parts(
    instance: Instance,
    scheme: SignalingScheme,
    pattern: LeakagePattern,
    mode: BestResponseMode = BestResponseMode.STANDARD,
) -> Tuple[Fraction, Fraction]:
    _check_pattern(instance, pattern)
    return PatternEvaluator(instance, scheme, mode).parts(pattern)


def no_leak_utility(
    instance: Instance,
    scheme: SignalingScheme,
    mode: BestResponseMode = BestResponseMode.STANDARD,
) -> Fraction:
    return downstream_utility_fixed(instance, scheme, LeakagePattern.empty(instance.n), mode)


def _check_model(instance: Instance, model: LeakageModel) -> None:
    if model.n != instance.n:
        raise InputError(f"leakage model has {model.n} receivers, instance has {instance.n}")


def _check_support(model: LeakageModel) -> None:
    size = model.support_size()
    if size > settings.EXACT_PATTERN_CAP:
        logger.warning(f"exact evaluation refused: {size} patterns in the model support")
        raise SizeLimitError("leakage patterns", size, settings.EXACT_PATTERN_CAP)


def exact_model_utility(evaluator: PatternEvaluator, model: LeakageModel) -> Fraction:
    _check_support(model)
    return sum((weight * evaluator.value(pattern) for weight, pattern in model.support()), Fraction(0))


def monte_carlo_utility(evaluator: PatternEvaluator, model: LeakageModel, samples: int, seed: int) -> MonteCarloEstimate:
    if samples < 1:
        raise InputError("Monte Carlo needs at least one sample")
    values = [evaluator.value(sample_pattern(model, seed, index)) for index in range(samples)]
    mean = sum(values, Fraction(0)) / samples
    stderr = float(np.std(np.array([float(v) for v in values]), ddof=1)) / sqrt(samples) if samples > 1 else 0.0
    return MonteCarloEstimate(mean=mean, stderr=stderr, samples=samples, seed=seed)


def downstream_utility_model(
    instance: Instance,
    scheme: SignalingScheme,
    model: LeakageModel,
    method: EvalMethod = EvalMethod.EXACT,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    mode: BestResponseMode = BestResponseMode.STANDARD,
) -> Union[Fraction, MonteCarloEstimate]:
    """
    Expected downstream utility over a random leakage model.

    Returns:
        the exact Fraction for method=exact, a MonteCarloEstimate otherwise

    Raises:
        SizeLimitError: exact evaluation over more than EXACT_PATTERN_CAP patterns
        InputError: fewer than one Monte Carlo sample
    """
    _check_model(instance, model)
    evaluator = PatternEvaluator(instance, scheme, mode)
    if method == EvalMethod.EXACT:
        value = exact_model_utility(evaluator, model)
        logger.info(f"exact {model.kind} evaluation over {model.support_size()} patterns: {describe(value)}")
        return value
    samples = settings.DEFAULT_MC_SAMPLES if samples is None else samples
    seed = settings.DEFAULT_SEED if seed is None else seed
    estimate = monte_carlo_utility(evaluator, model, samples, seed)
    logger.info(
        f"Monte Carlo {model.kind} evaluation: mean {describe(estimate.mean)}, "
        f"stderr {estimate.stderr:.6f}, {samples} samples, seed {seed}"
    )
    return estimate


def preserved_prefix_probability(
    instance: Instance,
    scheme: PrefixScheme,
    model: LeakageModel,
    j: int,
    mode: BestResponseMode = BestResponseMode.STANDARD,
) -> Fraction:
    """
    Probability over the model's patterns that every receiver of a realized
    prefix [j] still adopts.
    """
    _check_model(instance, model)
    if not 1 <= j <= instance.n:
        raise InputError(f"prefix length {j} outside 1..{instance.n}")
    _check_support(model)
    oracle = ResponseOracle(instance, scheme.to_scheme(), mode)
    profile = prefix_profile(instance.n, j)
    wanted = (1 << j) - 1
    total = Fraction(0)
    for weight, pattern in model.support():
        if oracle.adopters(profile, pattern.in_neighbors()) & wanted == wanted:
            total += weight
    return total


def adopter_masks(
    instance: Instance,
    scheme: SignalingScheme,
    pattern: LeakagePattern,
    mode: BestResponseMode = BestResponseMode.STANDARD,
) -> Dict[Profile, int]:
    """Adopter bitmask at every support profile under a fixed pattern."""
    _check_pattern(instance, pattern)
    oracle = ResponseOracle(instance, scheme, mode)
    in_neighbors: Sequence = pattern.in_neighbors()
    support = list(scheme.mu0) + [profile for profile in scheme.mu1 if profile not in scheme.mu0]
    return {profile: oracle.adopters(profile, in_neighbors) for profile in sorted(support)}
