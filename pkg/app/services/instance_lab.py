"""
Instance generators and lower-bound verification.

Covers the hard families used by the separation results, the externality
variant, the three-receiver instances with hand-built schemes, random
instances for the property suites, the subcube partition of the hypercube
and numeric checks of the explicit bounds the lower-bound arguments prove.
"""

import logging
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.core.config import settings
from app.core.errors import InputError, InternalError, SizeLimitError
from app.models.instance import Instance
from app.models.leakage import FiniteMixture, LeakagePattern, MixtureComponent
from app.models.report import BoundCheck, LowerBoundReport
from app.models.scheme import PrefixScheme
from app.models.utility import (
    AdditiveUtility,
    AnonymousUtility,
    PrefixUtility,
    TableUtility,
    UtilityFunction,
    XosUtility,
    materialize,
)
from app.schemas.common import BestResponseMode, LpStatus
from app.services.constructors import (
    mask_match_general,
    mask_match_star,
    mask_remove,
    optimal_private,
    public_prefix,
    to_prefix_scheme,
)
from app.services.lp_builders import build_persuasive_lp, omega0_part, scheme_from_solution
from app.services.simplex import solve
from app.utils.profiles import submasks
from app.utils.rationals import binomial, describe

logger = logging.getLogger(__name__)

FAMILIES = (
    "hard-supermodular", "hard-clique-blocks", "hard-submodular-public", "hard-submodular-k",
    "externality", "appendix-c", "random",
)
RANDOM_FAMILIES = ("table", "supermodular", "prefix", "additive", "xos", "anonymous")
LOWER_BOUND_FAMILIES = ("hard-supermodular", "hard-submodular-public", "hard-submodular-k")


def _require_positive(n: int) -> None:
    if n < 1:
        raise InputError(f"n = {n} must be at least 1")


# === Hard families ===


def hard_supermodular(n: int) -> Instance:
    """theta_i = 2^-i, lambda = 2^-n, V(S) = sum of 2^i over prefixes [i] inside S."""
    _require_positive(n)
    theta = tuple(Fraction(1, 2 ** i) for i in range(1, n + 1))
    weights = tuple(Fraction(2 ** (j + 1) - 2) for j in range(n + 1))
    return Instance(n=n, lam=Fraction(1, 2 ** n), theta=theta, utility=PrefixUtility(n=n, weights=weights))


def clique_block_size(n: int, k: int) -> int:
    return 4 * -(-n // k)


def hard_clique_blocks(n: int, k: int) -> Instance:
    """
    Block instance with B = 4 * ceil(n / k): theta_i = 2^-floor(i / B) and
    V(S) = sum over b = 1..k of 2^b when the prefix [b * B] lies in S.
    """
    _require_positive(n)
    if k < 1:
        raise InputError(f"k = {k} must be at least 1")
    block = clique_block_size(n, k)
    theta = tuple(Fraction(1, 2 ** (i // block)) for i in range(1, n + 1))
    weights = tuple(
        sum((Fraction(2 ** b) for b in range(1, k + 1) if b * block <= j), Fraction(0)) for j in range(n + 1)
    )
    return Instance(n=n, lam=Fraction(1, 2 ** n), theta=theta, utility=PrefixUtility(n=n, weights=weights))


def hard_submodular_public(n: int) -> Instance:
    """theta_i = 1/n, V(S) = 1 for every nonempty S, lambda = 2^-n."""
    _require_positive(n)
    values = (Fraction(0),) + (Fraction(1),) * n
    return Instance(
        n=n, lam=Fraction(1, 2 ** n), theta=(Fraction(1, n),) * n, utility=AnonymousUtility(n=n, values=values)
    )


def hard_submodular_k(n: int, k: int) -> Instance:
    """theta_i = 1/k, V(S) = 1 - C(n - |S|, k) / C(n, k), lambda = 2^-n."""
    _require_positive(n)
    if not 1 <= k <= n:
        raise InputError(f"k = {k} outside 1..{n}")
    total = binomial(n, k)
    values = tuple(1 - Fraction(binomial(n - size, k), total) for size in range(n + 1))
    return Instance(
        n=n, lam=Fraction(1, 2 ** n), theta=(Fraction(1, k),) * n, utility=AnonymousUtility(n=n, values=values)
    )


def externality_instance(n: int, epsilon: Fraction) -> Tuple[Instance, BestResponseMode]:
    """
    theta_1 = 1, theta_i = epsilon otherwise, lambda = epsilon, V(S) = 1{1 in S},
    paired with the externality response mode.
    """
    _require_positive(n)
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < 1:
        raise InputError(f"epsilon = {epsilon} outside (0, 1)")
    if n > settings.TABLE_MAX_N:
        raise SizeLimitError("externality utility table", 1 << n, 1 << settings.TABLE_MAX_N)
    values = tuple(Fraction(mask & 1) for mask in range(1 << n))
    theta = (Fraction(1),) + (epsilon,) * (n - 1)
    instance = Instance(n=n, lam=epsilon, theta=theta, utility=TableUtility(n=n, values=values))
    return instance, BestResponseMode.EXTERNALITY


# === Three-receiver instances ===


def appendix_c_instance() -> Instance:
    """lambda = 1/2, theta = (3/4, 1/2, 1/4), V(S) = longest prefix inside S."""
    return Instance(
        n=3,
        lam=Fraction(1, 2),
        theta=(Fraction(3, 4), Fraction(1, 2), Fraction(1, 4)),
        utility=PrefixUtility(n=3, weights=(0, 1, 2, 3)),
    )


def appendix_c_cycle() -> LeakagePattern:
    """Each receiver sees the next one: 2 -> 1, 3 -> 2, 1 -> 3."""
    return LeakagePattern.cycle(3)


def appendix_c_mixture() -> Tuple[Instance, FiniteMixture]:
    """
    V(S) = |S| with lambda = 1/2 and theta = (1/2, 0, 0).

    Receivers 2 and 3 see each other; receiver 1 sees receiver 2 or
    receiver 3 with probability 1/2 each.
    """
    instance = Instance(
        n=3,
        lam=Fraction(1, 2),
        theta=(Fraction(1, 2), Fraction(0), Fraction(0)),
        utility=AdditiveUtility(n=3, weights=(1, 1, 1)),
    )
    mixture = FiniteMixture(components=(
        MixtureComponent(weight=Fraction(1, 2), pattern=LeakagePattern(n=3, edges=((2, 3), (3, 2), (2, 1)))),
        MixtureComponent(weight=Fraction(1, 2), pattern=LeakagePattern(n=3, edges=((2, 3), (3, 2), (3, 1)))),
    ))
    return instance, mixture


# === Padding and random instances ===


def pad_dummies(instance: Instance, count: int) -> Instance:
    """Append `count` receivers with theta = 0 and zero marginal utility."""
    if count < 0:
        raise InputError("dummy count must be nonnegative")
    if count == 0:
        return instance
    n, total = instance.n, instance.n + count
    utility = instance.utility
    if isinstance(utility, AnonymousUtility):
        utility = materialize(utility)
    if isinstance(utility, PrefixUtility):
        padded: UtilityFunction = PrefixUtility(n=total, weights=utility.weights + (utility.weights[-1],) * count)
    elif isinstance(utility, TableUtility):
        if total > settings.TABLE_MAX_N:
            raise SizeLimitError("padded utility table", 1 << total, 1 << settings.TABLE_MAX_N)
        low = (1 << n) - 1
        padded = TableUtility(n=total, values=tuple(utility.values[mask & low] for mask in range(1 << total)))
    elif isinstance(utility, AdditiveUtility):
        padded = AdditiveUtility(n=total, weights=utility.weights + (Fraction(0),) * count)
    else:
        padded = XosUtility(n=total, clauses=tuple(clause + (Fraction(0),) * count for clause in utility.clauses))
    return Instance(
        n=total, lam=instance.lam, theta=instance.theta + (Fraction(0),) * count, utility=padded
    )


def _quarters(rng: np.random.Generator, size: int, top: int = 4) -> List[Fraction]:
    return [Fraction(int(value), 4) for value in rng.integers(0, top + 1, size=size)]


def random_utility(rng: np.random.Generator, n: int, family: str) -> UtilityFunction:
    if family in ("table", "supermodular") and n > settings.TABLE_MAX_N:
        raise SizeLimitError("random utility table", 1 << n, 1 << settings.TABLE_MAX_N)
    if family == "table":
        values = [Fraction(0)] * (1 << n)
        for mask in range(1, 1 << n):
            floor = max(values[mask & ~(1 << index)] for index in range(n) if mask >> index & 1)
            values[mask] = floor + _quarters(rng, 1)[0]
        return TableUtility(n=n, values=tuple(values))
    if family == "supermodular":
        bonus = [Fraction(0)] + _quarters(rng, (1 << n) - 1, top=2)
        values = tuple(sum((bonus[sub] for sub in submasks(mask)), Fraction(0)) for mask in range(1 << n))
        return TableUtility(n=n, values=values)
    if family == "prefix":
        steps = _quarters(rng, n)
        weights = [Fraction(0)]
        for step in steps:
            weights.append(weights[-1] + step)
        return PrefixUtility(n=n, weights=tuple(weights))
    if family == "additive":
        return AdditiveUtility(n=n, weights=tuple(_quarters(rng, n)))
    if family == "xos":
        clauses = int(rng.integers(1, 4))
        return XosUtility(n=n, clauses=tuple(tuple(_quarters(rng, n)) for _ in range(clauses)))
    if family == "anonymous":
        steps = sorted(_quarters(rng, n), reverse=True)
        values = [Fraction(0)]
        for step in steps:
            values.append(values[-1] + step)
        return AnonymousUtility(n=n, values=tuple(values))
    raise InputError(f"unknown random family {family!r}; expected one of {', '.join(RANDOM_FAMILIES)}")


def random_instance(rng: np.random.Generator, n: int, family: str = "table") -> Instance:
    """
    Random instance: theta are multiples of 1/8 sorted descending, lambda is
    one of 1/8..7/8, V drawn from the named family.
    """
    _require_positive(n)
    theta = tuple(sorted((Fraction(int(v), 8) for v in rng.integers(0, 9, size=n)), reverse=True))
    lam = Fraction(int(rng.integers(1, 8)), 8)
    return Instance(n=n, lam=lam, theta=theta, utility=random_utility(rng, n, family))


# === Subcube partition ===


def subcube_partition(k: int) -> List[Dict[int, int]]:
    """
    Subcubes C_0..C_n of {0,1}^n for n = 2^k, as {coordinate: value} maps
    with 1-based coordinates.

    C_0 fixes x_1 = 0. Otherwise a binary search keeps x_l = 1 and
    x_r = 0 (x_{n+1} = 0 implicitly) until r = l + 1; C_l collects x_1 = 1
    and the coordinates queried on the way, so x_l = 1 and, for l < n,
    x_{l+1} = 0.
    """
    if k < 0:
        raise InputError("k must be nonnegative")
    n = 2 ** k
    cubes: List[Dict[int, int]] = [{1: 0}]
    for target in range(1, n + 1):
        fixed = {1: 1}
        low, high = 1, n + 1
        while high - low > 1:
            mid = (low + high) // 2
            bit = 1 if mid <= target else 0
            fixed[mid] = bit
            if bit:
                low = mid
            else:
                high = mid
        cubes.append(dict(sorted(fixed.items())))
    return cubes


def cube_of(point: Tuple[int, ...], cubes: List[Dict[int, int]]) -> List[int]:
    """Indices of the cubes containing a 0/1 point."""
    return [
        index for index, cube in enumerate(cubes)
        if all(point[coordinate - 1] == value for coordinate, value in cube.items())
    ]


# === Prefix schemes and the broadcast bound ===


def prefix_sweep(instance: Instance, k: int = 1) -> List[Tuple[str, PrefixScheme]]:
    """
    Coarse family of prefix-based schemes: the optimal private scheme, every
    public prefix, every mask-remove window for k and both mask-match
    cutoffs (skipped when their cutoff has theta = 0).
    """
    n = instance.n
    sweep: List[Tuple[str, PrefixScheme]] = [("optimal_private", optimal_private(instance))]
    sweep += [(f"public_prefix[{i}]", to_prefix_scheme(public_prefix(instance, i))) for i in range(1, n + 1)]
    if 1 <= k <= max(1, n // 2):
        sweep += [(f"mask_remove[{i}]", mask_remove(instance, i, k)) for i in range(1, n + 1)]
    for name, builder in (("mask_match_star", mask_match_star), ("mask_match_general", mask_match_general)):
        try:
            sweep.append((name, builder(instance)))
        except InputError as exc:
            logger.debug(f"{name} skipped: {exc.message}")
    return sweep


def expected_block_sizes(n: int, k: int) -> List[Fraction]:
    """
    E|B(j')| for j' = 0..n: the expected number of prefix lengths 1..n that
    share j''s block when a uniform size-k leaker set v_1 < ... < v_k cuts
    0..n into [v_l, v_{l+1}).
    """
    if not 0 <= k <= n:
        raise InputError(f"k = {k} outside 0..{n}")
    totals = [Fraction(0)] * (n + 1)
    weight = Fraction(1, binomial(n, k))
    for leakers in combinations(range(1, n + 1), k):
        cuts = (0,) + leakers + (n + 1,)
        for start, stop in zip(cuts, cuts[1:]):
            members = range(start, stop)
            size = sum(1 for j in members if j >= 1)
            for j in members:
                totals[j] += weight * size
    return totals


def broadcast_prefix_upper_bound(instance: Instance, scheme: PrefixScheme, k: int) -> Fraction:
    """
    lambda * V(N) + 2 (1 - lambda) * sum_{j'} mu1([j']) * E|B(j')|.

    Bounds the downstream utility of a prefix-based scheme under k-broadcast
    leakage on the hard supermodular instance. The w1 term is V(N) because
    leaks can only add adopters there.
    """
    if scheme.n != instance.n:
        raise InputError(f"scheme has {scheme.n} receivers, instance has {instance.n}")
    sizes = expected_block_sizes(instance.n, k)
    spread = sum((mass * size for mass, size in zip(scheme.mu1, sizes)), Fraction(0))
    return instance.lam * instance.prefix_value(instance.n) + 2 * (1 - instance.lam) * spread


# === Lower-bound suite ===


def _optimal_scheme(instance: Instance, k: int):
    solution = solve(build_persuasive_lp(instance, k))
    if solution.status != LpStatus.OPTIMAL:
        raise InternalError(f"persuasion LP at k={k} is {solution.status.value}")
    return solution.value, scheme_from_solution(instance, solution)


def verify_lower_bound_suite(family: str, k: int, n: Optional[int] = None) -> LowerBoundReport:
    """
    Solve the private, k-persuasive and public programs on a hard instance
    and check the explicit bounds the lower-bound arguments establish.

    hard-supermodular: built at n = 2^k and padded with dummies up to n;
    both the k-persuasive and the public optimum keep their w0 part at most
    2 (1 - lambda). hard-submodular-public: the unweighted w0 sum of the
    public optimum is at most 1/n. hard-submodular-k: the unweighted w0 sum
    of the k-persuasive optimum is at most 1/k.
    """
    if family == "hard-supermodular":
        base = 2 ** k
        size = base if n is None else n
        if size < base:
            raise InputError(f"n = {size} below 2^k = {base}")
        instance = pad_dummies(hard_supermodular(base), size - base)
        instance_id = f"{family}(n={base}, dummies={size - base})"
    elif family in ("hard-submodular-public", "hard-submodular-k"):
        if n is None:
            raise InputError(f"family {family} needs n")
        instance = hard_submodular_public(n) if family == "hard-submodular-public" else hard_submodular_k(n, k)
        instance_id = f"{family}(n={n})" if family == "hard-submodular-public" else f"{family}(n={n}, k={k})"
    else:
        raise InputError(f"unknown lower-bound family {family!r}; expected one of {', '.join(LOWER_BOUND_FAMILIES)}")
    if not 0 <= k <= instance.n - 1:
        raise InputError(f"k = {k} outside 0..{instance.n - 1}")

    opt_private, _ = _optimal_scheme(instance, 0)
    opt_k, scheme_k = _optimal_scheme(instance, k)
    opt_public, scheme_public = _optimal_scheme(instance, instance.n - 1)
    weight = 1 - instance.lam
    checks: List[BoundCheck] = []

    def add(name: str, value: Fraction, bound: Fraction) -> None:
        checks.append(BoundCheck(name=name, value=value, bound=bound, holds=value <= bound))

    if family == "hard-supermodular":
        add("persuasive_k omega0 <= 2(1-lambda)", omega0_part(instance, scheme_k), 2 * weight)
        add("public omega0 <= 2(1-lambda)", omega0_part(instance, scheme_public), 2 * weight)
    elif family == "hard-submodular-public":
        add("public omega0 sum <= 1/n", omega0_part(instance, scheme_public) / weight, Fraction(1, instance.n))
    else:
        add("persuasive_k omega0 sum <= 1/k", omega0_part(instance, scheme_k) / weight, Fraction(1, k))

    report = LowerBoundReport(
        family=family,
        instance_id=instance_id,
        n=instance.n,
        k=k,
        opt_private=opt_private,
        opt_persuasive_k=opt_k,
        opt_public=opt_public,
        powr_k=opt_private / opt_k if opt_k else None,
        checks=checks,
    )
    logger.info(
        f"lower-bound suite {instance_id}, k={k}: private {describe(opt_private)}, "
        f"k-persuasive {describe(opt_k)}, public {describe(opt_public)}, ok={report.ok}"
    )
    return report


def generate(
    family: str,
    n: Optional[int] = None,
    k: Optional[int] = None,
    epsilon: Optional[Fraction] = None,
    seed: Optional[int] = None,
    utility: str = "table",
    pad: int = 0,
) -> Instance:
    """Build an instance by family name for the CLI and the API, then pad."""
    def need(value, label: str):
        if value is None:
            raise InputError(f"family {family} needs {label}")
        return value

    if family == "appendix-c":
        instance = appendix_c_instance()
    elif family == "hard-supermodular":
        instance = hard_supermodular(need(n, "n"))
    elif family == "hard-submodular-public":
        instance = hard_submodular_public(need(n, "n"))
    elif family == "hard-clique-blocks":
        instance = hard_clique_blocks(need(n, "n"), need(k, "k"))
    elif family == "hard-submodular-k":
        instance = hard_submodular_k(need(n, "n"), need(k, "k"))
    elif family == "externality":
        instance = externality_instance(need(n, "n"), need(epsilon, "epsilon"))[0]
    elif family == "random":
        seed = settings.DEFAULT_SEED if seed is None else seed
        instance = random_instance(np.random.default_rng(seed), need(n, "n"), utility)
    else:
        raise InputError(f"unknown instance family {family!r}; expected one of {', '.join(FAMILIES)}")
    logger.info(f"generated {family} instance with n={instance.n}")
    return pad_dummies(instance, pad)
