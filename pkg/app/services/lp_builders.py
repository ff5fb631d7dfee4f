"""
Builders for the optimization problems solved by the exact simplex.

Variable order is canonical everywhere: all mu0 entries in lexicographic
profile order, then all mu1 entries in the same order. For binary schemes
the variable of (state, profile) is state * 2^n + sum_i s_i * 2^(n-1-i).
"""

import logging
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Dict, List, Mapping, Sequence, Tuple

from app.core.config import settings
from app.core.errors import InputError, InternalError, SizeLimitError, UnsupportedError
from app.models.instance import Instance
from app.models.leakage import LeakagePattern, Observation
from app.models.lp import Constraint, LinearProgram, LpSolution
from app.models.scheme import SignalingScheme, normalize_alphabet
from app.schemas.common import LpStatus, Relation
from app.services.best_response import Leaks
from app.services.simplex import solve
from app.utils.profiles import (
    BINARY_ALPHABET,
    Profile,
    all_profiles,
    binary_profiles,
    encode_profile,
    mask_of,
    profile_count,
)
from app.utils.rationals import describe

logger = logging.getLogger(__name__)

# (0-based receiver, own symbol, leaked pairs with 0-based senders)
ObservationKey = Tuple[int, int, Leaks]


def _binary_index(profile: Profile) -> int:
    index = 0
    for symbol in profile:
        index = (index << 1) | symbol
    return index


def _normalizations(size: int) -> List[Constraint]:
    return [
        Constraint(coefficients={p: Fraction(1) for p in range(size)}, relation=Relation.EQ, rhs=1, name="sum mu0"),
        Constraint(coefficients={size + p: Fraction(1) for p in range(size)}, relation=Relation.EQ, rhs=1, name="sum mu1"),
    ]


def _obedience_row(profiles: Sequence[int], theta: Fraction, offset: int) -> Dict[int, Fraction]:
    """sum over the given profile indices of mu0(s) - theta * mu1(s)."""
    row = {p: Fraction(1) for p in profiles}
    if theta:
        row.update({offset + p: -theta for p in profiles})
    return row


def _check_table_size(n: int) -> None:
    if n > settings.TABLE_MAX_N:
        logger.warning(f"refusing LP over {2 ** (n + 1)} variables")
        raise SizeLimitError("persuasion LP variables", 2 ** (n + 1), 2 ** (settings.TABLE_MAX_N + 1))


def build_persuasive_lp(instance: Instance, k: int) -> LinearProgram:
    """
    LP whose optimum is the best k-worst-case persuasive utility.

    k = 0 gives the private optimum and k = n - 1 the public one. Rows, in
    order: both obedience inequalities per receiver, one leaked-observation
    inequality per (receiver, leak set of size 1..k, sign pattern), then the
    two normalizations.

    Raises:
        InputError: k outside 0..n-1
        SizeLimitError: n above TABLE_MAX_N
    """
    n = instance.n
    if not 0 <= k <= n - 1:
        raise InputError(f"k = {k} outside 0..{n - 1}")
    _check_table_size(n)

    size = 1 << n
    profiles = list(binary_profiles(n))
    names = tuple(
        f"mu{state}[{''.join(map(str, profile))}]" for state in (0, 1) for profile in profiles
    )
    objective: Dict[int, Fraction] = {}
    for position, profile in enumerate(profiles):
        value = instance.utility.value(mask_of(profile))
        if value:
            objective[position] = (1 - instance.lam) * value
            objective[size + position] = instance.lam * value

    rows: List[Constraint] = []
    for receiver in range(n):
        theta = instance.theta[receiver]
        adopt = [p for p, profile in enumerate(profiles) if profile[receiver] == 1]
        reject = [p for p, profile in enumerate(profiles) if profile[receiver] == 0]
        rows.append(Constraint(
            coefficients=_obedience_row(adopt, theta, size), relation=Relation.LE, rhs=0,
            name=f"obey[{receiver + 1}]=1",
        ))
        rows.append(Constraint(
            coefficients=_obedience_row(reject, theta, size), relation=Relation.GE, rhs=0,
            name=f"obey[{receiver + 1}]=0",
        ))

    for receiver in range(n):
        theta = instance.theta[receiver]
        others = [j for j in range(n) if j != receiver]
        for width in range(1, k + 1):
            for senders in combinations(others, width):
                for values in product((0, 1), repeat=width):
                    matching = [
                        p for p, profile in enumerate(profiles)
                        if profile[receiver] == 1 and all(profile[j] == v for j, v in zip(senders, values))
                    ]
                    label = ",".join(f"{j + 1}={v}" for j, v in zip(senders, values))
                    rows.append(Constraint(
                        coefficients=_obedience_row(matching, theta, size), relation=Relation.LE, rhs=0,
                        name=f"leak[{receiver + 1}|{label}]",
                    ))

    rows.extend(_normalizations(size))
    logger.debug(f"persuasion LP built: n={n}, k={k}, {2 * size} vars, {len(rows)} rows")
    return LinearProgram(num_vars=2 * size, objective=objective, constraints=tuple(rows), var_names=names)


def scheme_from_solution(instance: Instance, solution: LpSolution) -> SignalingScheme:
    """Binary scheme read off an optimal assignment of build_persuasive_lp."""
    if solution.status != LpStatus.OPTIMAL:
        raise InputError(f"no scheme in a {solution.status.value} solution")
    size = 1 << instance.n
    if len(solution.assignment) != 2 * size:
        raise InputError("assignment does not match the instance's persuasion LP")
    profiles = list(binary_profiles(instance.n))
    mu0 = {profile: solution.assignment[p] for p, profile in enumerate(profiles) if solution.assignment[p]}
    mu1 = {profile: solution.assignment[size + p] for p, profile in enumerate(profiles) if solution.assignment[size + p]}
    return SignalingScheme.binary(instance.n, mu0, mu1)


def scheme_vector(scheme: SignalingScheme) -> Tuple[Fraction, ...]:
    """A binary scheme as an assignment of the persuasion LP's variables."""
    if not scheme.is_binary:
        raise UnsupportedError("only binary schemes map onto the persuasion LP")
    size = 1 << scheme.n
    values = [Fraction(0)] * (2 * size)
    for state in (0, 1):
        for profile, mass in scheme.distribution(state).items():
            values[state * size + _binary_index(profile)] = mass
    return tuple(values)


def opt_value(instance: Instance, k: int) -> Fraction:
    """Optimal k-worst-case persuasive utility."""
    solution = solve(build_persuasive_lp(instance, k))
    if solution.status != LpStatus.OPTIMAL:
        raise InternalError(f"persuasion LP reported {solution.status.value}", k=k)
    logger.info(f"OPT at k={k}: {describe(solution.value)} after {solution.pivots} pivots")
    return solution.value


def omega0_part(instance: Instance, scheme: SignalingScheme) -> Fraction:
    """(1 - lambda) * sum_s mu0(s) * V(recommended adopters of s)."""
    if not scheme.is_binary:
        raise UnsupportedError("the recommended-action utility needs binary alphabets")
    return (1 - instance.lam) * sum(
        (mass * instance.utility.value(mask_of(profile)) for profile, mass in scheme.mu0.items()),
        Fraction(0),
    )


# === Best-response-constrained programs ===


class ResponseLpTemplate:
    """
    Shared structure of every LP that fixes receiver responses under one
    leakage pattern: the profile space, the observation each receiver makes
    at each profile, and the profiles consistent with each observation.
    """

    def __init__(self, instance: Instance, alphabets: Sequence, pattern: LeakagePattern):
        self.alphabets = tuple(normalize_alphabet(entry) for entry in alphabets)
        self.sizes = tuple(len(alphabet) for alphabet in self.alphabets)
        if len(self.alphabets) != instance.n or pattern.n != instance.n:
            raise InputError(
                f"instance has {instance.n} receivers, alphabets {len(self.alphabets)}, pattern {pattern.n}"
            )
        total = profile_count(self.sizes)
        if total > settings.PROFILE_CAP:
            logger.warning(f"refusing profile space of {total} profiles")
            raise SizeLimitError("signal profiles", total, settings.PROFILE_CAP)

        self.instance = instance
        self.pattern = pattern
        self.in_neighbors = pattern.in_neighbors()
        self.profiles: List[Profile] = list(all_profiles(self.sizes))
        self.size = len(self.profiles)
        self.keys: List[Tuple[ObservationKey, ...]] = []
        self.groups: Dict[ObservationKey, List[int]] = {}
        for position, profile in enumerate(self.profiles):
            row = []
            for receiver, sources in enumerate(self.in_neighbors):
                key = (receiver, profile[receiver], tuple((j, profile[j]) for j in sources))
                self.groups.setdefault(key, []).append(position)
                row.append(key)
            self.keys.append(tuple(row))
        self.observation_keys: List[ObservationKey] = sorted(self.groups)
        self.var_names = tuple(
            f"mu{state}[{encode_profile(profile, self.alphabets)}]" for state in (0, 1) for profile in self.profiles
        )

    def observations_of(self, receiver: int) -> List[ObservationKey]:
        """Sorted reachable observation keys of a 0-based receiver."""
        return [key for key in self.observation_keys if key[0] == receiver]

    def _row(self, key: ObservationKey, action: int) -> Constraint:
        receiver, own, leaks = key
        label = ",".join(f"{j + 1}={self.alphabets[j][v]}" for j, v in leaks)
        coefficients = _obedience_row(self.groups[key], self.instance.theta[receiver], self.size)
        return Constraint(
            coefficients=coefficients,
            relation=Relation.LE if action else Relation.GE,
            rhs=0,
            name=f"br[{receiver + 1}:{self.alphabets[receiver][own]}|{label}]={action}",
        )

    def _program(self, rows: List[Constraint], adopters: Callable[[int], int]) -> LinearProgram:
        objective: Dict[int, Fraction] = {}
        for position in range(self.size):
            value = self.instance.utility.value(adopters(position))
            if value:
                objective[position] = (1 - self.instance.lam) * value
                objective[self.size + position] = self.instance.lam * value
        rows = rows + _normalizations(self.size)
        return LinearProgram(
            num_vars=2 * self.size, objective=objective, constraints=tuple(rows), var_names=self.var_names
        )

    def build(self, table: Mapping[ObservationKey, int]) -> LinearProgram:
        """LP enforcing one action per reachable observation."""
        rows = []
        for key in self.observation_keys:
            action = table.get(key)
            if action not in (0, 1):
                receiver, own, leaks = key
                raise InputError(
                    f"no action 0/1 for receiver {receiver + 1} observing own symbol {own} and leaks "
                    f"{[(j + 1, v) for j, v in leaks]}"
                )
            rows.append(self._row(key, action))

        def adopters(position: int) -> int:
            mask = 0
            for key in self.keys[position]:
                if table[key]:
                    mask |= 1 << key[0]
            return mask

        return self._program(rows, adopters)

    def build_per_profile(self, actions: Sequence[int]) -> LinearProgram:
        """
        LP enforcing an action mask per profile.

        Rows are deduplicated per (observation, action); an observation given
        both actions at different profiles becomes an indifference equality.
        """
        if len(actions) != self.size:
            raise InputError(f"{len(actions)} action masks for {self.size} profiles")
        required: Dict[ObservationKey, set] = {}
        for position, keys in enumerate(self.keys):
            for key in keys:
                required.setdefault(key, set()).add((actions[position] >> key[0]) & 1)
        rows = [
            self._row(key, action) for key in self.observation_keys for action in sorted(required[key], reverse=True)
        ]
        return self._program(rows, lambda position: actions[position])

    def scheme_of(self, solution: LpSolution) -> SignalingScheme:
        mu0 = {self.profiles[p]: solution.assignment[p] for p in range(self.size) if solution.assignment[p]}
        mu1 = {
            self.profiles[p]: solution.assignment[self.size + p]
            for p in range(self.size) if solution.assignment[self.size + p]
        }
        return SignalingScheme(alphabets=self.alphabets, mu0=mu0, mu1=mu1)

    def to_observation(self, key: ObservationKey) -> Observation:
        receiver, own, leaks = key
        return Observation(receiver=receiver + 1, own=own, leaked=tuple((j + 1, v) for j, v in leaks))


def observation_key(observation: Observation) -> ObservationKey:
    return (
        observation.receiver - 1,
        observation.own,
        tuple((sender - 1, symbol) for sender, symbol in observation.leaked),
    )


def reachable_observations(instance: Instance, alphabets: Sequence, pattern: LeakagePattern) -> List[Observation]:
    """Every observation some profile produces, receivers in order."""
    template = ResponseLpTemplate(instance, alphabets, pattern)
    return [template.to_observation(key) for key in template.observation_keys]


def build_br_constrained_lp(
    instance: Instance,
    alphabets: Sequence,
    pattern: LeakagePattern,
    responses: Mapping[Observation, int],
) -> LinearProgram:
    """
    LP over schemes on the given alphabets that make the prescribed responses
    best responses under a fixed leakage pattern.

    Action 1 at an observation adds m0 <= theta_i * m1, action 0 adds
    m0 >= theta_i * m1. The objective counts the adopters the responses
    produce at each profile.

    Raises:
        InputError: a reachable observation has no assigned action
        SizeLimitError: profile space above PROFILE_CAP
    """
    template = ResponseLpTemplate(instance, alphabets, pattern)
    table = {observation_key(observation): action for observation, action in responses.items()}
    return template.build(table)


def direct_responses(instance: Instance, pattern: LeakagePattern) -> Dict[Observation, int]:
    """Obedient play over binary alphabets: adopt iff the own signal is 1."""
    template = ResponseLpTemplate(instance, (BINARY_ALPHABET,) * instance.n, pattern)
    return {template.to_observation(key): key[1] for key in template.observation_keys}
