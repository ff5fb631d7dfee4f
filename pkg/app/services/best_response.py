"""
Posterior masses and receiver best responses under leaked observations.

Receiver i adopts iff m0 <= theta_i * m1, where m0 and m1 are the mu0 and
mu1 masses of the profiles consistent with what i sees. Ties, including
0 <= 0 for zero-probability observations, resolve to adopt.
"""

import logging
from collections import defaultdict
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from app.core.errors import InputError, UnsupportedError
from app.models.instance import Instance
from app.models.leakage import Observation
from app.models.scheme import SignalingScheme
from app.schemas.common import BestResponseMode
from app.utils.profiles import Profile

logger = logging.getLogger(__name__)

# (0-based sender, symbol index) pairs, sorted by sender
Leaks = Tuple[Tuple[int, int], ...]


def consistent(leaked: Iterable[Tuple[int, int]], others: Union[Mapping[int, int], Profile]) -> bool:
    """
    True iff every leaked (j, v) matches s_j.

    Args:
        leaked: (sender, symbol) pairs, senders 1-based
        others: partial profile as {j: symbol} (1-based) or a full profile tuple
    """
    if isinstance(others, Mapping):
        return all(others.get(sender) == symbol for sender, symbol in leaked)
    return all(others[sender - 1] == symbol for sender, symbol in leaked)


class ResponseOracle:
    """
    Memoized best responses for one (instance, scheme, mode).

    Receivers are 0-based here; public wrappers below translate.
    """

    def __init__(self, instance: Instance, scheme: SignalingScheme, mode: BestResponseMode = BestResponseMode.STANDARD):
        if scheme.n != instance.n:
            raise InputError(f"scheme has {scheme.n} receivers, instance has {instance.n}")
        if mode == BestResponseMode.EXTERNALITY and not scheme.is_binary:
            raise UnsupportedError("externality mode needs binary alphabets")
        self.instance = instance
        self.scheme = scheme
        self.mode = mode
        self.theta = instance.theta
        self._supports = (list(scheme.mu0.items()), list(scheme.mu1.items()))
        self._by_own: Dict[Tuple[int, int, int], List[Tuple[Profile, Fraction]]] = {}
        self._cache: Dict[Tuple[int, int, Leaks], int] = {}
        self.zero_mass: int = 0

    def _support_with_own(self, state: int, receiver: int, own: int) -> List[Tuple[Profile, Fraction]]:
        key = (state, receiver, own)
        if key not in self._by_own:
            self._by_own[key] = [
                (profile, mass) for profile, mass in self._supports[state] if profile[receiver] == own
            ]
        return self._by_own[key]

    def masses(self, receiver: int, own: int, leaks: Leaks) -> Tuple[Fraction, Fraction]:
        """(m0, m1) for an observation; m1 is the effective right-side mass."""
        m0 = sum(
            (mass for profile, mass in self._support_with_own(0, receiver, own)
             if all(profile[j] == v for j, v in leaks)),
            Fraction(0),
        )
        if self.mode == BestResponseMode.EXTERNALITY:
            if all(v == 1 for _, v in leaks):
                target = tuple(own if index == receiver else 1 for index in range(self.instance.n))
                m1 = self.scheme.mu1.get(target, Fraction(0))
            else:
                m1 = Fraction(0)
        else:
            m1 = sum(
                (mass for profile, mass in self._support_with_own(1, receiver, own)
                 if all(profile[j] == v for j, v in leaks)),
                Fraction(0),
            )
        return m0, m1

    def respond(self, receiver: int, own: int, leaks: Leaks = ()) -> int:
        key = (receiver, own, leaks)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        m0, m1 = self.masses(receiver, own, leaks)
        if m0 == 0 and m1 == 0:
            self.zero_mass += 1
            logger.debug(f"zero-mass observation resolved to adopt: receiver {receiver + 1}, own {own}, leaks {leaks}")
        action = 1 if m0 <= self.theta[receiver] * m1 else 0
        self._cache[key] = action
        return action

    def adopters(self, profile: Profile, in_neighbors: Sequence[Sequence[int]]) -> int:
        """Bitmask of receivers adopting at this profile under a fixed pattern."""
        mask = 0
        for receiver, sources in enumerate(in_neighbors):
            leaks = tuple((j, profile[j]) for j in sources)
            if self.respond(receiver, profile[receiver], leaks):
                mask |= 1 << receiver
        return mask


def _leaks_of(observation: Observation, n: int) -> Leaks:
    for sender, _ in observation.leaked:
        if sender > n:
            raise InputError(f"leaked sender {sender} outside 1..{n}")
    return tuple((sender - 1, symbol) for sender, symbol in observation.leaked)


def _check_observation(scheme: SignalingScheme, observation: Observation) -> None:
    if observation.receiver > scheme.n:
        raise InputError(f"receiver {observation.receiver} outside 1..{scheme.n}")
    if observation.own >= scheme.sizes[observation.receiver - 1]:
        raise InputError(f"own symbol {observation.own} outside receiver {observation.receiver}'s alphabet")
    for sender, symbol in observation.leaked:
        if sender <= scheme.n and symbol >= scheme.sizes[sender - 1]:
            raise InputError(f"leaked symbol {symbol} outside receiver {sender}'s alphabet")


def conditional_masses(scheme: SignalingScheme, observation: Observation) -> Tuple[Fraction, Fraction]:
    """
    Unweighted posterior masses of an observation.

    Returns:
        (m0, m1): total mu0 and mu1 mass of the profiles consistent with the
        receiver's own symbol and every leaked pair
    """
    _check_observation(scheme, observation)
    receiver = observation.receiver - 1
    leaks = _leaks_of(observation, scheme.n)
    totals = []
    for distribution in (scheme.mu0, scheme.mu1):
        totals.append(sum(
            (mass for profile, mass in distribution.items()
             if profile[receiver] == observation.own and all(profile[j] == v for j, v in leaks)),
            Fraction(0),
        ))
    return totals[0], totals[1]


def best_response(
    instance: Instance,
    scheme: SignalingScheme,
    observation: Observation,
    mode: BestResponseMode = BestResponseMode.STANDARD,
) -> int:
    """
    Action (0 or 1) of the observing receiver.

    Standard mode adopts iff m0 <= theta_i * m1. Externality mode replaces
    the right side with theta_i * mu1(own, all-ones) when every leaked symbol
    is 1, and 0 otherwise.
    """
    _check_observation(scheme, observation)
    oracle = ResponseOracle(instance, scheme, mode)
    return oracle.respond(observation.receiver - 1, observation.own, _leaks_of(observation, scheme.n))


def marginals(scheme: SignalingScheme, receiver: int) -> Tuple[Dict[int, Fraction], Dict[int, Fraction]]:
    """Per-symbol marginal masses of a 1-based receiver under mu0 and mu1."""
    result = []
    for distribution in (scheme.mu0, scheme.mu1):
        table: Dict[int, Fraction] = defaultdict(Fraction)
        for profile, mass in distribution.items():
            table[profile[receiver - 1]] += mass
        result.append(dict(table))
    return result[0], result[1]


def private_response(instance: Instance, scheme: SignalingScheme, receiver: int, own: int) -> int:
    """No-leak best response from the receiver's marginals alone."""
    marginal0, marginal1 = marginals(scheme, receiver)
    m0 = marginal0.get(own, Fraction(0))
    m1 = marginal1.get(own, Fraction(0))
    return int(m0 <= instance.theta[receiver - 1] * m1)
