"""
Persuasiveness decision procedures and the worst-case downstream utility.

Leak sets are enumerated exhaustively: for receiver i, every J within the
other receivers with |J| <= k by increasing size, lexicographic J, then
lexicographic sign pattern. The first failing observation is reported.
"""

import logging
from fractions import Fraction
from itertools import product
from typing import Iterator, Optional, Tuple

from app.core.config import settings
from app.core.errors import InputError, SizeLimitError, UnsupportedError
from app.models.instance import Instance
from app.models.scheme import SignalingScheme
from app.schemas.common import BestResponseMode, CheckKind
from app.schemas.verdict import Verdict, Violation
from app.services.best_response import Leaks, ResponseOracle
from app.utils.profiles import leak_sets

logger = logging.getLogger(__name__)


def _require_binary(scheme: SignalingScheme, instance: Instance) -> None:
    if not scheme.is_binary:
        raise UnsupportedError("persuasiveness checks need binary alphabets")
    if scheme.n != instance.n:
        raise InputError(f"scheme has {scheme.n} receivers, instance has {instance.n}")


def _check_size(n: int, k: int) -> None:
    if n > settings.CHECKER_MAX_N:
        raise SizeLimitError("persuasiveness check receivers", n, settings.CHECKER_MAX_N)
    if n > 10 and k > settings.CHECKER_MAX_K:
        raise SizeLimitError("persuasiveness check leak size", k, settings.CHECKER_MAX_K)


def _check_k(instance: Instance, k: int) -> None:
    if not 0 <= k <= instance.n - 1:
        raise InputError(f"k = {k} outside 0..{instance.n - 1}")


def _observations(n: int, receiver: int, k: int, skip_empty: bool = False) -> Iterator[Leaks]:
    others = [j for j in range(n) if j != receiver]
    for senders in leak_sets(others, k):
        if skip_empty and not senders:
            continue
        for values in product((0, 1), repeat=len(senders)):
            yield tuple(zip(senders, values))


def _violation(receiver: int, own: int, leaks: Leaks, m0: Fraction, m1: Fraction) -> Violation:
    return Violation(
        receiver=receiver + 1,
        signal=own,
        leaked=[(j + 1, v) for j, v in leaks],
        m0=m0,
        m1=m1,
    )


def _follows(oracle: ResponseOracle, receiver: int, own: int, leaks: Leaks) -> Tuple[bool, Fraction, Fraction]:
    """Whether the receiver's response equals its own binary signal."""
    m0, m1 = oracle.masses(receiver, own, leaks)
    threshold = oracle.theta[receiver] * m1
    if m0 == 0 and m1 == 0:
        oracle.zero_mass += 1
    if own == 1:
        return m0 <= threshold, m0, m1
    return m0 >= threshold, m0, m1


def check_private(
    instance: Instance,
    scheme: SignalingScheme,
    mode: BestResponseMode = BestResponseMode.STANDARD,
) -> Verdict:
    """
    Both no-leak obedience inequalities for every receiver.

    Signal 1 needs m0 <= theta_i * m1 and signal 0 needs m0 >= theta_i * m1.
    """
    _require_binary(scheme, instance)
    oracle = ResponseOracle(instance, scheme, mode)
    checked = 0
    for receiver in range(instance.n):
        for own in (1, 0):
            checked += 1
            follows, m0, m1 = _follows(oracle, receiver, own, ())
            if not follows:
                logger.debug(f"private check failed at receiver {receiver + 1}, signal {own}")
                return Verdict(
                    ok=False, check=CheckKind.PRIVATE, k=0,
                    violation=_violation(receiver, own, (), m0, m1),
                    checked=checked, zero_mass=oracle.zero_mass,
                )
    return Verdict(ok=True, check=CheckKind.PRIVATE, k=0, checked=checked, zero_mass=oracle.zero_mass)


def check_k_worst_case(
    instance: Instance,
    scheme: SignalingScheme,
    k: int,
    mode: BestResponseMode = BestResponseMode.STANDARD,
    check: CheckKind = CheckKind.KWORST,
) -> Verdict:
    """
    Private persuasiveness plus obedience of every signal-1 receiver under
    any <= k leaked signals.

    Raises:
        InputError: k outside 0..n-1
        UnsupportedError: non-binary alphabets
        SizeLimitError: n or k above the checker caps
    """
    _require_binary(scheme, instance)
    _check_k(instance, k)
    _check_size(instance.n, k)

    private = check_private(instance, scheme, mode)
    if not private.ok:
        return private.model_copy(update={"check": check, "k": k})

    oracle = ResponseOracle(instance, scheme, mode)
    checked = private.checked
    for receiver in range(instance.n):
        for leaks in _observations(instance.n, receiver, k, skip_empty=True):
            checked += 1
            follows, m0, m1 = _follows(oracle, receiver, 1, leaks)
            if not follows:
                logger.debug(f"{check.value} check failed at receiver {receiver + 1}, leaks {leaks}")
                return Verdict(
                    ok=False, check=check, k=k,
                    violation=_violation(receiver, 1, leaks, m0, m1),
                    checked=checked, zero_mass=private.zero_mass + oracle.zero_mass,
                )
    return Verdict(ok=True, check=check, k=k, checked=checked, zero_mass=private.zero_mass + oracle.zero_mass)


def check_public(
    instance: Instance,
    scheme: SignalingScheme,
    mode: BestResponseMode = BestResponseMode.STANDARD,
) -> Verdict:
    """(n-1)-worst-case persuasiveness."""
    return check_k_worst_case(instance, scheme, instance.n - 1, mode, check=CheckKind.PUBLIC)


def check_two_sided(
    instance: Instance,
    scheme: SignalingScheme,
    k: int,
    mode: BestResponseMode = BestResponseMode.STANDARD,
) -> Verdict:
    """Every receiver follows its signal, 0 or 1, under any <= k leaked signals."""
    _require_binary(scheme, instance)
    _check_k(instance, k)
    _check_size(instance.n, k)

    oracle = ResponseOracle(instance, scheme, mode)
    checked = 0
    for receiver in range(instance.n):
        for own in (1, 0):
            for leaks in _observations(instance.n, receiver, k):
                checked += 1
                follows, m0, m1 = _follows(oracle, receiver, own, leaks)
                if not follows:
                    return Verdict(
                        ok=False, check=CheckKind.TWOSIDED, k=k,
                        violation=_violation(receiver, own, leaks, m0, m1),
                        checked=checked, zero_mass=oracle.zero_mass,
                    )
    return Verdict(ok=True, check=CheckKind.TWOSIDED, k=k, checked=checked, zero_mass=oracle.zero_mass)


def worst_case_downstream(
    instance: Instance,
    scheme: SignalingScheme,
    k: int,
    mode: BestResponseMode = BestResponseMode.STANDARD,
) -> Fraction:
    """
    Expected utility when an adversary picks, per realized profile, the
    worst leak set of size <= k for each receiver.

    A receiver counts only if its signal is 1 and it adopts under every such
    leak set; receivers with signal 0 contribute nothing.
    """
    _require_binary(scheme, instance)
    _check_k(instance, k)
    if instance.n > settings.TABLE_MAX_N:
        raise SizeLimitError("worst-case downstream receivers", instance.n, settings.TABLE_MAX_N)

    oracle = ResponseOracle(instance, scheme, mode)
    robust: dict = {}

    def holds(receiver: int, profile) -> bool:
        others = [j for j in range(instance.n) if j != receiver]
        for senders in leak_sets(others, k):
            leaks = tuple((j, profile[j]) for j in senders)
            if not oracle.respond(receiver, 1, leaks):
                return False
        return True

    total = Fraction(0)
    for state, weight in ((0, 1 - instance.lam), (1, instance.lam)):
        for profile, mass in scheme.distribution(state).items():
            mask = 0
            for receiver in range(instance.n):
                if profile[receiver] != 1:
                    continue
                # the verdict depends only on the others' symbols
                key = (receiver, profile)
                if key not in robust:
                    robust[key] = holds(receiver, profile)
                if robust[key]:
                    mask |= 1 << receiver
            total += weight * mass * instance.utility.value(mask)
    return total


def first_failure(verdict: Verdict) -> Optional[Violation]:
    return None if verdict.ok else verdict.violation


def run_check(
    kind: CheckKind,
    instance: Instance,
    scheme: SignalingScheme,
    k: Optional[int] = None,
    mode: BestResponseMode = BestResponseMode.STANDARD,
) -> Verdict:
    """Dispatch a check by kind; kworst and twosided need k."""
    if kind == CheckKind.PRIVATE:
        return check_private(instance, scheme, mode)
    if kind == CheckKind.PUBLIC:
        return check_public(instance, scheme, mode)
    if k is None:
        raise InputError(f"check {kind.value} needs k")
    if kind == CheckKind.KWORST:
        return check_k_worst_case(instance, scheme, k, mode)
    return check_two_sided(instance, scheme, k, mode)
