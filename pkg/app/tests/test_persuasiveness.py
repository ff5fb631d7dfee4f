"""
Tests for the persuasiveness checks and the worst-case downstream utility.
"""
from fractions import Fraction

import numpy as np
import pytest

from app.core.errors import InputError, UnsupportedError
from app.models.instance import Instance
from app.models.scheme import PrefixScheme, SignalingScheme
from app.models.utility import AdditiveUtility, PrefixUtility
from app.schemas.common import CheckKind
from app.services.constructors import (
    full_information,
    load_appendix_c_scheme,
    optimal_private,
    public_prefix,
    subsample_half,
)
from app.services.instance_lab import random_instance
from app.services.persuasiveness import (
    check_k_worst_case,
    check_private,
    check_public,
    check_two_sided,
    first_failure,
    run_check,
    worst_case_downstream,
)
from app.utils.profiles import binary_profiles, prefix_length, prefix_profile


# === Private ===

def test_optimal_private_is_private_persuasive(instance_c, private_c):
    verdict = check_private(instance_c, private_c)
    assert verdict.ok
    assert verdict.checked == 6
    assert first_failure(verdict) is None


def test_private_failure_reports_signal(instance_c):
    """mu0 on N and mu1 on the empty set makes signal 1 a bad sign."""
    scheme = PrefixScheme(n=3, mu0=(0, 0, 0, 1), mu1=(1, 0, 0, 0)).to_scheme()
    violation = check_private(instance_c, scheme).violation
    assert (violation.receiver, violation.signal, violation.leaked) == (1, 1, [])
    assert (violation.m0, violation.m1) == (Fraction(1), Fraction(0))


# === k-worst-case ===

def test_first_leak_violation(instance_c, private_c):
    """Receiver 1 learning s_2 = 0 is the first failing observation."""
    verdict = check_k_worst_case(instance_c, private_c, 1)
    assert not verdict.ok
    assert verdict.check == CheckKind.KWORST
    violation = verdict.violation
    assert violation.receiver == 1
    assert violation.signal == 1
    assert violation.leaked == [(2, 0)]
    assert (violation.m0, violation.m1) == (Fraction(1, 4), Fraction(0))


def test_k_zero_is_private(instance_c, private_c):
    assert check_k_worst_case(instance_c, private_c, 0).ok


def test_private_failure_comes_first(instance_c):
    scheme = PrefixScheme(n=3, mu0=(0, 0, 0, 1), mu1=(1, 0, 0, 0)).to_scheme()
    verdict = check_k_worst_case(instance_c, scheme, 2)
    assert verdict.violation.leaked == []
    assert verdict.k == 2


def test_public_prefix_is_public(instance_c):
    scheme = public_prefix(instance_c, 3)
    assert check_public(instance_c, scheme).ok
    assert check_public(instance_c, scheme).check == CheckKind.PUBLIC


def test_full_information_passes_everything(instance_c):
    scheme = full_information(instance_c)
    for k in range(3):
        assert check_k_worst_case(instance_c, scheme, k).ok
        assert check_two_sided(instance_c, scheme, k).ok


def test_two_sided_catches_signal_zero_under_subsampling(instance_c):
    """Receiver 1 told 0 but seeing s_2 = 1 knows the state is w1."""
    scheme = subsample_half(instance_c, optimal_private(instance_c), 2)
    assert check_k_worst_case(instance_c, scheme, 2).ok
    verdict = check_two_sided(instance_c, scheme, 2)
    assert not verdict.ok
    assert verdict.check == CheckKind.TWOSIDED
    violation = verdict.violation
    assert (violation.receiver, violation.signal, violation.leaked) == (1, 0, [(2, 1)])
    assert (violation.m0, violation.m1) == (Fraction(0), Fraction(1, 4))


def test_public_prefix_supported_scheme_passes_two_sided(instance_c):
    scheme = PrefixScheme(n=3, mu0=("5/8", 0, "1/4", "1/8"), mu1=(0, 0, "1/2", "1/2")).to_scheme()
    assert check_public(instance_c, scheme).ok
    assert check_two_sided(instance_c, scheme, 2).ok


def _distinct_thresholds(rng, n):
    """theta strictly decreasing inside (0, 1)."""
    values = sorted((int(v) for v in rng.choice(np.arange(1, 8), size=n, replace=False)), reverse=True)
    return Instance(
        n=n,
        lam=Fraction(1, 2),
        theta=tuple(Fraction(v, 8) for v in values),
        utility=AdditiveUtility(n=n, weights=(1,) * n),
    )


def _random_scheme(rng, n, prefix_only):
    profiles = [prefix_profile(n, j) for j in range(n + 1)] if prefix_only else list(binary_profiles(n))
    distributions = []
    for _ in range(2):
        weights = rng.integers(0, 3, size=len(profiles))
        weights[int(rng.integers(len(profiles)))] += 1
        total = int(weights.sum())
        distributions.append({profile: Fraction(int(w), total) for profile, w in zip(profiles, weights) if w})
    return SignalingScheme.binary(n, distributions[0], distributions[1])


def test_two_sided_pass_means_public_prefix_scheme():
    """With strictly decreasing theta, passing two-sided at k = 2 forces prefix support and public persuasiveness."""
    rng = np.random.default_rng(43)
    for index in range(40):
        n = 3 + index % 2
        instance = _distinct_thresholds(rng, n)
        candidates = [full_information(instance)] + [public_prefix(instance, i) for i in range(1, n + 1)]
        candidates += [_random_scheme(rng, n, prefix_only=bool(j % 2)) for j in range(6)]
        passed = 0
        for scheme in candidates:
            if not check_two_sided(instance, scheme, 2).ok:
                continue
            passed += 1
            assert all(prefix_length(profile) >= 0 for profile in (*scheme.mu0, *scheme.mu1))
            assert check_public(instance, scheme).ok
        assert passed >= n + 1


def test_k_worst_case_verdicts_nest():
    """Passing at k means passing at every smaller k."""
    rng = np.random.default_rng(47)
    for _ in range(20):
        instance = random_instance(rng, 4)
        base = optimal_private(instance)
        schemes = [
            base.to_scheme(),
            subsample_half(instance, base, 1),
            subsample_half(instance, base, 2),
            _random_scheme(rng, 4, prefix_only=True),
            _random_scheme(rng, 4, prefix_only=False),
        ]
        for scheme in schemes:
            verdicts = [check_k_worst_case(instance, scheme, k).ok for k in range(4)]
            assert verdicts == sorted(verdicts, reverse=True)


def test_verdicts_ignore_the_scale_of_v(instance_c, private_c):
    scaled = Instance(n=3, lam=instance_c.lam, theta=instance_c.theta, utility=PrefixUtility(n=3, weights=(0, 3, 6, 9)))
    schemes = [
        private_c,
        subsample_half(instance_c, optimal_private(instance_c), 1),
        public_prefix(instance_c, 2),
        full_information(instance_c),
    ]
    for scheme in schemes:
        assert check_private(scaled, scheme) == check_private(instance_c, scheme)
        for k in range(3):
            assert check_k_worst_case(scaled, scheme, k) == check_k_worst_case(instance_c, scheme, k)
            assert check_two_sided(scaled, scheme, k) == check_two_sided(instance_c, scheme, k)
        assert worst_case_downstream(scaled, scheme, 1) == 3 * worst_case_downstream(instance_c, scheme, 1)


def test_checks_refuse_bad_input(instance_c, private_c):
    with pytest.raises(InputError):
        check_k_worst_case(instance_c, private_c, 3)
    with pytest.raises(UnsupportedError):
        check_private(instance_c, load_appendix_c_scheme("three_signal"))
    with pytest.raises(InputError):
        run_check(CheckKind.KWORST, instance_c, private_c)


def test_run_check_dispatch(instance_c, private_c):
    assert run_check(CheckKind.PRIVATE, instance_c, private_c).ok
    assert not run_check(CheckKind.KWORST, instance_c, private_c, k=1).ok
    assert run_check(CheckKind.TWOSIDED, instance_c, private_c, k=0).ok


def test_optimal_private_is_fragile_unless_thresholds_agree():
    """One leaked signal breaks the optimal private scheme whenever theta varies."""
    for seed in range(25):
        instance = random_instance(np.random.default_rng(seed), 4)
        scheme = optimal_private(instance).to_scheme()
        robust = check_k_worst_case(instance, scheme, 1).ok
        assert robust == (len(set(instance.theta)) == 1)


# === Worst-case downstream ===

def test_worst_case_downstream(instance_c, private_c):
    """Under k = 0 only the private behavior matters."""
    assert worst_case_downstream(instance_c, private_c, 0) == Fraction(9, 4)
    assert worst_case_downstream(instance_c, public_prefix(instance_c, 3), 2) == Fraction(15, 8)


def test_worst_case_downstream_counts_only_robust_adopters(instance_c, private_c):
    """With one leak only the profile N keeps receiver 1 robust."""
    assert worst_case_downstream(instance_c, private_c, 1) == Fraction(15, 8)


# === Externality ===

def test_externality_private_scheme(externality):
    instance, mode = externality
    epsilon = Fraction(1, 100)
    scheme = PrefixScheme(n=3, mu0=(0, 1 - epsilon, 0, epsilon), mu1=(0, 0, 0, 1)).to_scheme()
    assert check_private(instance, scheme, mode).ok
    assert not check_k_worst_case(instance, scheme, 1, mode).ok
    assert worst_case_downstream(instance, scheme, 0, mode) == 1


def test_externality_full_information(externality):
    instance, mode = externality
    scheme = full_information(instance)
    assert check_k_worst_case(instance, scheme, 1, mode).ok
    assert worst_case_downstream(instance, scheme, 1, mode) == Fraction(1, 100)
