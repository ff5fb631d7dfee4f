"""
Tests for the scheme constructors.
"""
from fractions import Fraction

import numpy as np
import pytest

from app.core.errors import InputError, PreconditionError
from app.models.instance import Instance
from app.models.scheme import MaskMatchParams, PrefixScheme
from app.models.utility import AdditiveUtility, XosUtility
from app.services.constructors import (
    SCHEME_NAMES,
    appendix_c_schemes,
    best_public_prefix,
    best_public_prefix_index,
    construct,
    full_information,
    mask_match,
    mask_match_general,
    mask_match_properties,
    mask_match_star,
    mask_remove,
    mask_remove_preservation_probability,
    mask_remove_window,
    omega0_private_value,
    optimal_private,
    optimal_private_value,
    public_prefix,
    single_receiver_optimum,
    subsample_half,
    subsample_rate,
    subsample_rate_sample,
    subsampled_value,
    to_prefix_scheme,
)
from app.services.downstream import no_leak_utility
from app.services.instance_lab import random_instance, random_utility
from app.services.lp_builders import omega0_part
from app.services.persuasiveness import check_k_worst_case, check_private, check_public
from app.utils.rng import generator


# === Closed forms ===

def test_optimal_private(instance_c):
    scheme = optimal_private(instance_c)
    assert scheme.mu0 == (Fraction(1, 4),) * 4
    assert scheme.mu1 == (0, 0, 0, 1)
    assert optimal_private_value(instance_c) == Fraction(9, 4)
    assert omega0_private_value(instance_c) == Fraction(3, 4)
    assert no_leak_utility(instance_c, scheme.to_scheme()) == Fraction(9, 4)


def test_optimal_private_value_matches_lp_on_random_instances():
    """The prefix closed form is the private optimum for supermodular utilities."""
    from app.services.lp_builders import opt_value

    rng = np.random.default_rng(11)
    for index in range(12):
        n = 2 + index % 3
        instance = random_instance(rng, n, "supermodular" if index % 2 else "prefix")
        assert opt_value(instance, 0) == optimal_private_value(instance)


def test_single_receiver_optimum():
    instance = Instance(n=1, lam=Fraction(1, 3), theta=(Fraction(1, 2),), utility=AdditiveUtility(n=1, weights=(2,)))
    assert single_receiver_optimum(instance) == Fraction(4, 3)
    assert single_receiver_optimum(instance) == optimal_private_value(instance)


def test_full_information(instance_c):
    scheme = full_information(instance_c)
    assert scheme.mu0 == {(0, 0, 0): 1}
    assert no_leak_utility(instance_c, scheme) == Fraction(3, 2)


def test_public_prefix(instance_c):
    scheme = public_prefix(instance_c, 3)
    assert scheme.mu0 == {(0, 0, 0): Fraction(3, 4), (1, 1, 1): Fraction(1, 4)}
    assert no_leak_utility(instance_c, scheme) == Fraction(15, 8)
    with pytest.raises(InputError):
        public_prefix(instance_c, 4)


def test_best_public_prefix_keeps_a_share_of_omega0():
    """omega0 of the chosen prefix is at least 1/n of the private omega0."""
    rng = np.random.default_rng(5)
    for _ in range(15):
        instance = random_instance(rng, 4)
        scheme = best_public_prefix(instance)
        assert check_public(instance, scheme).ok
        assert omega0_part(instance, scheme) * instance.n >= omega0_private_value(instance)


def test_best_public_prefix_index(instance_c):
    assert best_public_prefix_index(instance_c) == 3


# === Subsampling ===

def test_subsample_half_masses(instance_c):
    scheme = subsample_half(instance_c, optimal_private(instance_c), 1)
    assert scheme.mu0 == {
        (0, 0, 0): Fraction(13, 16),
        (1, 0, 0): Fraction(1, 16),
        (1, 1, 0): Fraction(1, 16),
        (1, 1, 1): Fraction(1, 16),
    }
    assert scheme.mu1 == {profile: Fraction(1, 8) for profile in scheme.mu1}
    assert len(scheme.mu1) == 8


def test_subsampling_is_k_worst_case_persuasive():
    """Both subsampling schemes survive k leaks on 200 random instances, n <= 6, k <= 2."""
    rng = np.random.default_rng(17)
    for index in range(200):
        n = 3 + index % 4
        k = 1 + index % 2
        instance = random_instance(rng, n)
        base = optimal_private(instance)
        half = subsample_half(instance, base, k)
        rate = subsample_rate(instance, base, k, Fraction(1, 2) if k == 1 else Fraction(1, k))
        assert check_k_worst_case(instance, half, k).ok
        assert check_k_worst_case(instance, rate, k).ok
        # the half-rate scheme keeps exactly a 2^-(k+1) share of the w0 utility
        assert omega0_part(instance, half) == omega0_private_value(instance) / 2 ** (k + 1)


def test_subsample_rate_keeps_share_on_xos():
    """(1 - 1/k)^k (1/k) of the private w0 utility survives on XOS utilities."""
    rng = np.random.default_rng(23)
    for family in ("xos", "additive", "anonymous"):
        for _ in range(4):
            instance = random_instance(rng, 4, family)
            k = 2
            gamma = Fraction(1, k)
            scheme = subsample_rate(instance, optimal_private(instance), k, gamma)
            bound = (1 - gamma) ** k * gamma * omega0_private_value(instance)
            assert omega0_part(instance, scheme) >= bound


def test_subsampled_value_on_xos():
    utility = XosUtility(n=3, clauses=((1, 1, 0), (0, 0, 3)))
    assert subsampled_value(utility, 0b111, Fraction(1)) == 3
    assert subsampled_value(utility, 0b111, Fraction(0)) == 0
    half = subsampled_value(utility, 0b111, Fraction(1, 2))
    assert half >= Fraction(1, 2) * utility.value(0b111)
    with pytest.raises(InputError):
        subsampled_value(utility, 0b1, Fraction(2))


@pytest.mark.parametrize("gamma", [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)])
def test_subsampled_value_keeps_gamma_share_on_xos(gamma):
    """E[V(S')] >= gamma V(S) for every S on 20 random XOS utilities, n <= 8."""
    rng = np.random.default_rng(29)
    for index in range(20):
        n = 2 + index % 7
        utility = random_utility(rng, n, "xos")
        for mask in range(1 << n):
            assert subsampled_value(utility, mask, gamma) >= gamma * utility.value(mask)


def test_subsample_preconditions(instance_c):
    with pytest.raises(PreconditionError):
        subsample_half(instance_c, PrefixScheme(n=3, mu0=(0, 0, 0, 1), mu1=(0, 0, 0, 1)), 1)
    with pytest.raises(PreconditionError):
        subsample_half(instance_c, public_prefix(instance_c, 1), 1)
    with pytest.raises(InputError):
        subsample_rate(instance_c, optimal_private(instance_c), 1, Fraction(0))
    with pytest.raises(InputError):
        subsample_rate(instance_c, optimal_private(instance_c), 1, Fraction(1))


def test_subsample_rate_sample_lies_in_support(instance_c):
    base = optimal_private(instance_c)
    scheme = subsample_rate(instance_c, base, 1, Fraction(1, 2))
    for index in range(30):
        assert subsample_rate_sample(base, Fraction(1, 2), 1, generator(4, index)) in scheme.mu0


# === Masking ===

def test_mask_remove(instance_c):
    scheme = mask_remove(instance_c, 1, 1)
    assert scheme.mu1 == (0, 0, 0, 1)
    assert scheme.mu0 == optimal_private(instance_c).mu0
    narrow = mask_remove(instance_c, 2, 1)
    assert narrow.mu0 == (Fraction(1, 2), 0, Fraction(1, 4), Fraction(1, 4))
    assert check_private(instance_c, narrow.to_scheme()).ok
    with pytest.raises(InputError):
        mask_remove(instance_c, 1, 2)


def test_mask_remove_window_probability():
    assert mask_remove_window(8, 3, 2) == 5
    assert mask_remove_window(8, 7, 2) == 2
    assert mask_remove_preservation_probability(8, 2, 5) == Fraction(3, 28)
    assert mask_remove_preservation_probability(4, 1, 4) == 0


def test_mask_match_guarantees():
    """Both masking guarantees hold on random instances whenever theta_m > 0."""
    rng = np.random.default_rng(29)
    checked = 0
    for _ in range(30):
        instance = random_instance(rng, 5)
        m = instance.n // 2 + 1
        if instance.theta_at(m) == 0:
            continue
        scheme = mask_match_star(instance)
        assert mask_match_properties(instance, scheme, m) == (True, True)
        assert check_private(instance, scheme.to_scheme()).ok
        checked += 1
    assert checked > 0


def test_mask_match_parameters(instance_c):
    scheme = mask_match(instance_c, MaskMatchParams(c0=Fraction(1, 2), c1=Fraction(1, 2), m=2))
    assert scheme.mu0 == (Fraction(5, 8), Fraction(1, 8), Fraction(1, 8), Fraction(1, 8))
    assert scheme.mu1 == (0, 0, Fraction(1, 4), Fraction(3, 4))
    assert mask_match_general(instance_c).mu1 == scheme.mu1
    with pytest.raises(ValueError):
        MaskMatchParams(c0=Fraction(3, 4), c1=Fraction(1, 2), m=1)


def test_mask_match_needs_positive_cutoff_threshold():
    instance = Instance(
        n=2, lam=Fraction(1, 2), theta=(Fraction(1, 2), Fraction(0)), utility=AdditiveUtility(n=2, weights=(1, 1))
    )
    with pytest.raises(InputError):
        mask_match_star(instance)


# === Hand-built schemes and dispatch ===

def test_appendix_c_schemes_load():
    schemes = appendix_c_schemes()
    assert set(schemes) == {"somewhat_indirect", "three_signal", "best_two_signal"}
    assert schemes["three_signal"].sizes == (3, 2, 3)
    assert schemes["best_two_signal"].is_binary is False


def test_to_prefix_scheme_round_trip(instance_c):
    prefix = optimal_private(instance_c)
    assert to_prefix_scheme(prefix.to_scheme()) == prefix
    with pytest.raises(InputError):
        to_prefix_scheme(subsample_half(instance_c, prefix, 1))


@pytest.mark.parametrize("name", [name for name in SCHEME_NAMES if name not in ("public-prefix", "mask-remove", "mask-match")])
def test_construct_by_name(instance_c, name):
    scheme = construct(name, instance_c, k=1)
    assert scheme.n == 3


def test_construct_reports_missing_parameters(instance_c):
    with pytest.raises(InputError):
        construct("public-prefix", instance_c)
    with pytest.raises(InputError):
        construct("no-such-scheme", instance_c)
    assert construct("mask-match", instance_c, m=2).mu1[(1, 1, 1)] == Fraction(3, 4)


def test_construct_subsample_rate_default_gamma(instance_c):
    """gamma = 1/k, and 1/2 at k = 1."""
    base = optimal_private(instance_c)
    assert construct("subsample-rate", instance_c, k=1) == subsample_rate(instance_c, base, 1, Fraction(1, 2))
    assert construct("subsample-rate", instance_c, k=2) == subsample_rate(instance_c, base, 2, Fraction(1, 2))
    with pytest.raises(InputError):
        construct("subsample-rate", instance_c, k=1, gamma=Fraction(1))
