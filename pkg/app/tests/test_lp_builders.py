"""
Tests for the persuasion LP and the best-response-constrained programs.
"""
from fractions import Fraction

import pytest

from app.core.errors import InputError, SizeLimitError
from app.models.instance import Instance
from app.models.leakage import LeakagePattern
from app.models.utility import AdditiveUtility
from app.schemas.common import LpStatus
from app.services.constructors import optimal_private, optimal_private_value
from app.services.lp_builders import (
    build_br_constrained_lp,
    build_persuasive_lp,
    direct_responses,
    omega0_part,
    opt_value,
    reachable_observations,
    scheme_from_solution,
    scheme_vector,
)
from app.services.persuasiveness import check_k_worst_case
from app.services.simplex import solve


def test_private_lp_matches_closed_form(instance_c):
    assert opt_value(instance_c, 0) == Fraction(9, 4) == optimal_private_value(instance_c)


def test_lp_shape(instance_c):
    """Obedience rows, 12 single-leak rows at k = 1, then two normalizations."""
    private = build_persuasive_lp(instance_c, 0)
    leaky = build_persuasive_lp(instance_c, 1)
    assert private.num_vars == 16
    assert len(private.constraints) == 8
    assert len(leaky.constraints) == 20
    assert private.var_names[0] == "mu0[000]"
    assert private.var_names[15] == "mu1[111]"
    assert private.constraints[0].name == "obey[1]=1"


def test_closed_form_scheme_is_lp_feasible(instance_c, private_c):
    lp = build_persuasive_lp(instance_c, 0)
    vector = scheme_vector(private_c)
    assert lp.is_feasible(vector)
    assert lp.value_of(vector) == Fraction(9, 4)


def test_lp_optimum_is_k_worst_case_persuasive(instance_c):
    for k in range(instance_c.n):
        solution = solve(build_persuasive_lp(instance_c, k))
        assert solution.status == LpStatus.OPTIMAL
        scheme = scheme_from_solution(instance_c, solution)
        assert check_k_worst_case(instance_c, scheme, k).ok


def test_optimum_decreases_with_k(instance_c):
    values = [opt_value(instance_c, k) for k in range(instance_c.n)]
    assert values == sorted(values, reverse=True)
    assert values[-1] >= Fraction(15, 8)


def test_k_out_of_range(instance_c):
    with pytest.raises(InputError):
        build_persuasive_lp(instance_c, 3)


def test_lp_size_refusal():
    """n = 13 exceeds the table cap."""
    n = 13
    instance = Instance(n=n, lam=Fraction(1, 2), theta=(Fraction(0),) * n, utility=AdditiveUtility(n=n, weights=(1,) * n))
    with pytest.raises(SizeLimitError) as excinfo:
        build_persuasive_lp(instance, 0)
    assert excinfo.value.estimate == 2 ** 14


def test_omega0_part(instance_c, private_c):
    """(1 - lambda) * (1/4) * (1 + 2 + 3)."""
    assert omega0_part(instance_c, private_c) == Fraction(3, 4)


def test_reachable_observations(instance_c, cycle_c):
    observations = reachable_observations(instance_c, [2, 2, 2], cycle_c)
    assert len(observations) == 12
    assert observations[0].receiver == 1
    assert observations[0].leaked == ((2, 0),)


def test_obedient_responses_reproduce_private_optimum(instance_c):
    """With no leakage the obedient table's LP is the private LP."""
    pattern = LeakagePattern.empty(3)
    lp = build_br_constrained_lp(instance_c, [2, 2, 2], pattern, direct_responses(instance_c, pattern))
    assert solve(lp).value == Fraction(9, 4)


def test_br_lp_needs_every_observation(instance_c, cycle_c):
    responses = direct_responses(instance_c, cycle_c)
    responses.pop(next(iter(responses)))
    with pytest.raises(InputError):
        build_br_constrained_lp(instance_c, [2, 2, 2], cycle_c, responses)


def test_public_lp_keeps_optimal_private_when_theta_constant():
    """With equal thresholds the private optimum is already public."""
    instance = Instance(
        n=3, lam=Fraction(1, 2), theta=(Fraction(1, 2),) * 3, utility=AdditiveUtility(n=3, weights=(1, 1, 1))
    )
    assert check_k_worst_case(instance, optimal_private(instance).to_scheme(), 2).ok
    assert opt_value(instance, 2) == optimal_private_value(instance)
