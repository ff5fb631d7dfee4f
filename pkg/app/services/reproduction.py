"""
Exact reproduction of the three-receiver separations: the private optimum,
the three-signal scheme under the cycle, the best two-signal scheme found by
brute force and the somewhat-indirect scheme under its mixture.
"""

import logging
from fractions import Fraction

from app.core.config import settings
from app.models.report import ReproductionCheck, ReproductionReport
from app.schemas.common import SearchMode
from app.services.bruteforce import bruteforce_optimal_responses
from app.services.constructors import load_appendix_c_scheme
from app.services.downstream import downstream_utility_fixed, downstream_utility_model
from app.services.instance_lab import appendix_c_cycle, appendix_c_instance, appendix_c_mixture
from app.services.lp_builders import opt_value
from app.utils.profiles import BINARY_ALPHABET
from app.utils.rationals import describe

logger = logging.getLogger(__name__)

EXPECTED = {
    "opt_private": Fraction(9, 4),
    "three_signal_cycle": Fraction(9, 4),
    "best_two_signal_bruteforce": Fraction(17, 8),
    "best_two_signal_cycle": Fraction(17, 8),
    "somewhat_indirect_mixture": Fraction(7, 4),
}


def reproduce_appendix_c(mode: SearchMode = SearchMode.PER_INFORMATION_SET) -> ReproductionReport:
    instance = appendix_c_instance()
    cycle = appendix_c_cycle()
    mixture_instance, mixture = appendix_c_mixture()

    values = {
        "opt_private": opt_value(instance, 0),
        "three_signal_cycle": downstream_utility_fixed(instance, load_appendix_c_scheme("three_signal"), cycle),
        "best_two_signal_bruteforce": bruteforce_optimal_responses(
            instance, (BINARY_ALPHABET,) * instance.n, cycle, mode
        ).value,
        "best_two_signal_cycle": downstream_utility_fixed(instance, load_appendix_c_scheme("best_two_signal"), cycle),
        "somewhat_indirect_mixture": downstream_utility_model(
            mixture_instance, load_appendix_c_scheme("somewhat_indirect"), mixture
        ),
    }
    checks = []
    for name, expected in EXPECTED.items():
        value = values[name]
        checks.append(ReproductionCheck(name=name, value=value, expected=expected, passed=value == expected))
        logger.info(f"{name}: {describe(value)} (expected {describe(expected)})")
    return ReproductionReport(tool_version=settings.TOOL_VERSION, checks=checks)
