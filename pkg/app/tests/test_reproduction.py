"""
End-to-end reproduction of the three-receiver separations.
"""
from fractions import Fraction

from app.services.reproduction import EXPECTED, reproduce_appendix_c


def test_three_receiver_values():
    """Exhaustive: 4096 response tables under the cycle."""
    report = reproduce_appendix_c()
    values = {check.name: check.value for check in report.checks}
    assert set(values) == set(EXPECTED)
    assert values["opt_private"] == Fraction(9, 4)
    assert values["best_two_signal_bruteforce"] == Fraction(17, 8)
    assert values["somewhat_indirect_mixture"] == Fraction(7, 4)
    assert report.ok
