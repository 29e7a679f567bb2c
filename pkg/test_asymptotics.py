"""
Test asymptotic equivalents, deviation bounds and probability reports
"""

import math

import numpy as np
import pytest

from counting.asymptotics import (
    FORMULAS, asymp_coefficient, bender_diagnostic, bender_from_tables, connectivity_report,
    deviation_exponent, exact_log_value, expected_type, h_bounds, probability_reports, ratio,
    ratio_table,
)
from counting.species import TAU2, TAU3, TAU3_FI, log_expansion_estimate
from counting.tables import CountingEngine
from psl2.exceptions import InvalidSizeError, UnknownFamilyError


@pytest.fixture(scope="module")
def engine():
    return CountingEngine()


def test_formulas_match_species_expansion():
    """Test that the structure equivalents agree with the generic expansion"""
    for family, spec in (("t2", TAU2), ("t3", TAU3), ("t3fi", TAU3_FI)):
        for n in (50, 400):
            assert asymp_coefficient(family, n) == pytest.approx(log_expansion_estimate(spec, n), abs=1e-9)


def test_formula_domains():
    """Test periodic families and unknown names"""
    assert asymp_coefficient("t20", 8) > -math.inf
    with pytest.raises(InvalidSizeError):
        asymp_coefficient("t20", 7)
    with pytest.raises(InvalidSizeError):
        asymp_coefficient("hfrfi", 12 + 1)
    with pytest.raises(UnknownFamilyError):
        asymp_coefficient("torsion", 10)


def test_exact_log_value(engine):
    """Test the factorial scaling of the exact side"""
    assert exact_log_value(engine, "t2", 7) == pytest.approx(math.log(232) - math.lgamma(8))
    assert exact_log_value(engine, "h", 6) == pytest.approx(math.log(167))
    assert exact_log_value(engine, "hfrfi", 12) == pytest.approx(math.log(60))


def test_free_finite_index_formula(engine):
    """Test the free finite index equivalent in closed form"""
    h = 6
    expected = math.log(6 * h) - 0.5 * math.log(2 * math.pi * h) + h * math.log(h) - (1 - math.log(6)) * h
    assert asymp_coefficient("hfrfi", 6 * h) == pytest.approx(expected)
    assert 0.9 <= ratio(engine, "hfrfi", 36) <= 1.0


def test_ratios_moderate(engine):
    """Test exact over asymptotic at moderate sizes"""
    for family in ("t2", "t3", "t3fi", "gpr_tilde"):
        assert 0.8 <= ratio(engine, family, 200) <= 1.25


@pytest.mark.slow
@pytest.mark.parametrize("family,at_500", [
    ("t2", 1.0127), ("t3", 1.0465), ("t3fi", 0.9839), ("gpr_tilde", 1.0599),
])
def test_ratios_converge(engine, family, at_500):
    """Test the ratio windows at 500 and 1000 and the approach to 1"""
    r500 = ratio(engine, family, 500)
    r1000 = ratio(engine, family, 1000)
    assert r500 == pytest.approx(at_500, abs=5e-3)
    assert 0.8 <= r1000 <= 1.25
    assert abs(r1000 - 1) < abs(r500 - 1)


def test_ratio_table(engine):
    """Test that the table skips sizes outside a formula's domain"""
    frame = ratio_table(engine, "t20", range(10, 15))
    assert list(frame.columns) == ["n", "log_exact", "log_asymptotic", "ratio"]
    assert list(frame["n"]) == [10, 12, 14]
    assert np.allclose(np.exp(frame["log_exact"] - frame["log_asymptotic"]), frame["ratio"])


def test_h_bounds():
    """Test that the two bounds differ by a factor 2"""
    lower, upper = h_bounds(100)
    assert upper - lower == pytest.approx(math.log(2))
    assert "h" in FORMULAS and FORMULAS["h"].scale == "count"


def test_expected_type():
    """Test the leading-order predictions"""
    t = expected_type("all", 1000)
    assert t.l2 == pytest.approx(math.sqrt(1000))
    assert t.l3 == pytest.approx(10)
    assert t.k3 == pytest.approx(100)
    free = expected_type("free", 1000)
    assert free.l2 == free.l3 == 0
    assert free.r == pytest.approx((1000 - 100) / 6)
    assert expected_type("finite_index", 64) == expected_type("fi", 64)
    with pytest.raises(UnknownFamilyError):
        expected_type("frfi", 12)


def test_deviation_exponent():
    """Test the lower deviation of fixed points"""
    bound = deviation_exponent("all", "l2", "lower", 0.5, 10_000)
    assert bound.f == pytest.approx(-0.1534, abs=1e-4)
    assert bound.scale == pytest.approx(100)
    assert bound.log_bound == pytest.approx(-15.34, abs=0.01)
    assert bound.gamma == pytest.approx(math.exp(bound.f))
    assert bound.thresholds == (1.0, 1.0)
    assert set(bound.to_dict()) >= {"family", "statistic", "side", "r", "f", "gamma", "scale"}


def test_deviation_exponent_free():
    """Test isolated b-edges in loop-free graphs"""
    bound = deviation_exponent("free", "k3", "upper", 2.0, 1000)
    assert bound.f < 0
    assert bound.scale == pytest.approx(100)


def test_deviation_exponent_errors():
    """Test out-of-range ratios and unknown statistics"""
    with pytest.raises(ValueError):
        deviation_exponent("all", "l2", "lower", 1.5, 100)
    with pytest.raises(ValueError):
        deviation_exponent("all", "l2", "upper", 0.5, 100)
    with pytest.raises(ValueError):
        deviation_exponent("all", "l2", "sideways", 0.5, 100)
    with pytest.raises(UnknownFamilyError):
        deviation_exponent("free", "l2", "lower", 0.5, 100)


def test_bender_truncation(engine):
    """Test the transfer coefficients and the one-term truncation"""
    report = bender_diagnostic(engine, "gpr", 30, 3)
    # A_1 = 1, A_2 = 6 / 2!
    assert report.coefficients == [1, -1, -2]
    one_term = bender_diagnostic(engine, "gpr", 30, 1)
    assert one_term.truncation == pytest.approx(engine.gpr_tilde(30)[30] / math.factorial(30))
    assert one_term.exact == pytest.approx(engine.gpr(30)[30] / math.factorial(30))
    assert report.to_dict()["coefficients"] == ["1", "-1", "-2"]


def test_bender_exact_for_polynomial_log():
    """Test a class whose connected part is a polynomial"""
    tilde = [0, 1, 2, 4, 10, 26, 76, 232, 764]
    connected = [0, 1, 1, 0, 0, 0, 0, 0, 0]
    report = bender_from_tables(tilde, connected, 8, 2)
    assert report.exact == 0
    assert math.isfinite(report.normalized_residual)


def test_bender_errors(engine):
    """Test argument checks"""
    with pytest.raises(ValueError):
        bender_diagnostic(engine, "gpr", 30, 5)
    with pytest.raises(InvalidSizeError):
        bender_diagnostic(engine, "gpr", 3, 3)
    with pytest.raises(UnknownFamilyError):
        bender_diagnostic(engine, "t2", 30, 2)


def test_probability_reports(engine):
    """Test exact proportions at size 6"""
    frame = probability_reports(engine, [5, 6])
    row = frame.set_index("n").loc[6]
    assert row["fi"] == pytest.approx(22 / 167)
    assert row["free"] == pytest.approx(17 / 167)
    assert row["free_not_cr"] == pytest.approx(4 / 17)
    assert row["frfi_in_fi"] == pytest.approx(5 / 22)
    assert np.isnan(frame.set_index("n").loc[5, "frfi_in_fi"])


def test_connectivity_report(engine):
    """Test exact p_n beside its prediction"""
    frame = connectivity_report(engine, [2, 6])
    assert list(frame["p"]) == pytest.approx([5 / 6, 15120 / 49476])
    assert frame["prediction"].iloc[1] == pytest.approx(1 - 6 ** (-1 / 6))
    assert frame["scaled_gap"].iloc[0] == pytest.approx((1 / 6) * 2 ** (1 / 6))
    assert connectivity_report(engine, []).empty
