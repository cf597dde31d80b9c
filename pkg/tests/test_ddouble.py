"""Double-double arithmetic against exact rational arithmetic."""

import math
import random
from fractions import Fraction

import pytest

from cantorpoly.ddouble import DoubleDouble

REL = Fraction(1, 2 ** 98)  # comfortably below the ~106-bit significand


def _rel_err(dd: DoubleDouble, exact: Fraction) -> Fraction:
    if exact == 0:
        return abs(dd.to_fraction())
    return abs(dd.to_fraction() - exact) / abs(exact)


def _random_dd(rng) -> tuple[DoubleDouble, Fraction]:
    fr = Fraction(rng.uniform(0.01, 2.0)) + Fraction(rng.uniform(0.0, 1e-18))
    return DoubleDouble.from_fraction(fr), fr


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_field_ops_match_fractions(seed):
    rng = random.Random(seed)
    for _ in range(200):
        x, fx = _random_dd(rng)
        y, fy = _random_dd(rng)
        assert _rel_err(x + y, fx + fy) < REL
        assert _rel_err(x - y, fx - fy) < REL
        assert _rel_err(x * y, fx * fy) < REL
        assert _rel_err(x / y, fx / fy) < REL


def test_mixed_float_operands():
    x = DoubleDouble.from_str("0.1")
    assert float(1.0 - x) == pytest.approx(0.9, abs=1e-16)
    assert _rel_err(1.0 - x, 1 - Fraction("1/10")) < REL
    assert _rel_err(2.0 * x, Fraction("2/10")) < REL
    assert _rel_err(x / 4.0, Fraction("1/40")) < REL


def test_sqrt_against_fractions():
    rng = random.Random(7)
    for _ in range(100):
        x, fx = _random_dd(rng)
        s = x.sqrt()
        assert abs(s.to_fraction() ** 2 - fx) / fx < REL
    assert float(DoubleDouble(0.0).sqrt()) == 0.0
    with pytest.raises(ValueError):
        DoubleDouble(-1.0).sqrt()


def test_from_str_exact_rounding():
    x = DoubleDouble.from_str("1/6")
    assert abs(x.to_fraction() - Fraction(1, 6)) < Fraction(1, 6) / 2 ** 105
    y = DoubleDouble.from_str("0.25")
    assert y.to_fraction() == Fraction(1, 4)
    z = DoubleDouble.from_str("1.5e-3")
    assert abs(z.to_fraction() - Fraction(3, 2000)) < Fraction(3, 2000) / 2 ** 105


def test_decimal_rendering_roundtrips():
    # 34 digits pin the value to a relative 1e-33; bit-exactness is not
    # achievable in any fixed digit count because lo may sit far below
    # ulp(hi)
    rng = random.Random(11)
    for _ in range(50):
        x, _ = _random_dd(rng)
        back = DoubleDouble.from_str(x.to_decimal_str(34))
        assert _rel_err(back, x.to_fraction()) < Fraction(1, 10 ** 32)


def test_comparisons_agree_with_fractions():
    a = DoubleDouble.from_str("1/6")
    b = DoubleDouble.from_str("0.16666666666666666")  # the nearest double
    assert (a < b) == (Fraction(1, 6) < Fraction(0.16666666666666666))
    assert a <= a and a >= a and a == a
    assert DoubleDouble(1.0) > 0.5
    assert DoubleDouble(0.5, -1e-20) < 0.5


def test_abs_neg_float_bool():
    x = DoubleDouble(-1.5, 1e-18)
    assert float(abs(x)) == pytest.approx(1.5)
    assert float(-x) == pytest.approx(1.5)
    assert bool(x) and not bool(DoubleDouble(0.0))
    assert math.isclose(float(x), -1.5, rel_tol=1e-15)


def test_immutable():
    x = DoubleDouble(1.0)
    with pytest.raises(AttributeError):
        x.hi = 2.0
