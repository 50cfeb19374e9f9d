import cmath
import math

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from cassis.scalars import (
    Cyclo,
    cyclotomic_polynomial,
    make_cyclo,
    scalar_abs,
    scalar_from_json,
    scalar_from_string,
    scalar_is_zero,
    scalar_to_json,
    scalar_to_string,
    zeta,
)


def test_cyclotomic_polynomials_small():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(2) == (1, 1)
    assert cyclotomic_polynomial(3) == (1, 1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(6) == (1, -1, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)


@pytest.mark.parametrize("p", [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12])
def test_zeta_has_exact_order(p):
    z = zeta(p)
    power = z
    for _ in range(p - 1):
        assert power != 1
        power = power * z
    assert power == 1


@pytest.mark.parametrize("p", [3, 4, 5, 8, 12])
def test_zeta_matches_complex_embedding(p):
    for j in range(p):
        exact = zeta(p, j)
        want = cmath.exp(2j * math.pi * j / p)
        got = complex(exact) if isinstance(exact, Cyclo) else complex(float(exact))
        assert abs(got - want) < 1e-12


def test_sum_of_all_roots_vanishes():
    for p in [2, 3, 5, 6, 8, 12]:
        total = sum(zeta(p, j) for j in range(p))
        assert total == 0


def test_demotion_to_rational():
    z = zeta(4)  # i
    assert z * z == -1
    assert isinstance(z * z, mpq)
    assert z**4 == 1
    v = zeta(3) + zeta(3, 2)  # zeta + zeta^2 = -1
    assert v == mpq(-1)


def test_mixed_order_arithmetic():
    # zeta_6 = -zeta_3^2, an identity across orders
    assert zeta(6) == -zeta(3, 2)
    assert zeta(6) * zeta(6) == zeta(3)
    assert zeta(4) * zeta(4) * zeta(3) == -zeta(3)


def test_division_and_inverse():
    z = zeta(5)
    w = (1 + z) / (1 + z)
    assert w == 1
    v = (3 * z + mpq(1, 2)) * (2 - z)
    assert v / (2 - z) == 3 * z + mpq(1, 2)
    with pytest.raises(ZeroDivisionError):
        z / 0


@given(st.integers(-30, 30), st.integers(1, 30), st.integers(-30, 30), st.integers(1, 30))
def test_field_axioms_sample(a, b, c, d):
    z = zeta(7)
    x = mpq(a, b) + mpq(c, d) * z
    y = mpq(c, d) - mpq(a, b) * z * z
    assert (x + y) - y == x
    if not scalar_is_zero(y):
        assert (x * y) / y == x


def test_string_roundtrip_rational():
    for s in ["3/4", "-2", "0", "7"]:
        v = scalar_from_string(s)
        assert scalar_from_string(scalar_to_string(v)) == v


def test_string_roundtrip_cyclotomic():
    v = make_cyclo(12, {0: mpq(1, 2), 5: mpq(-3, 7)})
    text = scalar_to_string(v)
    assert "ζ" in text
    back = scalar_from_string(text, root_order=12)
    assert back == v
    assert scalar_from_string("zeta^5", root_order=12) == zeta(12, 5)


def test_string_requires_order_for_zeta():
    with pytest.raises(ValueError):
        scalar_from_string("1/2*ζ^3")


def test_json_roundtrip_exact_and_float():
    v = mpq(-5, 3)
    assert scalar_from_json(scalar_to_json(v), "exact") == v
    z = complex(0.5, -0.25)
    got = scalar_from_json(scalar_to_json(z), "float")
    assert got == z
    gauss = scalar_from_json({"re": "1/2", "im": "1/3"}, "exact")
    assert abs(complex(gauss) - complex(0.5, 1 / 3)) < 1e-12


def test_scalar_abs():
    assert scalar_abs(mpq(-3, 4)) == 0.75
    assert abs(scalar_abs(zeta(7, 3)) - 1.0) < 1e-12
    assert scalar_abs(complex(3, 4)) == 5.0
