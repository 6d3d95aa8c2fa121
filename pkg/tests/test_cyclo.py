from fractions import Fraction

import cmath
import pytest
from hypothesis import given, strategies as st

from klledger.cyclo import (
    CycloScalar,
    IntCyclotomicRing,
    NotFinite,
    cyclotomic_polynomial,
    euler_phi,
    mobius,
    mult_order,
    root_of_unity,
)
from klledger.errors import DivisionByZero, ZeroInput

orders = st.sampled_from([1, 2, 3, 4, 5, 6, 8, 9, 10, 12, 15])


@st.composite
def scalars(draw, order=None):
    n = order or draw(orders)
    coeffs = draw(st.lists(st.fractions(max_denominator=6, min_value=-5, max_value=5), min_size=euler_phi(n), max_size=euler_phi(n)))
    return CycloScalar(n, coeffs)


def close(a: CycloScalar, z: complex) -> bool:
    return abs(a.to_complex() - z) < 1e-9


def test_phi_and_mobius_small_values():
    assert [euler_phi(n) for n in range(1, 13)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(6) == (1, -1, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 15, 20])
def test_sum_of_primitive_roots_is_mobius(n):
    total = sum((CycloScalar.root(k, n) for k in range(n) if Fraction(k, n).denominator == n), CycloScalar.from_rational(0))
    assert total == mobius(n)


def test_root_of_unity_values():
    i = root_of_unity(Fraction(1, 4))
    assert i * i == -1
    assert root_of_unity(Fraction(1, 2)) == -1
    assert root_of_unity(Fraction(3, 2)) == -1
    assert close(root_of_unity(Fraction(1, 3)), cmath.exp(2j * cmath.pi / 3))


def test_embedding_preserves_value_and_hash():
    a = root_of_unity(Fraction(1, 3))
    b = a.embed(12)
    assert a == b
    assert hash(a) == hash(b)
    assert hash(CycloScalar.from_rational(Fraction(3, 2), 5)) == hash(Fraction(3, 2))


def test_mult_order():
    assert mult_order(root_of_unity(Fraction(1, 6))) == 6
    assert mult_order(CycloScalar.from_rational(-1)) == 2
    assert mult_order(CycloScalar.from_rational(2)) is NotFinite
    assert mult_order(1 + root_of_unity(Fraction(1, 5))) is NotFinite
    with pytest.raises(ZeroInput):
        mult_order(CycloScalar.from_rational(0, 4))


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        root_of_unity(Fraction(1, 5)) / CycloScalar.from_rational(0, 5)
    with pytest.raises(ZeroDivisionError):
        CycloScalar.from_rational(0, 3).inverse()


def test_as_root_of_unity_and_json_roundtrip():
    a = root_of_unity(Fraction(5, 12))
    assert a.as_root_of_unity() == Fraction(5, 12)
    assert CycloScalar.from_json(a.to_json()) == a
    b = 1 + a
    assert b.as_root_of_unity() is None
    assert CycloScalar.from_json(b.to_json()) == b


@given(scalars(), scalars())
def test_ring_operations_match_complex_numbers(a, b):
    assert close(a + b, a.to_complex() + b.to_complex())
    assert close(a * b, a.to_complex() * b.to_complex())
    assert close(a - b, a.to_complex() - b.to_complex())


@given(scalars())
def test_inverse_and_conjugate(a):
    if a.is_zero():
        return
    assert a * a.inverse() == 1
    assert close(a.conjugate(), a.to_complex().conjugate())


@given(scalars(order=12), scalars(order=12), scalars(order=12))
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@given(scalars(), scalars())
def test_equal_values_hash_equal(a, b):
    if a == b:
        assert hash(a) == hash(b)


@given(st.integers(-30, 30), st.sampled_from([3, 5, 8, 12]))
def test_power_laws(k, n):
    z = CycloScalar.root(1, n)
    assert z**k == CycloScalar.root(k, n)
    assert z**n == 1


@given(scalars(order=15), scalars(order=15))
def test_int_ring_agrees_with_scalars(a, b):
    ring = IntCyclotomicRing(15)
    den = 1
    for c in a.coeffs + b.coeffs:
        den = den * c.denominator
    ai = ring.from_scalar(a * den)
    bi = ring.from_scalar(b * den)
    assert ring.to_scalar(ring.mul(ai, bi)) == a * b * den * den
    assert ring.to_scalar(ring.add(ai, bi)) == (a + b) * den
    assert ring.to_scalar(ring.sub(ai, ring.neg(bi))) == (a + b) * den
    assert ring.to_scalar(ring.root(7)) == CycloScalar.root(7, 15)
