"""Exact coefficient arithmetic: ring axioms, closure, zero handling."""

import random
from fractions import Fraction

import pytest

from dipoleft.algebra import Coefficient, Expression, ExpressionError, Term, canonicalize

NAMES = ["e", "alpha", "m", "thetaF"]
LOGS = ["log(4pi)", "log(Lambda/m)"]


def random_coefficient(rng: random.Random) -> Coefficient:
    c = Coefficient(
        re=Fraction(rng.randint(-6, 6), rng.randint(1, 7)),
        im=Fraction(rng.randint(-6, 6), rng.randint(1, 7)),
    )
    for name in rng.sample(NAMES, rng.randint(0, 2)):
        c = c.with_consts(**{name: rng.randint(-2, 2)})
    if rng.random() < 0.3:
        c = c.with_log(rng.choice(LOGS))
    if rng.random() < 0.3:
        c = c.with_eps(rng.randint(-1, 1))
    return c


def as_expr(c: Coefficient) -> Expression:
    return Expression.scalar(c)


def test_ring_axioms_on_random_triples():
    rng = random.Random(20240817)
    for _ in range(1000):
        a, b, c = (as_expr(random_coefficient(rng)) for _ in range(3))
        assert canonicalize((a + b) + c) == canonicalize(a + (b + c))
        assert canonicalize((a * b) * c) == canonicalize(a * (b * c))
        assert canonicalize(a * (b + c)) == canonicalize(a * b + a * c)
        assert canonicalize(a * b) == canonicalize(b * a)


def test_zero_coefficient_deletes_term():
    expr = Expression.of(Term(Coefficient.zero()), Term(Coefficient.one()))
    assert len(canonicalize(expr).terms) == 1


def test_addition_requires_matching_monomial():
    a = Coefficient.monomial(1, 1, e=1)
    b = Coefficient.monomial(1, 1, m=1)
    with pytest.raises(ExpressionError):
        a.plus(b)


def test_multiplication_merges_exponents():
    a = Coefficient.monomial(1, 2, e=1, alpha=1)
    b = Coefficient.monomial(2, 3, e=1, alpha=-1)
    prod = a * b
    assert prod.re == Fraction(1, 3)
    assert dict(prod.consts) == {"e": 2}


def test_gaussian_product_is_complex_multiplication():
    a = Coefficient(re=Fraction(1), im=Fraction(2))
    b = Coefficient(re=Fraction(3), im=Fraction(-1))
    prod = a * b
    assert (prod.re, prod.im) == (Fraction(5), Fraction(5))


def test_exact_division_inverts_product():
    rng = random.Random(7)
    for _ in range(200):
        a = random_coefficient(rng)
        b = random_coefficient(rng)
        if b.is_zero():
            continue
        assert (a * b).divide(b) == a


def test_substitute_const_applies_power():
    coeff = Coefficient.monomial(1, 1, CF=2)
    value = Coefficient.monomial(-1, 8, e=2, pi=-1)
    out = coeff.substitute_const("CF", value)
    assert out.re == Fraction(1, 64)
    assert dict(out.consts) == {"e": 4, "pi": -2}


def test_substitute_const_negative_power():
    coeff = Coefficient.monomial(3, 1, X=-1)
    out = coeff.substitute_const("X", Coefficient.monomial(1, 2, pi=1))
    assert out.re == Fraction(6)
    assert dict(out.consts) == {"pi": -1}
