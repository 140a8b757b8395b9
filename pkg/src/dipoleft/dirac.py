"""Gamma-string expansion and spinor traces.

Conventions, fixed once and enforced by the numeric oracle:

    metric (+,-,-,-),  eps(0,1,2,3) = +1,  g5 = i g0 g1 g2 g3,
    tr(1) = 4,         tr(g^m g^n g^r g^s g5) = -4i eps^{mnrs}.

Traces without g5 use the recursive pairing expansion, which holds at
symbolic dimension.  Traces with g5 are strictly four-dimensional: longer
words are reduced with

    g^m g^n g^r = eta^{mn} g^r - eta^{mr} g^n + eta^{nr} g^m
                  + i eps^{mnrs} g_s g5,

whose sign is pinned by the conventions above.  Requesting a g5 trace at
symbolic dimension is a hard error, never a silent choice.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .algebra import (
    G5,
    Coefficient,
    Epsilon,
    Expression,
    FieldSlot,
    Metric,
    Term,
    Word,
    canonicalize,
    gamma,
    normalize_word,
)

SYMBOLIC_DIM = "symbolic-d"
FOUR_DIM = "four"


class SchemeError(ValueError):
    """A gamma5 trace was requested at symbolic dimension."""


class ModelError(ValueError):
    """A vertex references an undeclared field slot."""


def commutator(mu: str, nu: str) -> Expression:
    """[g^mu, g^nu] as a two-term expression of gamma words."""
    return Expression.of(
        Term(Coefficient.one(), word=(gamma(mu), gamma(nu))),
        Term(Coefficient.rational(-1), word=(gamma(nu), gamma(mu))),
    )


def sigma_tensor(mu: str, nu: str) -> Expression:
    """(i/2)[g^mu, g^nu], the antisymmetric dipole tensor."""
    return commutator(mu, nu).scaled(Coefficient.imaginary(1, 2))


def expand_vertex(
    chirality: int,
    coeff: Coefficient,
    combo: Sequence[tuple[int, str]],
    mu: str = "mu",
    nu: str = "nu",
    declared_slots: Iterable[str] | None = None,
) -> Expression:
    """Dipole vertex coeff * (1 - i*chi*g5) * sigma^{mu nu} * sum_s sign_s X_s(mu,nu).

    The chirality projector is expanded into its unit part and its g5 part;
    every returned term carries one field-slot factor on the open (mu, nu)
    pair.  An empty combo gives the zero expression.
    """
    if chirality not in (+1, -1):
        raise ModelError(f"chirality must be +1 or -1, got {chirality!r}")
    if declared_slots is not None:
        known = set(declared_slots)
        for _, name in combo:
            if name not in known:
                raise ModelError(f"unknown slot name {name!r} in vertex combo")
    sigma = sigma_tensor(mu, nu)
    g5_factor = Expression.of(Term(Coefficient.imaginary(-chirality), word=(G5,)))
    # (1 - i*chi*g5) sigma = sigma + (-i*chi) sigma g5
    vertex = sigma + sigma * g5_factor
    terms = []
    for sign, slot in combo:
        slot_factor = Expression.of(
            Term(Coefficient.rational(sign), factors=(FieldSlot(slot, mu, nu),))
        )
        terms.append((vertex * slot_factor).scaled(coeff))
    out = Expression.zero()
    for piece in terms:
        out = out + piece
    return canonicalize(out)


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


def _pairing_trace(labels: tuple[str, ...]) -> Expression:
    """tr of an even gamma word without g5, valid at symbolic dimension."""
    if not labels:
        return Expression.scalar(Coefficient.rational(4))
    first, rest = labels[0], labels[1:]
    out = Expression.zero()
    sign = 1
    for j, partner in enumerate(rest):
        sub = rest[:j] + rest[j + 1 :]
        metric = Expression.of(
            Term(Coefficient.rational(sign), factors=(Metric(first, partner),))
        )
        out = out + metric * _pairing_trace(sub)
        sign = -sign
    return out


def _g5_trace(labels: tuple[str, ...], depth: int = 0) -> Expression:
    """tr(g^{a1}...g^{an} g5) at d = 4, n even."""
    n = len(labels)
    if n < 4:
        return Expression.zero()
    if n == 4:
        return Expression.of(
            Term(Coefficient.imaginary(-4), factors=(Epsilon(tuple(labels)),))
        )
    a, b, c = labels[:3]
    rest = labels[3:]
    out = Expression.zero()
    for coeff, pair, keep in (
        (Coefficient.one(), (a, b), c),
        (Coefficient.rational(-1), (a, c), b),
        (Coefficient.one(), (b, c), a),
    ):
        metric = Expression.of(Term(coeff, factors=(Metric(*pair),)))
        out = out + metric * _g5_trace((keep,) + rest, depth + 1)
    # eps branch: +i eps^{abcs} g_s g5 from the identity; the inserted g5 hops
    # over the odd-length remainder (sign -1) and squares away, leaving a
    # plain trace against a contracted eps factor with net coefficient -i.
    aux = f"!t{depth}"
    eps_term = Expression.of(
        Term(Coefficient.imaginary(-1), factors=(Epsilon((a, b, c, aux)),))
    )
    out = out + eps_term * _pairing_trace((aux,) + rest)
    return out


def trace_word(word: Word, dim_mode: str = SYMBOLIC_DIM) -> Expression:
    """Spinor trace of a single gamma word; result has tensor factors only."""
    sign, normalized = normalize_word(word)
    has_g5 = bool(normalized) and normalized[-1] == G5
    labels = tuple(letter[1] for letter in normalized if letter != G5)
    if has_g5:
        if dim_mode != FOUR_DIM:
            raise SchemeError(
                "gamma5 traces are defined only at d = 4; "
                "pass dim_mode='four' to accept the four-dimensional scheme"
            )
        if len(labels) % 2:
            return Expression.zero()
        result = _g5_trace(labels)
    else:
        if len(labels) % 2:
            return Expression.zero()
        result = _pairing_trace(labels)
    if sign < 0:
        result = -result
    return canonicalize(result)


def trace(expr: Expression, dim_mode: str = SYMBOLIC_DIM) -> Expression:
    """Trace every pending gamma word in expr; spectator factors pass through."""
    out = Expression.zero()
    for term in expr.terms:
        if term.word is None:
            out = out + Expression.of(term)
            continue
        traced = trace_word(term.word, dim_mode)
        rest = Expression.of(
            Term(term.coeff, factors=term.factors, word=None, loop=term.loop)
        )
        out = out + rest * traced
    return canonicalize(out)
