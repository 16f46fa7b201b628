"""Shared random generators for the test suite (seeded, deterministic)."""

from __future__ import annotations

import random

from metlie.expr import Bracket, Generator, ScalarMul, Sum
from metlie.poly import Poly, QPoly, QuotientParams
from metlie.ring import BasisTerm, MElement, from_basis


def random_poly(rng: random.Random, n: int, max_degree: int = 3,
                max_terms: int = 5, coeff_bound: int = 9) -> Poly:
    terms = {}
    for _ in range(rng.randrange(max_terms + 1)):
        mono = tuple(rng.randrange(max_degree + 1) for _ in range(n))
        c = rng.randint(-coeff_bound, coeff_bound)
        if c:
            terms[mono] = c
    return Poly(n, terms)


def random_qpoly(rng: random.Random, params: QuotientParams,
                 max_terms: int | None = None) -> QPoly:
    monos = list(params.monomials())
    if max_terms is not None:
        monos = rng.sample(monos, min(max_terms, len(monos)))
    return QPoly(params, {mu: rng.randrange(params.m) for mu in monos})


def random_basis_terms(rng: random.Random, n: int, max_words: int = 3,
                       max_len: int = 5, coeff_bound: int = 5):
    terms = []
    if n < 2:
        return terms
    seen = set()
    for _ in range(rng.randrange(max_words + 1)):
        k = rng.randrange(2, max_len + 1)
        i2 = rng.randrange(1, n)
        i1 = rng.randrange(i2 + 1, n + 1)
        tail = tuple(sorted(rng.randrange(i2, n + 1) for _ in range(k - 2)))
        word = (i1, i2, *tail)
        if word in seen:
            continue
        seen.add(word)
        c = rng.randint(-coeff_bound, coeff_bound)
        if c:
            terms.append(BasisTerm(c, word))
    return terms


def random_melement(rng: random.Random, n: int, max_words: int = 3,
                    max_len: int = 5, coeff_bound: int = 5) -> MElement:
    linear = [rng.randint(-coeff_bound, coeff_bound) for _ in range(n)]
    return from_basis(random_basis_terms(rng, n, max_words, max_len, coeff_bound), linear)


def random_expr(rng: random.Random, n: int, depth: int = 4):
    r = rng.random()
    if depth == 0 or r < 0.35:
        return Generator(rng.randrange(1, n + 1))
    if r < 0.65:
        return Bracket(random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1))
    if r < 0.85:
        count = rng.randrange(1, 4)
        return Sum(tuple(random_expr(rng, n, depth - 1) for _ in range(count)))
    return ScalarMul(rng.randint(-3, 3), random_expr(rng, n, depth - 1))


def random_tame_automorphism(rng: random.Random, n: int, moves: int = 3):
    """Images of a product of elementary automorphisms.

    Linear moves x_i -> x_i + c*x_j always qualify; a move x_i -> x_i + d
    with d a bracket word keeps the Jacobi determinant at 1 only when d does
    not involve x_i, so those are drawn for n >= 3 from words avoiding i.
    """
    from metlie.ring import endo_apply

    images = [MElement.generator(i, n) for i in range(1, n + 1)]
    for _ in range(moves):
        i = rng.randrange(1, n + 1)
        use_derived = n >= 3 and rng.random() < 0.4
        move = [MElement.generator(t, n) for t in range(1, n + 1)]
        if use_derived:
            others = [t for t in range(1, n + 1) if t != i]
            a, b = rng.sample(others, 2)
            if b > a:
                a, b = b, a
            word_elem = from_basis([BasisTerm(rng.choice([-1, 1]), (a, b))],
                                   [0] * n)
            move[i - 1] = move[i - 1] + word_elem
        else:
            j = rng.choice([t for t in range(1, n + 1) if t != i])
            c = rng.choice([-2, -1, 1, 2])
            move[i - 1] = move[i - 1] + c * MElement.generator(j, n)
        images = [endo_apply(g, move) for g in images]
    return images
