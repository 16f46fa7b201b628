"""Primitivity decisions via the minors-ideal criterion.

A system (g_1, .., g_k) with 1 <= k <= n is primitive exactly when the k x k
minors of its Jacobi matrix generate the unit ideal of Z[X].  Deciding that
over the integers needs a strong Groebner basis: Buchberger completion that
processes both S-polynomials (cancelling leading terms through the lcm of
monomials and coefficients) and G-polynomials (a Bezout combination reaching
the gcd of the leading coefficients), with reduction allowed only when the
reducer's leading coefficient divides the target coefficient.

Cheap necessary conditions run first: the gcd of the integer k x k minors of
the linear parts must be 1, and the reduced minors must generate the unit
ideal in each small finite quotient ring of a configured grid.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Optional

from metlie.calculus import det, jacobi_matrix, minors
from metlie.poly import (
    Poly,
    QPoly,
    QuotientParams,
    ResourceLimitError,
    grevlex_key,
    reduce_pqm,
    DEFAULT_MAX_RING_SIZE,
)
from metlie.ring import MElement

DEFAULT_MAX_BASIS = 10_000
DEFAULT_MAX_DEGREE = 40

# Fast-path quotient grid: p, q in {1, 2}, m in {2, 3}.
DEFAULT_QUOTIENT_GRID = tuple(
    (p, q, m) for p in (1, 2) for q in (1, 2) for m in (2, 3)
)


class GroebnerLimitError(Exception):
    """The Groebner computation exceeded its configured resource caps."""


@dataclass
class GroebnerBasis:
    """Strong Groebner basis over Z; cofactors express each generator over the input."""

    generators: list[Poly]
    cofactors: list[list[Poly]]


def _lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


class _Row:
    """A polynomial tracked together with its expression over the input generators."""

    __slots__ = ("poly", "cof", "lm", "lc")

    def __init__(self, poly: Poly, cof: list[Poly]):
        self.poly = poly
        self.cof = cof
        if poly:
            self.lm, self.lc = poly.leading()
        else:
            self.lm, self.lc = None, 0

    def negate(self) -> "_Row":
        return _Row(-self.poly, [-c for c in self.cof])


def _normalized(row: _Row) -> _Row:
    return row.negate() if row.lc < 0 else row


def _combine(rows_scales) -> _Row:
    """Sum of c * X^shift * row over (row, c, shift) triples."""
    poly = None
    cof = None
    for row, c, shift in rows_scales:
        p = row.poly.mul_term(c, shift)
        cs = [h.mul_term(c, shift) for h in row.cof]
        if poly is None:
            poly, cof = p, cs
        else:
            poly = poly + p
            cof = [a + b for a, b in zip(cof, cs)]
    return _Row(poly, cof)


def _reduce_row(row: _Row, basis: list[_Row], max_degree: int) -> _Row:
    """Full normal form of `row` modulo `basis`, cofactors kept in sync.

    A term c * X^mu reduces by a basis row exactly when the row's leading
    monomial divides X^mu and its leading coefficient divides c.
    """
    work = dict(row.poly.terms)
    done: dict[tuple[int, ...], int] = {}
    cof = list(row.cof)
    n = row.poly.n
    while work:
        mono = max(work, key=grevlex_key)
        coeff = work.pop(mono)
        if sum(mono) > max_degree:
            raise GroebnerLimitError(f"degree cap {max_degree} exceeded during reduction")
        hit = None
        for b in basis:
            if b.lm is None:
                continue
            if coeff % b.lc:
                continue
            shift = tuple(a - c for a, c in zip(mono, b.lm))
            if any(e < 0 for e in shift):
                continue
            hit = (b, coeff // b.lc, shift)
            break
        if hit is None:
            done[mono] = coeff
            continue
        b, q, shift = hit
        sub = b.poly.mul_term(q, shift)
        for m, c in sub.terms.items():
            if m == mono:
                continue
            s = work.get(m, 0) - c
            if s:
                work[m] = s
            elif m in work:
                del work[m]
        cof = [a - h.mul_term(q, shift) for a, h in zip(cof, b.cof)]
    return _Row(Poly(n, done), cof)


def _spair(f: _Row, g: _Row) -> _Row:
    gamma = tuple(max(a, b) for a, b in zip(f.lm, g.lm))
    l = _lcm(f.lc, g.lc)
    return _combine([
        (f, l // f.lc, tuple(a - b for a, b in zip(gamma, f.lm))),
        (g, -(l // g.lc), tuple(a - b for a, b in zip(gamma, g.lm))),
    ])


def _gpair(f: _Row, g: _Row) -> Optional[_Row]:
    # Skipped when one leading coefficient divides the other: the Bezout
    # combination would reduce to zero by that row immediately.
    if f.lc % g.lc == 0 or g.lc % f.lc == 0:
        return None
    gamma = tuple(max(a, b) for a, b in zip(f.lm, g.lm))
    d = math.gcd(f.lc, g.lc)
    # Extended Euclid: u * f.lc + v * g.lc = d.
    old_r, r = f.lc, g.lc
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        qq = old_r // r
        old_r, r = r, old_r - qq * r
        old_u, u = u, old_u - qq * u
        old_v, v = v, old_v - qq * v
    assert old_r == d
    return _combine([
        (f, old_u, tuple(a - b for a, b in zip(gamma, f.lm))),
        (g, old_v, tuple(a - b for a, b in zip(gamma, g.lm))),
    ])


def _buchberger(gens: list[Poly], *, max_basis: int, max_degree: int,
                stop_on_unit: bool) -> tuple[list[_Row], Optional[_Row]]:
    if not gens:
        raise ValueError("empty generator list")
    n = gens[0].n
    for g in gens:
        if g.n != n:
            raise ValueError("mismatched generator counts")
    basis: list[_Row] = []
    pairs: list[tuple[tuple, int, int, int]] = []
    counter = 0

    def is_unit(row: _Row) -> bool:
        return row.lm is not None and not any(row.lm) and abs(row.lc) == 1

    def push(row: _Row) -> Optional[_Row]:
        nonlocal counter
        if not row.poly:
            return None
        row = _normalized(row)
        if row.poly.degree() > max_degree:
            raise GroebnerLimitError(f"degree cap {max_degree} exceeded")
        if len(basis) >= max_basis:
            raise GroebnerLimitError(f"basis size cap {max_basis} exceeded")
        idx = len(basis)
        basis.append(row)
        if stop_on_unit and is_unit(row):
            return row
        for j in range(idx):
            other = basis[j]
            gamma = tuple(max(a, b) for a, b in zip(row.lm, other.lm))
            counter += 1
            heapq.heappush(pairs, (grevlex_key(gamma), counter, j, idx))
        return None

    for i, g in enumerate(gens):
        cof = [Poly.one(n) if j == i else Poly.zero(n) for j in range(len(gens))]
        hit = push(_Row(g, cof))
        if hit is not None:
            return basis, hit

    while pairs:
        _, _, i, j = heapq.heappop(pairs)
        f, g = basis[i], basis[j]
        candidates = [_spair(f, g)]
        gp = _gpair(f, g)
        if gp is not None:
            candidates.append(gp)
        for cand in candidates:
            nf = _reduce_row(cand, basis, max_degree)
            if nf.poly:
                hit = push(nf)
                if hit is not None:
                    return basis, hit
    return basis, None


def _interreduce(basis: list[_Row], max_degree: int) -> list[_Row]:
    # Minimize: drop rows whose leading term is divisible (monomial and
    # coefficient) by another kept row's leading term.
    order = sorted(range(len(basis)), key=lambda i: (grevlex_key(basis[i].lm), abs(basis[i].lc)))
    kept: list[_Row] = []
    for idx in order:
        row = basis[idx]
        divisible = False
        for other in kept:
            if row.lc % other.lc:
                continue
            if all(a >= b for a, b in zip(row.lm, other.lm)):
                divisible = True
                break
        if not divisible:
            kept.append(row)
    # Tail-reduce each kept row against the others.
    out: list[_Row] = []
    for i, row in enumerate(kept):
        others = kept[:i] + kept[i + 1:]
        out.append(_normalized(_reduce_row(row, others, max_degree)))
    out.sort(key=lambda r: (grevlex_key(r.lm), abs(r.lc)))
    return out


def groebner_z(gens: list[Poly], *, max_basis: int = DEFAULT_MAX_BASIS,
               max_degree: int = DEFAULT_MAX_DEGREE) -> GroebnerBasis:
    """Reduced strong Groebner basis over Z of the ideal generated by gens."""
    rows, _ = _buchberger(gens, max_basis=max_basis, max_degree=max_degree,
                          stop_on_unit=False)
    rows = _interreduce(rows, max_degree)
    return GroebnerBasis([r.poly for r in rows], [list(r.cof) for r in rows])


def reduce_by_basis(p: Poly, basis: GroebnerBasis, *,
                    max_degree: int = DEFAULT_MAX_DEGREE) -> Poly:
    """Normal form of p modulo a strong Groebner basis."""
    rows = [_Row(g, [Poly.zero(p.n)]) for g in basis.generators]
    nf = _reduce_row(_Row(p, [Poly.zero(p.n)]), rows, max_degree)
    return nf.poly


def ideal_contains(gens: list[Poly], target: Poly, *,
                   max_basis: int = DEFAULT_MAX_BASIS,
                   max_degree: int = DEFAULT_MAX_DEGREE) -> bool:
    """Exact ideal membership over Z[X]."""
    gb = groebner_z(gens, max_basis=max_basis, max_degree=max_degree)
    return not reduce_by_basis(target, gb, max_degree=max_degree)


def ideal_contains_one(gens: list[Poly], *, max_basis: int = DEFAULT_MAX_BASIS,
                       max_degree: int = DEFAULT_MAX_DEGREE
                       ) -> tuple[bool, Optional[list[Poly]]]:
    """Does the ideal generated by gens contain 1?

    On a positive answer also returns cofactors h_i with sum h_i * g_i = 1,
    verified exactly before being handed back.
    """
    rows, unit = _buchberger(gens, max_basis=max_basis, max_degree=max_degree,
                             stop_on_unit=True)
    if unit is None:
        for row in rows:
            if row.lm is not None and not any(row.lm) and abs(row.lc) == 1:
                unit = row
                break
    if unit is None:
        return False, None
    row = unit if unit.lc == 1 else unit.negate()
    n = gens[0].n
    check = Poly.zero(n)
    for h, g in zip(row.cof, gens):
        check = check + h * g
    if check != Poly.one(n):
        raise AssertionError("certificate verification failed")
    return True, list(row.cof)


def abelian_primitive(rows: list) -> bool:
    """Primitivity of integer linear parts: gcd of all k x k minors is 1."""
    k = len(rows)
    if k < 1:
        raise ValueError("empty system")
    n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise ValueError("ragged linear-part matrix")
    if k > n:
        raise ValueError(f"system size {k} exceeds generator count {n}")
    return _abelian_minor_gcd(rows) == 1


def _abelian_minor_gcd(rows: list) -> int:
    import itertools

    k = len(rows)
    n = len(rows[0])
    g = 0
    for cols in itertools.combinations(range(n), k):
        sub = [[rows[i][c] for c in cols] for i in range(k)]
        g = math.gcd(g, _int_det(sub))
        if g == 1:
            return 1
    return g


def _int_det(m: list[list[int]]) -> int:
    size = len(m)
    if size == 1:
        return m[0][0]
    total = 0
    for r in range(size):
        if not m[r][0]:
            continue
        minor = [row[1:] for t, row in enumerate(m) if t != r]
        sub = _int_det(minor)
        total += m[r][0] * sub if r % 2 == 0 else -m[r][0] * sub
    return total


def _smallest_prime_factor(v: int) -> int:
    v = abs(v)
    if v < 2:
        return 2
    d = 2
    while d * d <= v:
        if v % d == 0:
            return d
        d += 1
    return v


def _reduced_minor_ideal_contains_one(minor_polys: list[Poly], params: QuotientParams,
                                      *, max_ring_size: int) -> bool:
    from metlie.poly import ideal_contains_finite

    reduced = [reduce_pqm(p, params) for p in minor_polys]
    return ideal_contains_finite(reduced, QPoly.one(params), max_ring_size=max_ring_size)


def quotient_primitivity_check(gs: list[MElement], params: QuotientParams, *,
                               max_ring_size: int = DEFAULT_MAX_RING_SIZE) -> bool:
    """Necessary condition in Z_{p,q,m}[X]: reduced minors must generate 1.

    A False answer for any parameters certifies non-primitivity; True is
    only a pass of the necessary condition.
    """
    k = len(gs)
    if not 1 <= k <= gs[0].n:
        raise ValueError(f"system size {k} out of range 1..{gs[0].n}")
    if params.n != gs[0].n:
        raise ValueError("quotient parameters use a different generator count")
    minor_polys = minors(jacobi_matrix(gs), k)
    return _reduced_minor_ideal_contains_one(minor_polys, params,
                                             max_ring_size=max_ring_size)


@dataclass
class PrimitivityVerdict:
    """Outcome of the primitivity decision; primitive=None means inconclusive."""

    primitive: Optional[bool]
    method: str
    certificate: Optional[dict] = None
    refutation: Optional[dict] = None

    def to_json(self) -> dict:
        return {
            "primitive": "inconclusive" if self.primitive is None else self.primitive,
            "method": self.method,
            "certificate": self.certificate,
            "refutation": self.refutation,
        }


def is_primitive(gs: list[MElement], *,
                 quotient_grid=DEFAULT_QUOTIENT_GRID,
                 max_ring_size: int = DEFAULT_MAX_RING_SIZE,
                 max_basis: int = DEFAULT_MAX_BASIS,
                 max_degree: int = DEFAULT_MAX_DEGREE) -> PrimitivityVerdict:
    """Decide primitivity of a system of 1 <= k <= n elements.

    Refutation fast paths run first (integer linear parts, then the finite
    quotient grid); the exact minors-ideal test over Z[X] settles the rest.
    """
    if not gs:
        raise ValueError("empty system")
    n = gs[0].n
    k = len(gs)
    for g in gs:
        if g.n != n:
            raise ValueError("mismatched generator counts in the system")
    if k > n:
        raise ValueError(f"system size {k} exceeds generator count {n}")

    lin = [list(g.linear) for g in gs]
    gcd_minors = _abelian_minor_gcd(lin)
    if gcd_minors != 1:
        modulus = _smallest_prime_factor(gcd_minors)
        return PrimitivityVerdict(
            False, "abelian-refuted",
            refutation={"kind": "abelian", "params": {"m": modulus}},
        )

    minor_polys = minors(jacobi_matrix(gs), k)
    for (p, q, m) in quotient_grid:
        params = QuotientParams(p, q, m, n)
        try:
            ok = _reduced_minor_ideal_contains_one(minor_polys, params,
                                                   max_ring_size=max_ring_size)
        except ResourceLimitError:
            continue
        if not ok:
            return PrimitivityVerdict(
                False, "quotient-refuted",
                refutation={"kind": "quotient", "params": {"p": p, "q": q, "m": m}},
            )

    try:
        found, cofactors = ideal_contains_one(minor_polys, max_basis=max_basis,
                                              max_degree=max_degree)
    except GroebnerLimitError:
        return PrimitivityVerdict(None, "groebner")
    if found:
        return PrimitivityVerdict(
            True, "groebner",
            certificate={
                "minors": [str(p) for p in minor_polys],
                "cofactors": [str(h) for h in cofactors],
            },
        )
    return PrimitivityVerdict(False, "groebner")


def is_automorphism_system(gs: list[MElement]) -> bool:
    """True when (g_1, .., g_n) generates freely: det of the Jacobi matrix is +-1."""
    if not gs:
        raise ValueError("empty system")
    n = gs[0].n
    if len(gs) != n:
        raise ValueError(f"expected exactly {n} elements, got {len(gs)}")
    d = det(jacobi_matrix(gs))
    return d.terms == {(0,) * n: 1} or d.terms == {(0,) * n: -1}
