"""Finite metabelian matrix Lie rings and exhaustive uniformity checking.

A model element is a 2x2 matrix shape (l 0 / tau 0): a top-left entry l and
a bottom-left vector tau in the free rank-n module over Z_{p,q,m}[X] with
basis t_1..t_n.  The commutator [S1,S2] = S1*S2 - S2*S1 lands on
(0, tau1*l2 - tau2*l1), which makes the ring metabelian.  The default
top-left carrier is the linear polynomials without free term, coefficients
mod m; the full quotient ring is available as a variant.

A system (g_1..g_k) over n generators is uniformly distributed on a finite
ring R of size N exactly when every target k-tuple has N^(n-k) preimages
under substitution.  `uniformity_check` decides that by exhaustively
enumerating all N^n argument tuples; the substituted values come from the
closed form (lin(g)(s), sum_j tau_j * d_j g(s)), so the polynomial work is
hoisted out of the enumeration of the tau coordinates.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Optional

from metlie.expr import Generator, Bracket, Sum, ScalarMul
from metlie.poly import Poly, QPoly, QuotientParams, reduce_pqm
from metlie.ring import MElement, from_expr

DEFAULT_BUDGET = 1 << 28
DEFAULT_MAX_KEYS = 1 << 24

_TABLE_CAP = 1 << 22

# Default grids for witness searching.
DEFAULT_ABELIAN_MODULI = (2, 3, 4)
DEFAULT_MATRIX_GRID = tuple(
    (p, q, m) for p in (1, 2) for q in (1, 2) for m in (2, 3)
)


class BudgetError(Exception):
    """An exhaustive enumeration would exceed the configured budget."""


@dataclass(frozen=True)
class ModelParams:
    quotient: QuotientParams
    top_left: str = "linear"  # "linear": no free term, coefficients mod m; "full": whole ring

    def __post_init__(self):
        if self.top_left not in ("linear", "full"):
            raise ValueError("top_left must be 'linear' or 'full'")


class ModelElement:
    """Element of the finite matrix Lie ring: top-left l plus module vector tau."""

    __slots__ = ("params", "l", "tau")

    def __init__(self, params: ModelParams, l, tau):
        quotient = params.quotient
        n = quotient.n
        if params.top_left == "linear":
            l = tuple(int(c) % quotient.m for c in l)
            if len(l) != n:
                raise ValueError("linear top-left entry needs one coefficient per generator")
        else:
            if not isinstance(l, QPoly) or l.params != quotient:
                raise ValueError("full-ring top-left entry must live in the quotient ring")
        tau = tuple(tau)
        if len(tau) != n or any(not isinstance(t, QPoly) or t.params != quotient for t in tau):
            raise ValueError("tau must be a vector of n quotient-ring coordinates")
        self.params = params
        self.l = l
        self.tau = tau

    def _require_same_model(self, other: "ModelElement") -> None:
        if self.params != other.params:
            raise ValueError("mismatched model parameters")

    def l_qpoly(self) -> QPoly:
        if self.params.top_left == "linear":
            return QPoly.from_linear(self.l, self.params.quotient)
        return self.l

    def __bool__(self) -> bool:
        if self.params.top_left == "linear":
            if any(self.l):
                return True
        elif self.l:
            return True
        return any(self.tau)

    def __add__(self, other: "ModelElement") -> "ModelElement":
        if not isinstance(other, ModelElement):
            return NotImplemented
        self._require_same_model(other)
        if self.params.top_left == "linear":
            m = self.params.quotient.m
            l = tuple((a + b) % m for a, b in zip(self.l, other.l))
        else:
            l = self.l + other.l
        return ModelElement(self.params, l, tuple(a + b for a, b in zip(self.tau, other.tau)))

    def __neg__(self) -> "ModelElement":
        if self.params.top_left == "linear":
            m = self.params.quotient.m
            l = tuple((-a) % m for a in self.l)
        else:
            l = -self.l
        return ModelElement(self.params, l, tuple(-t for t in self.tau))

    def __sub__(self, other: "ModelElement") -> "ModelElement":
        if not isinstance(other, ModelElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, c):
        if not isinstance(c, int):
            return NotImplemented
        if self.params.top_left == "linear":
            m = self.params.quotient.m
            l = tuple((c * a) % m for a in self.l)
        else:
            l = c * self.l
        return ModelElement(self.params, l, tuple(c * t for t in self.tau))

    __rmul__ = __mul__

    def bracket(self, other: "ModelElement") -> "ModelElement":
        """Matrix commutator: zero top-left, tau1 * l2 - tau2 * l1 below."""
        if not isinstance(other, ModelElement):
            raise TypeError("bracket requires another model element")
        self._require_same_model(other)
        la = self.l_qpoly()
        lb = other.l_qpoly()
        tau = tuple(ta * lb - tb * la for ta, tb in zip(self.tau, other.tau))
        quotient = self.params.quotient
        if self.params.top_left == "linear":
            l = (0,) * quotient.n
        else:
            l = QPoly.zero(quotient)
        return ModelElement(self.params, l, tau)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModelElement):
            return NotImplemented
        return self.params == other.params and self.l == other.l and self.tau == other.tau

    def __hash__(self) -> int:
        return hash((self.l, self.tau))

    def to_json(self) -> dict:
        return {"l": str(self.l_qpoly()), "tau": [str(t) for t in self.tau]}

    def __str__(self) -> str:
        taus = ", ".join(str(t) for t in self.tau)
        return f"(l={self.l_qpoly()}; tau=[{taus}])"

    def __repr__(self) -> str:
        return f"ModelElement{self!s}"


class FiniteModel:
    """Enumerable carrier of a finite matrix Lie ring with fixed parameters."""

    def __init__(self, params: ModelParams, *, budget: Optional[int] = None):
        quotient = params.quotient
        self.params = params
        self.quotient = quotient
        self.ring_size = quotient.ring_size
        self.t_size = self.ring_size ** quotient.n
        if params.top_left == "linear":
            self.l_size = quotient.m ** quotient.n
        else:
            self.l_size = self.ring_size
        self.size = self.l_size * self.t_size
        if budget is not None and self.size > budget:
            raise BudgetError(f"model size {self.size} exceeds the budget {budget}")
        self._enum = None

    @property
    def n(self) -> int:
        return self.quotient.n

    def describe(self) -> dict:
        q = self.quotient
        return {
            "p": q.p, "q": q.q, "m": q.m, "n": q.n,
            "variant": self.params.top_left, "size": self.size,
        }

    def zero(self) -> ModelElement:
        quotient = self.quotient
        l = (0,) * quotient.n if self.params.top_left == "linear" else QPoly.zero(quotient)
        return ModelElement(self.params, l, tuple(QPoly.zero(quotient) for _ in range(quotient.n)))

    def generator_image(self, i: int) -> ModelElement:
        """x_i goes to the matrix with top-left x_i and tau the basis vector t_i."""
        quotient = self.quotient
        n = quotient.n
        if not 1 <= i <= n:
            raise ValueError(f"generator index {i} out of range 1..{n}")
        if self.params.top_left == "linear":
            l = tuple(1 if j == i - 1 else 0 for j in range(n))
        else:
            l = QPoly.variable(i, quotient)
        tau = tuple(QPoly.one(quotient) if j == i - 1 else QPoly.zero(quotient) for j in range(n))
        return ModelElement(self.params, l, tau)

    def generator_images(self) -> list[ModelElement]:
        return [self.generator_image(i) for i in range(1, self.n + 1)]

    def random_element(self, rng, max_terms: Optional[int] = None) -> ModelElement:
        """Uniform random element; max_terms caps nonzero tau coefficients per coordinate."""
        quotient = self.quotient
        monos = list(quotient.monomials())
        m = quotient.m

        def random_qpoly() -> QPoly:
            if max_terms is None:
                terms = {mu: rng.randrange(m) for mu in monos}
            else:
                terms = {}
                for mu in rng.sample(monos, min(max_terms, len(monos))):
                    terms[mu] = rng.randrange(m)
            return QPoly(quotient, terms)

        if self.params.top_left == "linear":
            l = tuple(rng.randrange(m) for _ in range(quotient.n))
        else:
            l = random_qpoly()
        tau = tuple(random_qpoly() for _ in range(quotient.n))
        return ModelElement(self.params, l, tau)

    # -- canonical integer encodings -------------------------------------

    def _tables(self):
        if self._enum is None:
            self._enum = _EnumTables(self)
        return self._enum

    def element_code(self, elem: ModelElement) -> int:
        tab = self._tables()
        if self.params.top_left == "linear":
            l_code = _mixed_radix_code(elem.l, self.quotient.m)
        else:
            l_code = tab.ring_index(elem.l)
        t_code = 0
        for c in reversed(range(self.n)):
            t_code = t_code * self.ring_size + tab.ring_index(elem.tau[c])
        return l_code * self.t_size + t_code

    def element_from_code(self, code: int) -> ModelElement:
        if not 0 <= code < self.size:
            raise ValueError(f"element code {code} out of range")
        tab = self._tables()
        l_code, t_code = divmod(code, self.t_size)
        quotient = self.quotient
        if self.params.top_left == "linear":
            l = _mixed_radix_digits(l_code, quotient.m, quotient.n)
        else:
            l = tab.ring_elems[l_code]
        tau = []
        for _ in range(self.n):
            t_code, idx = divmod(t_code, self.ring_size)
            tau.append(tab.ring_elems[idx])
        return ModelElement(self.params, l, tuple(tau))

    def elements(self):
        """All elements in canonical (l, tau) code order."""
        for code in range(self.size):
            yield self.element_from_code(code)


def _mixed_radix_code(digits, base: int) -> int:
    code = 0
    for d in reversed(digits):
        code = code * base + d
    return code


def _mixed_radix_digits(code: int, base: int, width: int) -> tuple[int, ...]:
    out = []
    for _ in range(width):
        code, d = divmod(code, base)
        out.append(d)
    return tuple(out)


class _EnumTables:
    """Indexed arithmetic for one quotient ring, shared across enumerations."""

    def __init__(self, model: FiniteModel):
        quotient = model.quotient
        self.quotient = quotient
        self.monos = list(quotient.monomials())
        self.mono_pos = {mu: i for i, mu in enumerate(self.monos)}
        self.size = quotient.ring_size
        m = quotient.m
        width = len(self.monos)
        if self.size * self.size > _TABLE_CAP:
            raise BudgetError(
                f"quotient ring of size {self.size} is too large to tabulate"
            )
        digit_rows = [_mixed_radix_digits(i, m, width) for i in range(self.size)]
        self.ring_elems = [
            QPoly(quotient, {mu: d for mu, d in zip(self.monos, row) if d})
            for row in digit_rows
        ]
        self.radd = [
            [
                _mixed_radix_code([(a + b) % m for a, b in zip(ra, rb)], m)
                for rb in digit_rows
            ]
            for ra in digit_rows
        ]
        self._scale_cols: dict[int, list[tuple[int, ...]]] = {}
        # tau space: all T-vectors as tuples of ring indices, in code order.
        self.tau_space = [
            _mixed_radix_digits(code, self.size, quotient.n)
            for code in range(self.size ** quotient.n)
        ]

    def ring_index(self, qp: QPoly) -> int:
        digits = [0] * len(self.monos)
        for mu, c in qp.terms.items():
            digits[self.mono_pos[mu]] = c
        return _mixed_radix_code(digits, self.quotient.m)

    def scale_column(self, c_idx: int) -> list[tuple[int, ...]]:
        """For each T-vector code, the vector scaled by the ring element c_idx."""
        col = self._scale_cols.get(c_idx)
        if col is None:
            c_elem = self.ring_elems[c_idx]
            row = [self.ring_index(self.ring_elems[d] * c_elem) for d in range(self.size)]
            col = [tuple(row[d] for d in vec) for vec in self.tau_space]
            self._scale_cols[c_idx] = col
        return col


@dataclass
class UniformityReport:
    model: dict
    k: int
    n: int
    size: int
    total: int
    expected_fiber: int
    fiber_min: int
    fiber_max: int
    uniform: bool
    witness: Optional[dict] = None
    elapsed_ms: float = 0.0

    def to_json(self, include_elapsed: bool = True) -> dict:
        out = {
            "model": self.model,
            "k": self.k,
            "expected_fiber": self.expected_fiber,
            "fiber_min": self.fiber_min,
            "fiber_max": self.fiber_max,
            "uniform": self.uniform,
            "witness_target": self.witness,
        }
        if include_elapsed:
            out["elapsed_ms"] = round(self.elapsed_ms, 3)
        return out


def _as_elements(gs, n: int) -> list[MElement]:
    out = []
    for g in gs:
        if isinstance(g, (Generator, Bracket, Sum, ScalarMul)):
            g = from_expr(g, n)
        if not isinstance(g, MElement):
            raise TypeError(f"not a Lie ring element: {g!r}")
        if g.n != n:
            raise ValueError("mismatched generator counts")
        out.append(g)
    return out


def model_build(params: ModelParams, *, budget: Optional[int] = None) -> FiniteModel:
    """Construct the finite model carrier (optionally enforcing a size budget)."""
    return FiniteModel(params, budget=budget)


def eval_closed_form(model: FiniteModel, g: MElement, s_vals, tau_vecs) -> ModelElement:
    """Substituted value of g from its derivatives: (lin(g)(s), sum tau_j * d_j g(s)).

    `s_vals` holds the top-left entries of the substituted elements and
    `tau_vecs` their module vectors (tuples of quotient-ring coordinates).
    """
    quotient = model.quotient
    n = quotient.n
    if g.n != n:
        raise ValueError("element and model use different generator counts")
    if len(s_vals) != n or len(tau_vecs) != n:
        raise ValueError(f"expected {n} substituted values")
    if model.params.top_left == "linear":
        images = [QPoly.from_linear(s, quotient) for s in s_vals]
        m = quotient.m
        l = tuple(
            sum(g.linear[t] * s_vals[t][c] for t in range(n)) % m
            for c in range(n)
        )
    else:
        images = list(s_vals)
        l = QPoly.zero(quotient)
        for t in range(n):
            l = l + g.linear[t] * s_vals[t]
    one = QPoly.one(quotient)
    coeffs = [reduce_pqm(d, quotient).evaluate(images, one) for d in g.deriv]
    tau = []
    for c in range(n):
        acc = QPoly.zero(quotient)
        for t in range(n):
            acc = acc + tau_vecs[t][c] * coeffs[t]
        tau.append(acc)
    return ModelElement(model.params, l, tuple(tau))


def _model_substitution_data(model: FiniteModel, gs: list[MElement]):
    """Reduced derivative polynomials of every system element."""
    quotient = model.quotient
    return [[reduce_pqm(d, quotient) for d in g.deriv] for g in gs]


def uniformity_check(gs, model: FiniteModel, *, budget: int = DEFAULT_BUDGET,
                     max_keys: int = DEFAULT_MAX_KEYS) -> UniformityReport:
    """Exhaustive fiber census of the substitution map over the model.

    Enumerates every argument tuple in R^n; the tuple space is partitioned by
    the top-left coordinates, each partition filling a private histogram that
    is merged pointwise afterwards.
    """
    start = time.perf_counter()
    quotient = model.quotient
    n = quotient.n
    gs = _as_elements(gs, n)
    k = len(gs)
    if not 1 <= k <= n:
        raise ValueError(f"system size {k} out of range 1..{n}")
    total = model.size ** n
    if total > budget:
        raise BudgetError(
            f"enumeration of {total} tuples exceeds the budget {budget}"
        )
    if model.size ** k > max_keys:
        raise BudgetError(
            f"histogram key space {model.size ** k} exceeds the cap {max_keys}"
        )
    tab = model._tables()
    size = model.ring_size
    t_size = model.t_size
    dbars = _model_substitution_data(model, gs)
    one = QPoly.one(quotient)
    m = quotient.m

    if model.params.top_left == "linear":
        l_space = [_mixed_radix_digits(code, m, n) for code in range(model.l_size)]
        l_lift = [QPoly.from_linear(v, quotient) for v in l_space]
    else:
        l_space = list(range(model.l_size))
        l_lift = tab.ring_elems

    hist: dict[int, int] = {}
    R = model.size
    for combo in itertools.product(range(len(l_space)), repeat=n):
        images = [l_lift[idx] for idx in combo]
        prefixes = []
        for g in gs:
            if model.params.top_left == "linear":
                lv = tuple(
                    sum(g.linear[t] * l_space[combo[t]][c] for t in range(n)) % m
                    for c in range(n)
                )
                l_code = _mixed_radix_code(lv, m)
            else:
                acc = QPoly.zero(quotient)
                for t in range(n):
                    acc = acc + g.linear[t] * l_lift[combo[t]]
                l_code = tab.ring_index(acc)
            prefixes.append(l_code * t_size)
        columns = [
            [tab.scale_column(tab.ring_index(dbars[i][j].evaluate(images, one)))
             for i in range(k)]
            for j in range(n)
        ]
        part = _census_partition(columns, prefixes, tab, size, n, k, R)
        for key, cnt in part.items():
            hist[key] = hist.get(key, 0) + cnt

    assert sum(hist.values()) == total, "fiber histogram lost mass"
    expected = model.size ** (n - k)
    key_space = model.size ** k
    fiber_max = max(hist.values())
    fiber_min = 0 if len(hist) < key_space else min(hist.values())
    uniform = fiber_min == expected and fiber_max == expected
    witness = None
    if not uniform:
        bad = [key for key, cnt in hist.items() if cnt != expected]
        if bad:
            key = min(bad)
            count = hist[key]
        else:
            key = next(c for c in itertools.count() if c not in hist)
            count = 0
        witness = {
            "target": [model.element_from_code(c).to_json()
                       for c in _split_key(key, R, k)],
            "count": count,
        }
    elapsed = (time.perf_counter() - start) * 1000.0
    return UniformityReport(
        model=model.describe(), k=k, n=n, size=model.size, total=total,
        expected_fiber=expected, fiber_min=fiber_min, fiber_max=fiber_max,
        uniform=uniform, witness=witness, elapsed_ms=elapsed,
    )


def _census_partition(columns, prefixes, tab, size, n, k, R) -> dict[int, int]:
    """Histogram of one top-left partition: walk all tau assignments."""
    hist: dict[int, int] = {}
    radd = tab.radd
    t_len = len(tab.tau_space)
    powers = [size ** c for c in range(n)]

    def encode(vec) -> int:
        code = 0
        for c in range(n):
            code += vec[c] * powers[c]
        return code

    def walk(depth: int, accs):
        cols_d = columns[depth]
        last = depth == n - 1
        if last and k == 1:
            col = cols_d[0]
            pre = prefixes[0]
            if accs is None:
                for t in range(t_len):
                    key = pre + encode(col[t])
                    hist[key] = hist.get(key, 0) + 1
            else:
                acc = accs[0]
                for t in range(t_len):
                    v = col[t]
                    key = pre + encode(tuple(radd[a][b] for a, b in zip(acc, v)))
                    hist[key] = hist.get(key, 0) + 1
            return
        for t in range(t_len):
            if accs is None:
                nxt = [cols_d[i][t] for i in range(k)]
            else:
                nxt = [
                    tuple(radd[a][b] for a, b in zip(accs[i], cols_d[i][t]))
                    for i in range(k)
                ]
            if last:
                key = 0
                for i in range(k):
                    key = key * R + prefixes[i] + encode(nxt[i])
                hist[key] = hist.get(key, 0) + 1
            else:
                walk(depth + 1, nxt)

    walk(0, None)
    return hist


def _split_key(key: int, R: int, k: int) -> list[int]:
    codes = []
    for _ in range(k):
        key, code = divmod(key, R)
        codes.append(code)
    codes.reverse()
    return codes


def uniformity_check_abelian(gs, modulus: int, n: int, *,
                             budget: int = DEFAULT_BUDGET) -> UniformityReport:
    """Exhaustive fiber census on the abelian Lie ring Z_modulus.

    In an abelian ring every bracket vanishes, so substituted values are the
    linear parts evaluated mod `modulus`.
    """
    start = time.perf_counter()
    if modulus < 2:
        raise ValueError("modulus must be at least 2")
    gs = _as_elements(gs, n)
    k = len(gs)
    if not 1 <= k <= n:
        raise ValueError(f"system size {k} out of range 1..{n}")
    total = modulus ** n
    if total > budget:
        raise BudgetError(f"enumeration of {total} tuples exceeds the budget {budget}")
    hist: dict[int, int] = {}
    for r in itertools.product(range(modulus), repeat=n):
        key = 0
        for g in gs:
            v = sum(c * t for c, t in zip(g.linear, r)) % modulus
            key = key * modulus + v
        hist[key] = hist.get(key, 0) + 1
    assert sum(hist.values()) == total
    expected = modulus ** (n - k)
    key_space = modulus ** k
    fiber_max = max(hist.values())
    fiber_min = 0 if len(hist) < key_space else min(hist.values())
    uniform = fiber_min == expected and fiber_max == expected
    witness = None
    if not uniform:
        bad = [key for key, cnt in hist.items() if cnt != expected]
        if bad:
            key = min(bad)
            count = hist[key]
        else:
            key = next(c for c in itertools.count() if c not in hist)
            count = 0
        witness = {"target": _split_key(key, modulus, k), "count": count}
    elapsed = (time.perf_counter() - start) * 1000.0
    return UniformityReport(
        model={"variant": "abelian", "m": modulus, "n": n, "size": modulus},
        k=k, n=n, size=modulus, total=total, expected_fiber=expected,
        fiber_min=fiber_min, fiber_max=fiber_max, uniform=uniform,
        witness=witness, elapsed_ms=elapsed,
    )


@dataclass
class WitnessSearchResult:
    witness_model: Optional[dict] = None
    witness_report: Optional[UniformityReport] = None
    checked: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.witness_report is not None


def search_grid(n: int, abelian_moduli=DEFAULT_ABELIAN_MODULI,
                matrix_grid=DEFAULT_MATRIX_GRID, variant: str = "linear"):
    """Witness-search entries, cheapest first: abelian models, then matrix models by size."""
    entries = [("abelian", m) for m in sorted(abelian_moduli)]
    models = []
    for (p, q, m) in matrix_grid:
        params = ModelParams(QuotientParams(p, q, m, n), variant)
        models.append(FiniteModel(params))
    models.sort(key=lambda mod: (mod.size, mod.quotient.p, mod.quotient.q, mod.quotient.m))
    entries.extend(("matrix", mod) for mod in models)
    return entries


def witness_search(gs, n: int, *, abelian_moduli=DEFAULT_ABELIAN_MODULI,
                   matrix_grid=DEFAULT_MATRIX_GRID, variant: str = "linear",
                   budget: int = DEFAULT_BUDGET,
                   max_keys: int = DEFAULT_MAX_KEYS) -> WitnessSearchResult:
    """First model of the grid on which the system is not uniform, if any.

    Entries whose enumeration would exceed the budget are skipped and
    reported; finding no witness on a skipped-entry grid is therefore not
    conclusive.
    """
    gs = _as_elements(gs, n)
    result = WitnessSearchResult()
    for kind, entry in search_grid(n, abelian_moduli, matrix_grid, variant):
        if kind == "abelian":
            desc = {"variant": "abelian", "m": entry, "n": n, "size": entry}
            try:
                report = uniformity_check_abelian(gs, entry, n, budget=budget)
            except BudgetError as exc:
                result.skipped.append({"model": desc, "reason": str(exc)})
                continue
        else:
            desc = entry.describe()
            try:
                report = uniformity_check(gs, entry, budget=budget, max_keys=max_keys)
            except BudgetError as exc:
                result.skipped.append({"model": desc, "reason": str(exc)})
                continue
        result.checked.append(desc)
        if not report.uniform:
            result.witness_model = desc
            result.witness_report = report
            return result
    return result
