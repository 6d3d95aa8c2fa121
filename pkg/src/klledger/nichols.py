"""Nichols algebras of diagonal type, computed inside the quantum shuffle algebra.

The degree-m component of B(q) is the image of the quantum symmetrizer S_m
on V^{(x)m}.  Writing S_m = (sum_k c_k ... c_1)(id (x) S_{m-1}) gives

    image(S_m) = span{ T(x_i (x) b) : b in image(S_{m-1}) },
    T(x_i (x) w) = sum_k (prod_{j<=k} q_{i, w_j}) w_1..w_k x_i w_{k+1}..

so each multidegree component is generated from the components one degree
lower.  Vectors are sparse dicts word -> element of Z[zeta_N]; ranks come
from fraction-free echelon forms, so every zero test is exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import factorial, lcm, prod
from typing import Iterable, Mapping, Sequence

from .cyclo import IntCyclotomicRing
from .errors import BraidingMismatch, ComponentTooLarge, NotHomogeneous
from .lattice import DiagonalBraiding, screening_setup, braiding_from_charges
from .rootdata import RootSystem

Word = tuple[int, ...]
Vector = dict  # Word -> ring tuple

MAX_WORDS = 200_000


def multinomial(d: Sequence[int]) -> int:
    return factorial(sum(d)) // prod(factorial(x) for x in d)


def word_content(w: Word, n: int) -> tuple[int, ...]:
    c = [0] * n
    for x in w:
        c[x] += 1
    return tuple(c)


class _Field:
    """Ring helpers specialised to one braiding."""

    def __init__(self, q: DiagonalBraiding):
        self.q = q
        self.n = q.rank
        self.N = q.order
        self.ring = IntCyclotomicRing(self.N)
        self.qexp = [[int(q.exponents[i][j] * self.N) % self.N for j in range(self.n)] for i in range(self.n)]
        self.one = self.ring.one

    def root(self, k: int) -> tuple:
        return self.ring.root(k)


# ------------------------------------------------------------ echelon


class Echelon:
    """Fraction-free row echelon over Z[zeta_N] with pivots at the least word."""

    def __init__(self, ring: IntCyclotomicRing):
        self.ring = ring
        self.rows: dict[Word, Vector] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def _normalize(self, v: Vector) -> Vector:
        g = IntCyclotomicRing.content(v.values())
        if g > 1:
            v = {w: tuple(c // g for c in x) for w, x in v.items()}
        return v

    def reduce(self, v: Vector) -> Vector:
        v = {w: x for w, x in v.items() if any(x)}
        mul, sub = self.ring.mul, self.ring.sub
        while v:
            lead = min(v)
            row = self.rows.get(lead)
            if row is None:
                return v
            piv, c = row[lead], v[lead]
            out = {}
            for w, x in v.items():
                out[w] = mul(piv, x)
            for w, y in row.items():
                t = mul(c, y)
                out[w] = sub(out[w], t) if w in out else self.ring.neg(t)
            v = self._normalize({w: x for w, x in out.items() if any(x)})
        return v

    def insert(self, v: Vector) -> bool:
        """Add v to the span; True iff the rank grew."""
        r = self.reduce(v)
        if not r:
            return False
        self.rows[min(r)] = r
        return True

    def contains(self, v: Vector) -> bool:
        return not self.reduce(v)

    def basis(self) -> list[Vector]:
        return [self.rows[k] for k in sorted(self.rows)]


# ------------------------------------------------------------ engine


class NicholsEngine:
    """Caches the components image(S_d) of B(q) by multidegree."""

    def __init__(self, q: DiagonalBraiding, max_words: int = MAX_WORDS):
        self.q = q
        self.F = _Field(q)
        self.n = q.rank
        self.max_words = max_words
        zero = (0,) * self.n
        self._basis: dict[tuple[int, ...], list[Vector]] = {zero: [{(): self.F.one}]}

    # T(x_i (x) w)
    def shuffle_in(self, i: int, v: Vector) -> Vector:
        ring = self.F.ring
        qe = self.F.qexp[i]
        N = self.F.N
        out: dict = {}
        for w, c in v.items():
            k_exp = 0
            for k in range(len(w) + 1):
                if k:
                    k_exp = (k_exp + qe[w[k - 1]]) % N
                nw = w[:k] + (i,) + w[k:]
                term = ring.mul(ring.root(k_exp), c) if k_exp else c
                out[nw] = ring.add(out[nw], term) if nw in out else term
        return {w: x for w, x in out.items() if any(x)}

    def component(self, d: Sequence[int]) -> list[Vector]:
        d = tuple(d)
        if len(d) != self.n or any(x < 0 for x in d):
            raise ValueError("bad multidegree")
        if d in self._basis:
            return self._basis[d]
        if multinomial(d) > self.max_words:
            raise ComponentTooLarge(f"component {d} has {multinomial(d)} words (bound {self.max_words})")
        ech = Echelon(self.F.ring)
        for i in range(self.n):
            if d[i] == 0:
                continue
            lower = tuple(x - (j == i) for j, x in enumerate(d))
            for b in self.component(lower):
                ech.insert(self.shuffle_in(i, b))
        basis = ech.basis()
        self._basis[d] = basis
        return basis

    def dimension(self, d: Sequence[int]) -> int:
        return len(self.component(d))


def symmetrizer_rank(q: DiagonalBraiding, d: Sequence[int], method: str = "shuffle", max_words: int = MAX_WORDS) -> int:
    """dim B(q)_d as the rank of the quantum symmetrizer on the content-d words.

    ``method="shuffle"`` uses the recursive factorization; ``"matsumoto"``
    builds the full sum over S_m from reduced words (small m only).
    """
    if method == "shuffle":
        return NicholsEngine(q, max_words).dimension(d)
    if method == "matsumoto":
        return matsumoto_rank(q, d, max_words=max_words)
    raise ValueError(f"unknown method {method!r}")


# ------------------------------------------------------------ oracle


def bubble_reduced_word(perm: Sequence[int]) -> list[int]:
    """Reduced word (adjacent transpositions, 0-based) for perm via bubble sort.

    The returned list s_{k_1}, s_{k_2}, ... satisfies perm = s_{k_1} s_{k_2} ...
    as maps on positions, with length equal to the inversion number.
    """
    arr = list(perm)
    swaps = []
    changed = True
    while changed:
        changed = False
        for k in range(len(arr) - 1):
            if arr[k] > arr[k + 1]:
                arr[k], arr[k + 1] = arr[k + 1], arr[k]
                swaps.append(k)
                changed = True
    return swaps


def matsumoto_rank(q: DiagonalBraiding, d: Sequence[int], max_m: int = 7, max_words: int = MAX_WORDS) -> int:
    """Rank of sum_pi T_pi, each T_pi a product of braid operators c_k."""
    d = tuple(d)
    m = sum(d)
    if m > max_m or multinomial(d) > max_words:
        raise ComponentTooLarge(f"matsumoto oracle limited to m <= {max_m}")
    F = _Field(q)
    ring = F.ring
    letters = [i for i, x in enumerate(d) for _ in range(x)]
    words = sorted(set(itertools.permutations(letters)))
    reduced = [bubble_reduced_word(p) for p in itertools.permutations(range(m))]
    ech = Echelon(ring)
    for w in words:
        image: dict = {}
        for rw in reduced:
            cur, e = list(w), 0
            for k in reversed(rw):  # rightmost factor acts first
                e += F.qexp[cur[k]][cur[k + 1]]
                cur[k], cur[k + 1] = cur[k + 1], cur[k]
            key = tuple(cur)
            c = ring.root(e % F.N)
            image[key] = ring.add(image[key], c) if key in image else c
        ech.insert(image)
    return len(ech)


# ------------------------------------------------------------ tables


@dataclass
class GradedDimensionTable:
    braiding: DiagonalBraiding
    by_multidegree: dict[tuple[int, ...], int]
    by_total_degree: list[int]
    finite: bool
    cutoff: int
    top_degree: int | None = None
    total: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def hilbert_coeffs(self) -> list[int]:
        return self.by_total_degree

    @property
    def status(self) -> dict:
        if self.finite:
            return {"kind": "Finite", "top_degree": self.top_degree, "total_dimension": self.total}
        return {"kind": "CutoffReached", "cutoff": self.cutoff}

    def to_json(self) -> dict:
        return {
            "braiding": self.braiding.to_json(),
            "by_multidegree": {",".join(map(str, k)): v for k, v in sorted(self.by_multidegree.items())},
            "by_total_degree": list(self.by_total_degree),
            "status": self.status,
        }


def multidegrees(n: int, m: int) -> Iterable[tuple[int, ...]]:
    """All n-tuples of non-negative integers summing to m, lexicographic."""
    if n == 1:
        yield (m,)
        return
    for first in range(m, -1, -1):
        for rest in multidegrees(n - 1, m - first):
            yield (first,) + rest


def graded_dimensions(
    q: DiagonalBraiding, cutoff: int, engine: NicholsEngine | None = None, max_words: int = MAX_WORDS
) -> GradedDimensionTable:
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    eng = engine or NicholsEngine(q, max_words)
    n = q.rank
    by_md: dict[tuple[int, ...], int] = {(0,) * n: 1}
    totals = [1]
    alive = {(0,) * n}
    for m in range(1, cutoff + 1):
        layer = 0
        new_alive = set()
        for d in multidegrees(n, m):
            # only multidegrees one step above a nonzero component can be nonzero
            if not any(d[i] and tuple(x - (j == i) for j, x in enumerate(d)) in alive for i in range(n)):
                continue
            dim = eng.dimension(d)
            if dim:
                by_md[d] = dim
                new_alive.add(d)
                layer += dim
        if layer == 0:
            return GradedDimensionTable(q, by_md, totals, True, cutoff, m - 1, sum(totals))
        totals.append(layer)
        alive = new_alive
    return GradedDimensionTable(q, by_md, totals, False, cutoff)


@dataclass(frozen=True)
class ExceedsCutoff:
    cutoff: int


def total_dimension(q: DiagonalBraiding, cutoff: int = 12):
    """Finite total dimension, or an :class:`ExceedsCutoff` marker."""
    table = graded_dimensions(q, cutoff)
    return table.total if table.finite else ExceedsCutoff(cutoff)


# ------------------------------------------------------------ product formula


def product_formula(R: RootSystem, p: int) -> list[int]:
    """Coefficients of prod_beta (1 + t^h + ... + t^{(p-1)h}), h = ht(beta)."""
    poly = [1]
    for h in R.heights:
        factor = [0] * ((p - 1) * h + 1)
        for k in range(p):
            factor[k * h] = 1
        out = [0] * (len(poly) + len(factor) - 1)
        for i, a in enumerate(poly):
            for j, b in enumerate(factor):
                out[i + j] += a * b
        poly = out
    return poly


def product_formula_multigraded(R: RootSystem, p: int) -> dict[tuple[int, ...], int]:
    series = {(0,) * R.rank: 1}
    for beta in R.positive_roots:
        nxt: dict = {}
        for d, c in series.items():
            for k in range(p):
                key = tuple(x + k * b for x, b in zip(d, beta))
                nxt[key] = nxt.get(key, 0) + c
        series = nxt
    return series


def quantum_group_braiding(R: RootSystem, p: int, allow_degenerate: bool = False) -> DiagonalBraiding:
    lattice, charges = screening_setup(R.cartan, p)
    return braiding_from_charges(lattice, charges, allow_degenerate=allow_degenerate)


def product_formula_check(q: DiagonalBraiding, R: RootSystem, p: int, table: GradedDimensionTable | None = None) -> bool:
    expected = quantum_group_braiding(R, p, allow_degenerate=p < 2)
    if q.twist_invariants() != expected.twist_invariants():
        raise BraidingMismatch(f"braiding is not the {R.label}, p={p} braiding up to twist")
    poly = product_formula(R, p)
    if table is None:
        table = graded_dimensions(q, len(poly))
    if not table.finite:
        return False
    return table.by_total_degree == poly


# ------------------------------------------------------------ elements


def word_element(*terms) -> dict:
    """Build {word: coefficient tuple}; terms are (word, CycloScalar-or-int)."""
    return {tuple(w): c for w, c in terms}


class Element:
    """Formal linear combination of words with CycloScalar coefficients."""

    def __init__(self, terms: Mapping | None = None):
        from .cyclo import CycloScalar

        self.terms: dict[Word, CycloScalar] = {}
        for w, c in (terms or {}).items():
            c = c if isinstance(c, CycloScalar) else CycloScalar.from_rational(c)
            if not c.is_zero():
                self.terms[tuple(w)] = c

    @classmethod
    def generator(cls, i: int) -> Element:
        return cls({(i,): 1})

    def __add__(self, other: Element) -> Element:
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out[w] + c if w in out else c
        return Element(out)

    def __sub__(self, other: Element) -> Element:
        return self + other.scale(-1)

    def scale(self, s) -> Element:
        return Element({w: c * s for w, c in self.terms.items()})

    def __mul__(self, other: Element) -> Element:
        out: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                out[w] = out[w] + c1 * c2 if w in out else c1 * c2
        return Element(out)

    def __pow__(self, k: int) -> Element:
        out = Element({(): 1})
        for _ in range(k):
            out = out * self
        return out

    def multidegree(self, n: int) -> tuple[int, ...]:
        degs = {word_content(w, n) for w in self.terms}
        if len(degs) > 1:
            raise NotHomogeneous(f"element mixes multidegrees {sorted(degs)}")
        return degs.pop() if degs else (0,) * n


def ad_q(q: DiagonalBraiding, x: int, y: Element) -> Element:
    """Braided commutator x_x y - q_{x, deg y} y x_x for homogeneous y."""
    d = y.multidegree(q.rank)
    factor = None
    for j, k in enumerate(d):
        if k:
            f = q.q(x, j) ** k
            factor = f if factor is None else factor * f
    gx = Element.generator(x)
    right = y * gx
    return gx * y - (right.scale(factor) if factor is not None else right)


def serre_element(q: DiagonalBraiding, i: int, j: int, power: int) -> Element:
    """ad_{x_i}^power (x_j)."""
    e = Element.generator(j)
    for _ in range(power):
        e = ad_q(q, i, e)
    return e


def relation_membership(q: DiagonalBraiding, element: Element, engine: NicholsEngine | None = None) -> bool:
    """True iff the element lies in the kernel of the quantum symmetrizer."""
    element.multidegree(q.rank)
    if not element.terms:
        return True
    eng = engine or NicholsEngine(q)
    ring = eng.F.ring
    coeffs = {w: c.embed(ring.order).coeffs for w, c in element.terms.items()}
    # clearing a common denominator does not change kernel membership
    den = lcm(*(x.denominator for cs in coeffs.values() for x in cs))
    image: dict = {}
    for w, cs in coeffs.items():
        ct = tuple(int(x * den) for x in cs)
        for u, x in symmetrize_word(eng, w).items():
            t = ring.mul(ct, x)
            image[u] = ring.add(image[u], t) if u in image else t
    return not any(any(x) for x in image.values())


def symmetrize_word(eng: NicholsEngine, w: Word) -> dict:
    """S_m(w) through S_m = (sum_k c_k..c_1)(id (x) S_{m-1})."""
    if len(w) <= 1:
        return {w: eng.F.one}
    tail = symmetrize_word(eng, w[1:])
    return eng.shuffle_in(w[0], tail)


# ------------------------------------------------------------ primitives


def _vectors_to_matrix_rank(ring: IntCyclotomicRing, vectors: list[dict]) -> int:
    ech = Echelon(ring)
    for v in vectors:
        ech.insert(v)
    return len(ech)


def _kernel_dimension(ring: IntCyclotomicRing, basis: list[Vector], linear_map) -> int:
    """dim of {sum a_k basis_k : linear_map(.) = 0} = len(basis) - rank(images)."""
    images = [linear_map(b) for b in basis]
    return len(basis) - _vectors_to_matrix_rank(ring, images)


def _deconcatenation(v: Vector, m: int) -> Vector:
    """All components Delta_{i, m-i}, 0 < i < m, stacked as one vector."""
    out = {}
    for w, c in v.items():
        for i in range(1, m):
            out[(i, w[:i], w[i:])] = c
    return out


def _braided_coproduct(F: _Field, v: Vector, m: int) -> Vector:
    """Stacked components of the braided (tensor algebra) coproduct of v.

    Delta_{i, m-i}(w) = sum over i-subsets S of the positions, with the factor
    prod q_{w_a w_b} over pairs a < b with a not in S and b in S.
    """
    ring = F.ring
    out: dict = {}
    for w, c in v.items():
        for i in range(1, m):
            for S in itertools.combinations(range(m), i):
                Sset = set(S)
                e = 0
                for b in S:
                    for a in range(b):
                        if a not in Sset:
                            e += F.qexp[w[a]][w[b]]
                comp = tuple(w[k] for k in S)
                rest = tuple(w[k] for k in range(m) if k not in Sset)
                key = (i, comp, rest)
                t = ring.mul(ring.root(e % F.N), c)
                out[key] = ring.add(out[key], t) if key in out else t
    return {k: x for k, x in out.items() if any(x)}


def primitive_dimension(q: DiagonalBraiding, m: int, engine: NicholsEngine | None = None) -> int:
    """dim of {x in image(S_m) : all deconcatenation components vanish}."""
    if m < 1:
        raise ValueError("m must be >= 1")
    eng = engine or NicholsEngine(q)
    total = 0
    for d in multidegrees(q.rank, m):
        basis = eng.component(d)
        if m == 1:
            total += len(basis)
        elif basis:
            total += _kernel_dimension(eng.F.ring, basis, lambda v: _deconcatenation(v, m))
    return total


def tensor_primitive_dimension(q: DiagonalBraiding, d: Sequence[int], max_words: int = 5000) -> int:
    """Primitives of the tensor algebra T(V) in multidegree d (braided coproduct).

    These are the defining relations of B(q) in that degree that are not
    consequences of lower ones; e.g. [x1, x2]_+ for the q-commutative braiding.
    """
    d = tuple(d)
    m = sum(d)
    if multinomial(d) > max_words:
        raise ComponentTooLarge(f"component {d} too large for tensor primitives")
    F = _Field(q)
    letters = [i for i, x in enumerate(d) for _ in range(x)]
    words = sorted(set(itertools.permutations(letters)))
    basis = [{w: F.one} for w in words]
    if m == 1:
        return len(basis)
    return _kernel_dimension(F.ring, basis, lambda v: _braided_coproduct(F, v, m))


def generation_rank(q: DiagonalBraiding, m: int, engine: NicholsEngine | None = None) -> int:
    """Rank of symmetrized concatenation V (x) B_{m-1} -> V^{(x)m}, summed over multidegrees."""
    eng = engine or NicholsEngine(q)
    total = 0
    for d in multidegrees(q.rank, m):
        vecs = []
        for i in range(q.rank):
            if d[i]:
                lower = tuple(x - (j == i) for j, x in enumerate(d))
                for b in eng.component(lower):
                    prod_v = {(i,) + w: c for w, c in b.items()}
                    # symmetrize x_i * b: S_m(x_i w) with S_{m-1} applied to a symmetrized b
                    vecs.append(_symmetrize_vector(eng, prod_v))
        total += _vectors_to_matrix_rank(eng.F.ring, vecs)
    return total


def _symmetrize_vector(eng: NicholsEngine, v: Vector) -> Vector:
    ring = eng.F.ring
    out: dict = {}
    for w, c in v.items():
        for u, x in symmetrize_word(eng, w).items():
            t = ring.mul(c, x)
            out[u] = ring.add(out[u], t) if u in out else t
    return {k: x for k, x in out.items() if any(x)}
