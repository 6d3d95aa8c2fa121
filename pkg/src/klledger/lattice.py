"""Even lattices, discriminant quadratic spaces and abelian 3-cocycles.

Group elements of a discriminant form are tuples in the Smith-normal-form
basis, ``a[i]`` in ``range(factors[i])``.  Quadratic values are stored as
exponents: ``q(a)`` modulo 2 with ``Q(a) = exp(pi i q(a))`` and ``b(a, b)``
modulo 1 with ``B(a, b) = exp(2 pi i b(a, b))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, prod
from typing import Iterator, Sequence

import numpy as np

from . import intmat
from .cyclo import CycloScalar, root_of_unity
from .errors import (
    BadSelfPairing,
    CosetCollision,
    ElementOutOfRange,
    GroupTooLarge,
    LatticeError,
    NotEven,
    NotIsotropic,
    NotPositiveDefinite,
)

Element = tuple[int, ...]


def _frac_matrix(rows) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


@dataclass(frozen=True)
class IntegralLattice:
    gram: tuple[tuple[Fraction, ...], ...]

    def __init__(self, gram: Sequence[Sequence]):
        g = _frac_matrix(gram)
        n = len(g)
        if any(len(row) != n for row in g):
            raise LatticeError("gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise LatticeError("gram matrix must be symmetric")
        object.__setattr__(self, "gram", g)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def is_positive_definite(self) -> bool:
        return all(m > 0 for m in intmat.leading_minors(self.gram))

    def is_even_integral(self) -> bool:
        n = self.rank
        return all(x.denominator == 1 for row in self.gram for x in row) and all(
            self.gram[i][i] % 2 == 0 for i in range(n)
        )

    def inner(self, x: Sequence, y: Sequence) -> Fraction:
        return sum(
            (Fraction(x[i]) * self.gram[i][j] * Fraction(y[j]) for i in range(self.rank) for j in range(self.rank)),
            Fraction(0),
        )

    def determinant(self) -> Fraction:
        return intmat.det(self.gram)

    def in_dual(self, x: Sequence) -> bool:
        return all(v.denominator == 1 for v in intmat.matvec(self.gram, [Fraction(c) for c in x]))

    def require_even_positive(self) -> None:
        if not self.is_positive_definite():
            raise NotPositiveDefinite("gram matrix is not positive definite")
        if not self.is_even_integral():
            raise NotEven("lattice is not even integral")


@dataclass(frozen=True)
class DiscriminantForm:
    """Finite quadratic space (Gamma, q) presented on cyclic generators.

    ``q_diag[i]`` is q(g_i) mod 2 and ``b_matrix[i][j]`` is b(g_i, g_j) mod 1.
    ``generators`` (optional) holds each g_i as a vector of Lambda* (x) Q in
    lattice coordinates, ``coord_map`` the integer rows sending a dual vector to
    its SNF coordinates.
    """

    factors: tuple[int, ...]
    q_diag: tuple[Fraction, ...]
    b_matrix: tuple[tuple[Fraction, ...], ...]
    generators: tuple[tuple[Fraction, ...], ...] | None = None
    coord_map: tuple[tuple[Fraction, ...], ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        k = len(self.factors)
        if any(d < 2 for d in self.factors):
            raise LatticeError("cyclic factors must have order >= 2")
        for i in range(k):
            if (self.q_diag[i] * self.factors[i]).denominator != 1:
                raise LatticeError("q(g_i) * d_i must be an integer")
            if (self.q_diag[i] * self.factors[i] ** 2) % 2 != 0:
                raise LatticeError("q(d_i g_i) must vanish mod 2")
            for j in range(k):
                if (self.b_matrix[i][j] * self.factors[i]).denominator != 1:
                    raise LatticeError("b(g_i, g_j) * d_i must be an integer")

    @classmethod
    def from_exponents(cls, factors, q_diag, b_offdiag=None) -> DiscriminantForm:
        """Build an abstract form; ``b_offdiag[i][j]`` is used for i != j."""
        k = len(factors)
        q = tuple(Fraction(x) % 2 for x in q_diag)
        b = [[Fraction(0)] * k for _ in range(k)]
        for i in range(k):
            b[i][i] = q[i] % 1
            for j in range(k):
                if i != j and b_offdiag is not None:
                    b[i][j] = Fraction(b_offdiag[i][j]) % 1
        return cls(tuple(int(d) for d in factors), q, tuple(tuple(r) for r in b))

    @property
    def order(self) -> int:
        return prod(self.factors)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def zero(self) -> Element:
        return (0,) * self.rank

    def elements(self) -> Iterator[Element]:
        return itertools.product(*(range(d) for d in self.factors))

    def check(self, a: Sequence[int]) -> Element:
        if len(a) != self.rank or any(not 0 <= x < d for x, d in zip(a, self.factors)):
            raise ElementOutOfRange(f"{tuple(a)} is not an element of Z/{self.factors}")
        return tuple(a)

    def add(self, a: Element, b: Element) -> Element:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.factors))

    def neg(self, a: Element) -> Element:
        return tuple((-x) % d for x, d in zip(a, self.factors))

    def scale(self, k: int, a: Element) -> Element:
        return tuple((k * x) % d for x, d in zip(a, self.factors))

    def element_order(self, a: Element) -> int:
        m = 1
        for x, d in zip(a, self.factors):
            c = d // gcd(x, d)
            m = m * c // gcd(m, c)
        return m

    def q(self, a: Sequence[int]) -> Fraction:
        k = self.rank
        val = sum((self.q_diag[i] * a[i] * a[i] for i in range(k)), Fraction(0))
        val += 2 * sum((self.b_matrix[i][j] * a[i] * a[j] for i in range(k) for j in range(i + 1, k)), Fraction(0))
        return val % 2

    def b(self, a: Sequence[int], c: Sequence[int]) -> Fraction:
        k = self.rank
        return sum((self.b_matrix[i][j] * a[i] * c[j] for i in range(k) for j in range(k)), Fraction(0)) % 1

    def element_of(self, vector: Sequence) -> Element:
        """SNF coordinates of a dual-lattice vector (lattice-derived forms only)."""
        if self.coord_map is None:
            raise LatticeError("form carries no lattice coordinates")
        out = []
        for row, d in zip(self.coord_map, self.factors):
            v = sum((r * Fraction(x) for r, x in zip(row, vector)), Fraction(0))
            if v.denominator != 1:
                raise LatticeError(f"{tuple(vector)} is not in the dual lattice")
            out.append(int(v) % d)
        return tuple(out)

    def to_json(self) -> dict:
        k = self.rank
        return {
            "factors": list(self.factors),
            "order": self.order,
            "q_exponents_on_generators": [str(x) for x in self.q_diag],
            "b_exponents_on_generators": [[str(self.b_matrix[i][j]) for j in range(k)] for i in range(k)],
        }


def discriminant_form(lattice: IntegralLattice) -> DiscriminantForm:
    lattice.require_even_positive()
    g = [[int(x) for x in row] for row in lattice.gram]
    u, d, _ = intmat.smith_normal_form(g)
    n = lattice.rank
    u_inv = intmat.inverse(u)
    g_inv = intmat.inverse(g)
    factors, gens, rows = [], [], []
    ug = intmat.matmul(u, g)
    for i in range(n):
        if d[i][i] > 1:
            factors.append(d[i][i])
            y = [u_inv[r][i] for r in range(n)]
            gens.append(tuple(intmat.matvec(g_inv, y)))
            rows.append(tuple(Fraction(x) for x in ug[i]))
    k = len(factors)
    q_diag = tuple(lattice.inner(gens[i], gens[i]) % 2 for i in range(k))
    b = tuple(tuple(lattice.inner(gens[i], gens[j]) % 1 for j in range(k)) for i in range(k))
    return DiscriminantForm(tuple(factors), q_diag, b, tuple(gens), tuple(rows))


def evaluate_Q(form: DiscriminantForm, a: Sequence[int]) -> CycloScalar:
    a = form.check(a)
    return root_of_unity(form.q(a) / 2)


def evaluate_B(form: DiscriminantForm, a: Sequence[int], b: Sequence[int]) -> CycloScalar:
    a, b = form.check(a), form.check(b)
    polar = evaluate_Q(form, form.add(a, b)) / (evaluate_Q(form, a) * evaluate_Q(form, b))
    stored = root_of_unity(form.b(a, b))
    if polar != stored:
        raise LatticeError(f"B({a},{b}) disagrees with the polarization of Q")
    return stored


# ---------------------------------------------------------------- cocycles


class _Indexer:
    """Mixed-radix indexing of group elements plus an addition table."""

    def __init__(self, form: DiscriminantForm):
        self.form = form
        self.elements = list(form.elements())
        self.index = {a: i for i, a in enumerate(self.elements)}
        size = len(self.elements)
        self.add = np.empty((size, size), dtype=np.int64)
        for i, a in enumerate(self.elements):
            for j, c in enumerate(self.elements):
                self.add[i, j] = self.index[form.add(a, c)]


@dataclass(frozen=True)
class AbelianCocycle:
    """Braiding sigma and associator omega on Vect_Gamma, as exponents mod 1.

    ``sigma(a, b) = exp(2 pi i sigma_exp(a, b))`` and likewise for omega.
    """

    form: DiscriminantForm
    q_reps: tuple[Fraction, ...]

    def sigma_exp(self, a: Element, b: Element) -> Fraction:
        f = self.form
        val = sum((self.q_reps[i] / 2 * a[i] * b[i] for i in range(f.rank)), Fraction(0))
        val += sum((f.b_matrix[i][j] * a[i] * b[j] for i in range(f.rank) for j in range(i + 1, f.rank)), Fraction(0))
        return val % 1

    def omega_exp(self, a: Element, b: Element, c: Element) -> Fraction:
        f = self.form
        val = Fraction(0)
        for i, d in enumerate(f.factors):
            if b[i] + c[i] >= d:
                val += self.q_reps[i] * d / 2 * a[i]
        return val % 1

    def sigma(self, a, b) -> CycloScalar:
        return root_of_unity(self.sigma_exp(tuple(a), tuple(b)))

    def omega(self, a, b, c) -> CycloScalar:
        return root_of_unity(self.omega_exp(tuple(a), tuple(b), tuple(c)))

    def omega_is_trivial(self) -> bool:
        return all((q * d) % 2 == 0 for q, d in zip(self.q_reps, self.form.factors))

    def tables(self) -> tuple[_Indexer, int, np.ndarray, np.ndarray]:
        """Integer exponent tables modulo a common denominator M."""
        idx = _Indexer(self.form)
        els = idx.elements
        size = len(els)
        sig = [[self.sigma_exp(a, b) for b in els] for a in els]
        om = [[[self.omega_exp(a, b, c) for c in els] for b in els] for a in els]
        denoms = {x.denominator for row in sig for x in row} | {x.denominator for m in om for r in m for x in r}
        modulus = 1
        for d in denoms:
            modulus = modulus * d // gcd(modulus, d)
        s = np.array([[int(x * modulus) for x in row] for row in sig], dtype=np.int64).reshape(size, size)
        o = np.array([[[int(x * modulus) for x in r] for r in m] for m in om], dtype=np.int64).reshape(size, size, size)
        return idx, modulus, s, o

    def verify(self) -> dict[str, bool]:
        """Exhaustive pentagon / hexagon / Q / B checks."""
        idx, mod, s, o = self.tables()
        f = self.form
        size = len(idx.elements)
        add = idx.add
        r = np.arange(size)
        A, B, C = np.meshgrid(r, r, r, indexing="ij")
        # pentagon: w(b,c,d) w(a,b+c,d) w(a,b,c) = w(a+b,c,d) w(a,b,c+d)
        a4, b4, c4, d4 = np.meshgrid(r, r, r, r, indexing="ij")
        pent = o[b4, c4, d4] + o[a4, add[b4, c4], d4] + o[a4, b4, c4] - o[add[a4, b4], c4, d4] - o[a4, b4, add[c4, d4]]
        pentagon = bool(np.all(pent % mod == 0))
        # hexagon I: w(b,c,a) s(a,b+c) w(a,b,c) = s(a,b) w(b,a,c) s(a,c)
        h1 = o[B, C, A] + s[A, add[B, C]] + o[A, B, C] - s[A, B] - o[B, A, C] - s[A, C]
        # hexagon II: w(c,a,b)^-1 s(a+b,c) w(a,b,c)^-1 = s(a,c) w(a,c,b)^-1 s(b,c)
        h2 = -o[C, A, B] + s[add[A, B], C] - o[A, B, C] - s[A, C] + o[A, C, B] - s[B, C]
        sq = [Fraction(int(s[i, i]), mod) - f.q(a) / 2 for i, a in enumerate(idx.elements)]
        bb = [
            Fraction(int(s[i, j] + s[j, i]), mod) - f.b(a, c)
            for i, a in enumerate(idx.elements)
            for j, c in enumerate(idx.elements)
        ]
        return {
            "pentagon": pentagon,
            "hexagon_1": bool(np.all(h1 % mod == 0)),
            "hexagon_2": bool(np.all(h2 % mod == 0)),
            "sigma_diag_is_Q": all(x.denominator == 1 for x in sq),
            "sigma_symmetrized_is_B": all(x.denominator == 1 for x in bb),
        }


def build_cocycle(form: DiscriminantForm) -> AbelianCocycle:
    """Explicit (sigma, omega) realizing Q.

    sigma is bilinear on the representatives 0 <= a_i < d_i, with the diagonal
    part exp(pi i q_i a_i b_i); omega records the carries that bilinear-on-
    representatives misses.  omega is identically 1 iff every q_i d_i is even,
    which always happens for odd |Gamma|.
    """
    return AbelianCocycle(form, tuple(Fraction(q) % 2 for q in form.q_diag))


# ---------------------------------------------------------- subgroups


@dataclass(frozen=True)
class Subgroup:
    elements: frozenset
    generators: tuple[Element, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def sorted_elements(self) -> list[Element]:
        return sorted(self.elements)


def span(form: DiscriminantForm, gens: Sequence[Element]) -> frozenset:
    elems = {form.zero}
    for g in gens:
        if g in elems:
            continue
        new = set(elems)
        multiple = g
        while multiple not in elems:
            new |= {form.add(h, multiple) for h in elems}
            multiple = form.add(multiple, g)
        elems = new
    return frozenset(elems)


def _minimal_generators(form: DiscriminantForm, elements) -> tuple[Element, ...]:
    gens: list[Element] = []
    current = frozenset([form.zero])
    for a in sorted(elements):
        if a not in current:
            gens.append(a)
            current = span(form, gens)
    return tuple(gens)


def make_subgroup(form: DiscriminantForm, gens: Sequence[Sequence[int]]) -> Subgroup:
    gens = [form.check(g) for g in gens]
    elems = span(form, gens)
    return Subgroup(elems, _minimal_generators(form, elems))


def is_isotropic(form: DiscriminantForm, sub: Subgroup) -> bool:
    return all(form.q(a) == 0 for a in sub.elements)


def isotropic_subgroups(form: DiscriminantForm, max_order: int = 10**4) -> list[Subgroup]:
    if form.order > max_order:
        raise GroupTooLarge(f"|Gamma| = {form.order} exceeds bound {max_order}")
    iso = [a for a in form.elements() if form.q(a) == 0]
    start = frozenset([form.zero])
    found = {start: ()}
    frontier = [start]
    while frontier:
        nxt = []
        for h in frontier:
            gens = found[h]
            for x in iso:
                if x in h or any(form.b(x, g) != 0 for g in gens):
                    continue
                new = span(form, list(gens) + [x])
                if new not in found:
                    found[new] = _minimal_generators(form, new)
                    nxt.append(new)
        frontier = nxt
    subs = [Subgroup(e, g) for e, g in found.items()]
    subs.sort(key=lambda s: (s.order, s.sorted_elements()))
    return subs


def orthogonal_complement(form: DiscriminantForm, sub: Subgroup) -> frozenset:
    return frozenset(a for a in form.elements() if all(form.b(a, g) == 0 for g in sub.generators))


def _lift_lattice(form: DiscriminantForm, gens: Sequence[Element]) -> list[list[int]]:
    k = form.rank
    rows = [list(g) for g in gens] + [[form.factors[i] if j == i else 0 for j in range(k)] for i in range(k)]
    return intmat.row_hnf(rows)


def quotient_structure(form: DiscriminantForm, big_gens, small_gens) -> list[tuple[int, list[int]]]:
    """Cyclic decomposition of <big>/<small>: list of (order, generator lift)."""
    big = _lift_lattice(form, big_gens)
    small = _lift_lattice(form, small_gens)
    big_inv = intmat.inverse(big)
    m = intmat.matmul(small, big_inv)
    if any(x.denominator != 1 for row in m for x in row):
        raise LatticeError("subgroup is not contained in the larger group")
    m = [[int(x) for x in row] for row in m]
    _, d, v = intmat.smith_normal_form(m)
    v_inv = intmat.inverse(v)
    basis = intmat.matmul(v_inv, big)
    out = []
    for j in range(len(d)):
        if d[j][j] > 1:
            out.append((d[j][j], [int(x) for x in basis[j]]))
    return out


def extend_by_isotropic(form: DiscriminantForm, sub: Subgroup) -> DiscriminantForm:
    """The local-module quadratic space I-perp / I."""
    if not is_isotropic(form, sub):
        raise NotIsotropic("subgroup is not isotropic")
    perp = orthogonal_complement(form, sub)
    pieces = quotient_structure(form, _minimal_generators(form, perp), sub.generators)
    factors = tuple(d for d, _ in pieces)
    reps = [tuple(x % dd for x, dd in zip(g, form.factors)) for _, g in pieces]
    q_diag = tuple(form.q(a) for a in reps)
    b = tuple(tuple(form.b(a, c) for c in reps) for a in reps)
    gens = None
    if form.generators is not None:
        gens = tuple(
            tuple(sum((a[i] * form.generators[i][c] for i in range(form.rank)), Fraction(0)) for c in range(len(form.generators[0])))
            for a in reps
        )
    return DiscriminantForm(factors, q_diag, b, gens)


def radical(form: DiscriminantForm) -> Subgroup:
    gens_all = [tuple(int(i == j) for j in range(form.rank)) for i in range(form.rank)]
    rad = frozenset(a for a in form.elements() if all(form.b(a, g) == 0 for g in gens_all))
    return Subgroup(rad, _minimal_generators(form, rad))


def is_nondegenerate(form: DiscriminantForm) -> bool:
    return radical(form).order == 1


# ----------------------------------------------------------- braidings


@dataclass(frozen=True)
class DiagonalBraiding:
    """q_ij = exp(2 pi i r_ij) with r_ij stored modulo 1."""

    exponents: tuple[tuple[Fraction, ...], ...]
    p_values: tuple[int, ...] | None = None

    def __init__(self, exponents, p_values=None):
        ex = tuple(tuple(Fraction(x) % 1 for x in row) for row in exponents)
        n = len(ex)
        if any(len(row) != n for row in ex):
            raise LatticeError("braiding matrix must be square")
        object.__setattr__(self, "exponents", ex)
        object.__setattr__(self, "p_values", None if p_values is None else tuple(p_values))

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def order(self) -> int:
        """Smallest N with every q_ij an N-th root of unity."""
        n = 1
        for row in self.exponents:
            for x in row:
                n = n * x.denominator // gcd(n, x.denominator)
        return n

    def q(self, i: int, j: int) -> CycloScalar:
        return root_of_unity(self.exponents[i][j])

    def to_json(self) -> dict:
        out = {"rank": self.rank, "exponents": [[f"{x.numerator}/{x.denominator}" for x in row] for row in self.exponents]}
        if self.p_values is not None:
            out["p_values"] = list(self.p_values)
        return out

    @classmethod
    def from_json(cls, payload: dict) -> DiagonalBraiding:
        ex = [[Fraction(x) for x in row] for row in payload["exponents"]]
        if "rank" in payload and int(payload["rank"]) != len(ex):
            raise LatticeError("rank does not match exponent matrix")
        return cls(ex, payload.get("p_values"))

    def permuted(self, perm: Sequence[int]) -> DiagonalBraiding:
        """Relabel generators: new index k is old index perm[k]."""
        return DiagonalBraiding([[self.exponents[perm[i]][perm[j]] for j in range(self.rank)] for i in range(self.rank)])

    def twist_invariants(self) -> tuple:
        n = self.rank
        return (
            tuple(self.exponents[i][i] for i in range(n)),
            tuple((self.exponents[i][j] + self.exponents[j][i]) % 1 for i in range(n) for j in range(i + 1, n)),
        )


def braiding_from_charges(
    lattice: IntegralLattice, charges: Sequence[Sequence], allow_degenerate: bool = False
) -> DiagonalBraiding:
    """q_ij = exp(pi i (alpha_i, alpha_j)) for screening charges alpha_i in Lambda*.

    Each charge must satisfy (alpha_i, alpha_i) = 2/p_i with an integer
    p_i >= 2 and the cosets alpha_i + Lambda must be nonzero and pairwise
    distinct.  ``allow_degenerate`` admits p_i = 1 and skips the coset test.
    """
    vecs = [tuple(Fraction(c) for c in a) for a in charges]
    n = len(vecs)
    p_values = []
    for a in vecs:
        if len(a) != lattice.rank:
            raise LatticeError("charge dimension does not match lattice rank")
        if not lattice.in_dual(a):
            raise LatticeError(f"charge {a} is not in the dual lattice")
        norm = lattice.inner(a, a)
        if norm <= 0:
            raise BadSelfPairing(f"(alpha, alpha) = {norm} is not positive")
        p = 2 / norm
        lowest = 1 if allow_degenerate else 2
        if p.denominator != 1 or p < lowest:
            raise BadSelfPairing(f"(alpha, alpha) = {norm} is not 2/p with integer p >= {lowest}")
        p_values.append(int(p))
    if not allow_degenerate:
        for i in range(n):
            if all(x.denominator == 1 for x in vecs[i]):
                raise CosetCollision(f"charge {i} lies in the lattice (zero coset)")
            for j in range(i):
                if all((x - y).denominator == 1 for x, y in zip(vecs[i], vecs[j])):
                    raise CosetCollision(f"charges {j} and {i} share a coset")
    ex = [[lattice.inner(vecs[i], vecs[j]) / 2 for j in range(n)] for i in range(n)]
    return DiagonalBraiding(ex, p_values)


def screening_setup(cartan: Sequence[Sequence[int]], p: int) -> tuple[IntegralLattice, list[list[Fraction]]]:
    """Lattice p * Cartan with charges e_i / p, so (alpha_i, alpha_j) = C_ij / p."""
    n = len(cartan)
    lattice = IntegralLattice([[p * c for c in row] for row in cartan])
    charges = [[Fraction(int(i == j), p) for j in range(n)] for i in range(n)]
    return lattice, charges
