"""Simply-laced root systems.

Weights are tuples in fundamental-weight coordinates, roots are tuples in
simple-root coordinates.  With (alpha_i, alpha_i) = 2 the two are related by
the (symmetric) Cartan matrix: a root with coordinates c has fundamental
coordinates C c.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from typing import Sequence

from . import intmat
from .errors import NotDominant, UnsupportedType, WeylTooLarge

Weight = tuple[int, ...]

WEYL_BOUND = 10**6


def cartan_matrix(type_label: str, rank: int) -> list[list[int]]:
    """Bourbaki-labelled Cartan matrix for A_n, D_n (n >= 4), E_6, E_7, E_8."""
    t = type_label.upper()
    n = rank
    c = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j):
        c[i][j] = c[j][i] = -1

    if t == "A" and n >= 1:
        for i in range(n - 1):
            link(i, i + 1)
    elif t == "D" and n >= 4:
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif t == "E" and n in (6, 7, 8):
        link(0, 2)
        link(1, 3)
        link(2, 3)
        for i in range(3, n - 1):
            link(i, i + 1)
    else:
        raise UnsupportedType(f"unsupported root system {type_label}{rank}")
    return c


def parse_type(label: str) -> tuple[str, int]:
    m = re.fullmatch(r"\s*([A-Za-z])\s*(\d+)\s*", label)
    if not m:
        raise UnsupportedType(f"cannot parse root system label {label!r}")
    return m.group(1).upper(), int(m.group(2))


def weyl_order(type_label: str, rank: int) -> int:
    t = type_label.upper()
    if t == "A":
        return factorial(rank + 1)
    if t == "D":
        return 2 ** (rank - 1) * factorial(rank)
    return {6: 51840, 7: 2903040, 8: 696729600}[rank]


class RootSystem:
    """Root data for one ADE type.  Weyl elements are enumerated lazily."""

    def __init__(self, type_label: str, rank: int, weyl_bound: int = WEYL_BOUND):
        self.type_label = type_label.upper()
        self.rank = rank
        self.cartan = cartan_matrix(type_label, rank)
        self.cartan_inverse = intmat.inverse(self.cartan)
        self.positive_roots = self._positive_roots()
        self.heights = [sum(b) for b in self.positive_roots]
        self.rho: Weight = (1,) * rank
        self.theta = max(self.positive_roots, key=sum)
        self.dual_coxeter = sum(self.theta) + 1
        self.weyl_order = weyl_order(self.type_label, rank)
        self.weyl_bound = weyl_bound
        self._weyl = None

    @property
    def label(self) -> str:
        return f"{self.type_label}{self.rank}"

    def __repr__(self) -> str:
        return f"RootSystem({self.label})"

    def _positive_roots(self) -> list[Weight]:
        n = self.rank
        simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        roots = list(simple)
        seen = set(simple)
        layer = list(simple)
        while layer:
            nxt = []
            for b in layer:
                for i in range(n):
                    if self.root_pairing(b, simple[i]) == -1:
                        c = tuple(x + (j == i) for j, x in enumerate(b))
                        if c not in seen:
                            seen.add(c)
                            nxt.append(c)
            roots.extend(sorted(nxt))
            layer = nxt
        return roots

    # --- coordinates and pairings
    def root_pairing(self, a: Sequence[int], b: Sequence[int]) -> int:
        n = self.rank
        return sum(a[i] * self.cartan[i][j] * b[j] for i in range(n) for j in range(n))

    def root_to_weight(self, a: Sequence[int]) -> Weight:
        return tuple(int(x) for x in intmat.matvec(self.cartan, a))

    def weight_to_root(self, lam: Sequence) -> tuple[Fraction, ...]:
        return tuple(intmat.matvec(self.cartan_inverse, [Fraction(x) for x in lam]))

    def weight_pairing(self, lam: Sequence, mu: Sequence) -> Fraction:
        n = self.rank
        return sum(
            (Fraction(lam[i]) * self.cartan_inverse[i][j] * Fraction(mu[j]) for i in range(n) for j in range(n)),
            Fraction(0),
        )

    def pair_with_root(self, lam: Sequence, beta: Sequence[int]) -> Fraction:
        """(lam, beta) for a weight in fundamental coordinates and a root in simple coordinates."""
        return sum((Fraction(x) * b for x, b in zip(lam, beta)), Fraction(0))

    def in_root_lattice(self, lam: Sequence) -> bool:
        return all(x.denominator == 1 for x in self.weight_to_root(lam))

    def reflect(self, i: int, lam: Sequence) -> tuple:
        """Simple reflection s_i on a weight in fundamental coordinates."""
        li = lam[i]
        return tuple(x - li * c for x, c in zip(lam, self.cartan[i]))

    def is_dominant(self, lam: Sequence) -> bool:
        return all(x >= 0 for x in lam)

    # --- Weyl group
    @property
    def weyl_elements(self) -> list[tuple[tuple[tuple[int, ...], ...], int]]:
        """All (matrix, det) pairs, matrices acting on simple-root coordinates.

        Column j of a matrix is the image of alpha_j.
        """
        if self._weyl is None:
            if self.weyl_order > self.weyl_bound:
                raise WeylTooLarge(f"|W({self.label})| = {self.weyl_order} exceeds bound {self.weyl_bound}")
            self._weyl = self._enumerate_weyl()
        return self._weyl

    def _enumerate_weyl(self):
        n = self.rank
        ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        gens = []
        for i in range(n):
            # s_i(alpha_j) = alpha_j - C_ij alpha_i
            g = [[int(r == c) for c in range(n)] for r in range(n)]
            for j in range(n):
                g[i][j] -= self.cartan[i][j]
            gens.append(g)
        seen = {ident: 1}
        frontier = [ident]
        while frontier:
            nxt = []
            for m in frontier:
                for g in gens:
                    prod_m = tuple(tuple(sum(g[r][k] * m[k][c] for k in range(n)) for c in range(n)) for r in range(n))
                    if prod_m not in seen:
                        seen[prod_m] = -seen[m]
                        nxt.append(prod_m)
            frontier = nxt
        return list(seen.items())

    def act_on_weight(self, matrix, lam: Sequence) -> tuple:
        """Apply a Weyl element (root-coordinate matrix) to a weight in fundamental coordinates."""
        root = self.weight_to_root(lam)
        img = intmat.matvec(matrix, root)
        return tuple(intmat.matvec(self.cartan, img))

    def positive_root_set_in_weights(self) -> list[Weight]:
        return [self.root_to_weight(b) for b in self.positive_roots]


_CACHE: dict[tuple[str, int], RootSystem] = {}


def build(type_label: str, rank: int | None = None) -> RootSystem:
    if rank is None:
        type_label, rank = parse_type(type_label)
    key = (type_label.upper(), rank)
    if key not in _CACHE:
        _CACHE[key] = RootSystem(*key)
    return _CACHE[key]


def weyl_dimension(R: RootSystem, mu: Sequence[int]) -> int:
    if not R.is_dominant(mu) or any(Fraction(x).denominator != 1 for x in mu):
        raise NotDominant(f"{tuple(mu)} is not dominant integral")
    shifted = [m + 1 for m in mu]
    num = prod(R.pair_with_root(shifted, b) for b in R.positive_roots)
    den = prod(R.heights)
    value = Fraction(num) / den
    assert value.denominator == 1
    return int(value)


def signed_dominant_representative(R: RootSystem, nu: Sequence[int]) -> tuple[int, Weight | None]:
    """Dot-action resolution: (det w, w(nu + rho) - rho), or (0, None) on a wall."""
    v = [int(x) + 1 for x in nu]
    sign = 1
    while True:
        i = next((k for k, x in enumerate(v) if x < 0), None)
        if i is None:
            break
        v = list(R.reflect(i, v))
        sign = -sign
    if any(x == 0 for x in v):
        return 0, None
    return sign, tuple(x - 1 for x in v)


def dominant_conjugate(R: RootSystem, lam: Sequence[int]) -> Weight:
    v = tuple(int(x) for x in lam)
    while True:
        i = next((k for k, x in enumerate(v) if x < 0), None)
        if i is None:
            return v
        v = R.reflect(i, v)


# ------------------------------------------------- multiplicities


class KostantPartition:
    """Memoized Kostant partition function on root-coordinate vectors."""

    def __init__(self, R: RootSystem):
        self.roots = [tuple(b) for b in R.positive_roots]
        # larger roots first keeps recursion shallow
        self.roots.sort(key=sum, reverse=True)
        self._count = lru_cache(maxsize=None)(self._count_impl)

    def _count_impl(self, gamma: tuple[int, ...], k: int) -> int:
        if any(x < 0 for x in gamma):
            return 0
        if k == len(self.roots) - 1:
            b = self.roots[k]
            # remaining root is a simple root in a fixed slot
            idx = b.index(1)
            return int(all(x == 0 for j, x in enumerate(gamma) if j != idx))
        total = 0
        b = self.roots[k]
        g = gamma
        while all(x >= 0 for x in g):
            total += self._count(g, k + 1)
            g = tuple(x - y for x, y in zip(g, b))
        return total

    def __call__(self, gamma: Sequence[int]) -> int:
        return self._count(tuple(int(x) for x in gamma), 0)


def kostant_multiplicity(R: RootSystem, mu: Sequence[int], lam: Sequence[int], kp: KostantPartition | None = None) -> int:
    """Multiplicity of weight lam in L_mu by Kostant's alternating sum over W."""
    kp = kp or KostantPartition(R)
    mu_rho = tuple(m + 1 for m in mu)
    lam_rho = tuple(x + 1 for x in lam)
    total = 0
    for mat, det in R.weyl_elements:
        diff = tuple(a - b for a, b in zip(R.act_on_weight(mat, mu_rho), lam_rho))
        root = R.weight_to_root(diff)
        if any(x.denominator != 1 for x in root):
            return 0
        total += det * kp([int(x) for x in root])
    return total


def freudenthal_multiplicities(R: RootSystem, mu: Sequence[int]) -> dict[Weight, int]:
    """All weight multiplicities of L_mu via Freudenthal's recursion."""
    if not R.is_dominant(mu):
        raise NotDominant(f"{tuple(mu)} is not dominant")
    mu = tuple(int(x) for x in mu)
    pos_w = R.positive_root_set_in_weights()
    simple_w = [tuple(R.cartan[i]) for i in range(R.rank)]

    def is_weight(lam):
        dom = dominant_conjugate(R, lam)
        diff = R.weight_to_root(tuple(a - b for a, b in zip(mu, dom)))
        return all(x.denominator == 1 and x >= 0 for x in diff)

    mu_rho = tuple(m + 1 for m in mu)
    top = R.weight_pairing(mu_rho, mu_rho)
    mult: dict[Weight, int] = {mu: 1}
    layer = [mu]
    while layer:
        nxt = set()
        for lam in layer:
            for s in simple_w:
                cand = tuple(a - b for a, b in zip(lam, s))
                if cand not in mult and cand not in nxt and is_weight(cand):
                    nxt.add(cand)
        for lam in sorted(nxt):
            lam_rho = tuple(x + 1 for x in lam)
            denom = top - R.weight_pairing(lam_rho, lam_rho)
            acc = Fraction(0)
            for beta in pos_w:
                k = 1
                while True:
                    up = tuple(a + k * b for a, b in zip(lam, beta))
                    m = mult.get(up)
                    if m is None:
                        break
                    acc += R.weight_pairing(up, beta) * m
                    k += 1
            val = 2 * acc / denom
            assert val.denominator == 1
            mult[lam] = int(val)
        layer = sorted(nxt)
    return mult


def character_dimension(R: RootSystem, mu: Sequence[int]) -> int:
    return sum(freudenthal_multiplicities(R, mu).values())
