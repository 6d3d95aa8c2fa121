"""Exact arithmetic in cyclotomic fields Q(zeta_N).

An element of Q(zeta_N) is stored in the power basis 1, zeta, ...,
zeta^(phi(N)-1), i.e. reduced modulo the N-th cyclotomic polynomial.  That
representation is canonical, so equality is coefficient equality once both
operands live in the same field.  Operands of different orders are embedded
into Q(zeta_lcm) before combining.

:class:`IntCyclotomicRing` is the bare-tuple fast path used by the exact rank
kernels: the same reduction, no object per scalar.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd
from typing import Iterable, Union

from .errors import DivisionByZero, ZeroInput

Rational = Union[int, Fraction]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@lru_cache(maxsize=None)
def _factorize(n: int) -> tuple[tuple[int, int], ...]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def euler_phi(n: int) -> int:
    result = n
    for p, _ in _factorize(n):
        result -= result // p
    return result


def mobius(n: int) -> int:
    fac = _factorize(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def _poly_divexact(num: list[int], den: tuple[int, ...]) -> list[int]:
    # both low->high, den monic
    num = list(num)
    dq = len(den) - 1
    quot = [0] * (len(num) - dq)
    for k in range(len(quot) - 1, -1, -1):
        c = num[k + dq]
        quot[k] = c
        if c:
            for j, d in enumerate(den):
                num[k + j] -= c * d
    if any(num[:dq]):
        raise ArithmeticError("inexact polynomial division")
    return quot


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("order must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """x^k mod Phi_n for k = 0..n-1 (integral because Phi_n is monic)."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    table = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(n):
        table.append(tuple(cur))
        # multiply by x
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for j in range(deg):
                cur[j] -= top * phi[j]
    return tuple(table)


def _reduce_full(n: int, full: Iterable) -> list:
    """Reduce a coefficient list over x^0..x^(anything) modulo Phi_n."""
    table = _power_table(n)
    deg = len(table[0])
    out = [0] * deg
    for k, c in enumerate(full):
        if c:
            row = table[k % n]
            for j in range(deg):
                if row[j]:
                    out[j] += c * row[j]
    return out


def _mul_tuples(n: int, a, b) -> list:
    deg = len(a)
    if deg == 1:
        return [a[0] * b[0]]
    conv = [0] * (2 * deg - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    conv[i + j] += x * y
    if len(conv) <= deg:
        return conv
    table = _power_table(n)
    out = conv[:deg]
    for k in range(deg, len(conv)):
        c = conv[k]
        if c:
            row = table[k % n]
            for j in range(deg):
                if row[j]:
                    out[j] += c * row[j]
    return out


def _solve_rational(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(matrix)
    aug = [list(row) + [r] for row, r in zip(matrix, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise DivisionByZero("singular multiplication matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


class _NotFiniteType:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NotFinite"

    def __reduce__(self):
        return (_NotFiniteType, ())


NotFinite = _NotFiniteType()


class CycloScalar:
    """Immutable element of Q(zeta_order)."""

    __slots__ = ("_order", "_coeffs")

    def __init__(self, order: int, coeffs: Iterable[Rational]):
        if order < 1:
            raise ValueError("order must be positive")
        coeffs = [Fraction(c) for c in coeffs]
        deg = euler_phi(order)
        if len(coeffs) != deg:
            if len(coeffs) > deg:
                coeffs = [Fraction(c) for c in _reduce_full(order, coeffs)]
            else:
                coeffs = coeffs + [Fraction(0)] * (deg - len(coeffs))
        object.__setattr__(self, "_order", order)
        object.__setattr__(self, "_coeffs", tuple(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("CycloScalar is immutable")

    def __reduce__(self):
        return (CycloScalar, (self._order, self._coeffs))

    @property
    def order(self) -> int:
        return self._order

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._coeffs

    # construction helpers
    @classmethod
    def from_rational(cls, r: Rational, order: int = 1) -> CycloScalar:
        return cls(order, [Fraction(r)])

    @classmethod
    def root(cls, k: int, n: int) -> CycloScalar:
        """zeta_n^k."""
        k %= n
        return cls(n, _power_table(n)[k])

    def embed(self, order: int) -> CycloScalar:
        """Same number viewed inside Q(zeta_order); requires self.order | order."""
        if order == self._order:
            return self
        if order % self._order:
            raise ValueError(f"cannot embed order {self._order} into {order}")
        step = order // self._order
        full = [Fraction(0)] * order
        for k, c in enumerate(self._coeffs):
            full[(k * step) % order] += c
        return CycloScalar(order, _reduce_full(order, full))

    def _coerce(self, other) -> tuple[CycloScalar, CycloScalar] | None:
        if isinstance(other, CycloScalar):
            m = _lcm(self._order, other._order)
            return self.embed(m), other.embed(m)
        if isinstance(other, (int, Fraction)):
            return self, CycloScalar.from_rational(other, self._order)
        return None

    # field operations
    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return CycloScalar(a._order, [x + y for x, y in zip(a._coeffs, b._coeffs)])

    __radd__ = __add__

    def __neg__(self) -> CycloScalar:
        return CycloScalar(self._order, [-x for x in self._coeffs])

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return CycloScalar(a._order, [x - y for x, y in zip(a._coeffs, b._coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return CycloScalar(a._order, _mul_tuples(a._order, a._coeffs, b._coeffs))

    __rmul__ = __mul__

    def inverse(self) -> CycloScalar:
        if self.is_zero():
            raise DivisionByZero("inverse of exact zero")
        n = self._order
        deg = len(self._coeffs)
        # columns: self * x^j
        cols = []
        for j in range(deg):
            basis = [0] * deg
            basis[j] = 1
            cols.append(_mul_tuples(n, self._coeffs, basis))
        matrix = [[Fraction(cols[j][i]) for j in range(deg)] for i in range(deg)]
        rhs = [Fraction(1)] + [Fraction(0)] * (deg - 1)
        return CycloScalar(n, _solve_rational(matrix, rhs))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division by exact zero")
            return CycloScalar(self._order, [x / other for x in self._coeffs])
        if not isinstance(other, CycloScalar):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return self.inverse() * other

    def __pow__(self, e: int) -> CycloScalar:
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = CycloScalar.from_rational(1, self._order)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self) -> CycloScalar:
        """Complex conjugate (zeta -> zeta^-1)."""
        n = self._order
        full = [Fraction(0)] * n
        for k, c in enumerate(self._coeffs):
            full[(-k) % n] += c
        return CycloScalar(n, _reduce_full(n, full))

    # predicates / comparisons
    def is_zero(self) -> bool:
        return not any(self._coeffs)

    def is_rational(self) -> bool:
        return not any(self._coeffs[1:])

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a._coeffs == b._coeffs

    def __hash__(self) -> int:
        # normalized trace is invariant under field embeddings, so equal
        # values of different orders hash alike; rationals hash as themselves
        n = self._order
        tr = Fraction(0)
        for k, c in enumerate(self._coeffs):
            if c:
                m = n // gcd(k, n)
                tr += c * Fraction(mobius(m), euler_phi(m))
        return hash(tr)

    def to_complex(self) -> complex:
        import cmath

        z = cmath.exp(2j * cmath.pi / self._order)
        return sum(float(c) * z**k for k, c in enumerate(self._coeffs))

    def as_root_of_unity(self) -> Fraction | None:
        """Return r in [0,1) with self = e^{2 pi i r}, or None."""
        n = _lcm(2, self._order)
        emb = self.embed(n)
        for k in range(n):
            if emb == CycloScalar.root(k, n):
                return Fraction(k, n)
        return None

    def to_json(self) -> dict:
        r = self.as_root_of_unity()
        if r is not None:
            return {"root": f"{r.numerator}/{r.denominator}"}
        return {"order": self._order, "coeffs": [f"{c.numerator}/{c.denominator}" for c in self._coeffs]}

    @classmethod
    def from_json(cls, payload: dict) -> CycloScalar:
        if "root" in payload:
            return root_of_unity(Fraction(payload["root"]))
        return cls(int(payload["order"]), [Fraction(c) for c in payload["coeffs"]])

    def __repr__(self) -> str:
        terms = []
        for k, c in enumerate(self._coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*z{self._order}^{k}")
        return f"CycloScalar({' + '.join(terms) or '0'})"


def root_of_unity(r: Rational) -> CycloScalar:
    """e^{2 pi i r} as an element of Q(zeta_d), d the reduced denominator of r mod 1."""
    r = Fraction(r) % 1
    return CycloScalar.root(r.numerator, r.denominator)


def mult_order(a: CycloScalar):
    """Multiplicative order of ``a``, or :data:`NotFinite`.

    Roots of unity in Q(zeta_N) have order dividing lcm(2, N), so the search
    stops at 2N.
    """
    if a.is_zero():
        raise ZeroInput("mult_order of zero")
    bound = 2 * a.order
    one = CycloScalar.from_rational(1, a.order)
    cur = a
    for m in range(1, bound + 1):
        if cur == one:
            return m
        cur = cur * a
    return NotFinite


class IntCyclotomicRing:
    """Z[zeta_N] (and Q(zeta_N)) on plain tuples, for inner loops.

    Elements are length-phi(N) tuples in the reduced power basis.  Nothing
    here allocates a :class:`CycloScalar`.
    """

    def __init__(self, order: int):
        self.order = order
        self.degree = euler_phi(order)
        self._table = _power_table(order)
        self.zero = (0,) * self.degree
        self.one = (1,) + (0,) * (self.degree - 1)

    def root(self, k: int) -> tuple:
        return self._table[k % self.order]

    def mul(self, a: tuple, b: tuple) -> tuple:
        return tuple(_mul_tuples(self.order, a, b))

    def add(self, a: tuple, b: tuple) -> tuple:
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a: tuple, b: tuple) -> tuple:
        return tuple(x - y for x, y in zip(a, b))

    def neg(self, a: tuple) -> tuple:
        return tuple(-x for x in a)

    @staticmethod
    def is_zero(a: tuple) -> bool:
        return not any(a)

    def to_scalar(self, a: tuple) -> CycloScalar:
        return CycloScalar(self.order, a)

    def from_scalar(self, s: CycloScalar) -> tuple:
        s = s.embed(self.order)
        return tuple(c.numerator if c.denominator == 1 else c for c in s.coeffs)

    @staticmethod
    def content(vectors: Iterable[tuple]) -> int:
        """gcd of all integer coefficients (0 if everything vanishes)."""
        return reduce(gcd, (c for v in vectors for c in v), 0)
