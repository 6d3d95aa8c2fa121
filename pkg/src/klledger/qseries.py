"""Rational-exponent q-series, false theta characters and cusp asymptotics.

Series are stored exactly (Fraction exponents and coefficients).  Numeric
work happens in mpmath at 50 digits along q = exp(-2 pi t).  Every truncated
series produced here carries a *majorant*: an object bounding
sum |c_k| q^k over the terms beyond the cutoff, so numeric values come with a
tail bound.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

import mpmath
import numpy as np

from . import intmat
from .errors import (
    DivisionByNearZero,
    EllipsoidOverflow,
    NotPositiveDefinite,
    ScheduleTooShort,
    TailBoundUnavailable,
)
from .lattice import IntegralLattice
from .rootdata import KostantPartition, RootSystem, kostant_multiplicity, signed_dominant_representative, weyl_dimension

DPS = 50
DEFAULT_SCHEDULE = (0.04, 0.01, 0.0025)
MAX_POINTS = 5_000_000


def _mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


# ------------------------------------------------------------ majorants


class Majorant:
    """Bound on sum over omitted terms of |c_k| exp(-2 pi t k) (stored exponents)."""

    def __call__(self, t) -> mpmath.mpf:  # pragma: no cover - interface
        raise NotImplementedError


class ZeroMajorant(Majorant):
    def __call__(self, t):
        return mpmath.mpf(0)


@dataclass(frozen=True)
class PartitionMajorant(Majorant):
    """Tail of prod_k (1 - q^k)^-n beyond exponent K.

    c_k y^k <= P(y) for every y in (0, 1), hence
    sum_{k > K} c_k x^k <= P(y) (x/y)^{K+1} / (1 - x/y); minimised over a grid of y.
    """

    colors: int
    cutoff: int

    def _log_p(self, y):
        # -n sum log(1 - y^k), remainder bounded by y^{M+1} / ((1-y)(1-y^{M+1}))
        total = mpmath.mpf(0)
        k = 1
        yk = y
        while yk > mpmath.mpf(10) ** (-DPS):
            total -= mpmath.log1p(-yk)
            k += 1
            yk *= y
        total += yk / ((1 - y) * (1 - yk))
        return self.colors * total

    def __call__(self, t):
        with mpmath.workdps(DPS):
            x = mpmath.exp(-2 * mpmath.pi * _mpf(t))
            best = None
            for theta in (0.3, 0.5, 0.7, 0.8, 0.9, 0.95):
                y = x ** mpmath.mpf(theta)
                r = x / y
                val = mpmath.exp(self._log_p(y)) * r ** (self.cutoff + 1) / (1 - r)
                best = val if best is None or val < best else best
            return best


@dataclass(frozen=True)
class GaussianMajorant(Majorant):
    """Tail of a lattice sum sum_v W(v) q^{E(v)} with E(v) = |v - c|^2 in some metric.

    Uses the packing bound #{v : E(v) <= R} <= ((sqrt(R) + r) / r)^n, r the
    packing radius, and a coefficient bound |W| <= A (a + b sqrt(E))^deg,
    summed over unit shells of E beyond the cutoff.
    """

    rank: int
    packing_radius: float
    cutoff: float
    weight_scale: float = 1.0
    weight_a: float = 1.0
    weight_b: float = 0.0
    weight_degree: int = 0

    def _shell(self, e):
        r = mpmath.mpf(self.packing_radius)
        count = ((mpmath.sqrt(e) + r) / r) ** self.rank
        w = self.weight_scale * (self.weight_a + self.weight_b * mpmath.sqrt(e)) ** self.weight_degree
        return count * w

    def __call__(self, t):
        with mpmath.workdps(DPS):
            t = _mpf(t)
            two_pi_t = 2 * mpmath.pi * t
            growth = (self.rank + self.weight_degree) / (mpmath.pi * t)
            e0 = _mpf(self.cutoff)
            total = mpmath.mpf(0)
            k = 0
            while True:
                lo = e0 + k
                term = self._shell(lo + 1) * mpmath.exp(-two_pi_t * lo)
                total += term
                k += 1
                if lo >= growth and term <= total * mpmath.mpf(10) ** (-30):
                    ratio = mpmath.exp(-mpmath.pi * t)
                    return total + term * ratio / (1 - ratio)
                if k > 10**7:  # pragma: no cover - defensive
                    raise TailBoundUnavailable("majorant did not converge")


@dataclass(frozen=True)
class ProductMajorant(Majorant):
    """Omitted mass of a product: (|A| + tail_A)(|B| + tail_B) - included pairs."""

    a: "RationalQSeries"
    b: "RationalQSeries"
    included_abs: tuple  # ((exponent, |coeff| sum), ...)

    def __call__(self, t):
        with mpmath.workdps(DPS):
            full = (self.a.abs_eval(t) + self.a.majorant(t)) * (self.b.abs_eval(t) + self.b.majorant(t))
            x = -2 * mpmath.pi * _mpf(t)
            inc = mpmath.fsum(_mpf(c) * mpmath.exp(x * _mpf(e)) for e, c in self.included_abs)
            return max(full - inc, mpmath.mpf(0))


@dataclass(frozen=True)
class SumMajorant(Majorant):
    parts: tuple

    def __call__(self, t):
        return mpmath.fsum(p(t) for p in self.parts)


# ------------------------------------------------------------ series


class RationalQSeries:
    """sum c_e q^(e + offset) over stored exponents e <= cutoff.

    ``cutoff=None`` marks an exact (finite) series.  The majorant bounds the
    omitted terms beyond the cutoff and is required for numeric evaluation of
    truncated series.
    """

    __slots__ = ("terms", "cutoff", "offset", "majorant")

    def __init__(
        self,
        terms: Mapping | Iterable = (),
        cutoff=None,
        offset=0,
        majorant: Majorant | None = None,
    ):
        items = terms.items() if isinstance(terms, Mapping) else terms
        cut = None if cutoff is None else Fraction(cutoff)
        acc: dict[Fraction, Fraction] = {}
        for e, c in items:
            e, c = Fraction(e), Fraction(c)
            if cut is not None and e > cut:
                continue
            acc[e] = acc.get(e, Fraction(0)) + c
        self.terms = {e: acc[e] for e in sorted(acc) if acc[e] != 0}
        self.cutoff = cut
        self.offset = Fraction(offset)
        self.majorant = ZeroMajorant() if cut is None else majorant

    # --- basic access
    def __repr__(self) -> str:
        body = " + ".join(f"{c}*q^{e}" for e, c in list(self.terms.items())[:6])
        return f"RationalQSeries(q^{self.offset}*({body}{' + ...' if len(self.terms) > 6 else ''}), cutoff={self.cutoff})"

    def exponents(self) -> list[Fraction]:
        return list(self.terms)

    def coefficients(self) -> list[Fraction]:
        return list(self.terms.values())

    def coefficient(self, e) -> Fraction:
        return self.terms.get(Fraction(e), Fraction(0))

    def valuation(self) -> Fraction | None:
        if self.terms:
            return next(iter(self.terms))
        return self.cutoff

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalQSeries):
            return NotImplemented
        return (self.terms, self.cutoff, self.offset) == (other.terms, other.cutoff, other.offset)

    def __hash__(self):
        return hash((tuple(self.terms.items()), self.cutoff, self.offset))

    # --- algebra
    def _check_offset(self, other: RationalQSeries) -> None:
        if self.offset != other.offset:
            raise ValueError("cannot add series with different offsets")

    def __add__(self, other: RationalQSeries) -> RationalQSeries:
        self._check_offset(other)
        cut = _min_cutoff(self.cutoff, other.cutoff)
        maj = None
        if cut is not None:
            maj = SumMajorant((_majorant_or_raise(self), _majorant_or_raise(other))) if _has_maj(self, other) else None
        terms = list(self.terms.items()) + list(other.terms.items())
        return RationalQSeries(terms, cut, self.offset, maj)

    def __neg__(self) -> RationalQSeries:
        return self.scale(-1)

    def __sub__(self, other: RationalQSeries) -> RationalQSeries:
        return self + (-other)

    def scale(self, c) -> RationalQSeries:
        c = Fraction(c)
        maj = self.majorant
        if maj is not None and c != 1 and not isinstance(maj, ZeroMajorant):
            maj = _ScaledMajorant(maj, abs(c))
        return RationalQSeries({e: v * c for e, v in self.terms.items()}, self.cutoff, self.offset, maj)

    def __mul__(self, other: RationalQSeries) -> RationalQSeries:
        if not isinstance(other, RationalQSeries):
            return self.scale(other)
        va, vb = self.valuation(), other.valuation()
        if self.cutoff is None and other.cutoff is None:
            cut = None
        elif self.cutoff is None:
            cut = other.cutoff + (va if va is not None else 0)
        elif other.cutoff is None:
            cut = self.cutoff + (vb if vb is not None else 0)
        else:
            cut = min(self.cutoff + vb, other.cutoff + va)
        prod_terms: dict[Fraction, Fraction] = {}
        abs_terms: dict[Fraction, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if cut is not None and e > cut:
                    continue
                prod_terms[e] = prod_terms.get(e, Fraction(0)) + c1 * c2
                abs_terms[e] = abs_terms.get(e, Fraction(0)) + abs(c1 * c2)
        maj = None
        if cut is not None and _has_maj(self, other):
            maj = ProductMajorant(self, other, tuple(sorted(abs_terms.items())))
        return RationalQSeries(prod_terms, cut, self.offset + other.offset, maj)

    __rmul__ = __mul__

    def truncate(self, cutoff) -> RationalQSeries:
        cut = Fraction(cutoff)
        if self.cutoff is not None and cut >= self.cutoff:
            return self
        dropped = [(e, abs(c)) for e, c in self.terms.items() if e > cut]
        maj = None
        if self.majorant is not None:
            maj = SumMajorant((self.majorant, _FiniteMajorant(tuple(dropped))))
        return RationalQSeries(self.terms, cut, self.offset, maj)

    def with_offset(self, offset) -> RationalQSeries:
        return RationalQSeries(self.terms, self.cutoff, offset, self.majorant)

    # --- numerics
    def abs_eval(self, t) -> mpmath.mpf:
        with mpmath.workdps(DPS):
            x = -2 * mpmath.pi * _mpf(t)
            return mpmath.fsum(abs(_mpf(c)) * mpmath.exp(x * _mpf(e)) for e, c in self.terms.items())

    def to_json(self, limit: int | None = None) -> dict:
        items = list(self.terms.items())
        if limit is not None:
            items = items[:limit]
        return {
            "offset": str(self.offset),
            "cutoff": None if self.cutoff is None else str(self.cutoff),
            "terms": [{"exponent": str(e), "coeff": str(c)} for e, c in items],
        }


@dataclass(frozen=True)
class _ScaledMajorant(Majorant):
    inner: Majorant
    factor: Fraction

    def __call__(self, t):
        return self.inner(t) * _mpf(self.factor)


@dataclass(frozen=True)
class _FiniteMajorant(Majorant):
    terms: tuple

    def __call__(self, t):
        with mpmath.workdps(DPS):
            x = -2 * mpmath.pi * _mpf(t)
            return mpmath.fsum(_mpf(c) * mpmath.exp(x * _mpf(e)) for e, c in self.terms)


def _min_cutoff(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _has_maj(*series: RationalQSeries) -> bool:
    return all(s.majorant is not None for s in series)


def _majorant_or_raise(s: RationalQSeries) -> Majorant:
    if s.majorant is None:
        raise TailBoundUnavailable("series carries no majorant")
    return s.majorant


@dataclass(frozen=True)
class Evaluation:
    value: mpmath.mpf
    tail_bound: mpmath.mpf

    def __iter__(self):
        return iter((self.value, self.tail_bound))


def numeric_eval(s: RationalQSeries, t, dps: int = DPS) -> Evaluation:
    """Value of the series at q = exp(-2 pi t) plus a bound on the omitted tail."""
    if t <= 0:
        raise ValueError("t must be positive")
    if s.majorant is None:
        raise TailBoundUnavailable("producer attached no majorant to this series")
    with mpmath.workdps(dps):
        x = -2 * mpmath.pi * _mpf(t)
        body = mpmath.fsum(_mpf(c) * mpmath.exp(x * _mpf(e)) for e, c in s.terms.items())
        scale = mpmath.exp(x * _mpf(s.offset))
        tail = s.majorant(t) * scale
        return Evaluation(body * scale, tail)


# ------------------------------------------------------------ eta


@lru_cache(maxsize=None)
def _partition_numbers(cutoff: int) -> tuple[int, ...]:
    """p(k), k = 0..cutoff, by the standard coin-change recursion."""
    p = [1] + [0] * cutoff
    for part in range(1, cutoff + 1):
        for k in range(part, cutoff + 1):
            p[k] += p[k - part]
    return tuple(p)


def eta_inverse_power(n: int, cutoff: int) -> RationalQSeries:
    """q^{-n/24} prod_k (1 - q^k)^{-n}: n-fold convolution of partition numbers."""
    if n < 1 or cutoff < 0:
        raise ValueError("need n >= 1 and cutoff >= 0")
    base = _partition_numbers(cutoff)
    coeffs = list(base)
    for _ in range(n - 1):
        coeffs = [sum(coeffs[i] * base[k - i] for i in range(k + 1)) for k in range(cutoff + 1)]
    return RationalQSeries(
        {k: c for k, c in enumerate(coeffs)}, cutoff, Fraction(-n, 24), PartitionMajorant(n, cutoff)
    )


# ------------------------------------------------------------ ellipsoids


def ellipsoid_points(
    gram: Sequence[Sequence], center: Sequence, bound, max_points: int = MAX_POINTS
) -> list[tuple[tuple[int, ...], Fraction]]:
    """Integer vectors a with E(a) = (a - c)^T G (a - c) <= bound, exactly.

    Enumeration is a Fincke-Pohst descent on the Cholesky factor (floats with
    a safety margin); membership is decided with exact rationals.
    """
    G = [[Fraction(x) for x in row] for row in gram]
    n = len(G)
    if not all(m > 0 for m in intmat.leading_minors(G)):
        raise NotPositiveDefinite("ellipsoid form is not positive definite")
    c = [Fraction(x) for x in center]
    bound = Fraction(bound)
    if bound < 0:
        return []
    Gf = np.array([[float(x) for x in row] for row in G])
    # upper-triangular q-form: E = sum_i Q_ii (y_i + sum_{j>i} Q_ij y_j)^2
    Q = np.zeros((n, n))
    A = Gf.copy()
    for i in range(n):
        Q[i, i] = A[i, i]
        for j in range(i + 1, n):
            Q[i, j] = A[i, j] / A[i, i]
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                A[j, k] -= A[i, j] * A[i, k] / A[i, i]
    cf = [float(x) for x in c]
    B = float(bound) * (1 + 1e-9) + 1e-9
    out: list[tuple[tuple[int, ...], Fraction]] = []
    y = [0.0] * n
    a = [0] * n

    def exact_e(vec):
        d = [Fraction(v) - ci for v, ci in zip(vec, c)]
        return sum((d[i] * G[i][j] * d[j] for i in range(n) for j in range(n)), Fraction(0))

    def descend(i: int, remaining: float):
        if i < 0:
            e = exact_e(a)
            if e <= bound:
                out.append((tuple(a), e))
                if len(out) > max_points:
                    raise EllipsoidOverflow(f"more than {max_points} lattice points in ellipsoid")
            return
        shift = sum(Q[i, j] * y[j] for j in range(i + 1, n))
        radius = math.sqrt(max(remaining, 0.0) / Q[i, i])
        # y_i = a_i - c_i; need |y_i + shift| <= radius
        lo = math.ceil(cf[i] - shift - radius - 1e-9)
        hi = math.floor(cf[i] - shift + radius + 1e-9)
        for ai in range(lo, hi + 1):
            a[i] = ai
            y[i] = ai - cf[i]
            used = Q[i, i] * (y[i] + shift) ** 2
            descend(i - 1, remaining - used)

    descend(n - 1, B)
    out.sort(key=lambda item: (item[1], item[0]))
    return out


def minimum_norm(gram: Sequence[Sequence]) -> Fraction:
    """Smallest nonzero value of v^T G v over integer v."""
    bound = max(Fraction(gram[i][i]) for i in range(len(gram)))
    pts = ellipsoid_points(gram, [0] * len(gram), bound)
    return min(e for v, e in pts if any(v))


def lattice_theta(
    L: IntegralLattice, coset: Sequence = None, shift: Sequence = None, cutoff=10, normalization: str = "full"
) -> RationalQSeries:
    """sum over alpha in L of q^{N |alpha + coset - shift|^2}, N = 1 ('full') or 1/2 ('half')."""
    if not L.is_positive_definite():
        raise NotPositiveDefinite("theta series needs a positive definite lattice")
    n = L.rank
    coset = [Fraction(x) for x in (coset or [0] * n)]
    shift = [Fraction(x) for x in (shift or [0] * n)]
    scale = {"full": Fraction(1), "half": Fraction(1, 2)}[normalization]
    center = [s - c for s, c in zip(shift, coset)]
    G = [[scale * x for x in row] for row in L.gram]
    pts = ellipsoid_points(G, center, cutoff)
    terms: dict[Fraction, int] = {}
    for _, e in pts:
        terms[e] = terms.get(e, 0) + 1
    r = math.sqrt(float(minimum_norm(G))) / 2
    return RationalQSeries(terms, Fraction(cutoff), 0, GaussianMajorant(n, r, float(cutoff)))


def lattice_theta_refined(L: IntegralLattice, coset=None, shift=None, cutoff=10, normalization="full") -> dict:
    """Exponent -> list of lattice vectors alpha + coset (the z-refinement)."""
    n = L.rank
    coset = [Fraction(x) for x in (coset or [0] * n)]
    shift = [Fraction(x) for x in (shift or [0] * n)]
    scale = {"full": Fraction(1), "half": Fraction(1, 2)}[normalization]
    center = [s - c for s, c in zip(shift, coset)]
    G = [[scale * x for x in row] for row in L.gram]
    out: dict[Fraction, list] = {}
    for a, e in ellipsoid_points(G, center, cutoff):
        out.setdefault(e, []).append(tuple(Fraction(x) + c for x, c in zip(a, coset)))
    return out


# ------------------------------------------------------------ false theta


@dataclass(frozen=True)
class WeightData:
    """lambda = lambda_bar + lambda_hat.

    ``s`` parametrises lambda_bar = -(1/sqrt p) sum s_i omega_i with
    0 <= s_i <= p - 1 (s = 0 is the vacuum); ``lam_hat`` is an integral weight
    in fundamental coordinates.
    """

    s: tuple[int, ...]
    lam_hat: tuple[int, ...]

    @classmethod
    def vacuum(cls, rank: int) -> WeightData:
        return cls((0,) * rank, (0,) * rank)


@dataclass
class FalseTheta:
    root_system: RootSystem
    p: int
    weight: WeightData
    weighting: str
    theta: RationalQSeries  # eta^n * chi
    assumption_ok: bool
    simplicity_regime: bool
    notes: list[str] = field(default_factory=list)

    def full_character(self, cutoff=None) -> RationalQSeries:
        n = self.root_system.rank
        cut = self.theta.cutoff if cutoff is None else Fraction(cutoff)
        low = self.theta.valuation() or Fraction(0)
        eta = eta_inverse_power(n, max(0, math.ceil(cut - low)))
        return (self.theta * eta).truncate(cut)


class _CoefficientOracle:
    """D(alpha) for alpha in the root lattice, cached by dominant representative."""

    def __init__(self, R: RootSystem, lam_hat: Sequence[int], weighting: str):
        if weighting not in ("dimension", "singlet"):
            raise ValueError("weighting must be 'dimension' or 'singlet'")
        self.R = R
        self.lam_hat = tuple(lam_hat)
        self.weighting = weighting
        self._kp = KostantPartition(R) if weighting == "singlet" else None
        self._cache: dict = {}

    def _value(self, dom):
        if dom not in self._cache:
            if self.weighting == "dimension":
                self._cache[dom] = weyl_dimension(self.R, dom)
            else:
                self._cache[dom] = kostant_multiplicity(self.R, dom, self.lam_hat, self._kp)
        return self._cache[dom]

    def __call__(self, alpha_root: Sequence[int]) -> int:
        nu = tuple(a + b for a, b in zip(self.R.root_to_weight(alpha_root), self.lam_hat))
        sign, dom = signed_dominant_representative(self.R, nu)
        if sign == 0:
            return 0
        return sign * self._value(dom)


def _false_theta_geometry(R: RootSystem, p: int, weight: WeightData):
    """Gram (p/2) C and centre (root coordinates) of the exponent quadratic form."""
    n = R.rank
    G = [[Fraction(p, 2) * R.cartan[i][j] for j in range(n)] for i in range(n)]
    # x = alpha + lam_hat + rho - (rho + mu_bar)/p in fundamental coordinates
    shift = [Fraction(weight.lam_hat[i]) + 1 - Fraction(1 + weight.s[i], p) for i in range(n)]
    center = [-x for x in R.weight_to_root(shift)]
    return G, center


def _assumption(R: RootSystem, p: int, weight: WeightData) -> bool:
    mu_rho = [s + 1 for s in weight.s]
    return R.pair_with_root(mu_rho, R.theta) <= p


def false_theta_character(
    R: RootSystem,
    p: int,
    weight: WeightData | None = None,
    cutoff=10,
    weighting: str = "dimension",
    max_points: int = MAX_POINTS,
) -> FalseTheta:
    """eta^n * chi as sum over the root lattice of D(alpha) q^{E(alpha)}.

    E(alpha) = (p/2) |alpha + lam_hat + rho - (rho + mu_bar)/p|^2.
    ``weighting='dimension'`` sets z = 1 in the Weyl sum (D = sign * dim);
    ``'singlet'`` keeps the lattice-degree-zero part (D = sign * weight
    multiplicity of lam_hat), the piece whose cusp limit is finite.
    """
    weight = weight or WeightData.vacuum(R.rank)
    if len(weight.s) != R.rank or any(not 0 <= s <= p - 1 for s in weight.s):
        raise ValueError(f"s must have {R.rank} entries in [0, p-1]")
    notes = []
    ok = _assumption(R, p, weight)
    if not ok:
        msg = f"weight outside the regime (mu_bar + rho, theta) <= p for {R.label}, p={p}"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)
    simple = p >= R.dual_coxeter - 1
    if not simple:
        notes.append(f"p = {p} < h - 1 = {R.dual_coxeter - 1}: outside the simplicity regime")
    G, center = _false_theta_geometry(R, p, weight)
    oracle = _CoefficientOracle(R, weight.lam_hat, weighting)
    terms: dict[Fraction, int] = {}
    for a, e in ellipsoid_points(G, center, cutoff, max_points):
        d = oracle(a)
        if d:
            terms[e] = terms.get(e, 0) + d
    maj = _false_theta_majorant(R, p, weight, float(cutoff))
    theta = RationalQSeries(terms, Fraction(cutoff), 0, maj)
    return FalseTheta(R, p, weight, weighting, theta, ok, simple, notes)


def _false_theta_majorant(R: RootSystem, p: int, weight: WeightData, cutoff: float) -> GaussianMajorant:
    # |D| <= dim L_nu <= prod_beta sqrt2 |x| / ht(beta) with |x| <= sqrt(2E/p) + |rho + mu_bar|/p
    mu_rho = [s + 1 for s in weight.s]
    norm_c = math.sqrt(float(R.weight_pairing(mu_rho, mu_rho))) / p
    lam_norm = math.sqrt(float(R.weight_pairing(weight.lam_hat, weight.lam_hat)))
    k = len(R.positive_roots)
    scale = math.prod(math.sqrt(2) / h for h in R.heights)
    return GaussianMajorant(
        rank=R.rank,
        packing_radius=math.sqrt(p) / 2,  # root lattice minimum norm 2, scaled by p/2
        cutoff=cutoff,
        weight_scale=scale,
        weight_a=norm_c + lam_norm,
        weight_b=math.sqrt(2 / p),
        weight_degree=k,
    )


# ------------------------------------------------------------ cusp fits


@dataclass
class AsymptoticEstimate:
    value: float
    error: float
    schedule: list[float]
    samples: list[dict]
    model: dict

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "error": self.error,
            "schedule": list(self.schedule),
            "samples": self.samples,
            "model": self.model,
        }


def _fit(ts, values, order):
    with mpmath.workdps(DPS):
        rows = [[mpmath.mpf(1)] + [mpmath.sqrt(_mpf(t)) ** k for k in range(1, order + 1)] for t in ts]
        A = mpmath.matrix(rows)
        b = mpmath.matrix([_mpf(v) for v in values])
        if len(ts) == order + 1:
            coeffs = mpmath.lu_solve(A, b)
        else:
            coeffs, _ = mpmath.qr_solve(A, b)
        resid = max(abs((A * coeffs)[i] - b[i]) for i in range(len(ts)))
        return [coeffs[i] for i in range(order + 1)], resid


def cusp_limit(
    f: Callable[[float], tuple], schedule: Sequence[float] = DEFAULT_SCHEDULE, order: int = 1
) -> AsymptoticEstimate:
    """Extrapolate f(t) -> c0 as t -> 0+ with the model c0 + c1 sqrt(t) (+ c2 t).

    ``order=1`` fits {1, sqrt t}; ``order=2`` adds t.  The error is the
    maximum of the fit residual, the largest tail bound, and the change of c0
    when the smallest-t sample is dropped.
    """
    ts = sorted((float(t) for t in schedule), reverse=True)
    if len(ts) < 3:
        raise ScheduleTooShort("cusp extrapolation needs at least 3 samples")
    if any(t <= 0 for t in ts):
        raise ValueError("schedule must be positive")
    order = max(0, min(order, 2))
    samples = []
    for t in ts:
        v, tail = f(t)
        samples.append((t, _mpf(v), _mpf(tail)))
    vals = [s[1] for s in samples]
    coeffs, resid = _fit(ts, vals, min(order, len(ts) - 1))
    drop_order = min(order, len(ts) - 2)
    drop_coeffs, _ = _fit(ts[:-1], vals[:-1], drop_order)
    tail = max(s[2] for s in samples)
    error = max(resid, tail, abs(coeffs[0] - drop_coeffs[0]))
    names = ["c0", "c1_sqrt_t", "c2_t"]
    return AsymptoticEstimate(
        value=float(coeffs[0]),
        error=float(error),
        schedule=ts,
        samples=[{"t": t, "value": float(v), "tail_bound": float(tb)} for t, v, tb in samples],
        model={names[i]: float(c) for i, c in enumerate(coeffs)} | {"order": order},
    )


# ------------------------------------------------------------ asymptotics


def _eval_terms(args):
    terms, t, dps = args
    with mpmath.workdps(dps):
        x = -2 * mpmath.pi * mpmath.mpf(t)
        return mpmath.fsum(mpmath.mpf(c) * mpmath.exp(x * mpmath.mpf(num) / den) for num, den, c in terms)


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("KL_LEDGER_THREADS")
        threads = int(env) if env else 1
    return max(1, int(threads))


def _energy_for_tail(maj_factory, t: float, target: float = 1e-25) -> float:
    e = 40.0 / (2 * math.pi * t)
    while maj_factory(e)(t) > target:
        e *= 1.5
    return e


def asymptotic_dim(
    R: RootSystem,
    p: int,
    weight: WeightData | None = None,
    schedule: Sequence[float] = DEFAULT_SCHEDULE,
    order: int = 1,
    weighting: str = "singlet",
    threads: int | None = None,
    target_tail: float = 1e-25,
) -> AsymptoticEstimate:
    """Cusp limit of eta^n chi along q = exp(-2 pi t), t -> 0+.

    The ellipsoid is enlarged until the attached majorant certifies a tail
    below ``target_tail`` at the smallest t; the same exact series then
    serves every t in the schedule.
    """
    weight = weight or WeightData.vacuum(R.rank)
    t_min = min(schedule)
    e_max = _energy_for_tail(lambda e: _false_theta_majorant(R, p, weight, e), t_min, target_tail)
    ft = false_theta_character(R, p, weight, Fraction(math.ceil(e_max)), weighting)
    series = ft.theta
    packed = [(e.numerator, e.denominator, int(c)) for e, c in series.terms.items()]
    ts = sorted(schedule, reverse=True)
    n_threads = resolve_threads(threads)
    if n_threads > 1:
        with ProcessPoolExecutor(max_workers=n_threads) as pool:
            values = list(pool.map(_eval_terms, [(packed, t, DPS) for t in ts]))
    else:
        values = [_eval_terms((packed, t, DPS)) for t in ts]
    table = {t: (v, series.majorant(t)) for t, v in zip(ts, values)}
    est = cusp_limit(lambda t: table[t], ts, order)
    est.model["weighting"] = weighting
    est.model["ellipsoid_cutoff"] = str(series.cutoff)
    est.model["terms"] = len(series.terms)
    return est


def expected_asymptotic_dim(R: RootSystem, p: int, weight: WeightData | None = None) -> Fraction:
    """dim L_{mu_bar} / p^{|positive roots|}."""
    weight = weight or WeightData.vacuum(R.rank)
    return Fraction(weyl_dimension(R, weight.s), p ** len(R.positive_roots))


@dataclass
class QuantumDimension:
    value: float
    error: float
    numerator: AsymptoticEstimate
    denominator: AsymptoticEstimate

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "error": self.error,
            "fock_limit": self.numerator.to_json(),
            "vacuum_limit": self.denominator.to_json(),
        }


def fock_series(R: RootSystem, p: int, weight: WeightData | None = None) -> RationalQSeries:
    """eta^n chi of the Fock module: the single term q^{E(0)}."""
    weight = weight or WeightData.vacuum(R.rank)
    G, center = _false_theta_geometry(R, p, weight)
    n = R.rank
    e0 = sum((center[i] * G[i][j] * center[j] for i in range(n) for j in range(n)), Fraction(0))
    return RationalQSeries({e0: 1})


def quantum_dimension_of_Fock(
    R: RootSystem,
    p: int,
    weight: WeightData | None = None,
    schedule: Sequence[float] = DEFAULT_SCHEDULE,
    order: int = 1,
    threads: int | None = None,
    vacuum: AsymptoticEstimate | None = None,
) -> QuantumDimension:
    num = exact_limit(fock_series(R, p, weight), schedule)
    den = vacuum or asymptotic_dim(R, p, weight, schedule, order, threads=threads)
    return ratio_estimate(num, den)


def exact_limit(series: RationalQSeries, schedule: Sequence[float] = DEFAULT_SCHEDULE) -> AsymptoticEstimate:
    """t -> 0 limit of an exact (finite) series: the sum of its coefficients.

    Samples along the schedule are still recorded for the report.
    """
    if series.cutoff is not None:
        raise TailBoundUnavailable("exact limit needs a finite series")
    total = sum(series.terms.values(), Fraction(0))
    ts = sorted((float(t) for t in schedule), reverse=True)
    samples = [{"t": t, "value": float(numeric_eval(series, t).value), "tail_bound": 0.0} for t in ts]
    return AsymptoticEstimate(float(total), 0.0, ts, samples, {"c0": float(total), "order": 0, "kind": "exact"})


def ratio_estimate(num: AsymptoticEstimate, den: AsymptoticEstimate) -> QuantumDimension:
    if abs(den.value) <= den.error:
        raise DivisionByNearZero(f"denominator {den.value} +- {den.error} contains 0")
    value = num.value / den.value
    lo_den, hi_den = abs(den.value) - den.error, abs(den.value) + den.error
    lo = (abs(num.value) - num.error) / hi_den
    hi = (abs(num.value) + num.error) / lo_den
    error = max(abs(value) - lo, hi - abs(value))
    return QuantumDimension(value, error, num, den)


# ------------------------------------------------------------ convention checks


def weyl_character_principal(R: RootSystem, nu: Sequence[int], h: float, dps: int = DPS):
    """Ratio of alternating Weyl sums at z^lambda = (1+h)^{(lambda, rho)}.

    Tends to sign * dim of the dot-resolved representation as h -> 0.
    """
    with mpmath.workdps(dps):
        z = 1 + _mpf(h)
        rho = (1,) * R.rank

        def alt(weight):
            acc = mpmath.mpf(0)
            for mat, det in R.weyl_elements:
                img = R.act_on_weight(mat, weight)
                acc += det * z ** _mpf(R.weight_pairing(img, rho))
            return acc

        shifted = tuple(int(x) + 1 for x in nu)
        return alt(shifted) / alt(rho)


def weyl_sum_limit(R: RootSystem, nu: Sequence[int], h: float = 1e-8) -> float:
    """Richardson-extrapolated h -> 0 value of :func:`weyl_character_principal`."""
    with mpmath.workdps(DPS):
        f1 = weyl_character_principal(R, nu, h)
        f2 = weyl_character_principal(R, nu, h / 2)
        return float(2 * f2 - f1)
