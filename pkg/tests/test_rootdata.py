from itertools import product

import pytest
from hypothesis import given, strategies as st

from klledger.errors import NotDominant, UnsupportedType, WeylTooLarge
from klledger.rootdata import (
    KostantPartition,
    RootSystem,
    build,
    cartan_matrix,
    character_dimension,
    dominant_conjugate,
    freudenthal_multiplicities,
    kostant_multiplicity,
    parse_type,
    signed_dominant_representative,
    weyl_dimension,
)

TABLE = {
    # label: (|positive roots|, dual Coxeter, |W|)
    "A1": (1, 2, 2),
    "A2": (3, 3, 6),
    "A3": (6, 4, 24),
    "A4": (10, 5, 120),
    "D4": (12, 6, 192),
    "D5": (20, 8, 1920),
    "E6": (36, 12, 51840),
    "E7": (63, 18, 2903040),
    "E8": (120, 30, 696729600),
}


@pytest.mark.parametrize("label", sorted(TABLE))
def test_root_counts_and_constants(label):
    R = build(label)
    npos, h, w = TABLE[label]
    assert len(R.positive_roots) == npos
    assert R.dual_coxeter == h
    assert R.weyl_order == w
    # theta is the unique root with theta + alpha_i never a root
    assert sum(R.theta) == max(R.heights)


def test_cartan_matrices():
    assert cartan_matrix("A", 2) == [[2, -1], [-1, 2]]
    c = cartan_matrix("D", 4)
    assert sum(1 for i in range(4) for j in range(4) if c[i][j] == -1) == 6
    with pytest.raises(UnsupportedType):
        build("B3")


def test_weyl_enumeration_size_and_signs():
    for label in ("A1", "A2", "A3", "D4"):
        R = build(label)
        els = R.weyl_elements
        assert len(els) == R.weyl_order
        assert sum(d for _, d in els) == 0
    with pytest.raises(WeylTooLarge):
        RootSystem("E", 8).weyl_elements


def test_rho_is_half_sum_of_positive_roots():
    for label in ("A3", "D4", "E6"):
        R = build(label)
        total = [sum(w[i] for w in R.positive_root_set_in_weights()) for i in range(R.rank)]
        assert total == [2] * R.rank


@pytest.mark.parametrize(
    "label, mu, dim",
    [("A1", (3,), 4), ("A2", (1, 0), 3), ("A2", (1, 1), 8), ("A2", (2, 1), 15), ("A3", (0, 1, 0), 6), ("D4", (0, 1, 0, 0), 28), ("E6", (1, 0, 0, 0, 0, 0), 27), ("E8", (0,) * 7 + (1,), 248)],
)
def test_weyl_dimensions(label, mu, dim):
    assert weyl_dimension(build(label), mu) == dim


def test_weyl_dimension_rejects_non_dominant():
    with pytest.raises(NotDominant):
        weyl_dimension(build("A2"), (-1, 0))


@pytest.mark.parametrize("label", ["A1", "A2", "A3", "D4"])
def test_freudenthal_dimension_equals_weyl(label):
    R = build(label)
    for mu in product(range(2), repeat=R.rank):
        if label == "D4" and sum(mu) > 1:
            continue
        assert character_dimension(R, mu) == weyl_dimension(R, mu)


@pytest.mark.parametrize("label, mu", [("A2", (2, 1)), ("A2", (3, 0)), ("A3", (1, 0, 1)), ("A1", (4,))])
def test_kostant_agrees_with_freudenthal(label, mu):
    R = build(label)
    kp = KostantPartition(R)
    fr = freudenthal_multiplicities(R, mu)
    for lam, m in fr.items():
        if R.is_dominant(lam):
            assert kostant_multiplicity(R, mu, lam, kp) == m
    # a dominant weight outside the support has multiplicity 0
    assert kostant_multiplicity(R, mu, tuple(x + 3 for x in mu), kp) == 0


def test_kostant_partition_small_values():
    kp = KostantPartition(build("A2"))
    assert kp((1, 1)) == 2
    assert kp((2, 2)) == 3
    assert kp((1, 0)) == 1
    assert kp((-1, 0)) == 0


@given(st.sampled_from(["A1", "A2", "A3"]), st.data())
def test_multiplicities_are_weyl_invariant(label, data):
    R = build(label)
    mu = tuple(data.draw(st.integers(0, 2)) for _ in range(R.rank))
    mult = freudenthal_multiplicities(R, mu)
    for lam, m in mult.items():
        for i in range(R.rank):
            assert mult.get(tuple(R.reflect(i, lam)), 0) == m
        assert mult.get(dominant_conjugate(R, lam), 0) == m


@given(st.sampled_from(["A1", "A2", "A3", "D4"]), st.data())
def test_signed_dominant_representative_is_dot_invariant(label, data):
    R = build(label)
    nu = tuple(data.draw(st.integers(-5, 5)) for _ in range(R.rank))
    sign, dom = signed_dominant_representative(R, nu)
    for i in range(R.rank):
        # dot action: s_i . nu = s_i(nu + rho) - rho
        shifted = R.reflect(i, tuple(x + 1 for x in nu))
        other = tuple(x - 1 for x in shifted)
        s2, d2 = signed_dominant_representative(R, other)
        assert d2 == dom and s2 == -sign


def test_weyl_denominator_identity_a2():
    # sum_w det(w) e^{w rho} = prod_beta (e^{beta/2} - e^{-beta/2}); compare on a few points
    import cmath

    R = build("A2")
    for x in (0.3, 0.71, 1.3):
        point = (x, 0.4 * x + 0.2)  # pairing of weights with a generic coroot-coordinate vector

        def ev(weight_root):
            return cmath.exp(sum(a * b for a, b in zip(weight_root, point)))

        lhs = sum(d * ev([sum(m[r][c] * R.weight_to_root(R.rho)[c] for c in range(2)) for r in range(2)]) for m, d in R.weyl_elements)
        rhs = 1
        for beta in R.positive_roots:
            rhs *= ev([b / 2 for b in beta]) - ev([-b / 2 for b in beta])
        assert abs(lhs - rhs) < 1e-9
