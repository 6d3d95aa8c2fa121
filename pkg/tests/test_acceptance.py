"""Acceptance criteria: one PASS/FAIL line per criterion, tolerances pinned below."""

import json
import time
from fractions import Fraction

import pytest

from klledger.cli import main
from klledger.fusion import ledger_pointed_setup
from klledger.lattice import DiagonalBraiding, IntegralLattice, build_cocycle, discriminant_form, extend_by_isotropic, isotropic_subgroups
from klledger.nichols import graded_dimensions, product_formula, quantum_group_braiding, total_dimension
from klledger.qseries import DEFAULT_SCHEDULE, asymptotic_dim, false_theta_character, quantum_dimension_of_Fock
from klledger.report import HYPOTHESES
from klledger.rootdata import build

NICHOLS_RUNTIME_S = 60.0
COCYCLE_RUNTIME_S = 5.0
ASYMPTOTIC_TOL = {("A1", 2): 0.05, ("A1", 3): 0.05, ("A2", 2): 0.1}
ASYMPTOTIC_RUNTIME_S = 300.0
SCHEDULE = (0.04, 0.01, 0.0025)
CHARACTER_CUTOFF = 10
COUNTEREXAMPLE_CUTOFF = 10


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, detail

    return emit


def test_criterion_1_nichols_dimensions(report):
    cases = [("A1", p) for p in range(2, 8)] + [("A2", 2), ("A2", 3), ("A3", 2)]
    bad, slowest = [], 0.0
    for label, p in cases:
        R = build(label)
        start = time.perf_counter()
        q = quantum_group_braiding(R, p)
        table = graded_dimensions(q, 20)
        slowest = max(slowest, time.perf_counter() - start)
        target = p ** len(R.positive_roots)
        if not (table.finite and table.total == target and total_dimension(q, 20) == target):
            bad.append((label, p, table.total))
        if table.by_total_degree != product_formula(R, p):
            bad.append((label, p, "table differs from product formula"))
    ok = not bad and slowest < NICHOLS_RUNTIME_S
    report(1, ok, f"{len(cases)} (type, p) cases exact, slowest {slowest:.2f}s, problems {bad}")


def test_criterion_2_counterexample_detection(report):
    h = Fraction(1, 2)
    t2 = graded_dimensions(DiagonalBraiding([[0, h], [h, 0]]), COUNTEREXAMPLE_CUTOFF)
    t1 = graded_dimensions(DiagonalBraiding([[0]]), COUNTEREXAMPLE_CUTOFF)
    ok = (
        t2.by_total_degree == [m + 1 for m in range(COUNTEREXAMPLE_CUTOFF + 1)]
        and t2.status["kind"] == "CutoffReached"
        and t1.by_total_degree == [1] * (COUNTEREXAMPLE_CUTOFF + 1)
        and t1.status["kind"] == "CutoffReached"
    )
    report(2, ok, f"rank 2: {t2.by_total_degree} {t2.status['kind']}; rank 1: {t1.by_total_degree} {t1.status['kind']}")


def test_criterion_3_cocycle_identities(report):
    grams = {"[[2]]": [[2]], "[[8]]": [[8]], "2*A2": [[4, -2], [-2, 4]], "3*A2": [[6, -3], [-3, 6]]}
    start = time.perf_counter()
    results = {name: build_cocycle(discriminant_form(IntegralLattice(g))).verify() for name, g in grams.items()}
    elapsed = time.perf_counter() - start
    ok = all(all(r.values()) for r in results.values()) and elapsed < COCYCLE_RUNTIME_S
    failed = {n: [k for k, v in r.items() if not v] for n, r in results.items() if not all(r.values())}
    report(3, ok, f"pentagon, hexagons, sigma(a,a)=Q, symmetrized sigma=B on 4 lattices in {elapsed:.2f}s; failures {failed}")


def test_criterion_4_isotropic_extension(report):
    form = discriminant_form(IntegralLattice([[8]]))
    subs = isotropic_subgroups(form)
    iso = [s.sorted_elements() for s in subs]
    local = extend_by_isotropic(form, subs[-1])
    q_gen_is_i = local.factors == (2,) and local.q_diag[0] % 2 == Fraction(1, 2)
    identities = True
    for gram in ([[8]], [[4, -2], [-2, 4]], [[6, -3], [-3, 6]], [[18]], [[4, 0], [0, 4]], [[16]]):
        f = discriminant_form(IntegralLattice(gram))
        for s in isotropic_subgroups(f):
            cosets = {frozenset(f.add(a, i) for i in s.elements) for a in f.elements()}
            identities &= len(cosets) == f.order // s.order
            identities &= extend_by_isotropic(f, s).order * s.order**2 == f.order
    ok = iso == [[(0,)], [(0,), (4,)]] and q_gen_is_i and identities
    report(4, ok, f"isotropic subgroups {iso}; I-perp/I = Z/{local.factors} with Q(gen)=exp(pi i {local.q_diag[0]}); order identities {identities}")


def test_criterion_5_fp_ledger(report):
    a1 = ledger_pointed_setup(discriminant_form(IntegralLattice([[4]])).order, 2)
    a2 = ledger_pointed_setup(discriminant_form(IntegralLattice([[4, -2], [-2, 4]])).order, 8)
    ident = all(ledger_pointed_setup(g, d).identities()["center_equals_modules_times_dimB"] for g, d in [(4, 2), (12, 8), (9, 3), (27, 27), (16, 64)])
    ok = (a1["fp_mod_N"], a1["fp_relative_center"], a2["fp_mod_N"], a2["fp_relative_center"]) == (8, 16, 96, 768) and ident
    report(5, ok, f"A1 p=2: {a1['fp_mod_N']}, {a1['fp_relative_center']}; A2 p=2: {a2['fp_mod_N']}, {a2['fp_relative_center']}; identity {ident}")


def test_criterion_6_character_positivity(report):
    details, ok = [], True
    for label, p in [("A1", 2), ("A1", 3), ("A2", 2)]:
        full = false_theta_character(build(label), p, cutoff=CHARACTER_CUTOFF, weighting="dimension").full_character(CHARACTER_CUTOFF)
        coeffs = full.coefficients()
        good = bool(coeffs) and all(c.denominator == 1 and c >= 0 for c in coeffs)
        ok &= good
        details.append(f"{label} p={p}: {len(coeffs)} terms {'ok' if good else 'BAD'}")
    report(6, ok, "; ".join(details))


def test_criterion_7_asymptotics(report):
    details, ok = [], True
    start = time.perf_counter()
    for (label, p), tol in ASYMPTOTIC_TOL.items():
        R = build(label)
        t0 = time.perf_counter()
        est = asymptotic_dim(R, p, schedule=SCHEDULE, order=1)
        qd = quantum_dimension_of_Fock(R, p, schedule=SCHEDULE, order=1, vacuum=est)
        target = Fraction(1, p ** len(R.positive_roots))
        dim_b = p ** len(R.positive_roots)
        good = abs(est.value - float(target)) <= tol and abs(qd.value - dim_b) <= tol * dim_b
        good &= time.perf_counter() - t0 < ASYMPTOTIC_RUNTIME_S
        ok &= good
        details.append(f"{label} p={p}: {est.value:.4f}~{target} (tol {tol}), qdim {qd.value:.3f}~{dim_b}")
    assert tuple(SCHEDULE) == tuple(DEFAULT_SCHEDULE)
    report(7, ok, "; ".join(details) + f"; {time.perf_counter() - start:.1f}s")


def test_criterion_8_end_to_end_verdicts(report, tmp_path, capsys):
    codes, kinds = {}, {}
    for name, argv in {
        "A1 2": ["kl-verify", "A1", "2"],
        "A2 2": ["kl-verify", "A2", "2"],
        "A2 1 degenerate": ["kl-verify", "A2", "1", "--allow-degenerate"],
    }.items():
        out = tmp_path / f"{name.replace(' ', '_')}.json"
        codes[name] = main(argv + ["--json", str(out)])
        rep = json.loads(out.read_text())
        kinds[name] = rep["verdict"]["kind"]
        if rep["hypotheses"] != HYPOTHESES:
            kinds[name] += " (hypotheses missing)"
    capsys.readouterr()
    ok = codes == {"A1 2": 0, "A2 2": 0, "A2 1 degenerate": 1} and list(kinds.values()) == ["MATCH", "MATCH", "MISMATCH"]
    report(8, ok, f"exit codes {codes}, verdicts {kinds}")
