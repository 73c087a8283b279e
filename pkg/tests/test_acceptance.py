"""Acceptance criteria, one test each.

The terminal summary prints a PASS/FAIL line per criterion (see conftest.py).
"""

import json
import time

import numpy as np
import pytest

from framecert import catalog
from framecert import linalg as la
from framecert.cli import main
from framecert.falsifier import SearchConfig, gradient_check, nr_violation_search
from framecert.frames import Frame, canonical_parseval
from framecert.naimark import (
    complement_coordinates,
    full_spark_duality,
    gram,
    gram_defect,
    li_span_duality_check,
    naimark_complement,
)
from framecert.operators import abc_equivalence_suite, apply_operator
from framecert.spark import complement_property, is_full_spark, spark
from framecert.subspaces import (
    Subspace,
    SubspaceFamily,
    identity_in_span,
    norm_retrieval_certificate,
    nrbasis_falsifier,
    pairwise_orthogonal,
    pop_family_checks,
    projection_sum_residual,
    sample_pop_family,
)
from oracles import brute_spark, composition, frac_rank, object_array, rational_parseval


def criterion(n, title):
    return pytest.mark.criterion(n, title)


def _frame_json(rows, field):
    if field == la.EXACT:
        return {"dim": len(rows[0]), "field": "exact", "vectors": [[str(int(v)) for v in r] for r in rows]}
    return {"dim": len(rows[0]), "field": "float", "vectors": [[float(v) for v in r] for r in rows]}


def _run_cli(capsys, tmp_path, argv_head, obj):
    path = tmp_path / "input.json"
    path.write_text(json.dumps(obj))
    code = main([*argv_head, str(path)])
    return code, json.loads(capsys.readouterr().out)


def _pair_gaps(rows, pair):
    t = np.array(rows, float)
    x = np.array([float(la.to_fraction(v)) for v in pair["x"]])
    y = np.array([float(la.to_fraction(v)) for v in pair["y"]])
    meas = float(np.max(np.abs(np.abs(t @ x) - np.abs(t @ y))))
    phase = min(np.linalg.norm(x - y), np.linalg.norm(x + y))
    return meas, phase


@criterion(1, "complement property <=> phase retrieval via pr-vectors")
def test_c1_cp_pr_machinery(capsys, tmp_path):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    frames = 0
    while frames < 100:
        n = (2, 3, 4)[frames % 3]
        field = la.EXACT if frames % 2 == 0 else la.FLOAT
        m = 2 * n - 1
        rows = rng.integers(-5, 6, size=(m, n)) if field == la.EXACT else rng.standard_normal((m, n))
        if not is_full_spark(Frame(la.as_field(rows, field))):
            continue
        frames += 1
        code, out = _run_cli(capsys, tmp_path, ["pr-vectors"], _frame_json(rows.tolist(), field))
        assert code == 0 and out["verdict"] == "YES"
        for drop in range(m):
            kept = np.delete(rows, drop, axis=0).tolist()
            code, out = _run_cli(capsys, tmp_path, ["pr-vectors"], _frame_json(kept, field))
            assert code == 1 and out["verdict"] == "NO"
            meas, phase = _pair_gaps(kept, out["witness"]["pair"])
            assert meas <= 1e-9 and phase >= 1e-3
    assert time.perf_counter() - start <= 60


@criterion(2, "independence / spanning duality for Naimark complements")
def test_c2_li_span_duality():
    rng = np.random.default_rng(2)
    for trial in range(500):
        n = int(rng.integers(1, 6))
        m = int(rng.integers(n + 1, 11))
        subset = [i for i in range(m) if rng.random() < 0.5]
        rest = [i for i in range(m) if i not in subset]
        if trial % 2 == 0:
            rows = rational_parseval(n, m, rng)
            f = Frame(object_array(rows))
            # oracle with plain fractions: columns of I - T T^T
            q = [[int(i == j) - sum(a * b for a, b in zip(rows[i], rows[j])) for j in range(m)] for i in range(m)]
            independent = frac_rank([rows[i] for i in subset]) == len(subset)
            spans = frac_rank([q[i] for i in rest]) == m - n
            assert independent == spans
        else:
            g = rng.standard_normal((m, n))
            if trial % 4 == 1 and m > n + 1:
                g[1] = g[0]
            f = canonical_parseval(Frame(g))
        assert li_span_duality_check(f, subset)


def _block_parseval(rng, n1, m1, n2, m2):
    """Direct sum of two rational Parseval frames; never full spark when m1 > n1 and n2 > 0."""
    a, b = rational_parseval(n1, m1, rng), rational_parseval(n2, m2, rng)
    rows = [list(r) + [0] * n2 for r in a] + [[0] * n1 + list(r) for r in b]
    return rows


@criterion(3, "full spark duality between a frame and its complement")
def test_c3_full_spark_duality():
    rng = np.random.default_rng(3)
    engineered = 0
    for trial in range(100):
        if trial % 3 == 0:
            n1 = int(rng.integers(1, 3))
            rows = _block_parseval(rng, n1, n1 + int(rng.integers(1, 3)), 1, int(rng.integers(2, 4)))
            engineered += 1
        else:
            n = int(rng.integers(1, 4))
            rows = rational_parseval(n, n + int(rng.integers(1, 4)), rng)
        f = Frame(object_array(rows))
        n, m = f.dim, f.size
        comp = complement_coordinates(f)
        assert full_spark_duality(f)
        assert is_full_spark(f) == is_full_spark(comp)
        # brute-force oracle on T and on the columns of I - T T^T
        q = [[int(i == j) - sum(a * b for a, b in zip(rows[i], rows[j])) for j in range(m)] for i in range(m)]
        assert (brute_spark(rows) == n + 1) == (brute_spark(q) == m - n + 1)
        if trial % 3 == 0:
            assert not is_full_spark(f)
        # the float complement agrees with the exact coordinates
        psi = naimark_complement(f.to_field(la.FLOAT)).complement
        assert is_full_spark(psi) == is_full_spark(comp)
    assert engineered >= 30


@criterion(4, "Naimark pair contract")
def test_c4_naimark_pair_contract():
    rng = np.random.default_rng(4)
    frames = [catalog.duplicate_vector()["primary"]]
    for _ in range(99):
        n = int(rng.integers(1, 6))
        m = int(rng.integers(n + 1, 11))
        frames.append(canonical_parseval(Frame(rng.standard_normal((m, n)))))
    for f in frames:
        pair = naimark_complement(f)
        n, m = f.dim, f.size
        assert gram_defect(pair) <= 1e-9
        assert abs(np.sum(f.vectors**2) - n) <= 1e-8
        assert abs(np.sum(pair.complement.vectors**2) - (m - n)) <= 1e-8
        back = naimark_complement(pair.complement)
        assert la.max_abs(gram(back.complement) - gram(f)) <= 1e-8


@criterion(5, "classification when dimensions sum to N")
def test_c5_sum_dim_classification():
    rng = np.random.default_rng(5)
    for trial in range(100):
        n = int(rng.integers(2, 7))
        dims = composition(rng, n)
        if trial % 3 == 0:
            q, _ = np.linalg.qr(rng.standard_normal((n, n)))
            cuts = np.cumsum([0, *dims])
            members = tuple(Subspace(q[:, a:b]) for a, b in zip(cuts, cuts[1:]))
        else:
            members = tuple(Subspace(rng.standard_normal((n, d))) for d in dims)
        fam = SubspaceFamily(n, members)
        cert = norm_retrieval_certificate(fam)
        assert cert.is_yes == (projection_sum_residual(fam) <= 1e-9) == pairwise_orthogonal(fam)
        if cert.is_no:
            pair = cert.witness["pair"]
            assert pair.measurement_gap <= 1e-9 and pair.norm_gap >= 1e-6

    r = 1 / np.sqrt(2)
    fam = SubspaceFamily(2, (Subspace(np.array([[1.0], [0.0]])), Subspace(np.array([[r], [r]]))))
    cert = norm_retrieval_certificate(fam)
    assert cert.is_no
    pair = cert.witness["pair"]
    v1, v2 = np.array([0.5, 0.5]), np.array([-0.5, 1.5])
    c = pair.x[0] / v1[0]
    assert np.allclose(pair.x, c * v1) and np.allclose(pair.y, c * v2)
    ref_norm_gap = abs(np.linalg.norm(c * v1) - np.linalg.norm(c * v2))
    assert pair.norm_gap == pytest.approx(ref_norm_gap, rel=1e-9)
    assert pair.measurement_gap <= 1e-9


@criterion(6, "identity-in-span soundness for the generic rank-one family")
def test_c6_pop_family():
    for seed in range(20):
        pop = sample_pop_family(3, 6, seed)
        combo = sum(c * p for c, p in zip(pop.coefficients, pop.family.projections))
        assert la.max_abs(combo - np.eye(3)) <= 1e-9
        assert np.all(pop.coefficients > 0)
        checks = pop_family_checks(pop)
        assert checks["projection_rank"] == 6
        assert checks["proper_subfamilies_exclude_identity"]
        # exact rank deficit on the congruent data: S is outside the span of any 5 outer products
        outers = [np.outer(v, v).reshape(-1) for v in pop.frame.vectors]
        s = pop.frame.frame_operator.reshape(-1)
        for drop in range(6):
            cols = [o for i, o in enumerate(outers) if i != drop]
            assert la.rank(np.stack(cols + [s], axis=1)) == 6


@criterion(7, "duplicate-vector example")
def test_c7_duplicate_vector():
    start = time.perf_counter()
    rec = catalog.duplicate_vector(3)
    elapsed = time.perf_counter() - start
    assert rec["primary_phase_retrieval"].is_yes
    cp = rec["complement_property_of_complement"]
    assert cp.is_no and cp.witness["subset"] == rec["duplicated_indices"] == [0, 1]
    assert elapsed <= 5


@criterion(8, "phase retrieval under invertible transforms")
def test_c8_invertible_suite():
    rng = np.random.default_rng(8)
    yes_frames = [
        Frame(object_array([[1, 0], [0, 1], [1, 1]])),
        catalog.full_spark_seed(3),
        catalog.full_spark_seed(4),
    ]
    while len(yes_frames) < 6:
        f = Frame(object_array(rng.integers(-3, 4, size=(6, 3)).tolist()))
        if complement_property(f).is_yes:
            yes_frames.append(f)
    for i, f in enumerate(yes_frames):
        rep = abc_equivalence_suite(f, trials=50, seed=i)
        assert rep.ground_truth.is_yes and len(rep.trial_verdicts) == 50 and rep.all_match

    e = Frame(object_array([[1, 0], [0, 1]]))
    rep = abc_equivalence_suite(e, trials=50, seed=0)
    assert rep.ground_truth.is_no and rep.all_match
    moved = la.as_float(apply_operator(e, rep.operator).vectors)
    x, y = la.as_float(rep.pair.x), la.as_float(rep.pair.y)
    assert np.linalg.matrix_rank(la.as_float(rep.operator.matrix)) == 2
    assert np.max(np.abs(np.abs(moved @ x) - np.abs(moved @ y))) <= 1e-9
    assert abs(np.linalg.norm(x) - np.linalg.norm(y)) >= 1e-6


@criterion(9, "optimization falsifier")
def test_c9_optimization_falsifier():
    rng = np.random.default_rng(9)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        dims = rng.integers(1, n + 1, size=int(rng.integers(1, 5)))
        fam = SubspaceFamily(n, tuple(Subspace(rng.standard_normal((n, int(d)))) for d in dims))
        assert gradient_check(fam, rng.standard_normal(n), rng.standard_normal(n)) <= 1e-5

    cfg = SearchConfig()
    successes = 0
    families = []
    for k in range(50):
        n = int(rng.integers(2, 7))
        fam = SubspaceFamily(n, tuple(Subspace(rng.standard_normal((n, d))) for d in composition(rng, n)))
        assert projection_sum_residual(fam) > 1e-9
        families.append(fam)
        pair = nr_violation_search(fam, SearchConfig(seed=k))
        if pair is not None:
            pm = np.max(np.abs(np.array([np.linalg.norm(p @ pair.x) - np.linalg.norm(p @ pair.y) for p in fam.projections])))
            assert pm <= 1e-6
            assert abs(np.linalg.norm(pair.x) - np.linalg.norm(pair.y)) >= cfg.delta / 2
            successes += 1
        else:
            exact = nrbasis_falsifier(fam)
            assert exact.measurement_gap <= 1e-9 and exact.norm_gap >= 1e-6
    print(f"nr_violation_search succeeded on {successes}/50 families")
    assert successes >= 45

    for k, fam in enumerate(families[:6]):
        a = nr_violation_search(fam, SearchConfig(seed=k, restarts=16), workers=1)
        b = nr_violation_search(fam, SearchConfig(seed=k, restarts=16), workers=4)
        assert (a is None) == (b is None)
        if a is not None:
            assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)


def _random_rational_rows(rng, n, m):
    num = rng.integers(-4, 5, size=(m, n))
    den = rng.integers(1, 4, size=(m, n))
    rows = [[la.to_fraction(f"{a}/{b}") for a, b in zip(r, d)] for r, d in zip(num, den)]
    kind = rng.integers(0, 4)
    if kind == 1 and m > 1:
        rows[1] = [3 * v for v in rows[0]]
    elif kind == 2 and m > 2:
        rows[2] = [a - b for a, b in zip(rows[0], rows[1])]
    elif kind == 3:
        rows[0] = [0 * v for v in rows[0]]
    return rows


@criterion(10, "exact and float kernels agree")
def test_c10_exact_float_agreement():
    rng = np.random.default_rng(10)
    checked = 0
    for _ in range(200):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 7))
        rows = _random_rational_rows(rng, n, m)
        exact = Frame(object_array(rows))
        flt = exact.to_field(la.FLOAT)
        assert la.rank(exact.vectors) == la.rank(flt.vectors) == frac_rank(rows)
        assert spark(exact) == spark(flt)
        assert complement_property(exact).verdict is complement_property(flt).verdict
        nonzero = [i for i in range(m) if any(v != 0 for v in rows[i])]
        if nonzero:
            fam_e = SubspaceFamily(n, tuple(Subspace(exact.vectors[i : i + 1].T) for i in nonzero))
            fam_f = SubspaceFamily(n, tuple(Subspace(flt.vectors[i : i + 1].T) for i in nonzero))
            assert (identity_in_span(fam_e) is None) == (identity_in_span(fam_f) is None)
        checked += 1
    assert checked == 200
