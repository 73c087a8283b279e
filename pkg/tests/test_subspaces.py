from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framecert import linalg as la
from framecert.certificates import Method, Verdict
from framecert.errors import BadCoefficients, PreconditionViolated, RangeError
from framecert.frames import Frame
from framecert.spark import yields_phase_retrieval_vectors
from framecert.subspaces import (
    Subspace,
    SubspaceFamily,
    complement_family,
    complements_pr_via_nr,
    generic_pop_family,
    identity_in_span,
    measurement_map,
    norm_retrieval_certificate,
    nrbasis_falsifier,
    pairwise_orthogonal,
    pop_family_checks,
    projection_sum_residual,
    sample_pop_family,
    complements_pr_via_coefficient_sum,
)
from oracles import composition, object_array

R = 1 / np.sqrt(2)


def fam_from(n, bases, exact=False):
    mk = object_array if exact else (lambda rows: np.array(rows, float))
    return SubspaceFamily(n, tuple(Subspace(mk(b).T) for b in bases))


def random_family(rng, n, dims):
    return SubspaceFamily(n, tuple(Subspace(rng.standard_normal((n, d))) for d in dims))


def test_measurement_map():
    fam = fam_from(2, [[[1, 0]], [[0, 1]]])
    assert np.allclose(measurement_map(fam, [3.0, 4.0]), [9, 16])


def test_identity_in_span_examples():
    fam = fam_from(2, [[[1, 0]], [[0, 1]]], exact=True)
    assert list(identity_in_span(fam)) == [1, 1]
    assert identity_in_span(fam_from(2, [[[1, 0]], [[1, 1]]], exact=True)) is None
    three = fam_from(2, [[[1, 0]], [[0, 1]], [[1, 1]]], exact=True)
    a = identity_in_span(three)
    combo = sum(c * p for c, p in zip(a, three.projections))
    assert (combo == la.identity(2, la.EXACT)).all()


def test_worked_falsifier_instance_exact():
    fam = fam_from(2, [[[1, 0]], [[1, 1]]], exact=True)
    pair = nrbasis_falsifier(fam)
    assert list(pair.x) == [Fraction(1, 2), Fraction(1, 2)]
    assert list(pair.y) == [Fraction(-1, 2), Fraction(3, 2)]
    assert pair.extra["alpha"] == -2
    px = [p @ pair.x for p in fam.projections]
    py = [p @ pair.y for p in fam.projections]
    assert all(a @ a == b @ b for a, b in zip(px, py))
    assert pair.x @ pair.x != pair.y @ pair.y


def test_worked_falsifier_instance_float():
    fam = fam_from(2, [[[1, 0]], [[R, R]]])
    cert = norm_retrieval_certificate(fam)
    assert cert.verdict is Verdict.NO and cert.method is Method.ORTHOGONALITY
    pair = cert.witness["pair"]
    assert np.allclose(pair.x, [0.5, 0.5]) and np.allclose(pair.y, [-0.5, 1.5])
    assert pair.measurement_gap <= 1e-9 and pair.norm_gap >= 1e-6


def test_falsifier_preconditions():
    with pytest.raises(PreconditionViolated):
        nrbasis_falsifier(fam_from(2, [[[1, 0]], [[0, 1]]]))
    with pytest.raises(PreconditionViolated):
        nrbasis_falsifier(fam_from(2, [[[1, 0]], [[0, 1]], [[1, 1]]]))


def test_non_spanning_family_fails():
    cert = norm_retrieval_certificate(fam_from(3, [[[1, 0, 0]], [[0, 1, 0]]], exact=True))
    assert cert.verdict is Verdict.NO and cert.method is Method.NON_SPANNING
    assert cert.witness["pair"].norm_gap > 0


def test_unknown_escalates():
    fam = fam_from(2, [[[1, 0]], [[1, 1]], [[1, 2]], [[2, 1]]])
    cert = norm_retrieval_certificate(fam)
    assert cert.verdict in (Verdict.YES, Verdict.UNKNOWN)
    rng = np.random.default_rng(0)
    cert = norm_retrieval_certificate(random_family(rng, 4, [2, 2, 1]))
    assert cert.verdict is Verdict.UNKNOWN


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1), st.booleans())
def test_sum_dim_classification(n, seed, orthogonal):
    rng = np.random.default_rng(seed)
    dims = composition(rng, n)
    if orthogonal:
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        cuts = np.cumsum([0, *dims])
        fam = SubspaceFamily(n, tuple(Subspace(q[:, a:b]) for a, b in zip(cuts, cuts[1:])))
    else:
        fam = random_family(rng, n, dims)
    cert = norm_retrieval_certificate(fam)
    residual_ok = projection_sum_residual(fam) <= 1e-9
    assert cert.is_yes == residual_ok == pairwise_orthogonal(fam) == orthogonal
    if cert.is_no:
        pair = cert.witness["pair"]
        assert pair.measurement_gap <= 1e-9 and pair.norm_gap >= 1e-6


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_sum_dim_classification_exact(n, seed):
    rng = np.random.default_rng(seed)
    dims = composition(rng, n)
    bases = [rng.integers(-3, 4, size=(d, n)).tolist() for d in dims]
    fam = fam_from(n, bases, exact=True)
    if any(w.dim < d for w, d in zip(fam.members, dims)) or sum(fam.dims) != n:
        return
    cert = norm_retrieval_certificate(fam)
    if cert.is_no and cert.method is not Method.NON_SPANNING:
        pair = cert.witness["pair"]
        px = [p @ pair.x for p in fam.projections]
        py = [p @ pair.y for p in fam.projections]
        assert all(a @ a == b @ b for a, b in zip(px, py))
        assert pair.x @ pair.x != pair.y @ pair.y


def test_complement_family():
    fam = fam_from(3, [[[1, 0, 0]], [[0, 1, 0]]])
    comp = complement_family(fam)
    for p, q in zip(fam.projections, comp.projections):
        assert np.allclose(p + q, np.eye(3))


def test_coefficient_sum_rule():
    fam = fam_from(2, [[[1, 0]], [[0, 1]]], exact=True)
    cert = complements_pr_via_coefficient_sum(fam, [1, 1])
    assert cert.is_yes and cert.witness["coefficient_sum"] == 2
    with pytest.raises(BadCoefficients):
        complements_pr_via_coefficient_sum(fam, [1, 2])
    with pytest.raises(BadCoefficients):
        complements_pr_via_coefficient_sum(fam, [1])
    three = fam_from(2, [[[1, 0]], [[0, 1]], [[1, 1]]], exact=True)
    # zero coefficients are allowed
    cert = complements_pr_via_coefficient_sum(three, [1, 1, 0])
    assert cert.is_yes


def test_complement_norm_retrieval_rule_passes_verdict():
    fam = fam_from(2, [[[1, 0]], [[R, R]]])
    nr = norm_retrieval_certificate(fam)
    cert = complements_pr_via_nr(fam, nr)
    assert cert.verdict is nr.verdict and "pair" in cert.witness


def test_pop_family_range_and_checks():
    with pytest.raises(RangeError):
        sample_pop_family(3, 7)
    frame, fam, coeffs = generic_pop_family(3, 6, seed=4)
    assert isinstance(frame, Frame) and len(fam) == 6 and np.all(coeffs > 0)
    checks = pop_family_checks(sample_pop_family(3, 6, seed=4))
    assert checks["identity_residual"] <= 1e-9
    assert checks["projection_rank"] == 6 and checks["outer_product_rank"] == 6
    assert checks["proper_subfamilies_exclude_identity"]
    assert checks["coefficients_match_exact"] <= 1e-9


def test_pop_family_is_norm_retrieving():
    _, fam, _ = generic_pop_family(3, 6, seed=1)
    cert = norm_retrieval_certificate(fam)
    assert cert.is_yes and cert.method is Method.IDENTITY_IN_SPAN


def test_identity_expansion_recovers_norms():
    _, fam, _ = generic_pop_family(3, 6, seed=2)
    a = identity_in_span(fam)
    rng = np.random.default_rng(0)
    for _ in range(100):
        x = rng.standard_normal(3)
        assert abs(sum(c * m for c, m in zip(a, measurement_map(fam, x))) - x @ x) <= 1e-9


def test_falsifier_gaps_on_random_families():
    rng = np.random.default_rng(12)
    done = 0
    while done < 100:
        n = int(rng.integers(2, 7))
        fam = random_family(rng, n, composition(rng, n))
        pair = nrbasis_falsifier(fam)
        assert pair.measurement_gap <= 1e-9 and pair.norm_gap >= 1e-6
        done += 1


def test_pop_subfamily_of_size_five():
    pop = sample_pop_family(3, 6, seed=0)
    sub = pop.family.subfamily(range(5))
    assert identity_in_span(sub) is None
    psi = Frame(np.stack([w.basis[:, 0] for w in sub.members]))
    assert yields_phase_retrieval_vectors(psi).is_yes
