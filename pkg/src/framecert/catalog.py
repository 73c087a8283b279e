"""Reproducible named examples.

Each builder returns a dict with a ``passed`` flag and the certificates and
checks that back it up.  Index sets are 0-based.
"""

from __future__ import annotations

import numpy as np

from . import linalg as la
from .certificates import Certificate, Method, Verdict, frame_magnitudes
from .errors import UnknownExample
from .falsifier import pr_witness_from_partition
from .frames import Frame, canonical_parseval
from .linalg import DEFAULT_TOL, EXACT, ToleranceConfig
from .naimark import naimark_complement, naimark_pr_bounds_check, verify_naimark_pair
from .spark import complement_property, is_full_spark, yields_phase_retrieval_vectors
from .subspaces import identity_in_span, pop_family_checks, sample_pop_family


def full_spark_seed(n: int) -> Frame:
    """``2n - 1`` full-spark integer vectors in R^n.

    For n = 3 this is ``{e1, e2, e3, (1,1,1), (1,2,3)}``; otherwise the
    Vandermonde rows ``(1, t, ..., t^{n-1})`` for ``t = 1, ..., 2n - 1``.
    """
    if n == 3:
        rows = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [1, 2, 3]]
    else:
        rows = [[t**k for k in range(n)] for t in range(1, 2 * n)]
    return Frame(la.as_exact(np.array(rows, dtype=object)))


def duplicate_vector(n: int = 3, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Repeat the first of ``2n - 1`` full-spark vectors, then pass to the Parseval frame.

    The Parseval frame does phase retrieval; its Naimark complement cannot,
    since the duplicated pair is dependent and so the complement of that pair
    fails to span.
    """
    base = full_spark_seed(n)
    doubled = Frame(np.concatenate([base.vectors[:1], base.vectors]))
    primary = canonical_parseval(doubled, tol)
    pair = naimark_complement(primary, tol)
    primary_pr = yields_phase_retrieval_vectors(primary, tol)
    complement_cp = complement_property(pair.complement, tol)
    subset = (complement_cp.witness or {}).get("subset")
    passed = primary_pr.is_yes and complement_cp.is_no and subset == [0, 1]
    return {
        "name": "duplicate-vector",
        "passed": passed,
        "duplicated_indices": [0, 1],
        "base_frame": base,
        "primary": primary,
        "complement": pair.complement,
        "naimark_pair_verified": verify_naimark_pair(pair, tol),
        "primary_phase_retrieval": primary_pr,
        "complement_property_of_complement": complement_cp,
    }


def free_measurement(samples: int = 100, seed: int = 0, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Four vectors in R^3 that fail phase retrieval, rescued by a norm promise.

    ``{e1, e2, e3, phi1, phi2}`` is full spark and does phase retrieval.
    Dropping e3 breaks it, but for unit vectors ``|<x, e3>|^2 = 1 - |<x, e1>|^2
    - |<x, e2>|^2``, so the missing measurement is free.  Every partition-built
    counterexample for the four vectors has ``||x|| != ||y||``.
    """
    full = full_spark_seed(3)
    four = full.subset([0, 1, 3, 4])
    full_pr = yields_phase_retrieval_vectors(full, tol)
    four_pr = yields_phase_retrieval_vectors(four, tol)

    counterexamples = []
    for mask in range(1, 2 ** (four.size - 1)):
        subset = [0] + [i for i in range(1, four.size) if mask >> (i - 1) & 1]
        if len(subset) == four.size:
            continue
        rest = [i for i in range(four.size) if i not in subset]
        if la.rank(four.vectors[subset]) < 3 and la.rank(four.vectors[rest]) < 3:
            p = pr_witness_from_partition(four, subset, tol)
            counterexamples.append(p)
    unequal = bool(counterexamples) and all(p.norm_gap > 1e-6 for p in counterexamples)

    rng = np.random.default_rng(seed)
    worst = 0.0
    e3 = np.array([0.0, 0.0, 1.0])
    for _ in range(samples):
        x = rng.standard_normal(3)
        x /= np.linalg.norm(x)
        m = frame_magnitudes(la.as_float(four.vectors[:2]))(x) ** 2
        worst = max(worst, abs((1.0 - m.sum()) - float(x @ e3) ** 2))

    passed = full_pr.is_yes and four_pr.is_no and unequal and worst <= 1e-10
    return {
        "name": "free-measurement",
        "passed": passed,
        "full_frame": full,
        "full_phase_retrieval": full_pr,
        "four_vectors": four,
        "four_phase_retrieval": four_pr,
        "counterexamples": counterexamples,
        "counterexample_norms_differ": unequal,
        "samples": samples,
        "free_measurement_max_error": worst,
    }


def pop_generic(seed: int = 0, n: int = 3, m: int = 6, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Generic rank-one family with ``I = sum a_i P_i`` and no shorter expansion."""
    pop = sample_pop_family(n, m, seed, tol)
    checks = pop_family_checks(pop, tol)
    passed = (
        checks["identity_residual"] <= 1e-9
        and checks["coefficients_positive"]
        and checks["projection_rank"] == m
        and checks["proper_subfamilies_exclude_identity"]
    )
    return {
        "name": "pop-generic",
        "passed": bool(passed),
        "seed": seed,
        "frame": pop.frame,
        "coefficients": pop.coefficients,
        "projected_vectors": [w.basis[:, 0] for w in pop.family.members],
        "identity_in_span_coefficients": identity_in_span(pop.family, tol),
        "checks": checks,
    }


def _random_parseval(n: int, m: int, rng: np.random.Generator, tol: ToleranceConfig) -> Frame:
    for _ in range(100):
        f = canonical_parseval(Frame(rng.standard_normal((m, n))), tol)
        if is_full_spark(f, tol):
            return f
    raise RuntimeError("could not sample a full-spark frame")


def naimark_bounds(seed: int = 0, n: int = 3, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Full-spark Parseval frames at ``M = 2N - 1, 2N, 2N + 1`` with both sides doing phase retrieval.

    ``M = 2N - 2`` and ``M = 2N + 2`` are included as contrasts, where one
    side must fail.
    """
    rng = np.random.default_rng(seed)
    rows = {}
    passed = True
    for m in range(2 * n - 2, 2 * n + 3):
        f = _random_parseval(n, m, rng, tol)
        cert = naimark_pr_bounds_check(f, tol)
        inside = 2 * n - 1 <= m <= 2 * n + 1
        ok = cert.is_yes and cert.witness["hypothesis_holds"] == inside
        passed = passed and ok
        rows[str(m)] = {"in_range": inside, "certificate": cert, "as_expected": ok}
    return {"name": "naimark-bounds", "passed": passed, "N": n, "by_M": rows}


EXAMPLES = {
    "duplicate-vector": lambda seed, tol: duplicate_vector(3, tol),
    "free-measurement": lambda seed, tol: free_measurement(100, seed, tol),
    "pop-generic": lambda seed, tol: pop_generic(seed, tol=tol),
    "naimark-bounds": lambda seed, tol: naimark_bounds(seed, tol=tol),
}


def example(name: str, seed: int = 0, tol: ToleranceConfig = DEFAULT_TOL) -> Certificate:
    """Run a named example and wrap its record in a certificate.

    YES when the example reproduces its expected outcome, NO otherwise.
    """
    try:
        build = EXAMPLES[name]
    except KeyError:
        raise UnknownExample(f"unknown example {name!r}; choose from {sorted(EXAMPLES)}") from None
    record = build(seed, tol)
    verdict = Verdict.YES if record["passed"] else Verdict.NO
    return Certificate(verdict, Method.EXAMPLE, record, EXACT if name in ("free-measurement", "pop-generic") else la.FLOAT)
