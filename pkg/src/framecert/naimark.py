"""Naimark complements of Parseval frames and the dualities they carry.

A Parseval frame ``{phi_i}`` in R^N with analysis matrix T (rows ``phi_i``)
has ``T T^T = P``, the orthogonal projection of R^M onto range(T).  Its
complement is realized by the rows of an orthonormal basis of ``ker(T^T)``;
Gram matrices of the two frames add up to the identity.  For exact Parseval
frames the dualities are checked without square roots, on the columns of
``P`` and ``I - P`` directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .certificates import Certificate, Method, Verdict
from .errors import NoComplement, NotParseval
from .frames import Frame, is_parseval
from .linalg import DEFAULT_TOL, EXACT, ToleranceConfig
from .spark import DEFAULT_MAX_M, is_full_spark, yields_phase_retrieval_vectors


@dataclass(frozen=True, eq=False)
class NaimarkPair:
    primary: Frame
    complement: Frame


def gram(f: Frame) -> np.ndarray:
    return f.vectors @ f.vectors.T


def _require_parseval(f: Frame) -> None:
    if not is_parseval(f):
        raise NotParseval("Naimark complements are only defined for Parseval frames")


def naimark_complement(f: Frame, tol: ToleranceConfig = DEFAULT_TOL) -> NaimarkPair:
    """Complement ``psi_i`` = i-th row of an orthonormal basis of ``ker(T^T)``."""
    _require_parseval(f)
    m, n = f.size, f.dim
    if m <= n:
        raise NoComplement("a Parseval basis has a zero-dimensional complement")
    b = la.orthonormal_kernel_basis(la.as_float(f.vectors).T, tol)
    if b.shape[1] != m - n:
        raise NotParseval(f"kernel has dimension {b.shape[1]}, expected {m - n}")
    return NaimarkPair(f, Frame(b))


def gram_defect(p: NaimarkPair) -> float:
    """``|| G_primary + G_complement - I ||_max``."""
    g = la.as_float(gram(p.primary)) + la.as_float(gram(p.complement))
    return la.max_abs(g - np.eye(p.primary.size))


def verify_naimark_pair(p: NaimarkPair, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    if p.primary.size != p.complement.size:
        return False
    if p.primary.dim + p.complement.dim != p.primary.size:
        return False
    if not (is_parseval(p.primary) and is_parseval(p.complement)):
        return False
    return gram_defect(p) <= tol.witness_tol


def range_projection(f: Frame) -> np.ndarray:
    """``P = T T^T``, exact for exact frames."""
    return gram(f)


def complement_coordinates(f: Frame) -> Frame:
    """Exact coordinates of ``(I - P) e_i`` in a rational basis of ``range(I - P)``.

    The result is the Naimark complement up to an invertible linear map, so
    it has the same spark, spanning subsets and complement property.
    """
    _require_parseval(f)
    if f.field != EXACT:
        raise NotParseval("exact complement coordinates need an exact frame")
    m = f.size
    q = la.identity(m, EXACT) - range_projection(f)
    r, pivots = la.rref(q)
    if not pivots:
        raise NoComplement("complement is zero-dimensional")
    return Frame(r[: len(pivots), :].T.copy())


def _complement_frame(f: Frame, tol: ToleranceConfig) -> Frame:
    if f.field == EXACT:
        return complement_coordinates(f)
    return naimark_complement(f, tol).complement


def li_span_duality_check(f: Frame, subset, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Check that ``{P e_i}_I`` is independent iff ``{(I-P) e_i}_{I^c}`` spans ``range(I-P)``."""
    _require_parseval(f)
    m, n = f.size, f.dim
    subset = sorted(set(int(i) for i in subset))
    rest = [i for i in range(m) if i not in subset]
    independent = (not subset) or la.rank(f.vectors[subset], tol, f.scale) == len(subset)
    if m == n:
        spans = True
    elif f.field == EXACT:
        q = la.identity(m, EXACT) - range_projection(f)
        spans = la.rank(q[:, rest]) == m - n if rest else False
    else:
        psi = naimark_complement(f, tol).complement
        spans = la.rank(psi.vectors[rest], tol, psi.scale) == m - n if rest else False
    return independent == spans


def full_spark_duality(f: Frame, tol: ToleranceConfig = DEFAULT_TOL, max_m: int = DEFAULT_MAX_M) -> bool:
    """Check that a Parseval frame and its complement are both or neither full spark."""
    _require_parseval(f)
    if f.size <= f.dim:
        raise NoComplement("needs N < M")
    comp = _complement_frame(f, tol)
    return is_full_spark(f, tol, max_m) == is_full_spark(comp, tol, max_m)


def naimark_pr_bounds_check(f: Frame, tol: ToleranceConfig = DEFAULT_TOL, max_m: int = DEFAULT_MAX_M) -> Certificate:
    """Check ``2N - 1 <= M <= 2N + 1`` whenever both sides do phase retrieval.

    The verdict is NO only if both frames do phase retrieval and a bound
    fails.  When one side fails phase retrieval the bounds are not implied and
    the certificate records the failed hypothesis instead.
    """
    _require_parseval(f)
    m, n = f.size, f.dim
    if m <= n:
        raise NoComplement("needs N < M")
    comp = _complement_frame(f, tol)
    primary_pr = yields_phase_retrieval_vectors(f, tol, max_m)
    complement_pr = yields_phase_retrieval_vectors(comp, tol, max_m)
    witness = {
        "N": n,
        "M": m,
        "primary_pr": primary_pr.verdict,
        "complement_pr": complement_pr.verdict,
        "hypothesis_holds": primary_pr.is_yes and complement_pr.is_yes,
        "lower_bound": 2 * n - 1,
        "upper_bound": 2 * n + 1,
    }
    if not witness["hypothesis_holds"]:
        return Certificate(Verdict.YES, Method.NAIMARK_COUNT_BOUNDS, witness, f.field)
    violated = []
    if m < 2 * n - 1:
        violated.append("M >= 2N - 1")
    if m > 2 * n + 1:
        violated.append("M <= 2N + 1")
    if violated:
        return Certificate(Verdict.NO, Method.NAIMARK_COUNT_BOUNDS, {**witness, "violated": violated}, f.field)
    return Certificate(Verdict.YES, Method.NAIMARK_COUNT_BOUNDS, witness, f.field)
