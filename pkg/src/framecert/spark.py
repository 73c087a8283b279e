"""Spark, full spark and the complement property for real frames.

Index sets are 0-based throughout.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from . import linalg as la
from .certificates import Certificate, Method, Verdict
from .errors import TooFewVectors, TooLarge, UnsupportedField
from .frames import Frame
from .linalg import DEFAULT_TOL, ToleranceConfig

DEFAULT_MAX_M = 24


def _guard(f: Frame, max_m: int) -> None:
    if f.size > max_m:
        raise TooLarge(f"{f.size} vectors exceeds the enumeration guard of {max_m}")


def _rank_of(vectors: np.ndarray, idx, tol: ToleranceConfig, scale: float | None = None) -> int:
    idx = list(idx)
    if not idx:
        return 0
    return la.rank(vectors[idx], tol, scale)


def smallest_dependent_subset(
    f: Frame, tol: ToleranceConfig = DEFAULT_TOL, max_m: int = DEFAULT_MAX_M
) -> tuple[int, list[int] | None]:
    """Return ``(spark, subset)``; ``subset`` is None when every subset is independent."""
    _guard(f, max_m)
    m, n = f.size, f.dim
    for k in range(1, min(m, n) + 1):
        for combo in combinations(range(m), k):
            if _rank_of(f.vectors, combo, tol, f.scale) < k:
                return k, list(combo)
    if m > n:
        # any n+1 vectors in R^n are dependent
        return n + 1, list(range(n + 1))
    return m + 1, None


def spark(f: Frame, tol: ToleranceConfig = DEFAULT_TOL, max_m: int = DEFAULT_MAX_M) -> int:
    """Size of the smallest dependent subset, or M+1 if there is none."""
    return smallest_dependent_subset(f, tol, max_m)[0]


def is_full_spark(f: Frame, tol: ToleranceConfig = DEFAULT_TOL, max_m: int = DEFAULT_MAX_M) -> bool:
    if f.size < f.dim:
        raise TooFewVectors(f"full spark needs M >= N, got M={f.size} < N={f.dim}")
    return spark(f, tol, max_m) == f.dim + 1


def find_complement_violation(
    f: Frame, tol: ToleranceConfig = DEFAULT_TOL, max_m: int = DEFAULT_MAX_M
) -> tuple[list[int] | None, int]:
    """Search for a subset I such that neither I nor its complement spans.

    Subsets always contain index 0 (the partition and its swap are the same
    test).  They are visited depth-first in lexicographic order, and a subtree
    is pruned as soon as I spans, since every superset then spans too.  The
    first hit is therefore the lexicographically smallest violating subset.
    Returns ``(subset_or_None, nodes_visited)``.
    """
    _guard(f, max_m)
    m, n = f.size, f.dim
    vectors = f.vectors
    visited = 0
    stack: list[list[int]] = [[0]]
    while stack:
        subset = stack.pop()
        visited += 1
        if _rank_of(vectors, subset, tol, f.scale) == n:
            continue
        chosen = set(subset)
        rest = [i for i in range(m) if i not in chosen]
        if _rank_of(vectors, rest, tol, f.scale) < n:
            return subset, visited
        # push children in reverse so the smallest is explored first
        for j in range(m - 1, subset[-1], -1):
            stack.append(subset + [j])
    return None, visited


def complement_property(
    f: Frame, tol: ToleranceConfig = DEFAULT_TOL, max_m: int = DEFAULT_MAX_M
) -> Certificate:
    subset, visited = find_complement_violation(f, tol, max_m)
    if subset is None:
        return Certificate(
            Verdict.YES, Method.COMPLEMENT_PROPERTY, {"subsets_visited": visited}, f.field
        )
    rest = [i for i in range(f.size) if i not in subset]
    return Certificate(
        Verdict.NO,
        Method.COMPLEMENT_PROPERTY,
        {"subset": subset, "complement": rest, "subsets_visited": visited},
        f.field,
    )


def count_bound_partition(f: Frame) -> list[int]:
    """A subset I with |I| < N and |I^c| < N, available whenever M <= 2N - 2."""
    return list(range(min(f.dim - 1, f.size)))


def yields_phase_retrieval_vectors(
    f: Frame, tol: ToleranceConfig = DEFAULT_TOL, max_m: int = DEFAULT_MAX_M
) -> Certificate:
    """Decide real phase retrieval of a frame through the complement property.

    NO certificates carry the violating partition and a pair ``(x, y)`` with
    ``|<x, phi_i>| = |<y, phi_i>|`` for all i but ``x != +-y``.
    """
    from .falsifier import pr_witness_from_partition

    if f.field not in (la.EXACT, la.FLOAT):
        raise UnsupportedField(f"phase retrieval is decided for real frames only, got {f.field}")
    m, n = f.size, f.dim
    if m < 2 * n - 1:
        subset = count_bound_partition(f)
        method = Method.COUNT_BOUND
        extra = {"required_vectors": 2 * n - 1}
    else:
        cp = complement_property(f, tol, max_m)
        if cp.is_yes:
            return cp
        subset = cp.witness["subset"]
        method = Method.COMPLEMENT_PROPERTY
        extra = {"subsets_visited": cp.witness["subsets_visited"]}
    pair = pr_witness_from_partition(f, subset, tol)
    rest = [i for i in range(m) if i not in subset]
    return Certificate(
        Verdict.NO, method, {"subset": subset, "complement": rest, "pair": pair, **extra}, f.field
    )
