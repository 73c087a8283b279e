"""Subspace families, norm-retrieval certificates and complement rules.

A family ``{W_i}`` with projections ``{P_i}`` does norm retrieval when equal
measurements ``||P_i x|| = ||P_i y||`` force ``||x|| = ||y||``.  The decision
procedures here are complete only for special structure: the identity lying in
the span of the projections (sufficient), and families whose dimensions sum
to N (where ``sum P_i = I`` is necessary and sufficient).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from . import linalg as la
from .certificates import Certificate, Method, Verdict, WitnessPair, projection_magnitudes
from .errors import (
    BadCoefficients,
    DimensionMismatch,
    PreconditionViolated,
    RangeError,
    ResampleExhausted,
)
from .falsifier import _primitive
from .frames import Frame
from .linalg import DEFAULT_TOL, EXACT, FLOAT, ToleranceConfig

MAX_RESAMPLES = 100


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of R^N given by spanning columns.

    The stored basis is cleaned on construction: orthonormal and
    sign-canonical in float mode, a maximal independent subset of the given
    columns in exact mode.  A basis with zero columns is the zero subspace.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis)
        if b.ndim != 2:
            raise DimensionMismatch("a subspace basis must be an N x k array")
        if b.dtype == object:
            b = la.as_exact(b)
            b = b[:, la.independent_columns(b)] if b.shape[1] else b
        else:
            b = la.orthonormal_range_basis(la.as_float(b))
        b.flags.writeable = False
        object.__setattr__(self, "basis", b)

    @classmethod
    def from_vectors(cls, vectors, ambient_dim: int | None = None, field: str = FLOAT) -> "Subspace":
        """Build from a list of spanning vectors (each of length N)."""
        vectors = list(vectors)
        if not vectors:
            if ambient_dim is None:
                raise DimensionMismatch("ambient dimension needed for an empty spanning set")
            return cls(la.zeros((ambient_dim, 0), field))
        cols = la.as_field(np.asarray(vectors, dtype=object if field == EXACT else None), field).T
        if ambient_dim is not None and cols.shape[0] != ambient_dim:
            raise DimensionMismatch(f"vectors have length {cols.shape[0]}, expected {ambient_dim}")
        return cls(cols)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def field(self) -> str:
        return la.field_of(self.basis)

    @cached_property
    def projection(self) -> np.ndarray:
        if self.field == FLOAT:
            p = self.basis @ self.basis.T
        else:
            p = la.projection_onto_colspace(self.basis)
        p.flags.writeable = False
        return p

    def to_field(self, field: str) -> "Subspace":
        if field == self.field:
            return self
        return Subspace(la.as_field(self.basis, field))

    def __repr__(self) -> str:
        return f"Subspace(N={self.ambient_dim}, dim={self.dim}, field={self.field!r})"


@dataclass(frozen=True, eq=False)
class SubspaceFamily:
    ambient_dim: int
    members: tuple[Subspace, ...]

    def __post_init__(self):
        members = tuple(self.members)
        for w in members:
            if w.ambient_dim != self.ambient_dim:
                raise DimensionMismatch("all members must share the ambient dimension")
        object.__setattr__(self, "members", members)

    @classmethod
    def from_spanning_sets(cls, ambient_dim: int, spanning_sets, field: str = FLOAT) -> "SubspaceFamily":
        return cls(ambient_dim, tuple(Subspace.from_vectors(s, ambient_dim, field) for s in spanning_sets))

    @classmethod
    def rank_one(cls, frame: Frame) -> "SubspaceFamily":
        """The lines spanned by the (nonzero) vectors of a frame."""
        return cls(frame.dim, tuple(Subspace(frame.vectors[i : i + 1].T) for i in range(frame.size)))

    @property
    def field(self) -> str:
        if self.members and all(w.field == EXACT for w in self.members):
            return EXACT
        return FLOAT

    @property
    def projections(self) -> list[np.ndarray]:
        field = self.field
        return [w.to_field(field).projection for w in self.members]

    @property
    def dims(self) -> list[int]:
        return [w.dim for w in self.members]

    def __len__(self) -> int:
        return len(self.members)

    def subfamily(self, indices) -> "SubspaceFamily":
        return SubspaceFamily(self.ambient_dim, tuple(self.members[i] for i in indices))

    def to_field(self, field: str) -> "SubspaceFamily":
        return SubspaceFamily(self.ambient_dim, tuple(w.to_field(field) for w in self.members))

    def __repr__(self) -> str:
        return f"SubspaceFamily(N={self.ambient_dim}, dims={self.dims}, field={self.field!r})"


def measurement_map(fam: SubspaceFamily, x) -> np.ndarray:
    """The intensities ``(||P_i x||^2)_i``."""
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != fam.ambient_dim:
        raise DimensionMismatch(f"x must have length {fam.ambient_dim}")
    if fam.field == EXACT and la.is_exact(x):
        return np.array([x @ (p @ x) for p in fam.projections], dtype=object)
    xf = la.as_float(x)
    return np.array([float(xf @ (la.as_float(p) @ xf)) for p in fam.projections])


def _sum(mats, field: str, n: int) -> np.ndarray:
    total = la.zeros((n, n), field)
    for p in mats:
        total = total + p
    return total


def projection_sum_residual(fam: SubspaceFamily) -> float:
    """``|| sum_i P_i - I ||_max``."""
    n = fam.ambient_dim
    return la.max_abs(_sum(fam.projections, fam.field, n) - la.identity(n, fam.field))


def identity_in_span(fam: SubspaceFamily, tol: ToleranceConfig = DEFAULT_TOL):
    """Coefficients ``a`` with ``sum_i a_i P_i = I``, or None if there are none."""
    n = fam.ambient_dim
    field = fam.field
    ps = fam.projections
    if not ps:
        return None
    a_mat = np.stack([p.reshape(-1) for p in ps], axis=1)
    b = la.identity(n, field).reshape(-1)
    coeffs = la.solve_consistent(a_mat, b, tol)
    if coeffs is None:
        return None
    combo = _sum([c * p for c, p in zip(coeffs, ps)], field, n)
    if la.max_abs(combo - la.identity(n, field)) > (0 if field == EXACT else tol.witness_tol):
        return None
    return coeffs


def _spans(fam: SubspaceFamily, tol: ToleranceConfig) -> bool:
    bases = [w.to_field(fam.field).basis for w in fam.members]
    if not bases:
        return False
    return la.rank(np.concatenate(bases, axis=1), tol) == fam.ambient_dim


def _is_zero(a: np.ndarray, tol: ToleranceConfig) -> bool:
    return la.is_zero(a, tol.witness_tol)


def nrbasis_falsifier(fam: SubspaceFamily, tol: ToleranceConfig = DEFAULT_TOL) -> WitnessPair:
    """Constructive norm-retrieval counterexample for families with ``sum dim = N``.

    If the members do not span, a nonzero vector orthogonal to all of them is
    paired with 0.  Otherwise pick the first j whose projection does not
    annihilate the projection Q onto the other members, take z in W_j
    orthogonal to ``W_j cap ker Q``, split it as ``x = Qz``, ``y = (I-Q)z`` and
    return ``v1 = x``, ``v2 = x + alpha y`` with
    ``alpha = -2 <P_j x, y> / ||P_j y||^2`` (or 1 when ``P_j y = 0``).
    Every other projection kills y, and alpha is chosen so that
    ``||P_j v2|| = ||P_j v1||``, while ``||v2|| > ||v1||``.
    """
    n = fam.ambient_dim
    field = fam.field
    fam = fam.to_field(field)
    if any(w.dim == 0 for w in fam.members):
        raise PreconditionViolated("zero subspaces are not allowed")
    if sum(fam.dims) != n:
        raise PreconditionViolated(f"dimensions sum to {sum(fam.dims)}, expected {n}")
    ps = fam.projections
    residual = la.max_abs(_sum(ps, field, n) - la.identity(n, field))
    if residual == 0 or (field == FLOAT and residual <= tol.witness_tol):
        raise PreconditionViolated("the projections already sum to the identity")
    magnitudes = projection_magnitudes(ps)

    if not _spans(fam, tol):
        all_cols = np.concatenate([w.basis for w in fam.members], axis=1)
        x0 = la.null_space_basis(all_cols.T, tol)[:, 0]
        if field == EXACT:
            x0 = _primitive(x0)
        return WitnessPair.build(x0, la.zeros(n, field), magnitudes, branch="non_spanning")

    ident = la.identity(n, field)
    for j, wj in enumerate(fam.members):
        others = [w.basis for i, w in enumerate(fam.members) if i != j]
        q = la.projection_onto_colspace(np.concatenate(others, axis=1), tol)
        if _is_zero(ps[j] @ q, tol):
            continue
        b = wj.basis
        y_coords = la.null_space_basis(q @ b, tol)
        if y_coords.shape[1]:
            z_coords = la.null_space_basis((b @ y_coords).T @ b, tol)
        else:
            z_coords = la.identity(b.shape[1], field)
        z_cols = b @ z_coords
        if field == FLOAT:
            z_cols = la.canonicalize_signs(z_cols, tol.witness_tol)
        zf = la.as_float(z_cols)
        qf = la.as_float(q)
        score = np.linalg.norm(qf @ zf, axis=0) * np.linalg.norm(zf - qf @ zf, axis=0)
        z = z_cols[:, int(np.argmax(score))]
        x = q @ z
        y = (ident - q) @ z
        pjy = ps[j] @ y
        if _is_zero(pjy, tol):
            alpha = 1 if field == EXACT else 1.0
        else:
            alpha = -2 * ((ps[j] @ x) @ y) / (pjy @ pjy)
        return WitnessPair.build(x, x + alpha * y, magnitudes, branch="main", j=j, alpha=alpha, z=z)
    raise PreconditionViolated("every member is orthogonal to the others")  # unreachable


def sum_dim_classification(fam: SubspaceFamily, tol: ToleranceConfig = DEFAULT_TOL) -> Certificate:
    """Norm retrieval for ``sum dim W_i = N``: YES exactly when ``sum P_i = I``."""
    n = fam.ambient_dim
    if sum(fam.dims) != n:
        raise PreconditionViolated("dimensions must sum to the ambient dimension")
    residual = projection_sum_residual(fam)
    if residual == 0 or (fam.field == FLOAT and residual <= tol.witness_tol):
        return Certificate(Verdict.YES, Method.SUM_PROJECTIONS_IDENTITY, {"residual": residual}, fam.field)
    pair = nrbasis_falsifier(fam, tol)
    return Certificate(Verdict.NO, Method.SUM_PROJECTIONS_IDENTITY, {"pair": pair, "residual": residual}, fam.field)


def pairwise_orthogonal(fam: SubspaceFamily, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    ps = fam.projections
    return all(_is_zero(ps[i] @ ps[j], tol) for i, j in combinations(range(len(ps)), 2))


def orthogonality_classification(fam: SubspaceFamily, tol: ToleranceConfig = DEFAULT_TOL) -> Certificate:
    """Norm retrieval for N lines: YES exactly when the generators are orthogonal."""
    if len(fam) != fam.ambient_dim or any(d != 1 for d in fam.dims):
        raise PreconditionViolated("needs exactly N one-dimensional members")
    if pairwise_orthogonal(fam, tol):
        return Certificate(Verdict.YES, Method.ORTHOGONALITY, {"orthogonal": True}, fam.field)
    pair = nrbasis_falsifier(fam, tol)
    return Certificate(Verdict.NO, Method.ORTHOGONALITY, {"pair": pair, "orthogonal": False}, fam.field)


def norm_retrieval_certificate(fam: SubspaceFamily, tol: ToleranceConfig = DEFAULT_TOL) -> Certificate:
    """Decide norm retrieval where a finite certificate is available.

    Order: identity in the span of the projections (YES); members failing to
    span R^N (NO); dimensions summing to N (YES iff the projections sum to I,
    NO with a constructive witness); anything else is UNKNOWN and should be
    escalated to :func:`framecert.falsifier.nr_violation_search`.
    """
    coeffs = identity_in_span(fam, tol)
    if coeffs is not None:
        return Certificate(Verdict.YES, Method.IDENTITY_IN_SPAN, {"coefficients": coeffs}, fam.field)
    if any(w.dim == 0 for w in fam.members):
        fam = fam.subfamily([i for i, w in enumerate(fam.members) if w.dim > 0])
    if not _spans(fam, tol):
        all_cols = [w.to_field(fam.field).basis for w in fam.members]
        n = fam.ambient_dim
        rows = np.concatenate(all_cols, axis=1).T if all_cols else la.zeros((0, n), fam.field)
        x0 = la.null_space_basis(rows, tol)[:, 0]
        if fam.field == EXACT:
            x0 = _primitive(x0)
        pair = WitnessPair.build(x0, la.zeros(n, fam.field), projection_magnitudes(fam.projections or [la.zeros((n, n))]), branch="non_spanning")
        return Certificate(Verdict.NO, Method.NON_SPANNING, {"pair": pair}, fam.field)
    if sum(fam.dims) == fam.ambient_dim:
        if len(fam) == fam.ambient_dim:
            return orthogonality_classification(fam, tol)
        return sum_dim_classification(fam, tol)
    return Certificate(Verdict.UNKNOWN, Method.SEARCH_EXHAUSTED, {"escalate": "nr_violation_search"}, fam.field)


def complement_family(fam: SubspaceFamily, tol: ToleranceConfig = DEFAULT_TOL) -> SubspaceFamily:
    """The family of orthogonal complements, with projections ``I - P_i``."""
    members = []
    for w in fam.members:
        p = w.projection
        if w.field == EXACT:
            members.append(Subspace(la.null_space_basis(p, tol)))
        else:
            members.append(Subspace(la.orthonormal_kernel_basis(p, tol)))
    return SubspaceFamily(fam.ambient_dim, tuple(members))


def _cert_summary(cert: Certificate) -> dict:
    return {"verdict": cert.verdict, "method": cert.method, "witness": cert.witness}


def complements_pr_via_nr(
    fam: SubspaceFamily, nr_cert_of_complements: Certificate, pr_evidence="asserted by caller"
) -> Certificate:
    """Phase retrieval of ``{I - P_i}`` for a family already known to do phase retrieval.

    For such families the complements do phase retrieval exactly when they do
    norm retrieval, so the supplied norm-retrieval verdict carries over,
    including UNKNOWN.  A NO witness for norm retrieval also refutes phase
    retrieval.
    """
    witness = {"norm_retrieval_of_complements": _cert_summary(nr_cert_of_complements), "family_phase_retrieval": pr_evidence}
    if nr_cert_of_complements.is_no and "pair" in (nr_cert_of_complements.witness or {}):
        witness["pair"] = nr_cert_of_complements.witness["pair"]
    return Certificate(nr_cert_of_complements.verdict, Method.COMPLEMENT_NORM_RETRIEVAL, witness, nr_cert_of_complements.arithmetic_mode)


def complements_pr_via_coefficient_sum(
    fam: SubspaceFamily, coefficients, tol: ToleranceConfig = DEFAULT_TOL, pr_evidence="asserted by caller"
) -> Certificate:
    """Phase retrieval of the complements from ``I = sum a_i P_i`` with ``sum a_i != 1``.

    The family itself must do phase retrieval; that hypothesis is the caller's
    responsibility and is only recorded in the certificate.
    """
    n = fam.ambient_dim
    field = fam.field
    a = np.asarray(coefficients, dtype=object if field == EXACT else float)
    if len(a) != len(fam):
        raise BadCoefficients(f"need {len(fam)} coefficients, got {len(a)}")
    if field == EXACT:
        a = la.as_exact(a)
    combo = _sum([c * p for c, p in zip(a, fam.projections)], field, n)
    err = la.max_abs(combo - la.identity(n, field))
    if err > (0 if field == EXACT else tol.witness_tol):
        raise BadCoefficients(f"sum a_i P_i differs from I by {err:.3g}")
    total = sum(a)
    witness = {"coefficient_sum": total, "family_phase_retrieval": pr_evidence}
    if abs(float(total) - 1.0) > tol.witness_tol:
        return Certificate(Verdict.YES, Method.COMPLEMENT_COEFFICIENT_SUM, witness, field)
    return Certificate(Verdict.UNKNOWN, Method.COMPLEMENT_COEFFICIENT_SUM, witness, field)


# ---------------------------------------------------------------------------
# generic rank-one families with a unique expansion of the identity
# ---------------------------------------------------------------------------

def _sym_vec(m: np.ndarray) -> np.ndarray:
    return m.reshape(-1)


def identity_excluded_from_proper_subfamilies(gram_like: list[np.ndarray], target: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True when ``target`` lies outside the span of every proper subfamily.

    Checked by rank: appending ``target`` to the vectorized members of a
    proper subfamily J must raise the rank to ``|J| + 1``.
    """
    m = len(gram_like)
    vecs = [_sym_vec(g) for g in gram_like]
    t = _sym_vec(target)
    scale = None if la.is_exact(t) else float(np.linalg.norm(la.as_float(np.stack(vecs + [t], axis=1)), 2))
    for k in range(0, m):
        for combo in combinations(range(m), k):
            cols = [vecs[i] for i in combo] + [t]
            if la.rank(np.stack(cols, axis=1), tol, scale) != k + 1:
                return False
    return True


@dataclass(frozen=True, eq=False)
class PopFamily:
    frame: Frame
    family: SubspaceFamily
    coefficients: np.ndarray
    attempts: int


def sample_pop_family(n: int, m: int, seed: int = 0, tol: ToleranceConfig = DEFAULT_TOL, entry_range: int = 9) -> PopFamily:
    """Random rank-one family with ``I = sum_i ||S^{-1/2} phi_i||^2 P_i`` uniquely.

    ``phi_i`` are sampled with integer entries in ``[-entry_range, entry_range]``
    so that full spark and linear independence of ``{phi_i phi_i^T}`` are
    decided exactly.  Each ``P_i`` is a positive multiple of
    ``S^{-1/2} phi_i phi_i^T S^{-1/2}``; that congruence is invertible on
    symmetric matrices and sends ``S`` to ``I``, so identity-in-span questions
    for subfamilies of ``{P_i}`` are answered exactly on ``{phi_i phi_i^T}``
    and ``S``.
    """
    from .spark import is_full_spark

    if not (2 * n <= m <= n * (n + 1) // 2):
        raise RangeError(f"need 2n <= m <= n(n+1)/2, got n={n}, m={m}")
    return _sample_pop(n, m, seed, tol, entry_range, is_full_spark)


def generic_pop_family(n: int, m: int, seed: int = 0, tol: ToleranceConfig = DEFAULT_TOL):
    """``(frame, family, coefficients)`` from :func:`sample_pop_family`."""
    pop = sample_pop_family(n, m, seed, tol)
    return pop.frame, pop.family, pop.coefficients


def _sample_pop(n, m, seed, tol, entry_range, is_full_spark) -> PopFamily:
    rng = np.random.default_rng(seed)
    for attempt in range(1, MAX_RESAMPLES + 1):
        ints = rng.integers(-entry_range, entry_range + 1, size=(m, n))
        frame = Frame(la.as_exact(ints))
        if not is_full_spark(frame, tol):
            continue
        outers = [np.outer(v, v) for v in frame.vectors]
        if la.rank(np.stack([_sym_vec(o) for o in outers], axis=1)) != m:
            continue
        r = la.inv_sqrt_psd(la.as_float(frame.frame_operator), tol)
        w = la.as_float(frame.vectors) @ r
        coeffs = np.sum(w * w, axis=1)
        psi = w / np.sqrt(coeffs)[:, None]
        fam = SubspaceFamily(n, tuple(Subspace(psi[i : i + 1].T) for i in range(m)))
        combo = sum(c * p for c, p in zip(coeffs, fam.projections))
        if la.max_abs(combo - np.eye(n)) > tol.witness_tol:
            continue
        return PopFamily(frame, fam, coeffs, attempt)
    raise ResampleExhausted(f"no admissible family after {MAX_RESAMPLES} samples")


def pop_family_checks(pop: PopFamily, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Verification record for a sampled family (exact where the data is rational)."""
    frame, fam, coeffs = pop.frame, pop.family, pop.coefficients
    n, m = frame.dim, frame.size
    combo = sum(c * p for c, p in zip(coeffs, fam.projections))
    outers = [np.outer(v, v) for v in frame.vectors]
    s = frame.frame_operator
    s_inv = la.inverse(s)
    exact_coeffs = [v @ s_inv @ v for v in frame.vectors]
    return {
        "identity_residual": la.max_abs(combo - np.eye(n)),
        "coefficients_positive": bool(np.all(coeffs > 0)),
        "coefficients_match_exact": float(np.max(np.abs(coeffs - np.array([float(c) for c in exact_coeffs])))),
        "projection_rank": la.rank(np.stack([p.reshape(-1) for p in fam.projections], axis=1), tol),
        "outer_product_rank": la.rank(np.stack([_sym_vec(o) for o in outers], axis=1)),
        "proper_subfamilies_exclude_identity": identity_excluded_from_proper_subfamilies(outers, s),
        "size": m,
    }
