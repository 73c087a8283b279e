"""Invertible operators and projections applied to frames."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .certificates import Certificate, WitnessPair, frame_magnitudes
from .errors import DimensionMismatch, NotAFrame, NotAProjectionTarget, ResampleExhausted, SingularMatrix, ZeroVector
from .frames import Frame
from .linalg import DEFAULT_TOL, EXACT, FLOAT, ToleranceConfig
from .spark import DEFAULT_MAX_M, yields_phase_retrieval_vectors
from .subspaces import Subspace


@dataclass(frozen=True, eq=False)
class InvertibleOperator:
    matrix: np.ndarray
    inverse: np.ndarray
    condition_estimate: float

    @classmethod
    def from_matrix(cls, m, tol: ToleranceConfig = DEFAULT_TOL) -> "InvertibleOperator":
        m = np.asarray(m)
        if m.dtype != object:
            m = la.as_float(m)
        inv = la.inverse(m)
        n = m.shape[0]
        if la.max_abs(la.as_float(m @ inv) - np.eye(n)) > tol.witness_tol:
            raise SingularMatrix("inverse re-check failed")
        cond = float(np.linalg.cond(la.as_float(m)))
        for a in (m, inv):
            a.flags.writeable = False
        return cls(m, inv, cond)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def field(self) -> str:
        return la.field_of(self.matrix)

    @property
    def inverse_adjoint(self) -> np.ndarray:
        """``T^{-*}``, the inverse transpose."""
        return self.inverse.T


def _mixed(a: np.ndarray, b: np.ndarray):
    if la.is_exact(a) and la.is_exact(b):
        return a, b
    return la.as_float(a), la.as_float(b)


def apply_operator(f: Frame, t: InvertibleOperator) -> Frame:
    """The frame ``{T phi_i}``."""
    if t.dim != f.dim:
        raise DimensionMismatch(f"operator acts on R^{t.dim}, frame lives in R^{f.dim}")
    v, m = _mixed(f.vectors, t.matrix)
    return Frame(v @ m.T)


def project_frame(f: Frame, p: Subspace) -> Frame:
    """``{P phi_i}`` in coordinates of an orthonormal basis of range(P)."""
    if p.ambient_dim != f.dim:
        raise DimensionMismatch(f"subspace lives in R^{p.ambient_dim}, frame in R^{f.dim}")
    if p.dim == 0:
        raise NotAProjectionTarget("cannot project onto the zero subspace")
    b = la.as_float(p.to_field(FLOAT).basis)
    return Frame(la.as_float(f.vectors) @ b)


def shrink_operator(direction, n: int | None = None) -> InvertibleOperator:
    """Fix ``direction`` and halve everything orthogonal to it.

    ``T = (I + u u^T / <u, u>) / 2``; exact when ``direction`` is rational.
    """
    u = np.asarray(direction)
    if n is not None and u.shape[0] != n:
        raise DimensionMismatch(f"direction has length {u.shape[0]}, expected {n}")
    n = u.shape[0]
    fld = la.field_of(u)
    if la.is_zero(u):
        raise ZeroVector("direction must be nonzero")
    outer = np.outer(u, u) / (u @ u)
    ident = la.identity(n, fld)
    half = la.to_fraction(1) / 2 if fld == EXACT else 0.5
    t = (ident + outer) * half
    inv = ident * 2 - outer
    for a in (t, inv):
        a.flags.writeable = False
    return InvertibleOperator(t, inv, 2.0 if n > 1 else 1.0)


def greedy_basis_indices(f: Frame, tol: ToleranceConfig = DEFAULT_TOL) -> list[int]:
    """First linearly independent N-subset of the frame, chosen greedily by index."""
    chosen = la.independent_columns(f.vectors.T, tol)
    if len(chosen) < f.dim:
        raise NotAFrame("vectors do not span the space")
    return chosen[: f.dim]


def nr_inducing_operator(f: Frame, tol: ToleranceConfig = DEFAULT_TOL) -> InvertibleOperator:
    """Operator sending the greedy basis subset of ``f`` to the standard basis."""
    idx = greedy_basis_indices(f, tol)
    return InvertibleOperator.from_matrix(la.inverse(f.vectors[idx].T), tol)


def random_invertible(
    n: int, seed=None, cond_cap: float = 100.0, field: str = FLOAT, max_tries: int = 1000
) -> InvertibleOperator:
    """Random operator with condition number at most ``cond_cap``.

    Float operators have Gaussian entries; exact ones have integer entries in
    ``[-5, 5]``.  Deterministic in ``seed``.
    """
    if not cond_cap > 1:
        raise ValueError("cond_cap must exceed 1")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        if field == EXACT:
            m = la.as_exact(rng.integers(-5, 6, size=(n, n)))
            if la.rank(m) < n:
                continue
        else:
            m = rng.standard_normal((n, n))
        if np.linalg.cond(la.as_float(m)) <= cond_cap:
            return InvertibleOperator.from_matrix(m)
    raise ResampleExhausted(f"no operator with condition <= {cond_cap} in {max_tries} draws")


@dataclass(frozen=True, eq=False)
class AbcReport:
    """Outcome of checking phase retrieval against invertible transforms.

    ``trial_verdicts`` lists the phase-retrieval verdict of ``{T phi_i}`` for
    each random T.  For a frame without phase retrieval, ``operator`` is an
    invertible R with ``{R phi_i}`` failing norm retrieval, shown by ``pair``.
    """

    ground_truth: Certificate
    trial_verdicts: list = field(default_factory=list)
    operator: InvertibleOperator | None = None
    pair: WitnessPair | None = None
    construction: str | None = None

    @property
    def all_match(self) -> bool:
        return all(v == self.ground_truth.verdict for v in self.trial_verdicts)


def norm_failure_from_pr_violation(f: Frame, x, y, tol: ToleranceConfig = DEFAULT_TOL):
    """Turn equal-magnitude ``x != +-y`` into a norm-retrieval failure of ``{R phi_i}``.

    With T the shrink operator about x and ``R = T^{-*}``, the pair
    ``(T x, T y)`` has the same magnitudes against ``{R phi_i}`` as ``(x, y)``
    against ``{phi_i}``, while ``||T x|| = ||x||`` and ``||T y|| < ||y||``
    unless y is parallel to x.  If y is parallel to x (or the norms happen to
    coincide after shrinking) the identity is used with the original pair.
    Returns ``(R, pair, construction)``.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if not (la.is_exact(x) and la.is_exact(y) and f.field == EXACT):
        x, y = la.as_float(x), la.as_float(y)
    candidates = []
    if la.rank(np.stack([x, y], axis=1), tol) == 2:
        t = shrink_operator(x)
        r = InvertibleOperator(t.inverse_adjoint, t.matrix.T, t.condition_estimate)
        moved = apply_operator(f, r)
        candidates.append((r, WitnessPair.build(t.matrix @ x, t.matrix @ y, frame_magnitudes(moved.vectors)), "shrink"))
    ident = InvertibleOperator.from_matrix(la.identity(f.dim, la.field_of(x)))
    candidates.append((ident, WitnessPair.build(x, y, frame_magnitudes(f.vectors)), "identity"))
    for r, pair, how in candidates:
        if pair.measurement_gap <= tol.witness_tol and pair.norm_gap >= 1e-6:
            return r, pair, how
    return max(candidates, key=lambda c: c[1].norm_gap)


def abc_equivalence_suite(
    f: Frame, trials: int = 50, seed: int = 0, tol: ToleranceConfig = DEFAULT_TOL, max_m: int = DEFAULT_MAX_M,
    cond_cap: float = 100.0,
) -> AbcReport:
    """Phase retrieval of ``f`` versus phase and norm retrieval of its images.

    The ground truth is decided through the complement property.  Each trial
    applies a random invertible operator (exact for exact frames) and
    re-decides phase retrieval, which must agree.  For a NO ground truth an
    explicit operator whose image fails norm retrieval is constructed.
    """
    truth = yields_phase_retrieval_vectors(f, tol, max_m)
    verdicts = []
    for s in np.random.SeedSequence(seed).spawn(trials):
        t = random_invertible(f.dim, s, cond_cap, field=f.field)
        verdicts.append(yields_phase_retrieval_vectors(apply_operator(f, t), tol, max_m).verdict)
    if not truth.is_no:
        return AbcReport(truth, verdicts)
    pr_pair = truth.witness["pair"]
    r, pair, how = norm_failure_from_pr_violation(f, pr_pair.x, pr_pair.y, tol)
    return AbcReport(truth, verdicts, r, pair, how)
