"""Dense linear algebra over two arithmetic modes.

Exact mode uses numpy object arrays holding :class:`fractions.Fraction`
entries; every rank and span decision in exact mode is made without any
tolerance.  Float mode uses ``float64`` arrays and relative singular-value
thresholds.  The mode of an array is read off its dtype, see :func:`field_of`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import (
    DimensionMismatch,
    ExactOverflow,
    NotPositiveDefinite,
    NotSymmetric,
    SingularGram,
    SingularMatrix,
    UnsupportedField,
)

EXACT = "exact"
FLOAT = "float"

# intermediate integers in fraction-free elimination may not exceed this
MAX_EXACT_BITS = 1_000_000


@dataclass(frozen=True)
class ToleranceConfig:
    rank_rel_tol: float = 1e-10
    symmetry_tol: float = 1e-12
    witness_tol: float = 1e-9

    def __post_init__(self):
        for name in ("rank_rel_tol", "symmetry_tol", "witness_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOL = ToleranceConfig()


# ---------------------------------------------------------------------------
# arithmetic modes
# ---------------------------------------------------------------------------

def to_fraction(value) -> Fraction:
    """Convert a scalar (int, float, Fraction or "p/q" string) exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, np.bool_)):
        raise UnsupportedField("booleans are not scalars")
    if isinstance(value, (complex, np.complexfloating)):
        raise UnsupportedField("complex scalars are not supported")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise ValueError(f"non-finite scalar {value!r}")
        return Fraction(float(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise UnsupportedField(f"cannot interpret {type(value).__name__} as a real scalar")


def field_of(a: np.ndarray) -> str:
    if a.dtype == object:
        return EXACT
    if np.iscomplexobj(a):
        raise UnsupportedField("complex arrays are not supported")
    return FLOAT


def is_exact(a: np.ndarray) -> bool:
    return field_of(a) == EXACT


def as_exact(a) -> np.ndarray:
    arr = np.asarray(a, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = to_fraction(v)
    return out


def as_float(a) -> np.ndarray:
    arr = np.asarray(a)
    if np.iscomplexobj(arr):
        raise UnsupportedField("complex arrays are not supported")
    if arr.dtype == object:
        return np.vectorize(float, otypes=[float])(arr) if arr.size else arr.astype(float)
    return arr.astype(float)


def as_field(a, field: str) -> np.ndarray:
    if field == EXACT:
        return as_exact(a)
    if field == FLOAT:
        return as_float(a)
    raise UnsupportedField(f"unknown field tag {field!r}")


def identity(n: int, field: str = FLOAT) -> np.ndarray:
    if field == EXACT:
        out = np.full((n, n), Fraction(0), dtype=object)
        for i in range(n):
            out[i, i] = Fraction(1)
        return out
    return np.eye(n)


def zeros(shape, field: str = FLOAT) -> np.ndarray:
    if field == EXACT:
        return np.full(shape, Fraction(0), dtype=object)
    return np.zeros(shape)


def max_abs(a: np.ndarray) -> float:
    """Largest absolute entry as a float (0 for empty arrays)."""
    if a.size == 0:
        return 0.0
    if is_exact(a):
        return float(max(abs(v) for v in a.flat))
    return float(np.max(np.abs(a)))


def is_zero(a: np.ndarray, tol: float = 0.0) -> bool:
    if is_exact(a):
        return all(v == 0 for v in a.flat)
    return max_abs(a) <= tol


# ---------------------------------------------------------------------------
# exact kernels
# ---------------------------------------------------------------------------

def _integer_rows(m: np.ndarray) -> list[list[int]]:
    rows = []
    for row in m:
        scale = lcm(1, *(v.denominator for v in row))
        rows.append([int(v * scale) for v in row])
    return rows


def _bareiss_rank(rows: list[list[int]], ncols: int) -> int:
    a = [r[:] for r in rows]
    nrows = len(a)
    rank = 0
    prev = 1
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        top = a[rank]
        for r in range(rank + 1, nrows):
            row = a[r]
            f = row[col]
            for c in range(col + 1, ncols):
                q, rem = divmod(p * row[c] - f * top[c], prev)
                assert rem == 0, "Bareiss division must be exact"
                row[c] = q
            row[col] = 0
        prev = p
        rank += 1
        if rank == nrows:
            break
        if max((abs(v).bit_length() for row in a[rank:] for v in row), default=0) > MAX_EXACT_BITS:
            raise ExactOverflow(f"intermediate entries exceed {MAX_EXACT_BITS} bits")
    return rank


def rref(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of an exact matrix and its pivot columns."""
    a = np.array(m, dtype=object, copy=True)
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if a[i, c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] / a[r, c]
        for i in range(nrows):
            if i != r and a[i, c] != 0:
                a[i] = a[i] - a[i, c] * a[r]
        pivots.append(c)
        r += 1
    return a, pivots


# ---------------------------------------------------------------------------
# rank, kernels, solves
# ---------------------------------------------------------------------------

def _cut(s: np.ndarray, tol: ToleranceConfig, scale: float | None) -> int:
    top = max(float(s[0]) if s.size else 0.0, scale or 0.0)
    if top == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_rel_tol * top))


def rank(m: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL, scale: float | None = None) -> int:
    """Rank of ``m``: Bareiss elimination in exact mode, relative SVD cut otherwise.

    The float cut is ``rank_rel_tol`` times the largest singular value of
    ``m``, or ``scale`` if that is larger.  Pass the largest singular value of
    a whole frame as ``scale`` when ranking a subset of it, so a negligible
    vector is not promoted to rank one by its own size.
    """
    m = np.asarray(m)
    if m.ndim != 2:
        raise DimensionMismatch("rank expects a 2-d array")
    if m.size == 0:
        return 0
    if is_exact(m):
        rows = _integer_rows(m)
        if len(rows) > m.shape[1]:
            rows = [list(col) for col in zip(*rows)]
        return _bareiss_rank(rows, len(rows[0]))
    return _cut(np.linalg.svd(m, compute_uv=False), tol, scale)


def canonicalize_signs(cols: np.ndarray, tol: float = DEFAULT_TOL.witness_tol) -> np.ndarray:
    """Flip each column so its first entry with ``|v| > tol`` is positive."""
    out = np.array(cols, copy=True)
    for j in range(out.shape[1]):
        for v in out[:, j]:
            if abs(v) > tol:
                if v < 0:
                    out[:, j] = -out[:, j]
                break
    return out


def null_space_basis(m: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL, scale: float | None = None) -> np.ndarray:
    """Columns spanning ``ker(m)``; orthonormal and sign-canonical in float mode.

    ``scale`` sets the float cut as in :func:`rank`.
    """
    m = np.asarray(m)
    ncols = m.shape[1]
    if is_exact(m):
        if m.shape[0] == 0:
            return identity(ncols, EXACT)
        r, pivots = rref(m)
        free = [c for c in range(ncols) if c not in pivots]
        basis = zeros((ncols, len(free)), EXACT)
        for k, fc in enumerate(free):
            basis[fc, k] = Fraction(1)
            for i, pc in enumerate(pivots):
                basis[pc, k] = -r[i, fc]
        return basis
    if m.shape[0] == 0 or m.size == 0:
        return np.eye(ncols)
    _, s, vt = np.linalg.svd(m)
    r = _cut(s, tol, scale)
    return canonicalize_signs(vt[r:].T.copy(), tol.witness_tol)


def orthonormal_range_basis(a: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal, sign-canonical basis of the column space of a float matrix."""
    a = as_float(a)
    if a.size == 0:
        return np.zeros((a.shape[0], 0))
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    r = 0 if s[0] == 0.0 else int(np.count_nonzero(s > tol.rank_rel_tol * s[0]))
    return canonicalize_signs(u[:, :r].copy(), tol.witness_tol)


def orthonormal_kernel_basis(t_star: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of ``ker(t_star)`` with canonical column signs."""
    return null_space_basis(as_float(t_star), tol)


def independent_columns(a: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> list[int]:
    """Greedy-by-index selection of a maximal independent set of columns."""
    a = np.asarray(a)
    if is_exact(a):
        _, pivots = rref(a)
        return pivots
    chosen: list[int] = []
    current = 0
    for j in range(a.shape[1]):
        r = rank(a[:, chosen + [j]], tol)
        if r > current:
            chosen.append(j)
            current = r
    return chosen


def inverse(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise DimensionMismatch("inverse needs a square matrix")
    if is_exact(m):
        aug = np.concatenate([m, identity(n, EXACT)], axis=1)
        r, pivots = rref(aug)
        if pivots[:n] != list(range(n)):
            raise SingularMatrix("matrix is singular")
        return r[:, n:]
    try:
        return np.linalg.inv(m)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from None


def solve_consistent(a: np.ndarray, b: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL):
    """Return some solution of ``a @ x = b`` or ``None`` when inconsistent.

    Exact mode decides consistency exactly (free variables set to zero).  Float
    mode takes the least-squares solution and accepts it when the residual is
    within ``witness_tol`` in max norm.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if is_exact(a) or is_exact(b):
        a, b = as_exact(a), as_exact(b)
        aug = np.concatenate([a, b.reshape(-1, 1)], axis=1)
        r, pivots = rref(aug)
        ncols = a.shape[1]
        if pivots and pivots[-1] == ncols:
            return None
        x = zeros(ncols, EXACT)
        for i, pc in enumerate(pivots):
            x[pc] = r[i, ncols]
        return x
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    if max_abs(a @ x - b) > tol.witness_tol:
        return None
    return x


def projection_onto_colspace(a: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projection ``A (A^T A)^{-1} A^T`` onto the column space of ``a``.

    Dependent columns are dropped first.  Exact input gives an exact projection.
    """
    a = np.asarray(a)
    n = a.shape[0]
    keep = independent_columns(a, tol)
    if not keep:
        return zeros((n, n), field_of(a))
    a = a[:, keep]
    if is_exact(a):
        gram = a.T @ a
        try:
            g_inv = inverse(gram)
        except SingularMatrix:
            raise SingularGram("columns are dependent after pruning") from None
        return a @ g_inv @ a.T
    q = orthonormal_range_basis(a, tol)
    p = q @ q.T
    return 0.5 * (p + p.T)


# ---------------------------------------------------------------------------
# spectral operations (float only)
# ---------------------------------------------------------------------------

def check_symmetric(s: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    s = as_float(s)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionMismatch("expected a square matrix")
    scale = max(1.0, max_abs(s))
    if max_abs(s - s.T) > tol.symmetry_tol * scale:
        raise NotSymmetric("matrix is not symmetric within tolerance")
    return s


def symmetric_eigen(s: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvectors of a symmetric matrix."""
    s = check_symmetric(s, tol)
    lam, v = np.linalg.eigh(0.5 * (s + s.T))
    order = np.argsort(lam)[::-1]
    return lam[order], canonicalize_signs(v[:, order], tol.witness_tol)


def inv_sqrt_psd(s: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """``S^{-1/2}`` for a symmetric positive definite matrix."""
    lam, v = symmetric_eigen(s, tol)
    if lam.size == 0:
        return np.zeros((0, 0))
    if lam[0] <= 0 or lam[-1] <= tol.rank_rel_tol * lam[0]:
        raise NotPositiveDefinite(f"smallest eigenvalue {lam[-1]:.3g} is not positive")
    r = (v / np.sqrt(lam)) @ v.T
    return 0.5 * (r + r.T)
