"""Frames, their analysis/synthesis/frame operators, and frame bounds."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg as la
from .errors import DimensionMismatch, NotAFrame, NotParseval, UnsupportedField
from .linalg import DEFAULT_TOL, EXACT, FLOAT, ToleranceConfig

# max-entry distance of S from I accepted as Parseval for float frames
PARSEVAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Frame:
    """An ordered family of M vectors in R^N, stored as the rows of ``vectors``.

    The field tag is carried by the dtype: object arrays of Fractions are
    exact, float64 arrays are floating point.
    """

    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors)
        if np.iscomplexobj(v):
            raise UnsupportedField("complex frames are not supported")
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise DimensionMismatch("a frame needs at least one vector of positive length")
        v = la.as_exact(v) if v.dtype == object else la.as_float(v)
        v.flags.writeable = False
        object.__setattr__(self, "vectors", v)

    @classmethod
    def from_vectors(cls, vectors, field: str | None = None) -> "Frame":
        v = np.asarray(vectors, dtype=object if field == EXACT else None)
        if field is not None:
            v = la.as_field(v, field)
        return cls(v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    @property
    def field(self) -> str:
        return la.field_of(self.vectors)

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"Frame(N={self.dim}, M={self.size}, field={self.field!r})"

    def subset(self, indices) -> "Frame":
        return Frame(self.vectors[list(indices)])

    def to_field(self, field: str) -> "Frame":
        if field == self.field:
            return self
        return Frame(la.as_field(self.vectors, field))

    @cached_property
    def scale(self) -> float:
        """Largest singular value of the synthesis matrix; the yardstick for subset ranks."""
        return float(np.linalg.norm(la.as_float(self.vectors), 2))

    @cached_property
    def frame_operator(self) -> np.ndarray:
        t = self.vectors
        s = t.T @ t
        if self.field == FLOAT:
            s = 0.5 * (s + s.T)
        s.flags.writeable = False
        return s


@dataclass(frozen=True)
class FrameReport:
    lower_bound: float
    upper_bound: float
    is_frame: bool
    is_tight: bool
    is_parseval: bool


def _check_len(v, n: int, what: str) -> np.ndarray:
    v = np.asarray(v)
    if v.ndim != 1 or v.shape[0] != n:
        raise DimensionMismatch(f"{what} must have length {n}, got shape {v.shape}")
    return v


def analysis_apply(f: Frame, x) -> np.ndarray:
    """Inner products of ``x`` with every frame vector, in frame order."""
    x = _check_len(x, f.dim, "x")
    if f.field == EXACT and la.field_of(x) == EXACT:
        return f.vectors @ x
    return la.as_float(f.vectors) @ la.as_float(x)


def synthesis_apply(f: Frame, a) -> np.ndarray:
    """The combination ``sum_i a_i phi_i``."""
    a = _check_len(a, f.size, "coefficients")
    if f.field == EXACT and la.field_of(a) == EXACT:
        return f.vectors.T @ a
    return la.as_float(f.vectors).T @ la.as_float(a)


def frame_operator(f: Frame) -> np.ndarray:
    return f.frame_operator


def is_parseval(f: Frame) -> bool:
    s = f.frame_operator
    if f.field == EXACT:
        return bool(np.all(s == la.identity(f.dim, EXACT)))
    return la.max_abs(s - np.eye(f.dim)) <= PARSEVAL_TOL


def frame_report(f: Frame, tol: ToleranceConfig = DEFAULT_TOL) -> FrameReport:
    s = f.frame_operator
    lam, _ = la.symmetric_eigen(la.as_float(s), tol)
    upper, lower = float(lam[0]), float(max(lam[-1], 0.0))
    parseval = is_parseval(f)
    if f.field == EXACT:
        spans = la.rank(s) == f.dim
        c = s[0, 0]
        tight = spans and bool(np.all(s == c * la.identity(f.dim, EXACT)))
    else:
        spans = upper > 0 and lower > tol.rank_rel_tol * upper
        tight = spans and (parseval or abs(upper - lower) <= PARSEVAL_TOL * upper)
    return FrameReport(
        lower_bound=lower,
        upper_bound=upper,
        is_frame=bool(spans),
        is_tight=bool(tight),
        is_parseval=bool(parseval),
    )


def canonical_parseval(f: Frame, tol: ToleranceConfig = DEFAULT_TOL) -> Frame:
    """Return the Parseval frame ``{S^{-1/2} phi_i}`` (always float)."""
    if la.rank(f.vectors, tol) < f.dim:
        raise NotAFrame("vectors do not span the space")
    r = la.inv_sqrt_psd(la.as_float(f.frame_operator), tol)
    return Frame(la.as_float(f.vectors) @ r)


def verify_reconstruction(f: Frame, x, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    if not is_parseval(f):
        raise NotParseval("perfect reconstruction needs a Parseval frame")
    x = _check_len(x, f.dim, "x")
    back = synthesis_apply(f, analysis_apply(f, x))
    err = la.as_float(back) - la.as_float(x)
    return float(np.linalg.norm(err)) <= tol.witness_tol * float(np.linalg.norm(la.as_float(x)))
