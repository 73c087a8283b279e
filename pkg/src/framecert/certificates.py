"""Verdicts, certificates and witness pairs."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable

import numpy as np

from . import linalg as la


class Verdict(str, Enum):
    YES = "YES"
    NO = "NO"
    UNKNOWN = "UNKNOWN"


class Method(str, Enum):
    COMPLEMENT_PROPERTY = "COMPLEMENT_PROPERTY"
    COUNT_BOUND = "COUNT_BOUND"
    IDENTITY_IN_SPAN = "IDENTITY_IN_SPAN"
    SUM_PROJECTIONS_IDENTITY = "SUM_PROJECTIONS_IDENTITY"
    ORTHOGONALITY = "ORTHOGONALITY"
    NON_SPANNING = "NON_SPANNING"
    SEARCH_EXHAUSTED = "SEARCH_EXHAUSTED"
    OPTIMIZATION_SEARCH = "OPTIMIZATION_SEARCH"
    COMPLEMENT_COEFFICIENT_SUM = "COMPLEMENT_COEFFICIENT_SUM"
    COMPLEMENT_NORM_RETRIEVAL = "COMPLEMENT_NORM_RETRIEVAL"
    NAIMARK_COUNT_BOUNDS = "NAIMARK_COUNT_BOUNDS"
    GRAM_COMPLEMENT = "GRAM_COMPLEMENT"
    INVERTIBLE_TRANSFORM_SUITE = "INVERTIBLE_TRANSFORM_SUITE"
    FRAME_BOUNDS = "FRAME_BOUNDS"
    SUBSET_ENUMERATION = "SUBSET_ENUMERATION"
    PARSEVAL_EXPANSION = "PARSEVAL_EXPANSION"
    EXAMPLE = "EXAMPLE"


@dataclass(frozen=True)
class Certificate:
    verdict: Verdict
    method: Method
    witness: dict[str, Any] | None = None
    arithmetic_mode: str = la.FLOAT

    def __post_init__(self):
        if self.verdict is Verdict.NO and not self.witness:
            raise ValueError("a NO certificate must carry a witness")

    @property
    def is_yes(self) -> bool:
        return self.verdict is Verdict.YES

    @property
    def is_no(self) -> bool:
        return self.verdict is Verdict.NO


@dataclass(frozen=True, eq=False)
class WitnessPair:
    """Two signals with (near) equal intensity measurements.

    ``measurement_gap`` is the largest difference of measured magnitudes,
    ``norm_gap`` is ``| ||x|| - ||y|| |`` and ``phase_gap`` is
    ``min(||x - y||, ||x + y||)``.  All gaps are recomputed from ``x`` and ``y``.
    """

    x: np.ndarray
    y: np.ndarray
    measurement_gap: float
    norm_gap: float
    phase_gap: float
    extra: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def build(cls, x, y, magnitudes: Callable[[np.ndarray], np.ndarray], **extra) -> "WitnessPair":
        x = np.asarray(x)
        y = np.asarray(y)
        xf, yf = la.as_float(x), la.as_float(y)
        mx, my = np.asarray(magnitudes(xf), float), np.asarray(magnitudes(yf), float)
        meas = float(np.max(np.abs(mx - my))) if mx.size else 0.0
        norm_gap = abs(float(np.linalg.norm(xf)) - float(np.linalg.norm(yf)))
        phase_gap = min(float(np.linalg.norm(xf - yf)), float(np.linalg.norm(xf + yf)))
        return cls(x, y, meas, norm_gap, phase_gap, dict(extra))

    def is_norm_violation(self, tol: la.ToleranceConfig = la.DEFAULT_TOL, min_norm_gap: float = 1e-3) -> bool:
        return self.measurement_gap <= tol.witness_tol and self.norm_gap > min_norm_gap

    def is_phase_violation(self, tol: la.ToleranceConfig = la.DEFAULT_TOL, min_phase_gap: float = 1e-3) -> bool:
        return self.measurement_gap <= tol.witness_tol and self.phase_gap >= min_phase_gap


def frame_magnitudes(vectors: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """Magnitudes ``|<v, phi_i>|`` for a frame given by its rows."""
    t = la.as_float(vectors)
    return lambda v: np.abs(t @ v)


def projection_magnitudes(projections) -> Callable[[np.ndarray], np.ndarray]:
    """Magnitudes ``||P_i v||`` for a list of projection matrices."""
    ps = np.stack([la.as_float(p) for p in projections]) if len(projections) else np.zeros((0, 1, 1))
    return lambda v: np.linalg.norm(ps @ v, axis=1)
