"""Certificates for phase and norm retrieval by frames and subspace families."""

__version__ = "0.1.0"

from .certificates import Certificate, Method, Verdict, WitnessPair
from .frames import Frame, canonical_parseval, frame_report
from .linalg import DEFAULT_TOL, EXACT, FLOAT, ToleranceConfig
from .subspaces import Subspace, SubspaceFamily

__all__ = [
    "__version__",
    "Certificate",
    "Method",
    "Verdict",
    "WitnessPair",
    "Frame",
    "canonical_parseval",
    "frame_report",
    "DEFAULT_TOL",
    "EXACT",
    "FLOAT",
    "ToleranceConfig",
    "Subspace",
    "SubspaceFamily",
]
