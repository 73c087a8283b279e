"""JSON file formats: frames, subspace families and certificates.

Exact scalars are written as ``"p/q"`` strings, float scalars as JSON numbers.
Index sets inside witnesses are 0-based.
"""

from __future__ import annotations

import hashlib
import json
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np

from . import __version__
from . import linalg as la
from .certificates import Certificate, Method, Verdict, WitnessPair, frame_magnitudes, projection_magnitudes
from .errors import InputFormatError, UnsupportedField
from .falsifier import SEARCH_MEASUREMENT_TOL
from .frames import Frame
from .linalg import DEFAULT_TOL, EXACT, FLOAT, ToleranceConfig
from .subspaces import Subspace, SubspaceFamily


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------

def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_scalar(value, field: str):
    if isinstance(value, bool) or value is None:
        raise InputFormatError(f"invalid scalar {value!r}")
    try:
        q = la.to_fraction(value)
    except (ValueError, ZeroDivisionError, UnsupportedField) as exc:
        raise InputFormatError(f"invalid scalar {value!r}: {exc}") from None
    if field == EXACT:
        if isinstance(value, float):
            raise InputFormatError(f"exact files need rational strings, got float {value!r}")
        return q
    if isinstance(value, str):
        return float(q)
    return float(value)


def _parse_vectors(raw, dim: int, field: str, what: str) -> np.ndarray:
    if not isinstance(raw, list):
        raise InputFormatError(f"{what} must be a list of vectors")
    rows = []
    for k, v in enumerate(raw):
        if not isinstance(v, list) or len(v) != dim:
            raise InputFormatError(f"{what}[{k}] must be a list of {dim} scalars")
        rows.append([parse_scalar(s, field) for s in v])
    if field == EXACT:
        out = np.empty((len(rows), dim), dtype=object)
        for i, row in enumerate(rows):
            out[i, :] = row
        return out
    return np.array(rows, dtype=float).reshape(len(rows), dim)


def _header(obj) -> tuple[int, str]:
    if not isinstance(obj, dict):
        raise InputFormatError("top-level JSON value must be an object")
    dim = obj.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InputFormatError("'dim' must be a positive integer")
    field = obj.get("field", FLOAT)
    if field not in (EXACT, FLOAT):
        raise InputFormatError("'field' must be 'exact' or 'float'")
    return dim, field


def parse_frame(obj, field_override: str | None = None) -> Frame:
    dim, field = _header(obj)
    vectors = _parse_vectors(obj.get("vectors"), dim, field, "vectors")
    if vectors.shape[0] == 0:
        raise InputFormatError("a frame needs at least one vector")
    f = Frame(vectors)
    return f.to_field(field_override) if field_override else f


def parse_subspaces(obj, field_override: str | None = None) -> SubspaceFamily:
    dim, field = _header(obj)
    raw = obj.get("subspaces")
    if not isinstance(raw, list) or not raw:
        raise InputFormatError("'subspaces' must be a non-empty list")
    field = field_override or field
    members = []
    for k, item in enumerate(raw):
        if not isinstance(item, dict) or "basis" not in item:
            raise InputFormatError(f"subspaces[{k}] must be an object with a 'basis'")
        vecs = _parse_vectors(item["basis"], dim, obj.get("field", FLOAT), f"subspaces[{k}].basis")
        w = Subspace(la.as_field(vecs.T, field)) if vecs.shape[0] else None
        if w is None or w.dim == 0:
            raise InputFormatError(f"subspaces[{k}] is the zero subspace")
        members.append(w)
    return SubspaceFamily(dim, tuple(members))


def load_json(path) -> tuple[Any, bytes]:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputFormatError(str(exc)) from None
    try:
        return json.loads(data), data
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputFormatError(f"{path}: invalid JSON ({exc})") from None


def frame_to_json(f: Frame) -> dict:
    return {"dim": f.dim, "field": f.field, "vectors": to_jsonable(f.vectors)}


def family_to_json(fam: SubspaceFamily) -> dict:
    return {
        "dim": fam.ambient_dim,
        "field": fam.field,
        "subspaces": [{"basis": to_jsonable(w.basis.T)} for w in fam.members],
    }


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def to_jsonable(obj):
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) + 0.0
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, WitnessPair):
        out = {
            "type": "pair",
            "x": to_jsonable(obj.x),
            "y": to_jsonable(obj.y),
            "measurement_gap": obj.measurement_gap,
            "norm_gap": obj.norm_gap,
            "phase_gap": obj.phase_gap,
        }
        out.update({k: to_jsonable(v) for k, v in obj.extra.items()})
        return out
    if isinstance(obj, Certificate):
        return {
            "verdict": obj.verdict.value,
            "method": obj.method.value,
            "arithmetic_mode": obj.arithmetic_mode,
            "witness": to_jsonable(obj.witness),
        }
    if isinstance(obj, Frame):
        return frame_to_json(obj)
    if isinstance(obj, SubspaceFamily):
        return family_to_json(obj)
    if hasattr(obj, "matrix") and hasattr(obj, "inverse"):
        return {"matrix": to_jsonable(obj.matrix), "inverse": to_jsonable(obj.inverse)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def certificate_file(cert: Certificate, input_bytes: bytes) -> dict:
    out = to_jsonable(cert)
    out["inputs_digest"] = digest(input_bytes)
    out["tool_version"] = __version__
    return out


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# re-verification of serialized witnesses
# ---------------------------------------------------------------------------

def _vec(raw, field: str) -> np.ndarray:
    if field == EXACT and all(isinstance(s, str) for s in raw):
        return np.array([la.to_fraction(s) for s in raw], dtype=object)
    return np.array([float(la.to_fraction(s)) for s in raw])


def _mat(raw, field: str) -> np.ndarray:
    rows = [_vec(r, field) for r in raw]
    if field == EXACT and all(r.dtype == object for r in rows):
        out = np.empty((len(rows), len(rows[0])), dtype=object)
        for i, r in enumerate(rows):
            out[i, :] = r
        return out
    return np.array([la.as_float(r) for r in rows])


def _pair_from(raw, field: str) -> tuple[np.ndarray, np.ndarray]:
    return _vec(raw["x"], field), _vec(raw["y"], field)


def verify_certificate(cert: dict, input_obj: dict, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[bool | None, str]:
    """Re-check a serialized certificate's witness against its input.

    Returns ``(True, reason)`` when the witness reproduces the verdict,
    ``(False, reason)`` when it does not, and ``(None, reason)`` when the
    certificate carries nothing that can be checked without a new search.
    """
    try:
        verdict = Verdict(cert["verdict"])
        method = Method(cert["method"])
    except (KeyError, ValueError) as exc:
        raise InputFormatError(f"malformed certificate: {exc}") from None
    witness = cert.get("witness") or {}
    field = cert.get("arithmetic_mode", FLOAT)
    is_family = "subspaces" in input_obj

    if is_family:
        fam = parse_subspaces(input_obj, field)
        if "coefficients" in witness and verdict is Verdict.YES:
            a = _vec(witness["coefficients"], field)
            n = fam.ambient_dim
            combo = la.zeros((n, n), fam.field)
            for c, p in zip(a, fam.projections):
                combo = combo + c * p
            err = la.max_abs(la.as_float(combo) - np.eye(n))
            return err <= tol.witness_tol, f"identity residual {err:.3g}"
        if "pair" in witness and verdict is Verdict.NO:
            x, y = _pair_from(witness["pair"], field)
            pair = WitnessPair.build(x, y, projection_magnitudes(fam.projections))
            if method is Method.OPTIMIZATION_SEARCH:
                # search witnesses carry their own, looser acceptance bounds
                delta = float(witness.get("search", {}).get("delta", 0.0))
                ok = pair.measurement_gap <= SEARCH_MEASUREMENT_TOL and pair.norm_gap >= delta / 2
            else:
                ok = pair.measurement_gap <= tol.witness_tol and pair.norm_gap >= 1e-6
            return ok, f"measurement gap {pair.measurement_gap:.3g}, norm gap {pair.norm_gap:.3g}"
        return None, "no directly checkable witness"

    f = parse_frame(input_obj, field)
    if method is Method.INVERTIBLE_TRANSFORM_SUITE and verdict is Verdict.NO:
        op = witness.get("operator")
        pair_raw = witness.get("pair")
        if not op or not pair_raw:
            return False, "missing operator or pair"
        r = _mat(op["matrix"], field)
        r_inv = _mat(op["inverse"], field)
        if la.max_abs(la.as_float(r) @ la.as_float(r_inv) - np.eye(f.dim)) > tol.witness_tol:
            return False, "operator inverse does not check"
        moved = la.as_float(f.vectors) @ la.as_float(r).T
        x, y = _pair_from(pair_raw, field)
        pair = WitnessPair.build(x, y, frame_magnitudes(moved))
        ok = pair.measurement_gap <= tol.witness_tol and pair.norm_gap >= 1e-6
        return ok, f"measurement gap {pair.measurement_gap:.3g}, norm gap {pair.norm_gap:.3g}"
    if verdict is Verdict.NO and "subset" in witness:
        subset = [int(i) for i in witness["subset"]]
        rest = [i for i in range(f.size) if i not in subset]
        for side in (subset, rest):
            if side and la.rank(f.vectors[side], tol, f.scale) == f.dim:
                return False, f"indices {side} span"
        reason = "partition: neither side spans"
        if "pair" in witness:
            x, y = _pair_from(witness["pair"], field)
            pair = WitnessPair.build(x, y, frame_magnitudes(f.vectors))
            if not (pair.measurement_gap <= tol.witness_tol and pair.phase_gap >= 1e-3):
                return False, f"pair fails: measurement gap {pair.measurement_gap:.3g}, phase gap {pair.phase_gap:.3g}"
            reason += f"; pair measurement gap {pair.measurement_gap:.3g}, phase gap {pair.phase_gap:.3g}"
        return True, reason
    if verdict is Verdict.NO and "kernel_vector" in witness:
        x = _vec(witness["kernel_vector"], field)
        if la.is_zero(x):
            return False, "kernel vector is zero"
        img = la.as_float(f.vectors) @ la.as_float(x)
        err = float(np.max(np.abs(img))) / float(np.linalg.norm(la.as_float(x)))
        return err <= tol.witness_tol, f"relative image {err:.3g}"
    if method is Method.SUBSET_ENUMERATION and witness.get("dependent_subset") is not None:
        sub = [int(i) for i in witness["dependent_subset"]]
        ok = la.rank(f.vectors[sub], tol, f.scale) < len(sub) and len(sub) == witness.get("spark")
        return ok, "dependent subset re-checked (minimality needs enumeration)"
    return None, "no directly checkable witness"
