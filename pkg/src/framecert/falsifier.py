"""Counterexample construction and search for phase and norm retrieval.

``pr_witness_from_partition`` is exact: it turns a failed complement-property
partition into a concrete pair of signals.  ``nr_violation_search`` is a
heuristic; when it finds nothing that is evidence, not proof, of norm
retrieval.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from . import linalg as la
from .certificates import WitnessPair, frame_magnitudes, projection_magnitudes
from .errors import NotAViolation
from .frames import Frame
from .linalg import DEFAULT_TOL, ToleranceConfig

# restarts are processed in fixed blocks so results do not depend on thread count
RESTART_BLOCK = 8
# accepted witnesses must also match every measured norm to this accuracy
MEASUREMENT_ACCEPT = 1e-7
# bound a search witness is re-validated against
SEARCH_MEASUREMENT_TOL = 1e-6


def _primitive(v: np.ndarray) -> np.ndarray:
    """Scale a nonzero rational vector to coprime integers, first nonzero entry positive."""
    den = lcm(*(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    g = 0
    for i in ints:
        g = gcd(g, i)
    sign = next((1 if i > 0 else -1 for i in ints if i != 0), 1)
    return np.array([Fraction(sign * i, g) for i in ints], dtype=object)


def _orthogonal_vector(vectors: np.ndarray, idx: list[int], tol: ToleranceConfig, scale: float) -> np.ndarray:
    n = vectors.shape[1]
    rows = vectors[idx] if idx else la.zeros((0, n), la.field_of(vectors))
    basis = la.null_space_basis(rows, tol, scale)
    v = basis[:, 0]
    return _primitive(v) if la.is_exact(v) else v


def pr_witness_from_partition(f: Frame, bad_subset, tol: ToleranceConfig = DEFAULT_TOL) -> WitnessPair:
    """Build ``x = u + v``, ``y = u - v`` from a partition where neither side spans.

    ``u`` is orthogonal to the vectors in the subset and ``v`` to the rest, so
    ``|<x, phi_i>| = |<y, phi_i>|`` for every i while ``x != +-y``.
    """
    subset = sorted(set(int(i) for i in bad_subset))
    rest = [i for i in range(f.size) if i not in subset]
    for side in (subset, rest):
        if side and la.rank(f.vectors[side], tol, f.scale) == f.dim:
            raise NotAViolation(f"indices {side} span R^{f.dim}")
    u = _orthogonal_vector(f.vectors, subset, tol, f.scale)
    v = _orthogonal_vector(f.vectors, rest, tol, f.scale)
    return WitnessPair.build(u + v, u - v, frame_magnitudes(f.vectors), subset=subset)


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 64
    max_iters: int = 2000
    step: float = 0.1
    delta: float = 0.25
    residual_accept: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        for name in ("restarts", "max_iters", "step", "delta", "residual_accept"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def _stack(projections) -> np.ndarray:
    """Accept a SubspaceFamily or a sequence of projection matrices."""
    projections = getattr(projections, "projections", projections)
    return np.stack([la.as_float(p) for p in projections])


def _residuals(ps: np.ndarray, x: np.ndarray, y: np.ndarray):
    px, py = ps @ x, ps @ y
    r = np.einsum("ij,j->i", px, x) - np.einsum("ij,j->i", py, y)
    return r, px, py


def objective(projections, x, y) -> float:
    """``sum_i (||P_i x||^2 - ||P_i y||^2)^2``."""
    r, _, _ = _residuals(_stack(projections), np.asarray(x, float), np.asarray(y, float))
    return float(r @ r)


def objective_gradient(projections, x, y) -> tuple[np.ndarray, np.ndarray]:
    r, px, py = _residuals(_stack(projections), np.asarray(x, float), np.asarray(y, float))
    return 4.0 * (r @ px), -4.0 * (r @ py)


def gradient_check(projections, x, y, h: float = 1e-5) -> float:
    """Largest deviation between the analytic gradient and central differences.

    Deviations are measured relative to the larger gradient's max-norm; when
    both gradients are below 1e-8 (a stationary point) the check returns 0.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    gx, gy = objective_gradient(projections, x, y)
    analytic = np.concatenate([gx, gy])
    z = np.concatenate([x, y])
    n = x.size
    numeric = np.empty_like(z)
    for k in range(z.size):
        zp, zm = z.copy(), z.copy()
        zp[k] += h
        zm[k] -= h
        numeric[k] = (objective(projections, zp[:n], zp[n:]) - objective(projections, zm[:n], zm[n:])) / (2 * h)
    scale = max(np.max(np.abs(analytic)), np.max(np.abs(numeric)))
    if scale <= 1e-8:
        return 0.0
    return float(np.max(np.abs(analytic - numeric)) / scale)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _descend(ps: np.ndarray, rng: np.random.Generator, cfg: SearchConfig):
    n = ps.shape[1]
    radius = 1.0 + cfg.delta
    x = _unit(rng.standard_normal(n))
    y = radius * _unit(rng.standard_normal(n))
    r, px, py = _residuals(ps, x, y)
    f = float(r @ r)
    step = cfg.step
    it = 0
    for it in range(1, cfg.max_iters + 1):
        if f <= cfg.residual_accept:
            gap = np.max(np.abs(np.linalg.norm(px, axis=1) - np.linalg.norm(py, axis=1)))
            if gap <= MEASUREMENT_ACCEPT:
                break
        gx, gy = 4.0 * (r @ px), -4.0 * (r @ py)
        while step > 1e-18:
            xn = _unit(x - step * gx)
            yn = radius * _unit(y - step * gy)
            rn, pxn, pyn = _residuals(ps, xn, yn)
            fn = float(rn @ rn)
            if fn < f:
                x, y, r, px, py, f = xn, yn, rn, pxn, pyn, fn
                step *= 1.5
                break
            step *= 0.5
        else:
            break
    return x, y, f, it


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("THREADS", "1")))
    except ValueError:
        return 1


def nr_violation_search(
    projections, cfg: SearchConfig = SearchConfig(), workers: int | None = None
) -> WitnessPair | None:
    """Look for ``x, y`` with equal projection norms but ``||y|| = (1 + delta) ||x||``.

    Minimizes ``sum_i (||P_i x||^2 - ||P_i y||^2)^2`` on the spheres
    ``||x|| = 1``, ``||y|| = 1 + delta`` by gradient steps followed by
    renormalization, from ``cfg.restarts`` random starts.  Returns None when no
    start reaches ``cfg.residual_accept``.
    """
    ps = _stack(projections)
    workers = workers or _default_workers()
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)

    def run(k):
        return _descend(ps, np.random.default_rng(seeds[k]), cfg)

    magnitudes = projection_magnitudes(list(ps))
    with ThreadPoolExecutor(max_workers=workers) if workers > 1 else _Serial() as pool:
        for start in range(0, cfg.restarts, RESTART_BLOCK):
            block = list(range(start, min(start + RESTART_BLOCK, cfg.restarts)))
            results = list(pool.map(run, block))
            accepted = []
            for k, (x, y, f, it) in zip(block, results):
                if f > cfg.residual_accept:
                    continue
                pair = WitnessPair.build(x, y, magnitudes, restart=k, residual=f, iterations=it)
                if pair.measurement_gap <= MEASUREMENT_ACCEPT:
                    accepted.append((f, k, pair))
            if accepted:
                return min(accepted, key=lambda t: (t[0], t[1]))[2]
    return None


class _Serial:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False

    @staticmethod
    def map(fn, items):
        return map(fn, items)
