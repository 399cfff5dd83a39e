"""Heuristic parameter classification and grid scans.

The verdicts are candidates, not certificates: exact arithmetic would
be needed to promote them.  Thresholds live in :class:`ScanConfig`; the
defaults classify every worked example and every figure parameter of
the underlying study correctly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .circle import RotationEstimate, rotation_number, snap_rational
from .core import Mat2, Params, Point, inverse_step, step, word_matrix
from .errors import OrbitOverflowError


class Verdict(enum.Enum):
    PERIODIC_CANDIDATE = "periodic_candidate"
    CIRCLE_CANDIDATE = "circle_candidate"
    DIVERGENT = "divergent"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class ScanConfig:
    """Classification thresholds.

    ``divergence_ratio``: norm growth (both time directions) that marks
    an orbit divergent.  ``periodic_q_max``: largest snap denominator
    for which the one-period matrix test is attempted.
    ``small_q_max``: snaps at or below this denominator block the
    circle verdict (they are credible rationals, not estimation noise).
    ``radius_ratio_max``: largest radial spread accepted as
    circle-like.
    """

    divergence_ratio: float = 1e6
    periodic_q_max: int = 256
    small_q_max: int = 64
    matrix_tol: float = 1e-8
    radius_ratio_max: float = 100.0


@dataclass(frozen=True)
class Evidence:
    """Numbers backing a verdict; unused entries are None."""

    norm_growth: float | None = None
    near_return_residual: float | None = None
    period_matrix_residual: float | None = None
    radius_ratio: float | None = None

    def to_dict(self) -> dict:
        return {
            "norm_growth": self.norm_growth,
            "near_return_residual": self.near_return_residual,
            "period_matrix_residual": self.period_matrix_residual,
            "radius_ratio": self.radius_ratio,
        }


@dataclass(frozen=True)
class ClassRecord:
    params: Params
    rotation: RotationEstimate
    verdict: Verdict
    periodic_q: int | None = None
    evidence: Evidence = field(default_factory=Evidence)
    error: str | None = None

    def to_dict(self) -> dict:
        snap = self.rotation.snap
        return {
            "schema_version": "v1",
            "a": self.params.a,
            "b": self.params.b,
            "rotation_value": self.rotation.value,
            "rotation_steps": self.rotation.steps,
            "rotation_error_bound": self.rotation.error_bound,
            "rotation_snap_p": None if snap is None else snap.numerator,
            "rotation_snap_q": None if snap is None else snap.denominator,
            "verdict": self.verdict.value,
            "periodic_q": self.periodic_q,
            "error": self.error,
            **self.evidence.to_dict(),
        }


def _norm_run(params: Params, forward: bool, budget: int, cap: float):
    """Track norm extremes and axis proximity of the orbit of (0, 1).

    Stops early once the norm exceeds ``cap`` times the starting norm.
    Returns (max_ratio, min_ratio, min |x|/||v||).
    """
    p: Point = (0.0, 1.0)
    stepf = step if forward else inverse_step
    mx = mn = 1.0
    near = math.inf
    for _ in range(budget):
        try:
            p = stepf(params, p)
        except OrbitOverflowError:
            return math.inf, mn, near
        r = math.hypot(*p)
        if r > mx:
            mx = r
        elif r < mn:
            mn = r
        prox = abs(p[0]) / r
        if prox < near:
            near = prox
        if mx > cap:
            break
    return mx, mn, near


def classify(params: Params, budget: int = 100_000,
             config: ScanConfig = ScanConfig()) -> ClassRecord:
    """Classify one parameter pair.

    Order of tests: divergence (norm growth in both time directions),
    then a one-period cocycle test when the rotation estimate snaps to
    a rational, then the bounded-orbit (circle) heuristic.
    """
    if budget < 1000:
        raise ValueError("budget must be at least 1000")
    est = rotation_number(params, (1.0, 0.0), budget)
    est = est.with_snap(snap_rational(est, config.periodic_q_max))

    fwd_max, fwd_min, near = _norm_run(params, True, budget,
                                       config.divergence_ratio)
    bwd_max, _, _ = _norm_run(params, False, budget, config.divergence_ratio)
    norm_growth = min(fwd_max, bwd_max)
    radius_ratio = fwd_max / fwd_min
    evidence = Evidence(norm_growth=norm_growth,
                        near_return_residual=near,
                        radius_ratio=radius_ratio)

    if (fwd_max > config.divergence_ratio
            and bwd_max > config.divergence_ratio):
        return ClassRecord(params, est, Verdict.DIVERGENT, evidence=evidence)

    snap = est.snap
    if snap is not None and snap.denominator <= config.periodic_q_max:
        q = snap.denominator
        residual = _period_matrix_residual(params, q)
        evidence = Evidence(norm_growth=norm_growth,
                            near_return_residual=near,
                            period_matrix_residual=residual,
                            radius_ratio=radius_ratio)
        if residual <= config.matrix_tol:
            return ClassRecord(params, est, Verdict.PERIODIC_CANDIDATE,
                               periodic_q=q, evidence=evidence)

    small_snap = snap is not None and snap.denominator <= config.small_q_max
    if radius_ratio < config.radius_ratio_max and not small_snap:
        return ClassRecord(params, est, Verdict.CIRCLE_CANDIDATE,
                           evidence=evidence)
    return ClassRecord(params, est, Verdict.UNDETERMINED, evidence=evidence)


def _period_matrix_residual(params: Params, q: int) -> float:
    """Distance of the q-step cocycle along the orbit of (1, 0) from
    +-identity (a snap p/q makes q steps one full angular period)."""
    u: Point = (1.0, 0.0)
    signs = []
    for _ in range(q):
        signs.append("+" if u[0] >= 0 else "-")
        try:
            u = step(params, u)
        except OrbitOverflowError:
            return math.inf
        r = math.hypot(*u)
        u = (u[0] / r, u[1] / r)
    m = word_matrix(params, "".join(signs))
    ident = Mat2.identity()
    neg = Mat2(-1.0, 0.0, 0.0, -1.0)
    return min(m.dist(ident), m.dist(neg))


def scan(
    a_range: tuple[float, float],
    b_range: tuple[float, float],
    resolution: int,
    budget: int = 10_000,
    half_plane: bool = False,
    config: ScanConfig = ScanConfig(),
) -> list[ClassRecord]:
    """Classify a rectangular parameter grid, row-major in (a, b).

    Cells are independent pure computations merged in a deterministic
    order, so the work can be sharded externally and re-merged by grid
    index.  ``half_plane`` keeps only cells with a >= b (the swap
    conjugacy makes the rest redundant).  Per-cell failures are
    recorded in the cell, not raised.
    """
    if resolution < 0 or resolution > 2048:
        raise ValueError("resolution must be in [0, 2048]")
    if resolution == 0:
        return []
    out: list[ClassRecord] = []
    for i in range(resolution):
        a = _grid_value(a_range, i, resolution)
        for j in range(resolution):
            b = _grid_value(b_range, j, resolution)
            if half_plane and a < b:
                continue
            params = Params(a, b)
            try:
                out.append(classify(params, budget, config))
            except Exception as exc:  # per-cell marker, keep scanning
                est = RotationEstimate(math.nan, budget, 1.0 / budget)
                out.append(ClassRecord(params, est, Verdict.UNDETERMINED,
                                       error=str(exc)))
    return out


def _grid_value(rng: tuple[float, float], i: int, resolution: int) -> float:
    lo, hi = rng
    if resolution == 1:
        return lo
    return lo + (hi - lo) * i / (resolution - 1)
