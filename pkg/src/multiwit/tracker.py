"""Predictor-corrector path tracking for homotopies H(x;t), t: 1 -> 0.

The homotopy is kept in block form: an optional fixed block (equations
identical at both ends, e.g. the defining system F when only slices
move) plus a moving block interpolated as t*gamma*start + (1-t)*target.
The predictor is 4th-order Runge-Kutta on the Davidenko ODE, the
corrector is full Newton with at most a few iterations per step, and
the step size doubles after consecutive successes / halves on failure.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import PolySystem

MATCH_TOL = 1e-6  # relative distance below which two refined points are equal


class TrackingError(RuntimeError):
    pass


class SingularJacobianError(TrackingError):
    pass


class NonconvergenceError(TrackingError):
    pass


@dataclass(frozen=True)
class TrackOptions:
    newton_tol: float = 1e-8
    max_newton_iters: int = 3
    initial_step: float = 0.05
    min_step: float = 1e-14
    max_step: float = 0.1
    divergence_norm: float = 1e8
    end_tol: float = 1e-9
    max_steps: int = 20000
    rank_tol: float = 1e-8
    workers: int = 1

    def __post_init__(self):
        if not (self.min_step <= self.initial_step <= self.max_step):
            raise ValueError("need min_step <= initial_step <= max_step")
        for name in ("newton_tol", "end_tol", "min_step"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class PathResult:
    status: str  # "converged" | "diverged" | "failed"
    endpoint: np.ndarray | None
    steps_taken: int
    final_residual: float

    @property
    def converged(self) -> bool:
        return self.status == "converged"


class Homotopy:
    """H(x;t) = [fixed(x); t*gamma*start(x) + (1-t)*target(x)]."""

    def __init__(
        self,
        start: PolySystem,
        target: PolySystem,
        gamma: complex = 1.0,
        fixed: PolySystem | None = None,
    ):
        if len(start) != len(target):
            raise ValueError("start and target blocks must have equal length")
        if start.grouping.nvars != target.grouping.nvars:
            raise ValueError("start and target must share the variable set")
        if gamma == 0:
            raise ValueError("gamma must be nonzero")
        self.start = start
        self.target = target
        self.gamma = complex(gamma)
        self.fixed = fixed
        self.nvars = target.grouping.nvars
        self.rows = (len(fixed) if fixed else 0) + len(target)

    @property
    def is_square(self) -> bool:
        return self.rows == self.nvars

    def evaluate(self, x: np.ndarray, t: float) -> np.ndarray:
        moving = t * self.gamma * self.start.evaluate(x) + (1 - t) * self.target.evaluate(x)
        if self.fixed is None:
            return moving
        return np.concatenate([self.fixed.evaluate(x), moving])

    def jacobian_x(self, x: np.ndarray, t: float) -> np.ndarray:
        moving = t * self.gamma * self.start.jacobian(x) + (1 - t) * self.target.jacobian(x)
        if self.fixed is None:
            return moving
        return np.vstack([self.fixed.jacobian(x), moving])

    def dt(self, x: np.ndarray) -> np.ndarray:
        """dH/dt; zero on the fixed block."""
        moving = self.gamma * self.start.evaluate(x) - self.target.evaluate(x)
        if self.fixed is None:
            return moving
        return np.concatenate([np.zeros(len(self.fixed), dtype=complex), moving])

    def residual_scale(self, x: np.ndarray, t: float) -> np.ndarray:
        """Per-row magnitude of the homotopy's terms; the corrector measures
        residuals relative to this so paths far from the origin (diverging
        toward infinity) still correct to machine precision."""
        moving = (
            abs(t * self.gamma) * self.start.residual_scale(x)
            + abs(1 - t) * self.target.residual_scale(x)
        )
        if self.fixed is None:
            return moving
        return np.concatenate([self.fixed.residual_scale(x), moving])

    def target_system_residual(self, x: np.ndarray) -> float:
        r = float(np.linalg.norm(self.target.evaluate(x), np.inf))
        if self.fixed is not None:
            r = max(r, float(np.linalg.norm(self.fixed.evaluate(x), np.inf)))
        return r


def newton_refine(system: PolySystem, point, tol: float = 1e-10,
                  max_iters: int = 20) -> np.ndarray:
    """Sharpen a root of a square system by Newton iteration."""
    x = np.asarray(point, dtype=complex).copy()
    n = x.size
    if len(system) != n:
        raise ValueError("newton_refine needs a square system")

    def rel_residual(pt) -> float:
        r = np.abs(system.evaluate(pt))
        return float(np.max(r / system.residual_scale(pt)))

    for _ in range(max_iters):
        if rel_residual(x) < tol:
            return x
        J = system.jacobian(x)
        s = np.linalg.svd(J, compute_uv=False)
        if s[0] == 0 or s[-1] / s[0] < 1e-13:
            raise SingularJacobianError("Jacobian numerically singular during refinement")
        x = x - np.linalg.solve(J, system.evaluate(x))
    res = rel_residual(x)
    if res < tol:
        return x
    raise NonconvergenceError(
        f"Newton refinement stalled at relative residual {res:.3e}"
    )


def _newton_correct(h: Homotopy, x: np.ndarray, t: float, opts: TrackOptions):
    """A few Newton sweeps at fixed t.  Returns (point, ok).

    Residuals are measured relative to the homotopy's per-row term
    magnitude; an absolute test is unreachable in double precision once a
    path has wandered far from the origin."""

    def small(point) -> bool:
        r = np.abs(h.evaluate(point, t))
        return bool(np.max(r / h.residual_scale(point, t)) < opts.newton_tol)

    for _ in range(opts.max_newton_iters):
        if small(x):
            return x, True
        J = h.jacobian_x(x, t)
        try:
            dx = np.linalg.solve(J, h.evaluate(x, t))
        except np.linalg.LinAlgError:
            return x, False
        x = x - dx
        if not np.all(np.isfinite(x)):
            return x, False
    return x, small(x)


def _davidenko_rhs(h: Homotopy, x: np.ndarray, t: float) -> np.ndarray:
    J = h.jacobian_x(x, t)
    return np.linalg.solve(J, -h.dt(x))


def track_path(h: Homotopy, start_point, opts: TrackOptions = TrackOptions()) -> PathResult:
    if not h.is_square:
        raise ValueError(f"homotopy is {h.rows}x{h.nvars}, tracking needs a square one")
    x = np.asarray(start_point, dtype=complex).copy()
    x, ok = _newton_correct(h, x, 1.0, opts)
    if not ok:
        return PathResult("failed", None, 0, float("inf"))

    t = 1.0
    step = opts.initial_step
    streak = 0
    steps = 0
    initial_norm = float(np.linalg.norm(x))
    norm_history = [initial_norm]
    blowup_norm = 1e4 * max(1.0, initial_norm)
    crawl = 0  # accepted steps spent creeping toward a blow-up time

    while t > 0:
        if steps >= opts.max_steps:
            if norm_history[-1] > blowup_norm:
                return PathResult("diverged", None, steps, float("inf"))
            return PathResult("failed", None, steps, float("inf"))
        dt = min(step, t)
        try:
            # RK4 on x'(t) = -J^{-1} dH/dt, moving toward t=0
            k1 = _davidenko_rhs(h, x, t)
            k2 = _davidenko_rhs(h, x - 0.5 * dt * k1, t - 0.5 * dt)
            k3 = _davidenko_rhs(h, x - 0.5 * dt * k2, t - 0.5 * dt)
            k4 = _davidenko_rhs(h, x - dt * k3, t - dt)
            xp = x - (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            predicted_ok = np.all(np.isfinite(xp))
        except np.linalg.LinAlgError:
            predicted_ok = False
            xp = x

        accepted = False
        if predicted_ok:
            xc, ok = _newton_correct(h, xp, t - dt, opts)
            if ok:
                x = xc
                t = t - dt
                steps += 1
                streak += 1
                accepted = True
                norm_history.append(float(np.linalg.norm(x)))
                if len(norm_history) > 8:
                    norm_history.pop(0)
                if norm_history[-1] > opts.divergence_norm:
                    return PathResult("diverged", None, steps, float("inf"))
                # A path blowing up at an interior time creeps: t stagnates
                # while the norm grows without bound.  Cut it off early.
                if dt < 1e-4 and norm_history[-1] > norm_history[-2]:
                    crawl += 1
                    if crawl >= 100 and norm_history[-1] > blowup_norm:
                        return PathResult("diverged", None, steps, float("inf"))
                else:
                    crawl = 0
                if streak >= 4:
                    step = min(step * 2, opts.max_step)
                    streak = 0
        if not accepted:
            step = step / 2
            streak = 0
            if step < opts.min_step:
                recent_growth = (
                    len(norm_history) >= 2 and norm_history[-1] > 2 * norm_history[0]
                )
                blown_up = norm_history[-1] > max(1e4, 100.0 * initial_norm)
                if blown_up or (t < 0.05 and recent_growth):
                    return PathResult("diverged", None, steps, float("inf"))
                return PathResult("failed", None, steps, float("inf"))

    def end_residual(point) -> float:
        r = np.abs(h.evaluate(point, 0.0))
        return float(np.max(r / h.residual_scale(point, 0.0)))

    try:
        # Final sharpening against the t=0 system (relative residual, so
        # legitimate far-from-origin endpoints are not rejected).
        for _ in range(30):
            if end_residual(x) < opts.end_tol:
                break
            J = h.jacobian_x(x, 0.0)
            x = x - np.linalg.solve(J, h.evaluate(x, 0.0))
    except np.linalg.LinAlgError:
        return PathResult("failed", None, steps, float("inf"))
    residual = end_residual(x)
    if residual < opts.end_tol:
        return PathResult("converged", x, steps, residual)
    return PathResult("failed", None, steps, residual)


def track_many(h: Homotopy, starts: Sequence, opts: TrackOptions = TrackOptions()) -> list[PathResult]:
    """Track a batch; results ordered by input index, worker-count independent."""
    starts = list(starts)
    if not starts:
        return []
    if opts.workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=opts.workers) as pool:
            return list(pool.map(lambda s: track_path(h, s, opts), starts))
    return [track_path(h, s, opts) for s in starts]


def points_equal(a: np.ndarray, b: np.ndarray, tol: float | None = None) -> bool:
    if tol is None:
        tol = MATCH_TOL
    scale = max(1.0, float(np.linalg.norm(a)), float(np.linalg.norm(b)))
    return bool(np.linalg.norm(np.asarray(a) - np.asarray(b)) < tol * scale)


def dedupe_points(points: Sequence[np.ndarray], tol: float | None = None) -> list[np.ndarray]:
    kept: list[np.ndarray] = []
    for p in points:
        if not any(points_equal(p, q, tol) for q in kept):
            kept.append(p)
    return kept
