"""Fixed-step RK4 flows of polynomial vector fields, vectorized over point batches."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..symalg import PolyVectorField


class NumericalError(RuntimeError):
    pass


class FlowDivergence(NumericalError):
    def __init__(self, time: float, bound: float):
        super().__init__(f"flow left the ball |x| <= {bound:g} at time {time:.6g}")
        self.time = time


@dataclass(frozen=True)
class FlowConfig:
    order: int = 4
    steps_per_unit: int = 64
    max_time: float = 4.0
    seed: int = 0
    bound: float = 1e6
    workers: int | None = None

    def __post_init__(self):
        if self.order != 4:
            raise ValueError("only the classical 4th-order scheme is implemented")
        if self.steps_per_unit < 8:
            raise ValueError("steps_per_unit must be at least 8")

    def n_workers(self) -> int:
        if self.workers is not None:
            return max(1, self.workers)
        env = os.environ.get("MLRADON_THREADS")
        if env:
            return max(1, int(env))
        return max(1, min(4, os.cpu_count() or 1))


def rk4(
    f: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    dt: np.ndarray | float,
    steps: int,
    bound: float = math.inf,
) -> np.ndarray:
    """``steps`` RK4 steps of ``x' = f(x)``; ``dt`` may differ per row."""
    x = np.array(x, dtype=float)
    dt = np.asarray(dt, dtype=float)
    if dt.ndim == 1:
        dt = dt[:, None]
    for s in range(steps):
        k1 = f(x)
        k2 = f(x + 0.5 * dt * k1)
        k3 = f(x + 0.5 * dt * k2)
        k4 = f(x + dt * k3)
        x = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if bound < math.inf:
            big = np.abs(x).max(axis=-1) > bound
            if np.any(big) or not np.all(np.isfinite(x)):
                raise FlowDivergence(float(np.max(np.abs(dt))) * (s + 1), bound)
    return x


def n_steps(duration: float, cfg: FlowConfig) -> int:
    return max(1, math.ceil(cfg.steps_per_unit * abs(duration)))


def flow(X: PolyVectorField, x, t: float, cfg: FlowConfig = FlowConfig()) -> np.ndarray:
    """The time-``t`` flow of ``X`` from the point ``x``."""
    if abs(t) > cfg.max_time:
        raise ValueError(f"|t| = {abs(t)} exceeds the configured max time {cfg.max_time}")
    x = np.asarray(x, dtype=float)
    if x.shape != (X.n,):
        raise ValueError(f"point has shape {x.shape}, field lives in R^{X.n}")
    if t == 0:
        return x.copy()
    m = n_steps(t, cfg)
    return rk4(X.evaluate_many, x[None, :], t / m, m, cfg.bound)[0]


def flow_many(X: PolyVectorField, pts: np.ndarray, times, cfg: FlowConfig = FlowConfig()) -> np.ndarray:
    """Flow every row of ``pts`` by its own time (scalar or array)."""
    pts = np.asarray(pts, dtype=float)
    times = np.broadcast_to(np.asarray(times, dtype=float), (pts.shape[0],))
    if not len(times):
        return pts.copy()
    tmax = float(np.max(np.abs(times)))
    if tmax > cfg.max_time:
        raise ValueError(f"|t| = {tmax} exceeds the configured max time {cfg.max_time}")
    if tmax == 0:
        return pts.copy()
    m = n_steps(tmax, cfg)
    return rk4(X.evaluate_many, pts, times / m, m, cfg.bound)
