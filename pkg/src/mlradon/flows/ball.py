"""Sampling Carnot-Caratheodory balls and measuring them on occupancy grids.

Samples are generated in fixed-size chunks; chunk ``i`` always draws from the
random stream ``SeedSequence(seed, spawn_key=(tag, i))``, so the output does
not depend on how many worker threads process the chunks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..symalg import PolyMap, PolyVectorField
from .integrate import FlowConfig, flow_many

CHUNK = 16384
_BALL_TAG = 1
_BOX_TAG = 2


@dataclass(frozen=True)
class BallSpec:
    x0: tuple[float, ...]
    delta: tuple[float, ...]
    n_seg: int | None = None  # default 3n
    n_samples: int = 200_000
    h: float | None = None
    eps: float = 0.25

    def __post_init__(self):
        if any(d <= 0 for d in self.delta):
            raise ValueError("all radii must be positive")
        if self.n_seg is not None and self.n_seg < 0:
            raise ValueError("segment count must be non-negative")
        if self.n_samples < 1:
            raise ValueError("need at least one sample")

    @property
    def segments(self) -> int:
        return 3 * len(self.x0) if self.n_seg is None else self.n_seg

    @property
    def nondegenerate(self) -> bool:
        return nondegenerate(self.delta, self.eps)


def nondegenerate(delta: Sequence[float], eps: float) -> bool:
    """``delta_i <= delta_j ** eps`` for all i, j (constant taken as 1)."""
    return all(di <= dj**eps for di in delta for dj in delta)


@dataclass
class PointCloud:
    points: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2:
            raise ValueError("point cloud must be a 2-d array")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("point cloud contains non-finite points")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]


@dataclass
class OccupancyGrid:
    dim: int
    h: np.ndarray
    origin: np.ndarray
    cells: np.ndarray = field(repr=False)

    @classmethod
    def from_points(cls, points: np.ndarray, h, origin=None) -> "OccupancyGrid":
        points = np.asarray(points, dtype=float)
        dim = points.shape[1]
        h = np.broadcast_to(np.asarray(h, dtype=float), (dim,)).copy()
        if np.any(h <= 0):
            raise ValueError("cell sizes must be positive")
        origin = np.zeros(dim) if origin is None else np.asarray(origin, dtype=float)
        if len(points):
            idx = np.floor((points - origin) / h).astype(np.int64)
            cells = np.unique(idx, axis=0)
        else:
            cells = np.zeros((0, dim), dtype=np.int64)
        return cls(dim, h, origin, cells)

    @property
    def count(self) -> int:
        return len(self.cells)

    @property
    def measure(self) -> float:
        return self.count * float(np.prod(self.h))

    def centers(self) -> np.ndarray:
        return self.origin + (self.cells + 0.5) * self.h

    def cell_set(self) -> set[tuple[int, ...]]:
        return {tuple(c) for c in self.cells.tolist()}


def relative_cells(points: np.ndarray, per_axis: int, origin=None) -> np.ndarray:
    """Per-axis cell sizes ``extent_i / per_axis`` from the bounding box."""
    points = np.asarray(points, dtype=float)
    ext = points.max(axis=0) - points.min(axis=0)
    positive = ext[ext > 0]
    fallback = positive.min() if len(positive) else 1.0
    ext = np.where(ext > 0, ext, fallback)
    return ext / per_axis


def default_cells_per_axis(n: int) -> int:
    return {1: 256, 2: 64, 3: 20}.get(n, 10)


def _run_chunks(fn, n_total: int, cfg: FlowConfig) -> np.ndarray:
    sizes = [min(CHUNK, n_total - s) for s in range(0, n_total, CHUNK)]
    jobs = list(enumerate(sizes))
    workers = min(cfg.n_workers(), len(jobs)) or 1
    if workers == 1:
        parts = [fn(i, m) for i, m in jobs]
    else:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda job: fn(*job), jobs))
    return np.concatenate(parts, axis=0)


def _rng(seed: int, tag: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(tag, chunk)))


def sample_ball(fields: Sequence[PolyVectorField], spec: BallSpec, cfg: FlowConfig = FlowConfig()) -> PointCloud:
    """Random points of B(x0; delta): compositions of ``n_seg`` flows along ``delta_j X_j``.

    Each sample picks the letters uniformly, splits the unit time budget by a
    flat Dirichlet draw, and picks the signs uniformly.
    """
    fields = list(fields)
    k, n = len(fields), fields[0].n
    if len(spec.delta) != k or len(spec.x0) != n:
        raise ValueError("ball spec does not match the fields")
    x0 = np.asarray(spec.x0, dtype=float)
    delta = np.asarray(spec.delta, dtype=float)
    nseg = spec.segments

    def chunk(i: int, m: int) -> np.ndarray:
        pts = np.tile(x0, (m, 1))
        if nseg == 0:
            return pts
        rng = _rng(cfg.seed, _BALL_TAG, i)
        w = rng.dirichlet(np.ones(nseg), size=m)
        signs = rng.integers(0, 2, size=(m, nseg)) * 2 - 1
        letters = rng.integers(0, k, size=(m, nseg))
        for s in range(nseg):
            times = w[:, s] * signs[:, s] * delta[letters[:, s]]
            for j in range(k):
                mask = letters[:, s] == j
                if mask.any():
                    pts[mask] = flow_many(fields[j], pts[mask], times[mask], cfg)
        return pts

    pts = _run_chunks(chunk, spec.n_samples, cfg)
    return PointCloud(pts, f"B(x0={tuple(spec.x0)}; delta={tuple(spec.delta)}) nseg={nseg}")


def sample_box_ball(
    fields: Sequence[PolyVectorField],
    x0,
    delta,
    js: Sequence[int],
    cfg: FlowConfig = FlowConfig(),
    n_samples: int = 200_000,
) -> PointCloud:
    """Random points of B_j(x0; delta): ``t`` uniform in the cube, flows in the order ``js``."""
    fields = list(fields)
    k = len(fields)
    js = [int(j) for j in js]
    if any(not 1 <= j <= k for j in js):
        raise ValueError(f"sequence {js} has letters outside 1..{k}")
    x0 = np.asarray(x0, dtype=float)
    delta = np.asarray(delta, dtype=float)

    def chunk(i: int, m: int) -> np.ndarray:
        rng = _rng(cfg.seed, _BOX_TAG, i)
        t = rng.uniform(-1.0, 1.0, size=(m, len(js)))
        pts = np.tile(x0, (m, 1))
        for s, j in enumerate(js):
            pts = flow_many(fields[j - 1], pts, t[:, s] * delta[j - 1], cfg)
        return pts

    pts = _run_chunks(chunk, n_samples, cfg)
    return PointCloud(pts, f"B_j(x0={tuple(x0)}; delta={tuple(delta)}; j={tuple(js)})")


def ball_volume(cloud: PointCloud, h, origin=None) -> float:
    """Occupied-cell count times the cell volume."""
    if len(cloud) == 0:
        raise ValueError("empty point cloud")
    return OccupancyGrid.from_points(cloud.points, h, origin).measure


def project_measure(grid: OccupancyGrid, pi: PolyMap, h_image, origin=None) -> float:
    """Measure of pi(cell centers) on an (n-1)-dimensional grid with cells ``h_image``."""
    if grid.count == 0:
        return 0.0
    image = pi.evaluate_many(grid.centers())
    return OccupancyGrid.from_points(image, h_image, origin).measure


def matched_image_cells(pi: PolyMap, h: np.ndarray, x0) -> np.ndarray:
    """Image cell sizes matched to ``h``: ``|D pi(x0)| h`` row by row."""
    x0 = [Fraction(0)] * pi.n if x0 is None else list(x0)
    jac = np.array([[float(d.evaluate_many(np.asarray(x0, dtype=float)[None, :])[0]) for d in row] for row in pi.jacobian()])
    out = np.sqrt((jac**2) @ (np.asarray(h, dtype=float) ** 2))
    if np.any(out <= 0):
        raise ValueError("projection is degenerate at the base point")
    return out
