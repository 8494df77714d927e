"""Volume scans, doubling, projection ratios and the necessity blow-up experiment."""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..exponents import ExponentTuple, Verdict, b_of_p, classify
from ..polytope import NewtonPolytope, SeparatingFunctional, contains, separating_functional
from ..symalg import PolyMap, PolyVectorField
from ..words import Catalog, lambda_vector
from .ball import (
    BallSpec,
    OccupancyGrid,
    PointCloud,
    default_cells_per_axis,
    matched_image_cells,
    project_measure,
    relative_cells,
    sample_ball,
    sample_box_ball,
)
from .integrate import FlowConfig


class WitnessPrecondition(ValueError):
    pass


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (tuple, list, np.ndarray)):
        return "(" + ",".join(fmt(x) for x in v) + ")"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return str(v)
    return f"{float(v):.9g}"


def to_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def _cloud(fields, x0, delta, cfg, n_samples, n_seg=None) -> PointCloud:
    return sample_ball(fields, BallSpec(tuple(x0), tuple(delta), n_seg, n_samples), cfg)


def _grid(cloud: PointCloud, x0, cells_per_axis=None, h=None) -> OccupancyGrid:
    if h is None:
        h = relative_cells(cloud.points, cells_per_axis or default_cells_per_axis(cloud.dim))
    return OccupancyGrid.from_points(cloud.points, h, origin=x0)


@dataclass
class VolumeRow:
    delta: tuple[float, ...]
    volume: float
    lam: float
    ratio: float


def volume_vs_lambda(
    fields: Sequence[PolyVectorField],
    cat: Catalog,
    x0,
    delta_list: Sequence[Sequence[float]],
    cfg: FlowConfig = FlowConfig(),
    n_samples: int = 200_000,
    cells_per_axis: int | None = None,
) -> list[VolumeRow]:
    """|B(x0; delta)| against |Lambda_delta(x0)| (K = 1) for each delta."""
    rows = []
    for delta in delta_list:
        cloud = _cloud(fields, x0, delta, cfg, n_samples)
        vol = _grid(cloud, x0, cells_per_axis).measure
        lam = lambda_vector(cat, tuple(x0), delta, 1.0).norm
        rows.append(VolumeRow(tuple(float(d) for d in delta), vol, lam, vol / lam if lam else float("inf")))
    return rows


def doubling_ratio(
    fields: Sequence[PolyVectorField],
    x0,
    delta: Sequence[float],
    cfg: FlowConfig = FlowConfig(),
    n_samples: int = 200_000,
    h=None,
    cells_per_axis: int | None = None,
) -> float:
    """|B(x0; 2 delta)| / |B(x0; delta)|.

    With ``h`` given, the small ball is gridded at ``h`` and the large one at
    ``2h``; otherwise each grid is cut from its own bounding box with the same
    number of cells per axis.
    """
    small = _cloud(fields, x0, delta, cfg, n_samples)
    big = _cloud(fields, x0, [2 * d for d in delta], cfg, n_samples)
    if h is not None:
        h = np.asarray(h, dtype=float)
        return _grid(big, x0, h=2 * h).measure / _grid(small, x0, h=h).measure
    return _grid(big, x0, cells_per_axis).measure / _grid(small, x0, cells_per_axis).measure


@dataclass
class SetSample:
    grid: OccupancyGrid
    maps: Sequence[PolyMap]
    x0: tuple = ()
    image_cells: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if not self.image_cells:
            x0 = self.x0 or tuple(np.zeros(self.grid.dim))
            self.image_cells = [matched_image_cells(pi, self.grid.h, x0) for pi in self.maps]

    @property
    def measure(self) -> float:
        return self.grid.measure


def alphas(s: SetSample) -> list[float]:
    """``alpha_j = |Omega| / |pi_j(Omega)|``."""
    if s.grid.count == 0:
        raise ValueError("empty set")
    out = []
    for j, (pi, h) in enumerate(zip(s.maps, s.image_cells), start=1):
        proj = project_measure(s.grid, pi, h)
        if proj <= 0:
            raise ValueError(f"projection {j} has zero measure")
        out.append(s.measure / proj)
    return out


def weak_type_ratio(s: SetSample, b: Sequence, alpha: Sequence[float] | None = None) -> float:
    """``prod_j alpha_j^b_j / |Omega|``."""
    alpha = alphas(s) if alpha is None else alpha
    prod = 1.0
    for a, e in zip(alpha, b):
        prod *= a ** float(e)
    return prod / s.measure


@dataclass
class WitnessRow:
    delta0: float
    delta: tuple[float, ...]
    omega: float
    alpha: tuple[float, ...]
    ratio: float
    control_ratio: float | None = None


@dataclass
class WitnessTable:
    b: tuple[Fraction, ...]
    functional: SeparatingFunctional
    rows: list[WitnessRow]
    control_b: tuple[Fraction, ...] | None = None

    @property
    def increasing(self) -> bool:
        r = [row.ratio for row in self.rows]
        return all(b > a for a, b in zip(r, r[1:]))

    @property
    def growth(self) -> float:
        return self.rows[-1].ratio / self.rows[0].ratio

    @property
    def control_band(self) -> float | None:
        """Largest control ratio relative to the first one (bounded means no blow-up)."""
        if self.control_b is None:
            return None
        c = [row.control_ratio for row in self.rows]
        return max(c) / c[0]

    def csv(self) -> str:
        header = ["delta0"] + [f"delta{j + 1}" for j in range(len(self.b))] + ["omega"]
        header += [f"alpha{j + 1}" for j in range(len(self.b))] + ["ratio"]
        if self.control_b is not None:
            header.append("control_ratio")
        rows = []
        for r in self.rows:
            row = [r.delta0, *r.delta, r.omega, *r.alpha, r.ratio]
            if self.control_b is not None:
                row.append(r.control_ratio)
            rows.append(row)
        return to_csv(header, rows)


def necessity_witness(
    fields: Sequence[PolyVectorField],
    maps: Sequence[PolyMap],
    P: NewtonPolytope,
    target,
    delta0_list: Sequence[float],
    cfg: FlowConfig = FlowConfig(),
    n_samples: int = 200_000,
    cells_per_axis: int | None = None,
    control=None,
) -> WitnessTable:
    """Blow-up of alpha^b / |Omega| on balls with radii ``delta0 ** a``.

    ``target`` is an :class:`ExponentTuple` (must classify as not restricted
    weak-type) or a b-vector outside P.  ``control`` is an optional second
    exponent tuple or b-vector evaluated on the same sets.
    """
    b = _target_b(target, P, require_outside=True)
    control_b = _target_b(control, P, require_outside=False) if control is not None else None
    if len(maps) != len(fields):
        raise WitnessPrecondition("one projection per field is needed")
    sf = separating_functional(P, b)
    n = fields[0].n
    x0 = (0.0,) * n
    rows = []
    for d0 in delta0_list:
        delta = tuple(float(d0) ** float(a) for a in sf.a)
        cloud = _cloud(fields, x0, delta, cfg, n_samples)
        s = SetSample(_grid(cloud, x0, cells_per_axis), maps, x0)
        al = alphas(s)
        ratio = weak_type_ratio(s, b, al)
        cr = weak_type_ratio(s, control_b, al) if control_b is not None else None
        rows.append(WitnessRow(float(d0), delta, s.measure, tuple(al), ratio, cr))
    return WitnessTable(tuple(b), sf, rows, control_b)


def _target_b(target, P: NewtonPolytope, require_outside: bool) -> tuple[Fraction, ...]:
    if isinstance(target, ExponentTuple):
        if require_outside:
            verdict = classify(target, P).verdict
            if verdict is not Verdict.NOT_RESTRICTED_WEAK_TYPE:
                raise WitnessPrecondition(f"{target} classifies as {verdict.value}, not as a failure")
        b = b_of_p(target)
    else:
        b = tuple(Fraction(v) if not isinstance(v, float) else Fraction(repr(v)) for v in target)
    if require_outside and contains(P, b):
        raise WitnessPrecondition(f"b={fmt(b)} lies in the polytope")
    return tuple(b)


@dataclass
class BoxBallRow:
    js: tuple[int, ...]
    volume: float


def box_ball_scan(
    fields: Sequence[PolyVectorField],
    x0,
    delta,
    cfg: FlowConfig = FlowConfig(),
    n_samples: int = 50_000,
    cells_per_axis: int | None = None,
    h=None,
) -> list[BoxBallRow]:
    """|B_j(x0; delta)| for every sequence j in {1..k}^n, largest first.

    All sequences share one grid (``h``, or cells cut from the union bounding
    box) so the volumes are comparable.
    """
    k, n = len(fields), fields[0].n
    seqs = list(itertools.product(range(1, k + 1), repeat=n))
    clouds = [sample_box_ball(fields, x0, delta, js, cfg, n_samples) for js in seqs]
    if h is None:
        union = np.concatenate([c.points for c in clouds])
        h = relative_cells(union, cells_per_axis or default_cells_per_axis(n))
    rows = [BoxBallRow(js, _grid(c, x0, h=h).measure) for js, c in zip(seqs, clouds)]
    return sorted(rows, key=lambda r: (-r.volume, r.js))
