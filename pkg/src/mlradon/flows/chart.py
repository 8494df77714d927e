"""The exponential chart Phi(t) = exp(sum_j c_j t_j X_{w_j})(x0) and its pulled-back fields.

``c_j = K^-1 (K delta)^deg(w_j)``.  Y_w(t) solves ``DPhi(t) Y = K^-1 (K delta)^deg(w) X_w(Phi(t))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..words import Catalog, Word, enumerate_tuples, lambda_norm_many, lambda_vector, scale_factor, word_degree
from .integrate import FlowConfig, NumericalError, n_steps, rk4

FD_STEP = 1e-4
COND_LIMIT = 1e12


class SingularChart(NumericalError):
    def __init__(self, t, cond):
        super().__init__(f"DPhi is numerically singular at t={np.round(t, 6).tolist()} (cond {cond:.3g})")
        self.t = t


@dataclass
class ChartData:
    x0: np.ndarray
    delta: tuple[float, ...]
    K: float
    words: tuple[Word, ...]
    radius: float
    ts: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    Y: dict[Word, np.ndarray] = field(repr=False)
    catalog: Catalog = field(repr=False)

    def coefficients(self) -> np.ndarray:
        return chart_coefficients(self.catalog, self.words, self.delta, self.K)


def chart_coefficients(cat: Catalog, words, delta, K) -> np.ndarray:
    return np.array([scale_factor(delta, K, word_degree(w, cat.k)) / K for w in words])


def phi_map(cat: Catalog, x0, words, delta, K, ts: np.ndarray, cfg: FlowConfig = FlowConfig()) -> np.ndarray:
    """Phi at every row of ``ts``: the time-1 flow of the t-dependent linear combination."""
    ts = np.atleast_2d(np.asarray(ts, dtype=float))
    coef = chart_coefficients(cat, words, delta, K)
    wfields = [cat.word_field(w) for w in words]
    weights = ts * coef[None, :]

    def f(x):
        vals = np.stack([X.evaluate_many(x) for X in wfields], axis=1)  # (m, n_words, n)
        return np.einsum("mj,mjn->mn", weights, vals)

    steps = n_steps(1.0, cfg)
    x = np.tile(np.asarray(x0, dtype=float), (ts.shape[0], 1))
    return rk4(f, x, 1.0 / steps, steps, cfg.bound)


def phi_jacobian(cat, x0, words, delta, K, ts, cfg=FlowConfig(), step=FD_STEP) -> np.ndarray:
    """Central differences at steps h and h/2, combined by one Richardson level."""
    ts = np.atleast_2d(np.asarray(ts, dtype=float))
    m, n = ts.shape

    def central(h):
        offsets = []
        for i in range(n):
            e = np.zeros(n)
            e[i] = h
            offsets.append(ts + e)
            offsets.append(ts - e)
        vals = phi_map(cat, x0, words, delta, K, np.concatenate(offsets), cfg)
        vals = vals.reshape(n, 2, m, -1)
        return np.stack([(vals[i, 0] - vals[i, 1]) / (2 * h) for i in range(n)], axis=-1)

    d1, d2 = central(step), central(step / 2)
    return (4 * d2 - d1) / 3  # (m, n_out, n_t)


def sample_unit_ball(rng, m: int, n: int, radius: float) -> np.ndarray:
    g = rng.standard_normal((m, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.uniform(0, 1, m) ** (1.0 / n)
    return g * r[:, None]


def pullbacks(cat, chart_words, delta, K, phi, dphi, words) -> dict[Word, np.ndarray]:
    out = {}
    for w in words:
        c = scale_factor(delta, K, word_degree(w, cat.k)) / K
        rhs = c * cat.word_field(w).evaluate_many(phi)
        out[w] = np.linalg.solve(dphi, rhs[..., None])[..., 0]
    return out


def phi_chart(
    cat: Catalog,
    x0,
    delta: Sequence[float],
    K: float = 8.0,
    words: Sequence[Word] | None = None,
    cfg: FlowConfig = FlowConfig(),
    radius: float = 1.0,
    n_samples: int = 400,
    extra_words: Sequence[Word] = (),
) -> ChartData:
    """Sample the chart on the ball of the given radius (t = 0 is always the first sample)."""
    if words is None:
        words = lambda_vector(cat, x0, delta, K).argmax.words
    words = tuple(tuple(w) for w in words)
    if len(words) != cat.n:
        raise ValueError(f"a chart needs {cat.n} words, got {len(words)}")
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(3,)))
    ts = np.vstack([np.zeros((1, cat.n)), sample_unit_ball(rng, n_samples - 1, cat.n, radius)])
    phi = phi_map(cat, x0, words, delta, K, ts, cfg)
    dphi = phi_jacobian(cat, x0, words, delta, K, ts, cfg)
    conds = np.linalg.cond(dphi)
    bad = np.flatnonzero(~np.isfinite(conds) | (conds > COND_LIMIT))
    if len(bad):
        raise SingularChart(ts[bad[0]], float(conds[bad[0]]))
    req = list(dict.fromkeys(list(words) + [(j,) for j in range(1, cat.k + 1)] + [tuple(w) for w in extra_words]))
    Y = pullbacks(cat, words, delta, K, phi, dphi, req)
    return ChartData(np.asarray(x0, dtype=float), tuple(delta), float(K), words, radius, ts, phi, dphi, Y, cat)


@dataclass
class ChartReport:
    K: float
    y0_error: float
    y_dev_max: float
    y_dev_const: float
    det_min: float
    det_max: float
    lambda_ratio_min: float
    lambda_ratio_max: float
    volume_ratio_min: float
    volume_ratio_max: float
    passed: dict[str, bool]

    def lines(self) -> list[str]:
        return [
            f"K={self.K:g}",
            f"  |Y_wi(0)-e_i|max={self.y0_error:.3e}",
            f"  max|Y_wi(t)-e_i|={self.y_dev_max:.9g}  (ratio to |t|/K <= {self.y_dev_const:.9g})",
            f"  |det Y| in [{self.det_min:.9g}, {self.det_max:.9g}]",
            f"  |Lambda o Phi| / scaled |lambda_I o Phi| in [{self.lambda_ratio_min:.9g}, {self.lambda_ratio_max:.9g}]",
            f"  |Phi(E)| / (K^-n |Lambda(x0)| |E|) in [{self.volume_ratio_min:.9g}, {self.volume_ratio_max:.9g}]",
            "  " + " ".join(f"{k}={'PASS' if v else 'FAIL'}" for k, v in self.passed.items()),
        ]


def chart_diagnostics(
    chart: ChartData,
    n_boxes: int = 8,
    box_samples: int = 64,
    y0_tol: float = 1e-5,
    det_band: tuple[float, float] = (0.5, 2.0),
    cfg: FlowConfig = FlowConfig(),
) -> ChartReport:
    cat, n = chart.catalog, chart.catalog.n
    eye = np.eye(n)
    devs = np.stack([np.linalg.norm(chart.Y[w] - eye[i], axis=1) for i, w in enumerate(chart.words)], axis=1)
    y0_error = float(devs[0].max())
    dev_max = float(devs.max())
    tnorm = np.linalg.norm(chart.ts, axis=1)
    nz = tnorm > 0
    const = float((devs.max(axis=1)[nz] / (tnorm[nz] / chart.K)).max()) if nz.any() else 0.0

    dets = np.abs(np.linalg.det(np.stack([chart.Y[w] for w in chart.words], axis=-1)))

    tuples = enumerate_tuples(cat, tuple(float(v) for v in chart.x0))
    lam_norm = lambda_norm_many(cat, tuples, chart.phi, chart.delta, chart.K)
    chosen = [t for t in tuples if t.words == chart.words]
    if chosen:
        lam_i = lambda_norm_many(cat, chosen, chart.phi, chart.delta, chart.K)
    else:
        vals = np.stack([cat.word_field(w).evaluate_many(chart.phi) for w in chart.words], axis=-1)
        deg = [sum(c) for c in zip(*(word_degree(w, cat.k) for w in chart.words))]
        lam_i = scale_factor(chart.delta, chart.K, deg) * np.abs(np.linalg.det(vals))
    lam_ratio = lam_norm / lam_i

    # |Phi(E)| = integral over E of |det DPhi| (Phi is injective on the domain)
    lam0 = float(lambda_norm_many(cat, tuples, chart.x0[None, :], chart.delta, chart.K)[0])
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(4,)))
    half = chart.radius / (2 * np.sqrt(n))
    vol_ratios = []
    for _ in range(n_boxes):
        center = sample_unit_ball(rng, 1, n, chart.radius / 2)[0]
        width = rng.uniform(0.25, 1.0) * half
        u = center + rng.uniform(-width, width, size=(box_samples, n))
        dphi = phi_jacobian(cat, chart.x0, chart.words, chart.delta, chart.K, u, cfg)
        mean_det = float(np.abs(np.linalg.det(dphi)).mean())
        vol_ratios.append(mean_det / (chart.K ** (-n) * lam0))

    passed = {
        "Y0": y0_error <= y0_tol,
        "det": bool(dets.min() >= det_band[0] and dets.max() <= det_band[1]),
    }
    return ChartReport(
        chart.K,
        y0_error,
        dev_max,
        const,
        float(dets.min()),
        float(dets.max()),
        float(lam_ratio.min()),
        float(lam_ratio.max()),
        float(min(vol_ratios)),
        float(max(vol_ratios)),
        passed,
    )
