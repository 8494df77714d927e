"""Numerical geometry: flows, ball sampling, charts, and the volume experiments."""

from .ball import (
    BallSpec,
    OccupancyGrid,
    PointCloud,
    ball_volume,
    nondegenerate,
    project_measure,
    relative_cells,
    sample_ball,
    sample_box_ball,
)
from .chart import ChartData, ChartReport, phi_chart, chart_diagnostics
from .experiments import (
    SetSample,
    alphas,
    box_ball_scan,
    doubling_ratio,
    loglog_slope,
    necessity_witness,
    volume_vs_lambda,
    weak_type_ratio,
)
from .integrate import FlowConfig, FlowDivergence, NumericalError, flow, flow_many
