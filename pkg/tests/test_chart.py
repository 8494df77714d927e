import numpy as np
import pytest

from mlradon.flows import FlowConfig, phi_chart, chart_diagnostics
from mlradon.flows.chart import SingularChart, phi_jacobian, phi_map
from mlradon.specfile import load_spec
from mlradon.symalg import PolyVectorField
from mlradon.words import Catalog

CFG = FlowConfig()


@pytest.fixture(scope="module", params=["lw2", "tao-wright", "heisenberg"])
def spec(request):
    return load_spec(request.param)


def test_phi_at_zero_is_base_point(spec):
    cat = spec.catalog()
    x0 = (0.1,) * spec.n
    chart = phi_chart(cat, x0, (0.05, 0.05), 8, n_samples=20)
    np.testing.assert_allclose(chart.phi[0], x0, atol=1e-15)


def test_lw_chart_is_linear():
    cat = load_spec("lw2").catalog()
    ts = np.array([[0.3, -0.5], [1.0, 0.0], [-0.2, 0.9]])
    got = phi_map(cat, (0.0, 0.0), [(1,), (2,)], (0.2, 0.1), 1.0, ts)
    np.testing.assert_allclose(got, ts * [0.2, 0.1], atol=1e-14)


def test_jacobian_matches_closed_form():
    # Heisenberg chart with words (1),(2),(1,2): Phi(t) = (a t1, b t2, c t3 + a b t1 t2 / 2)
    cat = load_spec("heisenberg").catalog()
    delta, K = (0.05, 0.05), 8.0
    a, b, c = 0.05, 0.05, K * 0.05 * 0.05
    t = np.array([[0.3, -0.4, 0.2]])
    got = phi_jacobian(cat, (0, 0, 0), [(1,), (2,), (1, 2)], delta, K, t)[0]
    want = np.array([[a, 0, 0], [0, b, 0], [a * b * t[0, 1] / 2, a * b * t[0, 0] / 2, c]])
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_estimates_at_k8(spec):
    rep = chart_diagnostics(phi_chart(spec.catalog(), (0,) * spec.n, (0.05, 0.05), 8, n_samples=200))
    assert rep.y0_error <= 1e-5
    assert 0.5 <= rep.det_min <= rep.det_max <= 2
    assert rep.passed == {"Y0": True, "det": True}
    assert 0.5 <= rep.volume_ratio_min <= rep.volume_ratio_max <= 2


def test_lw_ratios_are_one():
    rep = chart_diagnostics(phi_chart(load_spec("lw2").catalog(), (0, 0), (0.2, 0.1), 8, n_samples=50))
    assert rep.det_min == pytest.approx(1, abs=1e-9) and rep.det_max == pytest.approx(1, abs=1e-9)
    assert rep.lambda_ratio_min == pytest.approx(1) and rep.volume_ratio_max == pytest.approx(1)


def test_deviation_shrinks_like_one_over_k():
    cat = load_spec("heisenberg").catalog()
    devs = [
        chart_diagnostics(phi_chart(cat, (0, 0, 0), (0.05, 0.05), K, n_samples=100), n_boxes=2).y_dev_max
        for K in (4, 8, 16, 32)
    ]
    assert all(b < a for a, b in zip(devs, devs[1:]))
    np.testing.assert_allclose(np.array(devs) * [4, 8, 16, 32], devs[0] * 4, rtol=0.05)


def test_singular_chart_is_reported():
    # a word tuple that is dependent at the base point
    cat = Catalog([PolyVectorField.from_strings(["1", "0"]), PolyVectorField.from_strings(["1", "x1"])])
    with pytest.raises(SingularChart):
        phi_chart(cat, (0, 0), (0.1, 0.1), 8, words=[(1,), (2,)], n_samples=10)


def test_wrong_word_count():
    with pytest.raises(ValueError):
        phi_chart(load_spec("lw2").catalog(), (0, 0), (0.1, 0.1), 8, words=[(1,)])


def test_chart_is_seeded():
    cat = load_spec("tao-wright").catalog()
    a = phi_chart(cat, (0, 0), (0.05, 0.05), 8, cfg=FlowConfig(seed=1), n_samples=30)
    b = phi_chart(cat, (0, 0), (0.05, 0.05), 8, cfg=FlowConfig(seed=1), n_samples=30)
    assert a.ts.tobytes() == b.ts.tobytes() and a.phi.tobytes() == b.phi.tobytes()
