import math

import numpy as np
import pytest
from scipy.special import jn_zeros

from rflab import riesz
from rflab.errors import (CutoffExceeded, DegenerateFit, GeometryMismatch,
                          InsufficientSpectrum)
from rflab.geometry import disk, ellipse_with_area
from rflab.spectral import SolverConfig, disk_oracle, mesh_domain, solve_dirichlet


@pytest.fixture(scope="module")
def unit_disk():
    return disk_oracle(1.0, 60.0, 256)


@pytest.fixture(scope="module")
def ellipse_fe():
    dom = ellipse_with_area(1.5)
    cfg = SolverConfig(32, 128, 40.0)
    return dom, solve_dirichlet(mesh_domain(dom, cfg), cfg)


def test_constants():
    assert riesz.unit_ball_volume(2) == pytest.approx(math.pi)
    assert riesz.unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)
    assert riesz.classical_riesz_constant(2) == pytest.approx(1 / (8 * math.pi))
    assert riesz.polya_constant(2) == pytest.approx(4 * math.pi)


def test_riesz_mean_disk_value(unit_disk):
    j = np.concatenate([jn_zeros(0, 1), np.repeat(jn_zeros(1, 1), 2), np.repeat(jn_zeros(2, 1), 2)])
    expect = float(np.sum(30.0 - j ** 2))
    assert riesz.riesz_mean(unit_disk, 30.0) == pytest.approx(expect, rel=1e-12)
    assert riesz.riesz_mean(unit_disk, 30.0) == pytest.approx(62.10, abs=0.01)
    assert riesz.counting(unit_disk, 30.0) == 5
    with pytest.raises(CutoffExceeded):
        riesz.riesz_mean(unit_disk, 61.0)


def test_integrated_counting_equals_riesz(unit_disk):
    for c in (3.0, 14.68, 20.0, 47.3):
        assert riesz.integrated_counting(unit_disk.eigenvalues, c) == pytest.approx(
            riesz.riesz_mean(unit_disk, c), rel=1e-13, abs=1e-13)
    curve = riesz.riesz_curve(unit_disk, [10.0, 20.0])
    assert np.allclose(curve.riesz, curve.integrated_counts)


def test_eigenspace_groups():
    groups = riesz.eigenspace_groups(np.array([1.0, 2.0, 2.0 + 1e-9, 3.0]))
    assert [list(g) for g in groups] == [[0], [1, 2], [3]]


def test_q_and_trace_on_disk_oracle(unit_disk):
    q = riesz.q_lambda(unit_disk, 30.0)
    lam = unit_disk.eigenvalues[unit_disk.eigenvalues < 30]
    # rotational symmetry: Q is constant and equals sum 2 lambda / (2 pi R)
    assert np.allclose(q, np.sum(2 * lam) / (2 * math.pi), rtol=1e-12)
    f = riesz.trace_functional(None, unit_disk, 30.0)
    assert f == pytest.approx(2 * lam.sum(), rel=1e-12)
    assert f == pytest.approx(176.2, rel=0.003)
    rep = riesz.correlation_integral(None, unit_disk, 30.0)
    assert rep.correlation == pytest.approx(0.0, abs=1e-12)
    assert rep.dR_dt_boundary == -rep.correlation


def test_geometry_mismatch(ellipse_fe):
    _, spec = ellipse_fe
    with pytest.raises(GeometryMismatch):
        riesz.correlation_integral(disk(), spec, 20.0)


def test_correlation_centering(ellipse_fe):
    dom, spec = ellipse_fe
    rep = riesz.correlation_integral(dom, spec, 35.0)
    # int f ds = 0 under the same quadrature, so centering Q changes nothing
    assert rep.correlation == pytest.approx(rep.correlation_centered, rel=1e-9, abs=1e-9)
    assert np.dot(rep.f_samples, rep.weights) == pytest.approx(0.0, abs=1e-12)
    assert -1.0 <= rep.sample_correlation <= 1.0


def test_bly(unit_disk):
    chk = riesz.bly_check(math.pi, unit_disk, 30.0)
    assert chk.bound == pytest.approx(112.5)
    assert chk.gap > 0
    assert riesz.bly_bound(2.0, 10.0) == pytest.approx(200 / (8 * math.pi))


def test_cesaro_identity_and_values(unit_disk):
    rep = riesz.cesaro(unit_disk, 3, ball_eigenvalues=unit_disk.eigenvalues, area=math.pi)
    assert rep.average == pytest.approx(11.716, abs=5e-4)
    assert rep.identity_error < 1e-13
    assert rep.sup_value == pytest.approx(rep.average, rel=1e-13)
    assert rep.sup_grid <= rep.sup_value + 1e-12
    assert rep.plateau_spread == pytest.approx(0.0, abs=1e-12)
    assert rep.classical == pytest.approx(12.0)
    assert unit_disk.eigenvalues[0] >= riesz.polya_classical(1, math.pi)
    with pytest.raises(InsufficientSpectrum):
        riesz.cesaro([1.0, 2.0], 2)
    with pytest.raises(ValueError):
        riesz.polya_classical(0, 1.0)


def test_weyl_fit_on_disk_is_degenerate(unit_disk):
    with pytest.raises(DegenerateFit):
        riesz.weyl_fit(None, unit_disk, [20, 40, 60])
    fit = riesz.weyl_fit(None, unit_disk, [20, 40, 60], with_curvature=False)
    assert fit.b2 is None and fit.a2 > 0
    with pytest.raises(ValueError):
        riesz.weyl_fit(None, unit_disk, [20, 40])


def test_weyl_fit_recovers_synthetic_coefficients():
    # build a fake spectrum whose Q follows an exact two-term law at the fit cutoffs
    from rflab.spectral.fem import Spectrum
    n = 64
    th = 2 * np.pi * np.arange(n) / n
    kappa = 1 + 0.3 * np.cos(2 * th)
    cutoffs = [10.0, 20.0, 30.0]
    a2, b2 = 0.04, -0.02
    q = [a2 * c ** 2 + b2 * kappa * c ** 1.5 for c in cutoffs]
    # three modes, eigenvalues between cutoffs, traces chosen so partial sums of squares match
    sq = [q[0], q[1] - q[0], q[2] - q[1]]
    traces = np.sqrt(np.array(sq))
    spec = Spectrum(31.0, np.array([5.0, 15.0, 25.0]), traces, th, np.full(n, 2 * np.pi / n),
                    kappa, np.ones(n))
    fit = riesz.weyl_fit(None, spec, cutoffs)
    assert fit.a2 == pytest.approx(a2, rel=1e-10)
    assert fit.b2 == pytest.approx(b2, rel=1e-10)


def test_hadamard_disk_dilation():
    dom = disk()
    cfg = SolverConfig(16, 64, 20.0)
    spec = solve_dirichlet(mesh_domain(dom, cfg), cfg)
    groups = riesz.hadamard_check(dom, spec, lambda th: np.ones_like(th), 1e-3, cfg, 2)
    for g in groups:
        assert g.relative_error < 0.05
        # exact scaling law: d lambda / dt = -2 lambda for h = 1 + t
        assert g.richardson == pytest.approx(-2 * g.eigenvalue * len(g.indices), rel=1e-3)
