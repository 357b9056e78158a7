import math

import numpy as np
import pytest
from scipy.special import jn_zeros, jv

from rflab.errors import CutoffTooHigh, NotStarShaped
from rflab.geometry import ConvexDomain2D, disk, ellipse_with_area, from_fourier
from rflab.spectral import (SolverConfig, assemble, bessel_zeros, besselj, disk_eigen_table,
                            disk_eigenvalues, disk_oracle, mesh_domain, mesh_rectangle,
                            rectangle_eigenvalues, rectangle_oracle, solve_dirichlet)
from rflab.spectral.bessel import besselj_array, neumann_sum
from rflab.spectral.mesh import ring_radii


@pytest.mark.parametrize("m", [0, 1, 2, 5, 12])
@pytest.mark.parametrize("x", [0.3, 2.0, 7.9, 8.1, 15.0, 33.3])
def test_besselj_matches_scipy(m, x):
    assert besselj(m, x) == pytest.approx(jv(m, x), abs=1e-13)


def test_besselj_edge_cases():
    assert besselj(0, 0.0) == 1.0
    assert besselj(3, 0.0) == 0.0
    assert besselj(3, -2.0) == pytest.approx(-jv(3, 2.0), abs=1e-15)
    with pytest.raises(ValueError):
        besselj(-1, 1.0)
    assert np.allclose(besselj_array(1, [1.0, 2.0]), jv(1, [1.0, 2.0]), atol=1e-14)
    assert neumann_sum(12.5) == pytest.approx(1.0, abs=1e-13)


@pytest.mark.parametrize("m", [0, 1, 3, 8])
def test_bessel_zeros_match_scipy(m):
    assert np.allclose(bessel_zeros(m, count=6), jn_zeros(m, 6), atol=1e-11)
    up = bessel_zeros(m, upper=20.0)
    ref = jn_zeros(m, 10)
    assert np.allclose(up, ref[ref < 20.0], atol=1e-11)
    with pytest.raises(ValueError):
        bessel_zeros(m)


def test_disk_table_multiplicities():
    table = disk_eigen_table(1.0, 30.0)
    assert [(m, n) for _, m, n in table] == [(0, 1), (1, 1), (2, 1)]
    lam = disk_eigenvalues(1.0, 30.0)
    assert np.allclose(lam, np.array([2.404825557695773, 3.831705970207512, 3.831705970207512,
                                      5.135622301840683, 5.135622301840683]) ** 2, rtol=1e-12)
    assert np.allclose(disk_eigenvalues(2.0, 7.5), lam[lam < 30] / 4)


def test_disk_oracle_traces_satisfy_rellich_and_orthogonality():
    spec = disk_oracle(1.5, 40.0, n_boundary=128)
    assert np.allclose(spec.rellich(), 2 * spec.eigenvalues, rtol=1e-12)
    # the cos/sin partners of one eigenspace have orthogonal traces
    assert abs(np.dot(spec.traces[1] * spec.traces[2], spec.boundary_weights)) < 1e-10


def test_rectangle_oracle():
    assert np.allclose(rectangle_eigenvalues(math.pi, math.pi, 10.5), [2, 5, 5, 8, 10, 10],
                       atol=1e-13)
    assert np.allclose(rectangle_eigenvalues(1.0, 2.0, 30.0),
                       sorted(math.pi ** 2 * (m * m + n * n / 4) for m in (1,) for n in (1, 2)))
    assert rectangle_oracle(1, 1, 50).traces.shape == (3, 0)
    with pytest.raises(ValueError):
        rectangle_eigenvalues(0, 1, 10)


def test_mesh_counts_and_areas():
    cfg = SolverConfig(n_radial=8, n_angular=32)
    mesh = mesh_domain(disk(), cfg)
    assert mesh.nodes.shape[0] == 1 + 8 * 32
    assert mesh.triangles.shape[0] == 32 * (2 * 8 - 1)
    assert mesh.n_interior == 1 + 7 * 32
    assert np.all(mesh.triangle_areas > 0)
    # area of the inscribed 32-gon
    assert mesh.triangle_areas.sum() == pytest.approx(16 * math.sin(2 * math.pi / 32), rel=1e-12)
    r = ring_radii(8)
    assert r[-1] == 1.0 and np.all(np.diff(r) > 0)


def test_mesh_id_tracks_domain():
    cfg = SolverConfig(n_radial=8, n_angular=32)
    a = mesh_domain(disk(), cfg)
    b = mesh_domain(ellipse_with_area(1.2), cfg)
    assert a.mesh_id != b.mesh_id
    assert a.domain_fingerprint == disk().fingerprint


def test_mesh_with_interpolated_boundary():
    dom = ellipse_with_area(1.5, n=256)
    mesh = mesh_domain(dom, SolverConfig(n_radial=8, n_angular=96))
    pts = mesh.boundary_points
    a, b = math.sqrt(1.5), 1 / math.sqrt(1.5)
    assert np.allclose((pts[:, 0] / a) ** 2 + (pts[:, 1] / b) ** 2, 1.0, atol=1e-12)


def test_not_star_shaped_rejected():
    with pytest.raises(NotStarShaped):
        # swallowtail boundary of a non-convex support function
        h = from_fourier([1.0]).support_values + 0.3 * np.cos(5 * disk().angles)
        mesh_domain(ConvexDomain2D(h, check=False), SolverConfig(n_radial=8, n_angular=64))


def test_assembled_matrices():
    mesh = mesh_domain(disk(), SolverConfig(n_radial=8, n_angular=32))
    k, m, _ = assemble(mesh)
    assert abs(k - k.T).max() < 1e-12
    assert np.allclose(k @ np.ones(k.shape[0]), 0.0, atol=1e-12)
    assert m.sum() == pytest.approx(mesh.triangle_areas.sum(), rel=1e-12)


def test_cutoff_guard():
    mesh = mesh_domain(disk(), SolverConfig(n_radial=8, n_angular=32))
    with pytest.raises(CutoffTooHigh):
        solve_dirichlet(mesh, SolverConfig(n_radial=8, n_angular=32, lambda_max=500.0))


def test_disk_fe_close_to_bessel_and_upper_bounds():
    cfg = SolverConfig(24, 96, 60.0)
    spec = solve_dirichlet(mesh_domain(disk(), cfg), cfg)
    exact = np.sort(np.concatenate([jn_zeros(0, 3) ** 2] + [np.repeat(jn_zeros(m, 3) ** 2, 2)
                                                            for m in range(1, 6)]))[:10]
    fe = spec.eigenvalues[:10]
    # conforming elements on an inscribed polygon: eigenvalues are upper bounds
    assert np.all(fe > exact)
    assert np.max((fe - exact) / exact) < 0.01
    assert spec.max_residual < cfg.eig_tolerance


def test_dense_and_sparse_paths_agree(monkeypatch):
    from rflab.spectral import fem
    cfg = SolverConfig(16, 64, 20.0)
    mesh = mesh_domain(ellipse_with_area(1.3), cfg)
    dense = solve_dirichlet(mesh, cfg)
    monkeypatch.setattr(fem, "DENSE_LIMIT", 0)
    sparse = solve_dirichlet(mesh, cfg)
    assert np.allclose(dense.eigenvalues, sparse.eigenvalues, rtol=1e-10)
    assert np.allclose(dense.boundary_integrals(), sparse.boundary_integrals(), rtol=1e-7)


def test_rectangle_fe_converges_to_closed_form():
    exact = np.array([2.0, 5.0, 5.0, 8.0, 10.0, 10.0])
    errs = []
    for n in (24, 48):
        vals = solve_dirichlet(mesh_rectangle(math.pi, math.pi, n, n),
                               SolverConfig(lambda_max=10.5)).eigenvalues[:6]
        errs.append(np.abs(vals - exact).sum())
    assert 3.0 < errs[0] / errs[1] < 5.0


def test_rellich_on_fe_disk():
    cfg = SolverConfig(24, 96, 40.0)
    spec = solve_dirichlet(mesh_domain(disk(), cfg), cfg)
    assert np.allclose(spec.rellich() / (2 * spec.eigenvalues), 1.0, atol=0.02)


def test_spectrum_truncation_and_serialisation():
    spec = disk_oracle(1.0, 40.0, 64)
    small = spec.truncated(20.0)
    assert small.cutoff == 20.0 and len(small) == 3
    d = spec.to_dict()
    assert set(d) == {"lambda_max", "eigenvalues", "boundary_angles", "traces"}
    assert len(d["traces"]) == len(spec)


def _mathieu_ellipse_eigenvalues(a, b, count):
    """Dirichlet eigenvalues of an ellipse from zeros of radial Mathieu functions."""
    from scipy.optimize import brentq
    from scipy.special import mathieu_modcem1, mathieu_modsem1
    c = math.sqrt(a * a - b * b)
    xi0 = math.atanh(b / a)
    vals = []
    for m in range(4):
        for fn in ((mathieu_modcem1,) if m == 0 else (mathieu_modcem1, mathieu_modsem1)):
            qs = np.linspace(0.05, 40.0, 1600)
            f = np.array([fn(m, q, xi0)[0] for q in qs])
            for i in np.nonzero(f[:-1] * f[1:] < 0)[0]:
                q = brentq(lambda s: fn(m, s, xi0)[0], qs[i], qs[i + 1])
                vals.append(4 * q / c ** 2)
    return np.sort(vals)[:count]


def test_ellipse_fe_against_mathieu_oracle():
    dom = ellipse_with_area(1.5)
    exact = _mathieu_ellipse_eigenvalues(math.sqrt(1.5), 1 / math.sqrt(1.5), 4)
    cfg = SolverConfig(48, 192, 25.0)
    fe = solve_dirichlet(mesh_domain(dom, cfg), cfg).eigenvalues[:4]
    assert np.all(fe > exact)
    assert np.max((fe - exact) / exact) < 0.005
