"""Spectral functionals built from a Dirichlet spectrum and its boundary traces.

Riesz means, the counting function, the boundary spectral density
``Q(x) = sum_{lambda_k < cutoff} |d_n u_k(x)|^2``, the curvature correlation
integral, the boundary trace functional, the Berezin-Li-Yau and Polya
constants, Cesaro averages, the two-term boundary Weyl fit and the Hadamard
shape-derivative check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (CutoffExceeded, DegenerateFit, GeometryMismatch,
                     InsufficientSpectrum)
from .geometry import ConvexDomain2D, trig_interpolate
from .spectral.fem import Spectrum, solve_dirichlet
from .spectral.mesh import SolverConfig, mesh_domain

GROUP_RTOL = 1e-6


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def classical_riesz_constant(d: int = 2) -> float:
    """``L_d^cl = omega_d / (2 pi)^d * 2 / (d + 2)``; ``1/(8 pi)`` in the plane."""
    return unit_ball_volume(d) / (2 * math.pi) ** d * 2.0 / (d + 2)


def polya_constant(d: int = 2) -> float:
    """``C_d = (2 pi)^2 omega_d^(-2/d)``; ``4 pi`` in the plane."""
    return (2 * math.pi) ** 2 * unit_ball_volume(d) ** (-2.0 / d)


def _check_cutoff(spectrum: Spectrum, cutoff: float) -> None:
    if cutoff > spectrum.cutoff:
        raise CutoffExceeded(f"cutoff {cutoff:g} exceeds spectrum cutoff {spectrum.cutoff:g}")


def eigenspace_groups(eigenvalues: np.ndarray, rtol: float = GROUP_RTOL) -> list[np.ndarray]:
    """Indices of (numerically) repeated eigenvalues, in ascending order."""
    groups: list[list[int]] = []
    for i, lam in enumerate(eigenvalues):
        if groups and abs(lam - eigenvalues[groups[-1][0]]) <= rtol * abs(lam):
            groups[-1].append(i)
        else:
            groups.append([i])
    return [np.array(g) for g in groups]


def _below(spectrum: Spectrum, cutoff: float) -> np.ndarray:
    """Mode mask for ``lambda < cutoff``, keeping eigenspace groups whole."""
    mask = np.zeros(len(spectrum), dtype=bool)
    for g in eigenspace_groups(spectrum.eigenvalues):
        if spectrum.eigenvalues[g].mean() < cutoff:
            mask[g] = True
    return mask


def riesz_mean(spectrum: Spectrum, cutoff: float) -> float:
    _check_cutoff(spectrum, cutoff)
    lam = spectrum.eigenvalues
    return float(np.sum(np.maximum(cutoff - lam, 0.0)))


def counting(spectrum: Spectrum, cutoff: float) -> int:
    _check_cutoff(spectrum, cutoff)
    return int(np.count_nonzero(spectrum.eigenvalues < cutoff))


def integrated_counting(eigenvalues: Sequence[float], cutoff: float) -> float:
    """``int_0^cutoff N(t) dt`` summed interval by interval between eigenvalues."""
    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    lam = lam[lam < cutoff]
    edges = np.append(lam, cutoff)
    # N = j on [lambda_j, lambda_{j+1})
    return float(np.sum(np.arange(1, lam.size + 1) * np.diff(edges)))


@dataclass(frozen=True)
class RieszCurve:
    cutoffs: np.ndarray
    riesz: np.ndarray
    counts: np.ndarray
    integrated_counts: np.ndarray


def riesz_curve(spectrum: Spectrum, grid: Sequence[float]) -> RieszCurve:
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) < 0):
        raise ValueError("grid must be ascending")
    if grid.size:
        _check_cutoff(spectrum, float(grid.max()))
    lam = spectrum.eigenvalues
    riesz = np.array([np.sum(np.maximum(c - lam, 0.0)) for c in grid])
    counts = np.array([np.count_nonzero(lam < c) for c in grid])
    integ = np.array([integrated_counting(lam, c) for c in grid])
    return RieszCurve(grid, riesz, counts, integ)


def q_lambda(spectrum: Spectrum, cutoff: float) -> np.ndarray:
    """Boundary spectral density at the boundary samples."""
    _check_cutoff(spectrum, cutoff)
    mask = _below(spectrum, cutoff)
    return np.sum(spectrum.traces[mask] ** 2, axis=0)


@dataclass(frozen=True)
class CorrelationReport:
    cutoff: float
    correlation: float
    trace_functional: float
    q_bar: float
    kappa_bar: float
    f_samples: np.ndarray
    g_samples: np.ndarray
    correlation_centered: float
    weights: np.ndarray

    @property
    def dR_dt_boundary(self) -> float:
        return -self.correlation

    @property
    def sample_correlation(self) -> float:
        """Weighted Pearson correlation between ``g`` and ``f`` on the boundary."""
        w = self.weights
        f, g = self.f_samples, self.g_samples
        den = math.sqrt(np.dot(w, f * f) * np.dot(w, g * g))
        return float(np.dot(w, f * g) / den) if den > 0 else 0.0


def _check_geometry(domain: ConvexDomain2D | None, spectrum: Spectrum) -> None:
    if domain is None or not spectrum.domain_fingerprint:
        return
    if domain.fingerprint != spectrum.domain_fingerprint:
        raise GeometryMismatch(
            f"spectrum was computed on {spectrum.domain_fingerprint}, not {domain.fingerprint}")


def correlation_integral(domain: ConvexDomain2D | None, spectrum: Spectrum,
                         cutoff: float) -> CorrelationReport:
    """``I = int Q (kappa - kappa_bar) ds`` by the spectrum's boundary quadrature.

    ``kappa_bar`` uses the quadrature perimeter so that ``int (kappa -
    kappa_bar) ds`` vanishes identically under the same rule.
    """
    _check_geometry(domain, spectrum)
    q = q_lambda(spectrum, cutoff)
    w = spectrum.boundary_weights
    kappa = spectrum.boundary_curvature
    perimeter = float(np.sum(w))
    kbar = float(np.dot(kappa, w)) / perimeter
    f = kappa - kbar
    trace = float(np.dot(q, w))
    qbar = trace / perimeter
    g = q - qbar
    return CorrelationReport(
        cutoff=float(cutoff),
        correlation=float(np.dot(q * f, w)),
        trace_functional=trace,
        q_bar=qbar,
        kappa_bar=kbar,
        f_samples=f,
        g_samples=g,
        correlation_centered=float(np.dot(g * f, w)),
        weights=w,
    )


def trace_functional(domain: ConvexDomain2D | None, spectrum: Spectrum, cutoff: float) -> float:
    """``F = int Q ds``."""
    _check_geometry(domain, spectrum)
    return float(np.dot(q_lambda(spectrum, cutoff), spectrum.boundary_weights))


@dataclass(frozen=True)
class BLYCheck:
    riesz: float
    bound: float
    gap: float


def bly_bound(area: float, cutoff: float) -> float:
    return classical_riesz_constant(2) * area * cutoff ** 2


def bly_check(domain: ConvexDomain2D | float, spectrum: Spectrum, cutoff: float) -> BLYCheck:
    area = domain if isinstance(domain, (int, float)) else domain.area
    r = riesz_mean(spectrum, cutoff)
    bound = bly_bound(area, cutoff)
    return BLYCheck(r, bound, bound - r)


def polya_classical(k: int, area: float) -> float:
    """Classical eigenvalue ``C_2 k / |Omega|``."""
    if k < 1 or area <= 0:
        raise ValueError("need k >= 1 and area > 0")
    return polya_constant(2) * k / area


@dataclass(frozen=True)
class CesaroReport:
    k: int
    average: float
    sup_value: float
    sup_grid: float
    argmax: float
    identity_error: float
    plateau_spread: float
    ball_average: float | None = None
    classical: float | None = None


def cesaro_average(eigenvalues: Sequence[float], k: int) -> float:
    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    if lam.size < k:
        raise InsufficientSpectrum(f"need {k} eigenvalues, have {lam.size}")
    return float(np.mean(lam[:k]))


def cesaro(spectrum: Spectrum | Sequence[float], k: int, grid: Sequence[float] | None = None,
           ball_eigenvalues: Sequence[float] | None = None, area: float | None = None) -> CesaroReport:
    """Cesaro average ``A(k)`` and its representation ``sup (L - R_L / k)``.

    The supremum is evaluated on ``grid`` (default: 400 points up to
    ``lambda_{k+1}``) and exactly at ``L = lambda_k``; ``plateau_spread`` is
    the variation of ``L - R_L/k`` over ``[lambda_k, lambda_{k+1}]``.
    """
    lam = np.sort(np.asarray(getattr(spectrum, "eigenvalues", spectrum), dtype=float))
    if k < 1:
        raise ValueError("k must be >= 1")
    if lam.size < k + 1:
        raise InsufficientSpectrum(f"need {k + 1} eigenvalues for k = {k}, have {lam.size}")
    avg = float(np.mean(lam[:k]))

    def phi(c):
        return c - np.sum(np.maximum(c - lam, 0.0)) / k

    if grid is None:
        grid = np.linspace(0.0, lam[k], 400)
    grid_vals = np.array([phi(c) for c in grid])
    at_lk = phi(lam[k - 1])
    sup_value = max(float(grid_vals.max()), at_lk)
    plateau = np.linspace(lam[k - 1], lam[k], 17)
    pv = np.array([phi(c) for c in plateau])
    ball = None
    if ball_eigenvalues is not None:
        ball = cesaro_average(ball_eigenvalues, k)
    return CesaroReport(
        k=k,
        average=avg,
        sup_value=sup_value,
        sup_grid=float(grid_vals.max()),
        argmax=float(lam[k - 1]),
        identity_error=abs(at_lk - avg),
        plateau_spread=float(pv.max() - pv.min()),
        ball_average=ball,
        classical=polya_classical(k, area) if area is not None else None,
    )


@dataclass(frozen=True)
class WeylFit:
    a2: float
    b2: float | None
    residuals: np.ndarray
    cutoffs: np.ndarray
    correlation_top: float | None
    correlations: np.ndarray | None


def weyl_fit(domain: ConvexDomain2D | None, spectrum: Spectrum, cutoffs: Sequence[float],
             with_curvature: bool = True) -> WeylFit:
    """Least-squares fit ``Q(x, L) ~ a2 L^2 + b2 kappa(x) L^(3/2)`` over samples and cutoffs.

    Rows are weighted by ``sqrt(ds)`` so the fit is a boundary L2 fit.
    Raises :class:`DegenerateFit` when the curvature term is requested on a
    boundary of constant curvature.
    """
    cutoffs = np.asarray(cutoffs, dtype=float)
    if cutoffs.size < 3:
        raise ValueError("need at least three cutoffs")
    _check_geometry(domain, spectrum)
    kappa = spectrum.boundary_curvature
    w = spectrum.boundary_weights
    constant_kappa = np.ptp(kappa) <= 1e-8 * np.abs(kappa).max()
    if with_curvature and constant_kappa:
        raise DegenerateFit("curvature is constant on the boundary; b2 is not identifiable")
    sw = np.sqrt(w)
    rows, rhs = [], []
    for c in cutoffs:
        q = q_lambda(spectrum, c)
        cols = [np.full_like(kappa, c ** 2)]
        if with_curvature:
            cols.append(kappa * c ** 1.5)
        rows.append(np.column_stack(cols) * sw[:, None])
        rhs.append(q * sw)
    design = np.vstack(rows)
    target = np.concatenate(rhs)
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    residuals = (target - design @ coef).reshape(cutoffs.size, -1) / sw
    corr = None
    corrs = None
    if not constant_kappa:
        corrs = np.array([correlation_integral(None, spectrum, c).sample_correlation
                          for c in cutoffs])
        corr = float(corrs[-1])
    return WeylFit(
        a2=float(coef[0]),
        b2=float(coef[1]) if with_curvature else None,
        residuals=residuals,
        cutoffs=cutoffs,
        correlation_top=corr,
        correlations=corrs,
    )


@dataclass(frozen=True)
class HadamardGroup:
    indices: tuple[int, ...]
    eigenvalue: float
    predicted: float
    fd: float
    fd_half: float
    richardson: float

    @property
    def relative_error(self) -> float:
        scale = max(abs(self.richardson), abs(self.predicted))
        return abs(self.predicted - self.richardson) / scale if scale > 0 else 0.0

    @property
    def richardson_gap(self) -> float:
        """Relative change between the two step sizes."""
        scale = max(abs(self.fd_half), 1e-300)
        return abs(self.fd - self.fd_half) / scale


def _velocity_on(velocity, angles: np.ndarray) -> np.ndarray:
    if callable(velocity):
        return np.asarray(velocity(angles), dtype=float) * np.ones_like(angles)
    return np.asarray(velocity, dtype=float)


def hadamard_check(domain: ConvexDomain2D, spectrum: Spectrum,
                   velocity: Callable[[np.ndarray], np.ndarray] | np.ndarray,
                   dt: float, cfg: SolverConfig, n_groups: int | None = None) -> list[HadamardGroup]:
    """Compare centred differences of eigenvalues with ``-int |d_n u|^2 V ds``.

    ``velocity`` is a normal speed, given as a function of the normal angle
    or as samples on the domain grid.  Perturbed domains have support
    function ``h +/- dt V`` (and ``+/- dt/2 V`` for the Richardson pair) and
    are meshed with the same resolution; eigenvalues are compared group-wise.
    """
    _check_geometry(domain, spectrum)
    v_grid = _velocity_on(velocity, domain.angles)
    if callable(velocity):
        v_bdry = _velocity_on(velocity, spectrum.boundary_angles)
    else:
        v_bdry = trig_interpolate(v_grid, spectrum.boundary_angles)
    groups = eigenspace_groups(spectrum.eigenvalues)
    if n_groups is not None:
        groups = groups[:n_groups]
    count = int(max(g.max() for g in groups)) + 1 if groups else 0

    def eig(step):
        pert = domain.with_support(domain.support_values + step * v_grid)
        vals = solve_dirichlet(mesh_domain(pert, cfg), cfg).eigenvalues
        if vals.size < count:
            raise InsufficientSpectrum("perturbed spectrum lost modes below the cutoff")
        return vals

    lp, lm = eig(dt), eig(-dt)
    lph, lmh = eig(0.5 * dt), eig(-0.5 * dt)
    integrals = spectrum.boundary_integrals(v_bdry)
    out = []
    for g in groups:
        fd = float(np.sum(lp[g] - lm[g]) / (2 * dt))
        fd_half = float(np.sum(lph[g] - lmh[g]) / dt)
        out.append(HadamardGroup(
            indices=tuple(int(i) for i in g),
            eigenvalue=float(spectrum.eigenvalues[g].mean()),
            predicted=-float(np.sum(integrals[g])),
            fd=fd,
            fd_half=fd_half,
            richardson=(4.0 * fd_half - fd) / 3.0,
        ))
    return out
