"""Closed-form Dirichlet spectra of disks and rectangles."""
from __future__ import annotations

import numpy as np

from .bessel import bessel_zeros
from .fem import Spectrum


def disk_eigen_table(radius: float, cutoff: float) -> list[tuple[float, int, int]]:
    """``(lambda, m, n)`` for every disk eigenvalue below ``cutoff`` (one entry per space)."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    upper = radius * np.sqrt(cutoff)
    table = []
    m = 0
    while True:
        zeros = bessel_zeros(m, upper=upper)
        if zeros.size == 0:
            break
        table.extend(((z / radius) ** 2, m, n + 1) for n, z in enumerate(zeros))
        m += 1
    table.sort()
    return table


def disk_eigenvalues(radius: float, cutoff: float) -> np.ndarray:
    vals = []
    for lam, m, _ in disk_eigen_table(radius, cutoff):
        vals.extend([lam] * (1 if m == 0 else 2))
    return np.array(vals)


def disk_oracle(radius: float, cutoff: float, n_boundary: int = 256) -> Spectrum:
    """Analytic disk spectrum below ``cutoff`` with exact boundary traces.

    For ``m >= 1`` the eigenspace is spanned by the cos/sin pair.  The normal
    derivative of the L2-normalised mode at radius ``R`` has magnitude
    ``sqrt(2/pi) j/R^2 |cos(m t)|`` (``sqrt(1/pi) j/R^2`` for ``m = 0``), so
    that ``int |d_n u|^2 ds = 2 lambda / R`` for every mode.
    """
    theta = 2.0 * np.pi * np.arange(n_boundary) / n_boundary
    lams, rows = [], []
    for lam, m, _ in disk_eigen_table(radius, cutoff):
        j = np.sqrt(lam) * radius
        if m == 0:
            lams.append(lam)
            rows.append(np.full(n_boundary, -j / (radius ** 2 * np.sqrt(np.pi))))
        else:
            amp = -np.sqrt(2.0 / np.pi) * j / radius ** 2
            lams.extend([lam, lam])
            rows.append(amp * np.cos(m * theta))
            rows.append(amp * np.sin(m * theta))
    traces = np.array(rows) if rows else np.zeros((0, n_boundary))
    return Spectrum(
        cutoff=float(cutoff),
        eigenvalues=np.array(lams),
        traces=traces,
        boundary_angles=theta,
        boundary_weights=np.full(n_boundary, radius * 2.0 * np.pi / n_boundary),
        boundary_curvature=np.full(n_boundary, 1.0 / radius),
        boundary_support=np.full(n_boundary, float(radius)),
        mesh_id=f"disk-oracle-R{radius:.17g}",
        domain_fingerprint="",
    )


def rectangle_eigenvalues(a: float, b: float, cutoff: float) -> np.ndarray:
    if a <= 0 or b <= 0:
        raise ValueError("side lengths must be positive")
    mmax = int(np.floor(a * np.sqrt(cutoff) / np.pi)) + 1
    nmax = int(np.floor(b * np.sqrt(cutoff) / np.pi)) + 1
    m = np.arange(1, mmax + 1)[:, None]
    n = np.arange(1, nmax + 1)[None, :]
    vals = (np.pi ** 2 * (m ** 2 / a ** 2 + n ** 2 / b ** 2)).ravel()
    return np.sort(vals[vals < cutoff])


def rectangle_oracle(a: float, b: float, cutoff: float) -> Spectrum:
    """Rectangle spectrum ``pi^2 (m^2/a^2 + n^2/b^2)`` below ``cutoff``; no traces."""
    vals = rectangle_eigenvalues(a, b, cutoff)
    empty = np.zeros(0)
    return Spectrum(float(cutoff), vals, np.zeros((vals.size, 0)), empty, empty, empty, empty,
                    mesh_id=f"rectangle-oracle-{a:.17g}x{b:.17g}")
