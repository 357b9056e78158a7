"""Smooth convex planar domains represented by their support function.

A domain is stored as samples of the support function ``h`` on the uniform
angular grid ``theta_j = 2*pi*j/N``.  Derivatives are spectral (real FFT), so
they are exact for band-limited ``h`` and reproducible bit-for-bit from the
stored samples.  The boundary point with outward normal ``n(theta)`` is

    x(theta) = h(theta) n(theta) + h'(theta) t(theta),

and the radius of curvature there is ``w = h + h''``; ``kappa = 1/w`` and
``ds = w dtheta``.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import IncompatibleSampling, NonConvex, NonPositive

DEFAULT_GRID = 256
# reject when min w <= CONVEXITY_RTOL * max w (guards kappa = 1/w)
CONVEXITY_RTOL = 1e-8


def _wavenumbers(n: int) -> np.ndarray:
    return np.arange(n // 2 + 1, dtype=float)


def spectral_derivatives(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """First and second derivative of periodic samples via the real FFT.

    The Nyquist coefficient is dropped for the odd (first) derivative and kept
    for the second, the usual convention for even-length grids.
    """
    n = h.shape[0]
    coef = np.fft.rfft(h)
    k = _wavenumbers(n)
    d1 = 1j * k * coef
    if n % 2 == 0:
        d1[-1] = 0.0
    d2 = -(k * k) * coef
    return np.fft.irfft(d1, n=n), np.fft.irfft(d2, n=n)


def trig_interpolate(samples: np.ndarray, angles, derivative: int = 0,
                     coef: np.ndarray | None = None) -> np.ndarray:
    """Evaluate the trigonometric interpolant of periodic grid samples.

    Exact for band-limited data; at grid angles it reproduces the samples and
    the derivative rule of :func:`spectral_derivatives`.
    """
    th = np.asarray(angles, dtype=float)
    n = samples.shape[0]
    if coef is None:
        coef = np.fft.rfft(samples)
    k = _wavenumbers(n)
    weights = np.full(k.shape, 2.0)
    weights[0] = 1.0
    if n % 2 == 0:
        weights[-1] = 1.0
    amp = weights * coef / n
    if derivative == 0:
        factor = np.ones_like(k, dtype=complex)
    elif derivative == 1:
        factor = 1j * k
        if n % 2 == 0:
            factor[-1] = 0.0
    elif derivative == 2:
        factor = -(k * k) + 0j
    else:
        raise ValueError("derivative must be 0, 1 or 2")
    phase = np.exp(1j * np.multiply.outer(th, k))
    return np.real(phase @ (amp * factor))


@dataclass(frozen=True, eq=False)
class ConvexDomain2D:
    """Convex body given by support-function samples on a uniform grid.

    Instances are immutable; derived arrays are computed on first access.
    Construction validates positivity of ``h`` and of ``w = h + h''``.
    """

    support_values: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        h = np.array(self.support_values, dtype=float)
        if h.ndim != 1 or h.size < 8:
            raise ValueError("support_values must be a 1-D array with at least 8 samples")
        if not np.all(np.isfinite(h)):
            raise ValueError("support_values must be finite")
        h.setflags(write=False)
        object.__setattr__(self, "support_values", h)
        if self.check:
            self.validate()

    def validate(self) -> None:
        h = self.support_values
        if h.min() <= 0.0:
            raise NonPositive(f"min h = {h.min():.3e} <= 0")
        w = self.radius_of_curvature
        if w.min() <= CONVEXITY_RTOL * abs(w.max()):
            raise NonConvex(f"min w = {w.min():.3e} (max w = {w.max():.3e})")

    @property
    def grid_size(self) -> int:
        return self.support_values.shape[0]

    @property
    def dtheta(self) -> float:
        return 2.0 * np.pi / self.grid_size

    @cached_property
    def angles(self) -> np.ndarray:
        return self.dtheta * np.arange(self.grid_size)

    @cached_property
    def _derivs(self) -> tuple[np.ndarray, np.ndarray]:
        return spectral_derivatives(self.support_values)

    @property
    def dh(self) -> np.ndarray:
        return self._derivs[0]

    @property
    def d2h(self) -> np.ndarray:
        return self._derivs[1]

    @cached_property
    def radius_of_curvature(self) -> np.ndarray:
        return self.support_values + self.d2h

    @property
    def curvature(self) -> np.ndarray:
        return 1.0 / self.radius_of_curvature

    @cached_property
    def fourier(self) -> np.ndarray:
        return np.fft.rfft(self.support_values)

    @cached_property
    def area(self) -> float:
        h, dh = self.support_values, self.dh
        return 0.5 * self.dtheta * float(np.sum(h * h - dh * dh))

    @cached_property
    def perimeter(self) -> float:
        return self.dtheta * float(np.sum(self.support_values))

    @property
    def kappa_bar(self) -> float:
        return 2.0 * np.pi / self.perimeter

    @cached_property
    def deficit(self) -> float:
        # L^2 - 4 pi A written as a spectral sum: no cancellation, and the
        # translation harmonics (k = 1) drop out identically.
        n = self.grid_size
        c = np.abs(self.fourier) ** 2
        k = _wavenumbers(n)
        body = c[1:-1] if n % 2 == 0 else c[1:]
        kk = k[1:-1] if n % 2 == 0 else k[1:]
        excess = 2.0 * np.sum((kk * kk - 1.0) * body)
        if n % 2 == 0:
            excess -= c[-1]
        excess *= 4.0 * np.pi ** 2 / n ** 2
        return max(float(excess) / (4.0 * np.pi * self.area), 0.0)

    @cached_property
    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update(str(self.grid_size).encode())
        digest.update(np.ascontiguousarray(self.support_values).tobytes())
        return digest.hexdigest()[:16]

    def points(self, angles: np.ndarray | None = None) -> np.ndarray:
        """Boundary points with the given outward-normal angles, shape (M, 2)."""
        if angles is None:
            h, dh, th = self.support_values, self.dh, self.angles
        else:
            th = np.asarray(angles, dtype=float)
            h, dh = self.evaluate(th, derivative=0), self.evaluate(th, derivative=1)
        c, s = np.cos(th), np.sin(th)
        return np.column_stack((h * c - dh * s, h * s + dh * c))

    def evaluate(self, angles, derivative: int = 0) -> np.ndarray:
        """Trigonometric interpolant of ``h`` (or a derivative) at arbitrary angles."""
        return trig_interpolate(self.support_values, angles, derivative, self.fourier)

    def with_support(self, h: np.ndarray, check: bool = True) -> "ConvexDomain2D":
        return ConvexDomain2D(h, check=check)

    def to_json(self) -> str:
        values = ", ".join(format(float(v), ".17g") for v in self.support_values)
        return f'{{"n": {self.grid_size}, "h": [{values}]}}'

    @classmethod
    def from_json(cls, text: str) -> "ConvexDomain2D":
        data = json.loads(text)
        h = np.asarray(data["h"], dtype=float)
        if h.shape[0] != int(data["n"]):
            raise ValueError("length of 'h' does not match 'n'")
        return cls(h)


@dataclass(frozen=True)
class BoundarySamples:
    """Struct-of-arrays view of boundary samples at uniform normal angles."""

    angles: np.ndarray
    points: np.ndarray
    normals: np.ndarray
    curvature: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return self.angles.shape[0]

    @property
    def support(self) -> np.ndarray:
        """``x . n`` at each sample (equals h(theta))."""
        return np.einsum("ij,ij->i", self.points, self.normals)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(np.asarray(values, dtype=float), self.weights))


@dataclass(frozen=True)
class GeometryReport:
    area: float
    perimeter: float
    kappa_bar: float
    deficit: float


def _check_grid(n: int) -> None:
    if n < 64 or n & (n - 1):
        raise ValueError(f"grid size must be a power of two >= 64, got {n}")


def from_fourier(cosine_coeffs: Sequence[float], sine_coeffs: Sequence[float] = (),
                 n: int = DEFAULT_GRID) -> ConvexDomain2D:
    """Sample ``h = sum a_m cos(m t) + b_m sin(m t)`` on an ``n``-point grid.

    ``cosine_coeffs[0]`` is the constant term; ``sine_coeffs[0]`` is ignored.
    """
    _check_grid(n)
    a = np.asarray(cosine_coeffs, dtype=float)
    b = np.asarray(sine_coeffs, dtype=float)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("Fourier coefficients must be finite")
    theta = 2.0 * np.pi * np.arange(n) / n
    h = np.zeros(n)
    for m, am in enumerate(a):
        if am:
            h += am * np.cos(m * theta)
    for m, bm in enumerate(b):
        if m and bm:
            h += bm * np.sin(m * theta)
    return ConvexDomain2D(h)


def disk(radius: float = 1.0, n: int = DEFAULT_GRID) -> ConvexDomain2D:
    return from_fourier([radius], [], n)


def ellipse_support(a: float, b: float, n: int = DEFAULT_GRID) -> ConvexDomain2D:
    """Ellipse with semi-axis ``a`` along x and ``b`` along y."""
    if a <= 0 or b <= 0:
        raise ValueError("semi-axes must be positive")
    _check_grid(n)
    theta = 2.0 * np.pi * np.arange(n) / n
    return ConvexDomain2D(np.sqrt((a * np.cos(theta)) ** 2 + (b * np.sin(theta)) ** 2))


def ellipse_with_area(aspect: float, area: float = np.pi, n: int = DEFAULT_GRID) -> ConvexDomain2D:
    b = np.sqrt(area / (np.pi * aspect))
    return ellipse_support(aspect * b, b, n)


def geometry_report(domain: ConvexDomain2D) -> GeometryReport:
    return GeometryReport(domain.area, domain.perimeter, domain.kappa_bar, domain.deficit)


def boundary_samples(domain: ConvexDomain2D, m: int | None = None) -> BoundarySamples:
    """Boundary samples at every ``N/m``-th grid angle (all of them by default)."""
    n = domain.grid_size
    m = n if m is None else int(m)
    if m <= 0 or n % m:
        raise IncompatibleSampling(f"{m} samples do not divide the grid of {n}")
    stride = n // m
    idx = np.arange(0, n, stride)
    theta = domain.angles[idx]
    normals = np.column_stack((np.cos(theta), np.sin(theta)))
    w = domain.radius_of_curvature[idx]
    return BoundarySamples(
        angles=theta,
        points=domain.points()[idx],
        normals=normals,
        curvature=1.0 / w,
        weights=w * (2.0 * np.pi / m),
    )


def rescale_to_area(domain: ConvexDomain2D, target_area: float) -> ConvexDomain2D:
    if target_area <= 0:
        raise ValueError("target area must be positive")
    s = np.sqrt(target_area / domain.area)
    return ConvexDomain2D(domain.support_values * s, check=False)


def recentred_support(domain: ConvexDomain2D) -> np.ndarray:
    """Support values with the first harmonics (a translation) removed."""
    coef = domain.fourier.copy()
    coef[1] = 0.0
    return np.fft.irfft(coef, n=domain.grid_size)


def ball_distance(domain: ConvexDomain2D) -> float:
    """Sup-distance of the recentred support function to the equal-area radius."""
    radius = np.sqrt(domain.area / np.pi)
    return float(np.max(np.abs(recentred_support(domain) - radius)))


def rotate(domain: ConvexDomain2D, shift: int) -> ConvexDomain2D:
    """Rotate by ``2*pi*shift/N`` (an exact grid shift)."""
    return ConvexDomain2D(np.roll(domain.support_values, shift))
