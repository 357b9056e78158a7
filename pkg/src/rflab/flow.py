"""Volume-preserving curve-shortening flow on support functions.

In the support-function frame the normal speed at fixed normal angle is
``dh/dt``, so the flow ``V = -(kappa - kappa_bar)`` reads

    dh/dt = -1/(h + h'') + 2*pi/L.

It is integrated by explicit Euler with the curvature-adaptive step
``dt = dt_safety * dtheta^2 * min(w)^2 / 2``; after each step the support
function is rescaled to the initial area.
"""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvexityLost
from .geometry import CONVEXITY_RTOL, ConvexDomain2D, ball_distance, rescale_to_area

log = logging.getLogger(__name__)

# Euler is stable for the Nyquist mode only while dt_safety < 4/pi^2
STABILITY_LIMIT = 4.0 / np.pi ** 2


@dataclass(frozen=True)
class FlowConfig:
    dt_safety: float = 0.35
    t_max: float = 4.0
    rescale_each_step: bool = True
    checkpoint_times: tuple[float, ...] = ()
    convergence_deficit: float = 1e-6
    max_steps: int = 5_000_000

    def __post_init__(self):
        object.__setattr__(self, "checkpoint_times", tuple(float(t) for t in self.checkpoint_times))
        if not 0.0 < self.dt_safety <= 1.0:
            raise ValueError("dt_safety must lie in (0, 1]")
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if not self.convergence_deficit > 0:
            raise ValueError("convergence_deficit must be positive")
        cps = np.asarray(self.checkpoint_times)
        if cps.size and (np.any(np.diff(cps) <= 0) or cps[0] < 0 or cps[-1] > self.t_max):
            raise ValueError("checkpoint_times must be strictly ascending within [0, t_max]")
        if self.dt_safety > STABILITY_LIMIT:
            log.warning("dt_safety=%.3f exceeds the explicit stability limit %.3f",
                        self.dt_safety, STABILITY_LIMIT)


@dataclass(frozen=True)
class Diagnostics:
    area: float
    perimeter: float
    kappa_bar: float
    deficit: float
    ball_distance: float

    @classmethod
    def of(cls, domain: ConvexDomain2D) -> "Diagnostics":
        return cls(domain.area, domain.perimeter, domain.kappa_bar, domain.deficit,
                   ball_distance(domain))


@dataclass(frozen=True)
class FlowState:
    t: float
    domain: ConvexDomain2D
    target_area: float
    diagnostics: Diagnostics = field(default=None)

    def __post_init__(self):
        if self.diagnostics is None:
            object.__setattr__(self, "diagnostics", Diagnostics.of(self.domain))

    @classmethod
    def initial(cls, domain: ConvexDomain2D) -> "FlowState":
        return cls(0.0, domain, domain.area)


@dataclass
class FlowTrace:
    states: list[FlowState]
    converged_at: float | None
    rate_estimate: float | None
    non_convergent: bool
    step_times: np.ndarray
    step_deficits: np.ndarray
    step_areas: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def deficits(self) -> np.ndarray:
        return np.array([s.diagnostics.deficit for s in self.states])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "area", "perimeter", "kappa_bar", "deficit", "ball_distance"])
        for s in self.states:
            d = s.diagnostics
            writer.writerow([format(v, ".17g") for v in
                             (s.t, d.area, d.perimeter, d.kappa_bar, d.deficit, d.ball_distance)])
        return buf.getvalue()


def kappa_bar(domain: ConvexDomain2D) -> float:
    """Boundary average of the curvature, ``2*pi/L``."""
    return 2.0 * np.pi / domain.perimeter


def stable_dt(w: np.ndarray, dtheta: float, dt_safety: float) -> float:
    return dt_safety * dtheta ** 2 * float(w.min()) ** 2 / 2.0


def _spectral_state(h: np.ndarray, k2: np.ndarray):
    """Area, radius of curvature, perimeter and deficit from one real FFT."""
    n = h.shape[0]
    coef = np.fft.rfft(h)
    power = np.abs(coef) ** 2
    # trapezoid sums of h^2 and h'^2 by Parseval (Nyquist dropped from h')
    h2 = power[0] + 2.0 * np.sum(power[1:-1]) + power[-1]
    dh2 = 2.0 * np.sum(k2[1:-1] * power[1:-1])
    area = np.pi * (h2 - dh2) / n ** 2
    perimeter = 2.0 * np.pi * coef[0].real / n
    excess = 2.0 * np.sum((k2[1:-1] - 1.0) * power[1:-1]) - power[-1]
    deficit = max(excess * np.pi / (n ** 2 * area), 0.0)
    w = np.fft.irfft((1.0 - k2) * coef, n=n)
    return area, perimeter, deficit, w


def _check_convex(w: np.ndarray, t: float) -> None:
    if w.min() <= CONVEXITY_RTOL * abs(w.max()):
        raise ConvexityLost(f"min w = {w.min():.3e} at t = {t:.6g}")


def flow_step(state: FlowState, cfg: FlowConfig, dt: float | None = None) -> FlowState:
    """One explicit Euler step (followed by area projection when enabled)."""
    dom = state.domain
    w = dom.radius_of_curvature
    if dt is None:
        dt = stable_dt(w, dom.dtheta, cfg.dt_safety)
    h = dom.support_values + dt * (-1.0 / w + kappa_bar(dom))
    new = ConvexDomain2D(h, check=False)
    if cfg.rescale_each_step:
        new = rescale_to_area(new, state.target_area)
    _check_convex(new.radius_of_curvature, state.t + dt)
    return FlowState(state.t + dt, new, state.target_area)


def _fit_rate(times: np.ndarray, deficits: np.ndarray) -> float | None:
    """Exponential decay rate of the deficit from the second half of the run."""
    ok = deficits > 0
    times, deficits = times[ok], deficits[ok]
    if times.size < 10 or times[-1] <= 0:
        return None
    tail = times >= 0.5 * times[-1]
    if tail.sum() < 5:
        return None
    slope = np.polyfit(times[tail], np.log(deficits[tail]), 1)[0]
    return float(-slope)


def flow_run(domain: ConvexDomain2D, cfg: FlowConfig) -> FlowTrace:
    """Flow ``domain`` until ``t_max`` or until the deficit drops below threshold.

    Steps are shortened to land exactly on checkpoint times.  Checkpoints
    after convergence repeat the converged domain (the flow is stationary to
    within the threshold).
    """
    n = domain.grid_size
    dtheta = domain.dtheta
    k2 = np.arange(n // 2 + 1, dtype=float) ** 2
    h = np.array(domain.support_values)
    target = domain.area
    pending = list(cfg.checkpoint_times)
    states: list[FlowState] = []
    times, deficits, areas = [], [], []
    t = 0.0
    converged_at = None
    steps = 0
    while True:
        area, perim, deficit, w = _spectral_state(h, k2)
        if cfg.rescale_each_step and steps:
            s = np.sqrt(target / area)
            h *= s
            # deficit is scale invariant
            area, perim, w = area * s * s, perim * s, w * s
        _check_convex(w, t)
        times.append(t)
        deficits.append(deficit)
        areas.append(area)
        while pending and pending[0] <= t + 1e-14:
            states.append(FlowState(t, ConvexDomain2D(h.copy(), check=False), target))
            pending.pop(0)
        if deficit < cfg.convergence_deficit:
            converged_at = t
            break
        if t >= cfg.t_max - 1e-14 or steps >= cfg.max_steps:
            break
        dt = stable_dt(w, dtheta, cfg.dt_safety)
        stop = min(pending[0] if pending else cfg.t_max, cfg.t_max)
        if t + dt > stop:
            dt = stop - t
        h = h + dt * (-1.0 / w + 2.0 * np.pi / perim)
        t = stop if t + dt >= stop else t + dt
        steps += 1
    final = ConvexDomain2D(h.copy(), check=False)
    for tc in list(pending):
        states.append(FlowState(tc, final, target))
    times_arr = np.array(times)
    deficit_arr = np.array(deficits)
    rate = _fit_rate(times_arr, deficit_arr) if converged_at is None or converged_at > 0 else None
    log.info("flow: %d steps, t=%.4g, deficit=%.3e, rate=%s", steps, t, deficit, rate)
    return FlowTrace(
        states=states,
        converged_at=converged_at,
        rate_estimate=rate,
        non_convergent=converged_at is None,
        step_times=times_arr,
        step_deficits=deficit_arr,
        step_areas=np.array(areas),
    )
