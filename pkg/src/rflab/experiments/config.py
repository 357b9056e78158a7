"""Experiment configuration: a single JSON document per run.

Schema (all keys optional except ``scenario``)::

    {
      "scenario": "monotonicity" | "hadamard" | "weyl" | "cesaro" | "corpus" | "oracle",
      "name": "free-form label",
      "domain": {"kind": "ellipse", "a": 1.2, "b": 0.8333333333333334, "n": 256},
      "corpus": "default" | [<domain spec>, ...],
      "flow": {"dt_safety": 0.35, "t_max": 4.0, "checkpoint_times": [...],
               "convergence_deficit": 1e-6, "rescale_each_step": true},
      "solver": {"n_radial": 96, "n_angular": 512, "lambda_max": 60,
                 "eig_tolerance": 1e-8, "coarse": {"n_radial": 64, "n_angular": 384}},
      "lambdas": [30, 40],
      "ks": [1, 2, ..., 10],
      "fd_centers": [0.05, 0.2, 0.4], "fd_step": 0.01,
      "velocities": ["uniform", "cos1", "cos2"], "hadamard_dt": 1e-3, "hadamard_groups": 5,
      "output": "out/monotonicity", "seed": 0, "threads": 1
    }

Domain specs:  ``{"kind": "disk", "radius": R}``;
``{"kind": "ellipse", "a": a, "b": b}`` or ``{"kind": "ellipse", "aspect": s, "area": A}``;
``{"kind": "fourier", "cos": [...], "sin": [...], "area": A}``.  Every spec
accepts ``"n"`` (grid size, default 256) and an optional ``"name"``.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from ..flow import FlowConfig
from ..geometry import (DEFAULT_GRID, ConvexDomain2D, disk, ellipse_support,
                        ellipse_with_area, from_fourier, rescale_to_area)
from ..spectral.mesh import SolverConfig

SCENARIOS = ("monotonicity", "hadamard", "weyl", "cesaro", "corpus", "oracle")


@dataclass(frozen=True)
class DomainSpec:
    kind: str
    params: dict = field(default_factory=dict)
    n: int = DEFAULT_GRID
    name: str = ""

    @classmethod
    def from_dict(cls, data: dict) -> "DomainSpec":
        data = dict(data)
        kind = data.pop("kind")
        n = int(data.pop("n", DEFAULT_GRID))
        name = str(data.pop("name", ""))
        if kind not in ("disk", "ellipse", "fourier"):
            raise ValueError(f"unknown domain kind {kind!r}")
        return cls(kind, data, n, name)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "n": self.n, **self.params}
        if self.name:
            out["name"] = self.name
        return out

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        body = "_".join(f"{k}{_short(v)}" for k, v in sorted(self.params.items()))
        return f"{self.kind}_{body}" if body else self.kind

    @property
    def is_disk(self) -> bool:
        if self.kind == "disk":
            return True
        if self.kind == "ellipse":
            p = self.params
            return p.get("aspect", 0) == 1 or ("a" in p and p.get("a") == p.get("b"))
        return False

    def build(self) -> ConvexDomain2D:
        p = self.params
        if self.kind == "disk":
            dom = disk(float(p.get("radius", 1.0)), self.n)
        elif self.kind == "ellipse":
            if "aspect" in p:
                dom = ellipse_with_area(float(p["aspect"]), float(p.get("area", math.pi)), self.n)
            else:
                dom = ellipse_support(float(p["a"]), float(p["b"]), self.n)
        else:
            dom = from_fourier(p.get("cos", [1.0]), p.get("sin", []), self.n)
        if "area" in p and self.kind != "ellipse":
            dom = rescale_to_area(dom, float(p["area"]))
        elif self.kind == "ellipse" and "aspect" not in p and "area" in p:
            dom = rescale_to_area(dom, float(p["area"]))
        return dom


def _short(v) -> str:
    if isinstance(v, (list, tuple)):
        return "-".join(_short(x) for x in v)
    return format(v, "g") if isinstance(v, (int, float)) else str(v)


def default_corpus() -> list[DomainSpec]:
    """Equal-area (pi) validation corpus: ellipses and cos 2/cos 3 perturbed disks.

    ``h = 1 + e cos 3t`` is convex only for ``e < 1/8``, so the three-fold
    family stops at 0.10.
    """
    specs = [DomainSpec("disk", {"radius": 1.0}, name="disk")]
    for aspect in (1.2, 1.5, 2.0, 2.5):
        specs.append(DomainSpec("ellipse", {"aspect": aspect, "area": math.pi},
                                name=f"ellipse_{aspect:g}"))
    for amp in (0.05, 0.10, 0.15):
        specs.append(DomainSpec("fourier", {"cos": [1.0, 0.0, amp], "area": math.pi},
                                name=f"cos2_{amp:g}"))
    for amp in (0.05, 0.10):
        specs.append(DomainSpec("fourier", {"cos": [1.0, 0.0, 0.0, amp], "area": math.pi},
                                name=f"cos3_{amp:g}"))
    return specs


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    name: str = ""
    domain: DomainSpec = field(default_factory=lambda: DomainSpec(
        "ellipse", {"a": 1.2, "b": 5.0 / 6.0}))
    corpus: tuple[DomainSpec, ...] = ()
    flow: FlowConfig = field(default_factory=FlowConfig)
    solver: SolverConfig = field(default_factory=lambda: SolverConfig(96, 512, 60.0))
    coarse: SolverConfig | None = None
    lambdas: tuple[float, ...] = (30.0, 40.0)
    ks: tuple[int, ...] = tuple(range(1, 11))
    fd_centers: tuple[float, ...] = (0.05, 0.2, 0.4)
    fd_step: float = 0.01
    velocities: tuple[str, ...] = ("uniform", "cos1", "cos2")
    hadamard_dt: float = 1e-3
    hadamard_groups: int = 5
    output: str = "out"
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; choose from {SCENARIOS}")
        if self.lambdas and max(self.lambdas) > self.solver.lambda_max:
            raise ValueError("every lambda must be <= solver.lambda_max")
        if any(k < 1 for k in self.ks):
            raise ValueError("ks must be positive")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.fd_step <= 0 or self.hadamard_dt <= 0:
            raise ValueError("step sizes must be positive")

    @property
    def corpus_specs(self) -> tuple[DomainSpec, ...]:
        return self.corpus or tuple(default_corpus())

    @property
    def coarse_solver(self) -> SolverConfig:
        if self.coarse is not None:
            return self.coarse
        return SolverConfig(max(8, (2 * self.solver.n_radial) // 3),
                            max(32, (3 * self.solver.n_angular) // 4),
                            self.solver.lambda_max, self.solver.eig_tolerance)

    def to_dict(self) -> dict:
        flow = asdict(self.flow)
        flow["checkpoint_times"] = list(flow["checkpoint_times"])
        solver = asdict(self.solver)
        solver["coarse"] = {"n_radial": self.coarse_solver.n_radial,
                            "n_angular": self.coarse_solver.n_angular}
        return {
            "scenario": self.scenario,
            "name": self.name,
            "domain": self.domain.to_dict(),
            "corpus": [c.to_dict() for c in self.corpus_specs],
            "flow": flow,
            "solver": solver,
            "lambdas": list(self.lambdas),
            "ks": list(self.ks),
            "fd_centers": list(self.fd_centers),
            "fd_step": self.fd_step,
            "velocities": list(self.velocities),
            "hadamard_dt": self.hadamard_dt,
            "hadamard_groups": self.hadamard_groups,
            "seed": self.seed,
        }

    def fingerprint(self) -> str:
        """Hash of the canonical config (output directory and threads excluded)."""
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        data = dict(data)
        kw: dict[str, Any] = {"scenario": data.pop("scenario")}
        if "name" in data:
            kw["name"] = str(data.pop("name"))
        if "domain" in data:
            kw["domain"] = DomainSpec.from_dict(data.pop("domain"))
        corpus = data.pop("corpus", "default")
        if corpus != "default":
            kw["corpus"] = tuple(DomainSpec.from_dict(c) for c in corpus)
        if "flow" in data:
            kw["flow"] = FlowConfig(**data.pop("flow"))
        if "solver" in data:
            solver = dict(data.pop("solver"))
            coarse = solver.pop("coarse", None)
            kw["solver"] = SolverConfig(**solver)
            if coarse is not None:
                kw["coarse"] = SolverConfig(
                    int(coarse["n_radial"]), int(coarse["n_angular"]),
                    kw["solver"].lambda_max, kw["solver"].eig_tolerance)
        for key, conv in (("lambdas", float), ("ks", int), ("fd_centers", float),
                          ("velocities", str)):
            if key in data:
                kw[key] = tuple(conv(v) for v in data.pop(key))
        for key, conv in (("fd_step", float), ("hadamard_dt", float), ("hadamard_groups", int),
                          ("output", str), ("seed", int), ("threads", int)):
            if key in data:
                kw[key] = conv(data.pop(key))
        if data:
            raise ValueError(f"unknown config keys: {sorted(data)}")
        return cls(**kw)

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))
