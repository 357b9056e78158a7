"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line (also collected in the terminal
summary) and then asserts.  Expected values come from independent oracles:
scipy's Bessel zeros, closed-form rectangle spectra, and exact identities.
The heavy scenarios run the configs shipped in ``configs/`` and share one
spectrum cache.
"""
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
from scipy.special import jn_zeros

from rflab import riesz
from rflab.experiments import ExperimentConfig, SpectrumCache, run, write_run
from rflab.flow import FlowConfig, FlowState, flow_run, flow_step
from rflab.geometry import disk, ellipse_support, ellipse_with_area
from rflab.spectral import (SolverConfig, mesh_domain, mesh_rectangle, rectangle_oracle,
                            solve_dirichlet)

ROOT = Path(__file__).resolve().parents[1]
THREADS = int(os.environ.get("RFLAB_THREADS", min(4, os.cpu_count() or 1)))


def disk_exact(count: int, radius: float = 1.0) -> np.ndarray:
    vals = [jn_zeros(0, count)] + [np.repeat(jn_zeros(m, count), 2) for m in range(1, count + 2)]
    return np.sort(np.concatenate(vals))[:count] ** 2 / radius ** 2


def disk_riesz_exact(cutoff: float) -> float:
    lam = disk_exact(60)
    return float(np.sum(np.maximum(cutoff - lam, 0.0)))


@pytest.fixture(scope="session")
def cache():
    return SpectrumCache()


def _scenario(name, cache):
    cfg = replace(ExperimentConfig.load(ROOT / "configs" / f"{name}.json"), threads=THREADS)
    return run(cfg, cache)


@pytest.fixture(scope="session")
def weyl_run(cache):
    return _scenario("weyl", cache)


@pytest.fixture(scope="session")
def corpus_run(cache, weyl_run):
    # the Weyl run solves the corpus to the highest cutoff first; reuse those spectra
    return _scenario("corpus", cache)


@pytest.fixture(scope="session")
def cesaro_run(cache, weyl_run):
    return _scenario("cesaro", cache)


@pytest.fixture(scope="session")
def monotonicity_run(cache):
    return _scenario("monotonicity", cache)


def _summarise(checks):
    failed = [c for c in checks if not c.passed]
    if not failed:
        return True, f"{len(checks)} checks passed"
    worst = min(failed, key=lambda c: c.margin)
    names = ", ".join(c.name for c in failed[:6]) + (" ..." if len(failed) > 6 else "")
    return False, (f"{len(failed)}/{len(checks)} checks failed [{names}]; worst {worst.name} "
                   f"value={worst.value:.6g} margin={worst.margin:.4g} noise={worst.noise_floor:.3g}")


def test_c01_eigensolver_oracles(acceptance):
    exact = disk_exact(10)
    cfg = SolverConfig(24, 96, 55.0)
    coarse = solve_dirichlet(mesh_domain(disk(), cfg), cfg).eigenvalues[:10]
    fine_cfg = cfg.refined(2)
    fine = solve_dirichlet(mesh_domain(disk(), fine_cfg), fine_cfg).eigenvalues[:10]
    err_c = np.abs(coarse - exact) / exact
    err_f = np.abs(fine - exact) / exact
    contraction = err_c.sum() / err_f.sum()
    square = rectangle_oracle(math.pi, math.pi, 10.5).eigenvalues
    square_ok = square.size == 6 and np.allclose(square, [2, 5, 5, 8, 10, 10], rtol=0, atol=1e-12)
    fe_sq = [solve_dirichlet(mesh_rectangle(math.pi, math.pi, n, n),
                             SolverConfig(lambda_max=10.5)).eigenvalues[:6] for n in (32, 64)]
    sq_err = [np.abs(v - [2, 5, 5, 8, 10, 10]).max() for v in fe_sq]
    ok = bool(err_c.max() <= 0.01 and 3.0 <= contraction <= 5.5 and square_ok
              and 3.0 <= sq_err[0] / sq_err[1] <= 5.5)
    acceptance(1, "eigensolver oracles", ok,
               f"disk max rel err {err_c.max():.4f} (<= 0.01), refinement ratio {contraction:.3f}; "
               f"square oracle exact={square_ok}, FE square err {sq_err[0]:.2e} -> {sq_err[1]:.2e}")
    assert ok


def test_c02_rellich_identity(acceptance):
    cfg = SolverConfig(48, 192, 55.0)
    worst = {}
    for name, dom in (("disk", disk()), ("ellipse 1.5", ellipse_with_area(1.5))):
        spec = solve_dirichlet(mesh_domain(dom, cfg), cfg)
        ratio = spec.rellich()[:10] / (2 * spec.eigenvalues[:10])
        worst[name] = float(np.abs(ratio - 1).max())
    ok = all(v <= 0.02 for v in worst.values())
    acceptance(2, "Rellich identity", ok,
               ", ".join(f"{k} max rel err {v:.4f}" for k, v in worst.items()) + " (<= 0.02)")
    assert ok


def test_c03_flow_correctness(acceptance):
    state = FlowState.initial(disk())
    step = flow_step(state, FlowConfig())
    still = float(np.max(np.abs(step.domain.support_values - state.domain.support_values)))
    rates, drift, decreasing, final = [], 0.0, True, None
    for n in (256, 512):
        trace = flow_run(ellipse_support(1.2, 5 / 6, n), FlowConfig(t_max=4.0))
        rates.append(trace.rate_estimate)
        drift = max(drift, float(np.max(np.abs(trace.step_areas / trace.step_areas[0] - 1))))
        decreasing &= bool(np.all(np.diff(trace.step_deficits) < 0))
        if n == 256:
            final = (trace.converged_at, float(trace.step_deficits[-1]))
    rate_gap = abs(rates[1] - rates[0]) / rates[1]
    ok = bool(still <= 1e-12 and drift < 1e-11 and decreasing and final[0] is not None
              and final[1] < 1e-6 and rate_gap <= 0.05)
    acceptance(3, "flow correctness", ok,
               f"circle step {still:.1e}, area drift {drift:.1e}, deficit strictly decreasing="
               f"{decreasing}, converged at t={final[0]:.4f} with deficit {final[1]:.2e}, "
               f"rates {rates[0]:.4f}/{rates[1]:.4f} (gap {rate_gap:.1e})")
    assert ok


def test_c04_hadamard(acceptance, cache):
    disk_run = _scenario("hadamard_disk", cache)
    ell_run = _scenario("hadamard_ellipse", cache)
    checks = disk_run.checks + ell_run.checks
    ok, detail = _summarise(checks)
    errs = [c.value for c in ell_run.checks_matching("hadamard[cos2")]
    uni = [c.value for c in disk_run.checks_matching("hadamard[uniform")]
    acceptance(4, "Hadamard formula", ok,
               f"{detail}; disk uniform max err {max(uni):.4f}, ellipse cos2 max err {max(errs):.4f}")
    assert ok


def test_c05_variation_formula(acceptance, monotonicity_run):
    checks = monotonicity_run.checks_matching("variation")
    ok, detail = _summarise(checks)
    worst = max(c.value for c in checks)
    acceptance(5, "variation formula -I = dR/dt", ok, f"{detail}; max rel err {worst:.4f} (<= 0.05)")
    assert ok and len(checks) == 6


def test_c06_correlation_sign(acceptance, corpus_run):
    checks = [c for c in corpus_run.checks_matching("I_sign")
              if any(f"L={lam}]" in c.name for lam in (30, 40, 60))]
    ok, detail = _summarise(checks)
    acceptance(6, "correlation sign I < 0", ok, detail)
    assert ok


def test_c07_monotonicity(acceptance, monotonicity_run):
    checks = (monotonicity_run.checks_matching("monotone")
              + monotonicity_run.checks_matching("limit"))
    n_cp = len(monotonicity_run.table("riesz_L30").rows)
    r30 = [r[2] for r in monotonicity_run.table("riesz_L30").rows]
    ok, detail = _summarise(checks)
    ok = ok and n_cp >= 8
    acceptance(7, "Riesz mean monotone along the flow", ok,
               f"{detail}; {n_cp} checkpoints; R_30 path {r30[0]:.4f} -> max {max(r30):.4f} -> "
               f"{r30[-1]:.4f} (disk {disk_riesz_exact(30):.4f})")
    assert ok


def test_c08_bly(acceptance, corpus_run):
    checks = corpus_run.checks_matching("bly")
    ok, detail = _summarise(checks)
    r30 = disk_riesz_exact(30.0)
    bound = riesz.bly_bound(math.pi, 30.0)
    ok = ok and abs(r30 - 62.10) < 0.01 and abs(bound - 112.5) < 1e-12 and r30 <= bound
    acceptance(8, "Berezin-Li-Yau bound", ok, f"{detail}; disk L=30: {r30:.4f} <= {bound:.1f}")
    assert ok


def test_c09_trace_minimisation(acceptance, corpus_run):
    checks = corpus_run.checks_matching("trace_min") + corpus_run.checks_matching("trace_oracle")
    ok, detail = _summarise(checks)
    disk_f = corpus_run.check("trace_oracle[disk,L=30]")
    acceptance(9, "trace functional minimised by the disk", ok,
               f"{detail}; disk F_30 = {disk_f.value:.3f} vs oracle {disk_f.threshold:.3f}")
    assert ok


def test_c10_weyl_fit(acceptance, weyl_run):
    checks = weyl_run.checks_matching("weyl_b2") + weyl_run.checks_matching("weyl_a2")
    ok, detail = _summarise(checks)
    a2 = weyl_run.check("weyl_a2[disk]")
    b2 = max(c.value for c in weyl_run.checks_matching("weyl_b2"))
    acceptance(10, "boundary Weyl fit", ok,
               f"{detail}; disk a2 = {a2.value:.5f} vs 1/(8 pi) = {a2.threshold:.5f}; "
               f"largest b2 = {b2:.4f}")
    assert ok


def test_c11_cesaro_polya(acceptance, cesaro_run):
    checks = (cesaro_run.checks_matching("cesaro_polya")
              + cesaro_run.checks_matching("cesaro_identity"))
    ok, detail = _summarise(checks)
    lam = disk_exact(12)
    a3 = float(np.mean(lam[:3]))
    ident = riesz.cesaro(lam, 3)
    ok = ok and abs(a3 - 11.716) < 5e-4 and ident.identity_error < 1e-13 and lam[0] >= 4.0
    acceptance(11, "Cesaro-Polya inequality", ok,
               f"{detail}; disk A_B(3) = {a3:.4f}, lambda_1 = {lam[0]:.4f} >= C2/pi = 4")
    assert ok


def test_c12_determinism(acceptance, tmp_path):
    outputs = []
    small_corpus = ExperimentConfig.from_dict({
        "scenario": "corpus", "threads": 3, "lambdas": [20],
        "corpus": [{"kind": "disk", "radius": 1.0, "name": "disk"},
                   {"kind": "ellipse", "aspect": 1.3, "area": math.pi, "name": "e13"},
                   {"kind": "fourier", "cos": [1, 0, 0.05], "area": math.pi, "name": "c2"}],
        "solver": {"n_radial": 24, "n_angular": 96, "lambda_max": 20,
                   "coarse": {"n_radial": 16, "n_angular": 64}}})
    configs = [("oracle", replace(ExperimentConfig.load(ROOT / "configs" / "oracle.json"), threads=1)),
               ("hadamard_disk", replace(ExperimentConfig.load(ROOT / "configs" / "hadamard_disk.json"),
                                         threads=2)),
               ("corpus_threaded", small_corpus)]
    for name, cfg in configs:
        for rep in range(2):
            out = tmp_path / f"{name}_{rep}"
            manifest = write_run(run(cfg), cfg, out)
            blobs = {f: (out / f).read_bytes() for f in manifest["files"]}
            blobs["manifest.json"] = (out / "manifest.json").read_bytes()
            outputs.append((name, blobs))
    same = all(outputs[i][1] == outputs[i + 1][1] for i in (0, 2, 4))
    acceptance(12, "determinism", same,
               f"byte-identical reruns for {sorted({o[0] for o in outputs})}")
    assert same


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
