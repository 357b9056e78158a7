"""Compare the numba and pure-numpy finite-element kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Reports the best-of-N time per kernel for a few mesh sizes plus an end-to-end
solve with each backend (selected through RFLAB_DISABLE_NUMBA), and checks
that both backends agree.
"""
import argparse
import os
import timeit

import numpy as np

from rflab import _kernels
from rflab.geometry import ellipse_with_area
from rflab.spectral import SolverConfig, mesh_domain, solve_dirichlet

SIZES = ((24, 96), (48, 192), (96, 512), (128, 768))


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_kernels(repeat):
    dom = ellipse_with_area(1.5)
    print(f"{'mesh':>10} {'triangles':>10} {'kernel':>18} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8}")
    for nr, na in SIZES:
        mesh = mesh_domain(dom, SolverConfig(nr, na))
        nodes = np.ascontiguousarray(mesh.nodes)
        tri = np.ascontiguousarray(mesh.triangles, dtype=np.int64)
        stiff, mass, _ = _kernels.element_matrices_numpy(nodes, tri)
        _kernels.element_matrices_numba(nodes, tri)  # compile
        u = np.random.default_rng(0).standard_normal(nodes.shape[0])
        out = -np.ones(nodes.shape[0], dtype=np.int64)
        out[mesh.boundary_node_ids] = np.arange(mesh.boundary_node_ids.size)
        _kernels.boundary_residual_numba(tri, stiff, mass, u, 10.0, out)
        cases = {
            "element_matrices": (lambda: _kernels.element_matrices_numpy(nodes, tri),
                                 lambda: _kernels.element_matrices_numba(nodes, tri)),
            "boundary_residual": (lambda: _kernels.boundary_residual_numpy(tri, stiff, mass, u, 10.0, out),
                                  lambda: _kernels.boundary_residual_numba(tri, stiff, mass, u, 10.0, out)),
        }
        for name, (f_np, f_nb) in cases.items():
            a, b = np.asarray(f_np()[0] if name == "element_matrices" else f_np()), \
                np.asarray(f_nb()[0] if name == "element_matrices" else f_nb())
            assert np.allclose(a, b, rtol=1e-12, atol=1e-12), name
            t_np, t_nb = best(f_np, repeat), best(f_nb, repeat)
            print(f"{nr:>4}x{na:<5} {tri.shape[0]:>10} {name:>18} {1e3 * t_np:>11.3f} "
                  f"{1e3 * t_nb:>11.3f} {t_np / t_nb:>8.2f}")


def bench_solve(repeat):
    dom = ellipse_with_area(1.5)
    cfg = SolverConfig(64, 384, 40.0)
    mesh = mesh_domain(dom, cfg)
    times = {}
    for flag in ("1", "0"):
        os.environ["RFLAB_DISABLE_NUMBA"] = flag
        solve_dirichlet(mesh, cfg)
        times[flag] = best(lambda: solve_dirichlet(mesh, cfg), max(1, repeat // 2))
    os.environ.pop("RFLAB_DISABLE_NUMBA", None)
    print(f"\nend-to-end solve 64x384, lambda_max 40: numpy {times['1']:.3f} s, "
          f"numba {times['0']:.3f} s")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed")
    bench_kernels(args.repeat)
    bench_solve(args.repeat)


if __name__ == "__main__":
    main()
