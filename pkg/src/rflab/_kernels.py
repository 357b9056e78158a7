"""Hot loops of the P1 finite-element pipeline.

Each kernel has a numba ``@njit`` version and a pure-numpy version with the
same signature.  The numba path is used when numba imports and the
environment variable ``RFLAB_DISABLE_NUMBA`` is unset or ``0``; set it to
``1`` to force the numpy path (useful for debugging and for the benchmark in
``benchmarks/bench_kernels.py``).

The two paths produce the same element contributions in the same order, so
assembled matrices agree to rounding.
"""
from __future__ import annotations

import os

import numpy as np


def _numba_requested() -> bool:
    return os.environ.get("RFLAB_DISABLE_NUMBA", "0").strip().lower() in ("", "0", "false", "no")


try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None


# -- pure numpy ------------------------------------------------------------

def element_matrices_numpy(nodes, triangles):
    """Local P1 stiffness and mass matrices, each of shape (T, 3, 3), plus signed areas."""
    p = nodes[triangles]  # (T, 3, 2)
    # edge opposite vertex i: e_i = p[i+2] - p[i+1]
    e = np.roll(p, -2, axis=1) - np.roll(p, -1, axis=1)
    area = 0.5 * (e[:, 1, 0] * e[:, 2, 1] - e[:, 1, 1] * e[:, 2, 0])
    stiff = np.einsum("tik,tjk->tij", e, e) / (4.0 * area)[:, None, None]
    base = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0
    mass = area[:, None, None] * base[None, :, :]
    return stiff, mass, area


def boundary_residual_numpy(triangles, stiff, mass, u, lam, out_index):
    """Row residuals (K u - lam M u) restricted to nodes flagged in ``out_index``.

    ``u`` is the full nodal vector (zero on the boundary); ``out_index[i]`` is
    the output slot of node ``i`` or -1.  Returns an array of length
    ``out_index.max() + 1``.
    """
    local = np.einsum("tij,tj->ti", stiff - lam * mass, u[triangles])
    slots = out_index[triangles]
    keep = slots >= 0
    res = np.zeros(int(out_index.max()) + 1)
    np.add.at(res, slots[keep], local[keep])
    return res


# -- numba -------------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def element_matrices_numba(nodes, triangles):
        t_count = triangles.shape[0]
        stiff = np.empty((t_count, 3, 3))
        mass = np.empty((t_count, 3, 3))
        area = np.empty(t_count)
        e = np.empty((3, 2))
        for t in range(t_count):
            for i in range(3):
                a = triangles[t, (i + 1) % 3]
                b = triangles[t, (i + 2) % 3]
                e[i, 0] = nodes[b, 0] - nodes[a, 0]
                e[i, 1] = nodes[b, 1] - nodes[a, 1]
            ar = 0.5 * (e[1, 0] * e[2, 1] - e[1, 1] * e[2, 0])
            area[t] = ar
            for i in range(3):
                for j in range(3):
                    stiff[t, i, j] = (e[i, 0] * e[j, 0] + e[i, 1] * e[j, 1]) / (4.0 * ar)
                    mass[t, i, j] = ar * (2.0 if i == j else 1.0) / 12.0
        return stiff, mass, area

    @numba.njit(cache=True)
    def boundary_residual_numba(triangles, stiff, mass, u, lam, out_index):
        size = 0
        for i in range(out_index.shape[0]):
            if out_index[i] + 1 > size:
                size = out_index[i] + 1
        res = np.zeros(size)
        for t in range(triangles.shape[0]):
            for i in range(3):
                slot = out_index[triangles[t, i]]
                if slot < 0:
                    continue
                acc = 0.0
                for j in range(3):
                    acc += (stiff[t, i, j] - lam * mass[t, i, j]) * u[triangles[t, j]]
                res[slot] += acc
        return res


def use_numba() -> bool:
    return HAVE_NUMBA and _numba_requested()


def element_matrices(nodes, triangles):
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    triangles = np.ascontiguousarray(triangles, dtype=np.int64)
    if use_numba():
        return element_matrices_numba(nodes, triangles)
    return element_matrices_numpy(nodes, triangles)


def boundary_residual(triangles, stiff, mass, u, lam, out_index):
    u = np.ascontiguousarray(u, dtype=np.float64)
    out_index = np.ascontiguousarray(out_index, dtype=np.int64)
    if use_numba():
        return boundary_residual_numba(triangles, stiff, mass, u, float(lam), out_index)
    return boundary_residual_numpy(triangles, stiff, mass, u, lam, out_index)
