"""P1 finite-element Dirichlet eigensolver with conservative boundary flux recovery."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .. import _kernels
from ..errors import CutoffTooHigh, SolverFailure
from .mesh import Mesh, SolverConfig

log = logging.getLogger(__name__)

DENSE_LIMIT = 1500
# heuristic resolvability guard: lambda * h_max^2 must stay below this
RESOLUTION_LIMIT = 0.5


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Dirichlet eigenvalues below a cutoff with boundary normal-derivative traces.

    ``traces[k, j]`` is the outward normal derivative of the ``k``-th
    L2-normalised eigenfunction at boundary sample ``j``.  Boundary
    quadrature weights, curvature and support values (``x . n``) are carried
    along so every boundary integral uses the same rule.
    """

    cutoff: float
    eigenvalues: np.ndarray
    traces: np.ndarray
    boundary_angles: np.ndarray
    boundary_weights: np.ndarray
    boundary_curvature: np.ndarray
    boundary_support: np.ndarray
    mesh_id: str = ""
    domain_fingerprint: str = ""
    eigenvectors: np.ndarray | None = field(default=None, repr=False)
    max_residual: float = 0.0

    def __len__(self) -> int:
        return self.eigenvalues.shape[0]

    def boundary_integrals(self, field_values=None) -> np.ndarray:
        """Per-mode ``int |d_n u_k|^2 V ds`` (``V = 1`` by default)."""
        weights = self.boundary_weights
        if field_values is not None:
            weights = weights * np.asarray(field_values, dtype=float)
        return (self.traces ** 2) @ weights

    def rellich(self) -> np.ndarray:
        """Per-mode ``int (x . n) |d_n u_k|^2 ds``; equals ``2 lambda_k`` exactly."""
        return self.boundary_integrals(self.boundary_support)

    def truncated(self, cutoff: float) -> "Spectrum":
        keep = self.eigenvalues < cutoff
        vecs = None if self.eigenvectors is None else self.eigenvectors[:, keep]
        return Spectrum(min(cutoff, self.cutoff), self.eigenvalues[keep], self.traces[keep],
                        self.boundary_angles, self.boundary_weights, self.boundary_curvature,
                        self.boundary_support, self.mesh_id, self.domain_fingerprint, vecs,
                        self.max_residual)

    def to_dict(self) -> dict:
        return {
            "lambda_max": float(self.cutoff),
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "boundary_angles": [float(v) for v in self.boundary_angles],
            "traces": [[float(v) for v in row] for row in self.traces],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def assemble(mesh: Mesh):
    """Global stiffness and mass matrices (CSR) over all nodes, plus element data."""
    stiff, mass, area = _kernels.element_matrices(mesh.nodes, mesh.triangles)
    tri = mesh.triangles
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    n = mesh.nodes.shape[0]
    k_mat = sp.csr_matrix((stiff.ravel(), (rows, cols)), shape=(n, n))
    m_mat = sp.csr_matrix((mass.ravel(), (rows, cols)), shape=(n, n))
    return k_mat, m_mat, (stiff, mass)


def _solve_dense(k_ii, m_ii, cutoff):
    vals, vecs = scipy.linalg.eigh(k_ii.toarray(), m_ii.toarray(),
                                   subset_by_value=(-np.inf, cutoff), driver="gvx")
    return vals, vecs


def _solve_sparse(k_ii, m_ii, cutoff, area_estimate):
    n = k_ii.shape[0]
    lu = spla.splu(k_ii.tocsc())
    op = spla.LinearOperator((n, n), matvec=lu.solve, dtype=float)
    v0 = np.ones(n)
    k = int(1.3 * area_estimate * cutoff / (4.0 * np.pi)) + 8
    while True:
        k = min(k, n - 2)
        vals, vecs = spla.eigsh(k_ii, k=k, M=m_ii, sigma=0.0, which="LM", OPinv=op,
                                v0=v0, tol=1e-12)
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        if vals[-1] >= cutoff or k == n - 2:
            break
        k = int(1.5 * k) + 4
    keep = vals < cutoff
    return vals[keep], vecs[:, keep]


def boundary_flux(mesh: Mesh, eigenvalues, eigenvectors, element_data=None) -> np.ndarray:
    """Normal derivatives at the boundary nodes by variational flux recovery.

    For every boundary hat function ``v`` the flux ``g`` satisfies
    ``int_dOmega g v ds = int_Omega (grad u . grad v - lambda u v) dx``; the
    left side uses the consistent P1 mass matrix of the boundary polygon.
    Returns an array of shape (modes, n_angular).
    """
    if element_data is None:
        stiff, mass, _ = _kernels.element_matrices(mesh.nodes, mesh.triangles)
    else:
        stiff, mass = element_data
    eigenvalues = np.atleast_1d(np.asarray(eigenvalues, dtype=float))
    vecs = np.asarray(eigenvectors, dtype=float).reshape(-1, eigenvalues.shape[0])
    bids = mesh.boundary_node_ids
    out_index = np.full(mesh.nodes.shape[0], -1, dtype=np.int64)
    out_index[bids] = np.arange(bids.shape[0])
    n_int = mesh.interior_node_ids.shape[0]
    u_full = np.zeros(mesh.nodes.shape[0])
    residuals = np.empty((eigenvalues.shape[0], bids.shape[0]))
    for k, lam in enumerate(eigenvalues):
        u_full[:n_int] = vecs[:, k]
        residuals[k] = _kernels.boundary_residual(mesh.triangles, stiff, mass, u_full, lam, out_index)
    # consistent mass matrix of the closed boundary polygon
    pts = mesh.boundary_points
    edge = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    na = pts.shape[0]
    mb = np.zeros((na, na))
    idx = np.arange(na)
    nxt = (idx + 1) % na
    mb[idx, idx] += edge / 3.0
    mb[nxt, nxt] += edge / 3.0
    mb[idx, nxt] += edge / 6.0
    mb[nxt, idx] += edge / 6.0
    return scipy.linalg.solve(mb, residuals.T, assume_a="pos").T


def solve_dirichlet(mesh: Mesh, cfg: SolverConfig, keep_vectors: bool = False) -> Spectrum:
    """All P1 Dirichlet eigenpairs below ``cfg.lambda_max`` with boundary traces."""
    cutoff = float(cfg.lambda_max)
    if cutoff * mesh.max_edge ** 2 > RESOLUTION_LIMIT:
        raise CutoffTooHigh(
            f"lambda_max={cutoff:g} with h_max={mesh.max_edge:.4f}: "
            f"lambda*h^2={cutoff * mesh.max_edge ** 2:.3f} > {RESOLUTION_LIMIT}")
    k_mat, m_mat, element_data = assemble(mesh)
    n_int = mesh.interior_node_ids.shape[0]
    k_ii = k_mat[:n_int, :n_int]
    m_ii = m_mat[:n_int, :n_int]
    try:
        if n_int <= DENSE_LIMIT:
            vals, vecs = _solve_dense(k_ii, m_ii, cutoff)
        else:
            area = float(np.sum(mesh.triangle_areas))
            vals, vecs = _solve_sparse(k_ii, m_ii, cutoff, area)
    except (np.linalg.LinAlgError, spla.ArpackError, spla.ArpackNoConvergence) as exc:
        raise SolverFailure(str(exc)) from exc
    # M-normalise and fix the sign convention (largest-magnitude entry positive)
    norms = np.sqrt(np.einsum("ik,ik->k", vecs, m_ii @ vecs))
    vecs = vecs / norms
    pivot = np.argmax(np.abs(vecs), axis=0)
    vecs = vecs * np.sign(vecs[pivot, np.arange(vecs.shape[1])])
    max_res = 0.0
    if vals.size:
        res = k_ii @ vecs - (m_ii @ vecs) * vals
        rel = np.linalg.norm(res, axis=0) / (vals * np.linalg.norm(m_ii @ vecs, axis=0))
        max_res = float(rel.max())
        if max_res > cfg.eig_tolerance:
            raise SolverFailure(f"eigenpair residual {max_res:.2e} exceeds {cfg.eig_tolerance:.1e}")
        if np.any(vals <= 0):
            raise SolverFailure("non-positive eigenvalue")
    traces = boundary_flux(mesh, vals, vecs, element_data)
    support = np.einsum("ij,ij->i", mesh.boundary_points, mesh.boundary_normals)
    log.debug("solved %s: %d modes below %g (n=%d)", mesh.mesh_id, vals.size, cutoff, n_int)
    return Spectrum(
        cutoff=cutoff,
        eigenvalues=vals,
        traces=traces,
        boundary_angles=mesh.boundary_angles,
        boundary_weights=mesh.boundary_weights,
        boundary_curvature=mesh.boundary_curvature,
        boundary_support=support,
        mesh_id=mesh.mesh_id,
        domain_fingerprint=mesh.domain_fingerprint,
        eigenvectors=vecs if keep_vectors else None,
        max_residual=max_res,
    )
