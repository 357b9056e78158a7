"""Structured mapped-disk meshes of star-shaped convex domains."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import NotStarShaped
from ..geometry import ConvexDomain2D

# ring radius profile rho(s) = s * (1 + GRADING * (1 - s)): spacing shrinks
# by (1 - GRADING) / (1 + GRADING) from centre to boundary
GRADING = 0.25


@dataclass(frozen=True)
class SolverConfig:
    n_radial: int = 24
    n_angular: int = 96
    lambda_max: float = 40.0
    eig_tolerance: float = 1e-8

    def __post_init__(self):
        if self.n_radial < 8:
            raise ValueError("n_radial must be >= 8")
        if self.n_angular < 32:
            raise ValueError("n_angular must be >= 32")
        if not self.lambda_max > 0:
            raise ValueError("lambda_max must be positive")
        if not self.eig_tolerance > 0:
            raise ValueError("eig_tolerance must be positive")

    def refined(self, factor: int = 2) -> "SolverConfig":
        return SolverConfig(self.n_radial * factor, self.n_angular * factor,
                            self.lambda_max, self.eig_tolerance)


def ring_radii(n_radial: int, grading: float | None = None) -> np.ndarray:
    if grading is None:
        grading = GRADING
    s = np.arange(1, n_radial + 1) / n_radial
    rho = s * (1.0 + grading * (1.0 - s))
    rho[-1] = 1.0
    return rho


@dataclass(frozen=True, eq=False)
class Mesh:
    """Triangulation whose first ``n_interior`` nodes are the unknowns.

    Boundary nodes are listed counter-clockwise in ``boundary_node_ids`` and
    carry the outward normal angle, quadrature weight and curvature of the
    exact boundary at that node.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    n_interior: int
    boundary_node_ids: np.ndarray
    boundary_angles: np.ndarray
    boundary_weights: np.ndarray
    boundary_curvature: np.ndarray
    domain_fingerprint: str
    n_radial: int = 0
    n_angular: int = 0
    label: str = ""

    @property
    def interior_node_ids(self) -> np.ndarray:
        return np.arange(self.n_interior)

    @property
    def boundary_points(self) -> np.ndarray:
        return self.nodes[self.boundary_node_ids]

    @property
    def boundary_normals(self) -> np.ndarray:
        th = self.boundary_angles
        return np.column_stack((np.cos(th), np.sin(th)))

    @property
    def perimeter(self) -> float:
        return float(np.sum(self.boundary_weights))

    @cached_property
    def triangle_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @cached_property
    def max_edge(self) -> float:
        p = self.nodes[self.triangles]
        edges = p - np.roll(p, 1, axis=1)
        return float(np.sqrt(np.max(np.sum(edges ** 2, axis=-1))))

    @property
    def mesh_id(self) -> str:
        return f"{self.domain_fingerprint}-{self.label}"


def reference_triangles(n_radial: int, n_angular: int) -> np.ndarray:
    na = n_angular
    j = np.arange(na)
    jn = (j + 1) % na
    fan = np.column_stack((np.zeros(na, dtype=np.int64), 1 + j, 1 + jn))
    blocks = [fan]
    for i in range(1, n_radial):
        inner = 1 + (i - 1) * na
        outer = 1 + i * na
        a, b, c, d = inner + j, outer + j, outer + jn, inner + jn
        blocks.append(np.column_stack((a, b, c)))
        blocks.append(np.column_stack((a, c, d)))
    return np.vstack(blocks).astype(np.int64)


def mesh_domain(domain: ConvexDomain2D, cfg: SolverConfig) -> Mesh:
    """Map the reference disk mesh onto ``domain`` along rays to its boundary points.

    Boundary nodes are the boundary points at normal angles ``2*pi*j/n_angular``;
    interior ring ``i`` sits at fraction ``rho_i`` of the way along each ray.
    """
    na, nr = cfg.n_angular, cfg.n_radial
    theta = 2.0 * np.pi * np.arange(na) / na
    if domain.grid_size % na == 0:
        stride = domain.grid_size // na
        bpts = domain.points()[::stride]
        w = domain.radius_of_curvature[::stride]
    else:
        bpts = domain.points(theta)
        w = domain.evaluate(theta, 0) + domain.evaluate(theta, 2)
    nxt = np.roll(bpts, -1, axis=0)
    turn = bpts[:, 0] * nxt[:, 1] - bpts[:, 1] * nxt[:, 0]
    if np.any(turn <= 0.0):
        raise NotStarShaped("boundary rays from the origin are not monotone in angle")
    rho = ring_radii(nr)
    nodes = np.empty((1 + nr * na, 2))
    nodes[0] = 0.0
    nodes[1:] = (rho[:, None, None] * bpts[None, :, :]).reshape(-1, 2)
    nodes[1 + (nr - 1) * na:] = bpts
    tris = reference_triangles(nr, na)
    mesh = Mesh(
        nodes=nodes,
        triangles=tris,
        n_interior=1 + (nr - 1) * na,
        boundary_node_ids=np.arange(1 + (nr - 1) * na, 1 + nr * na),
        boundary_angles=theta,
        boundary_weights=w * (2.0 * np.pi / na),
        boundary_curvature=1.0 / w,
        domain_fingerprint=domain.fingerprint,
        n_radial=nr,
        n_angular=na,
        label=f"r{nr}a{na}",
    )
    if np.any(mesh.triangle_areas <= 0.0):
        raise NotStarShaped("mapped mesh has inverted triangles")
    return mesh


def mesh_rectangle(a: float, b: float, nx: int, ny: int) -> Mesh:
    """Uniform right-triangle mesh of ``[0, a] x [0, b]`` (eigensolver validation only)."""
    xs = np.linspace(0.0, a, nx + 1)
    ys = np.linspace(0.0, b, ny + 1)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    on_edge = np.zeros((nx + 1, ny + 1), dtype=bool)
    on_edge[[0, -1], :] = True
    on_edge[:, [0, -1]] = True
    # counter-clockwise boundary walk starting at the origin
    walk = ([(i, 0) for i in range(nx)] + [(nx, j) for j in range(ny)]
            + [(i, ny) for i in range(nx, 0, -1)] + [(0, j) for j in range(ny, 0, -1)])
    interior = [(i, j) for i in range(1, nx) for j in range(1, ny)]
    order = interior + walk
    new_id = np.empty((nx + 1, ny + 1), dtype=np.int64)
    for k, (i, j) in enumerate(order):
        new_id[i, j] = k
    nodes = np.array([(gx[i, j], gy[i, j]) for i, j in order])
    tris = []
    for i in range(nx):
        for j in range(ny):
            p00, p10 = new_id[i, j], new_id[i + 1, j]
            p01, p11 = new_id[i, j + 1], new_id[i + 1, j + 1]
            tris.append((p00, p10, p11))
            tris.append((p00, p11, p01))
    hx, hy = a / nx, b / ny
    angles, weights = [], []
    for i, j in walk:
        if j == 0 and 0 < i:
            angles.append(-0.5 * np.pi)
        elif i == nx and j < ny:
            angles.append(0.0)
        elif j == ny and i > 0:
            angles.append(0.5 * np.pi)
        else:
            angles.append(np.pi)
        wx = hx * ((0 < i) + (i < nx)) / 2 if j in (0, ny) else 0.0
        wy = hy * ((0 < j) + (j < ny)) / 2 if i in (0, nx) else 0.0
        weights.append(wx + wy)
    nb = len(walk)
    return Mesh(
        nodes=nodes,
        triangles=np.array(tris, dtype=np.int64),
        n_interior=len(interior),
        boundary_node_ids=np.arange(len(interior), len(interior) + nb),
        boundary_angles=np.array(angles),
        boundary_weights=np.array(weights),
        boundary_curvature=np.zeros(nb),
        domain_fingerprint=f"rect{a:.6g}x{b:.6g}",
        label=f"x{nx}y{ny}",
    )
