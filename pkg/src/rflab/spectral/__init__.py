"""Dirichlet eigenpairs of planar domains: P1 finite elements and closed-form oracles."""
from .bessel import bessel_zeros, besselj
from .fem import Spectrum, assemble, boundary_flux, solve_dirichlet
from .mesh import Mesh, SolverConfig, mesh_domain, mesh_rectangle
from .oracles import (disk_eigen_table, disk_eigenvalues, disk_oracle, rectangle_eigenvalues,
                      rectangle_oracle)

__all__ = [
    "Mesh", "SolverConfig", "Spectrum", "assemble", "bessel_zeros", "besselj",
    "boundary_flux", "disk_eigen_table", "disk_eigenvalues", "disk_oracle", "mesh_domain", "mesh_rectangle",
    "rectangle_eigenvalues", "rectangle_oracle", "solve_dirichlet",
]
