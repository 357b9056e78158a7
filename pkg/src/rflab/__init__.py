"""rflab: Riesz means of Dirichlet spectra along the volume-preserving curve-shortening flow."""
from .errors import RflabError
from .flow import FlowConfig, FlowTrace, flow_run, flow_step
from .geometry import (ConvexDomain2D, ball_distance, boundary_samples, disk,
                       ellipse_support, ellipse_with_area, from_fourier,
                       geometry_report, rescale_to_area)
from .spectral import SolverConfig, Spectrum, disk_oracle, mesh_domain, solve_dirichlet

__version__ = "0.1.0"

__all__ = [
    "ConvexDomain2D", "FlowConfig", "FlowTrace", "RflabError", "SolverConfig", "Spectrum",
    "ball_distance", "boundary_samples", "disk", "disk_oracle", "ellipse_support",
    "ellipse_with_area", "flow_run", "flow_step", "from_fourier", "geometry_report",
    "mesh_domain", "rescale_to_area", "solve_dirichlet",
]
