"""Shape-aware distance fields and descent-path planning on planar meshes."""

from .config import Settings, load_config
from .divergence import (FDivergence, builtin_f, dv_field, dv_pair,
                         dv_pair_sparse, sparsify)
from .domain import DomainContext
from .laplacian import (LaplacianSet, area_weighted, assemble_cotan,
                        factor_interior, normalized)
from .mesh import (TriMesh, check_delaunay, generate_blob_mesh,
                   generate_disk_mesh, generate_holes_mesh,
                   generate_rectangle_mesh, load_mesh, vertex_areas)
from .paths import (TracedPath, edge_descent, find_local_minima,
                    path_hausdorff, triangle_descent, triangle_gradient)
from .solvers import (PoissonKernel, ScalarField, biharmonic_field,
                      green_dirichlet, green_from_poisson, green_neumann,
                      harmonic_measure, heat_kernel, poisson_kernel,
                      resistance_field)

__version__ = "0.1.0"

__all__ = [
    "DomainContext", "FDivergence", "LaplacianSet", "PoissonKernel",
    "ScalarField", "Settings", "TracedPath", "TriMesh",
    "area_weighted", "assemble_cotan", "biharmonic_field", "builtin_f",
    "check_delaunay", "dv_field", "dv_pair", "dv_pair_sparse",
    "edge_descent", "factor_interior", "find_local_minima",
    "generate_blob_mesh", "generate_disk_mesh", "generate_holes_mesh",
    "generate_rectangle_mesh", "green_dirichlet", "green_from_poisson",
    "green_neumann", "harmonic_measure", "heat_kernel", "load_config",
    "load_mesh", "normalized", "path_hausdorff", "poisson_kernel",
    "resistance_field", "sparsify", "triangle_descent", "triangle_gradient",
    "vertex_areas",
]
