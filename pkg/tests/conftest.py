import math

import numpy as np
import pytest

from pathfield.domain import DomainContext
from pathfield.laplacian import assemble_cotan
from pathfield.mesh import (TriMesh, generate_blob_mesh, generate_disk_mesh,
                            generate_holes_mesh, generate_rectangle_mesh)
from pathfield.solvers import poisson_kernel

# Coarse convex-holes mesh parameters (Fig-4-style audit); the jittered
# lattice stands in for an unstructured coarse Delaunay triangulation.
HOLES_COARSE = dict(spacing=0.13, seed=2, jitter=0.35)
HOLES_FINE = dict(spacing=0.0225, seed=2, jitter=0.35)


@pytest.fixture(scope="session")
def equilateral():
    return TriMesh([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]], [[0, 1, 2]])


@pytest.fixture(scope="session")
def square_pair():
    return TriMesh([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
                   [[0, 1, 2], [0, 2, 3]])


@pytest.fixture(scope="session")
def hexagon_fan():
    pts = [[0.0, 0.0]]
    for i in range(6):
        ang = math.pi * i / 3
        pts.append([math.cos(ang), math.sin(ang)])
    tris = [[0, 1 + i, 1 + (i + 1) % 6] for i in range(6)]
    return TriMesh(pts, tris)


@pytest.fixture(scope="session")
def disk_small():
    return generate_disk_mesh(rings=4)  # n = 61


@pytest.fixture(scope="session")
def disk_mid():
    return generate_disk_mesh(rings=8)  # n = 217


@pytest.fixture(scope="session")
def disk40_ctx():
    mesh = generate_disk_mesh(rings=40)  # n = 4921
    return DomainContext(mesh, name="disk40")


@pytest.fixture(scope="session")
def disk40(disk40_ctx):
    return disk40_ctx.mesh


@pytest.fixture(scope="session")
def disk40_kernel(disk40_ctx):
    return disk40_ctx.kernel


@pytest.fixture(scope="session")
def disk40_center(disk40):
    return int(np.argmin(np.hypot(*disk40.vertices.T)))


@pytest.fixture(scope="session")
def corridor50_ctx():
    mesh = generate_rectangle_mesh(10.0, 0.2, 0.05)  # 50:1 aspect
    return DomainContext(mesh, name="corridor50")


@pytest.fixture(scope="session")
def corridor8_ctx():
    mesh = generate_rectangle_mesh(8.0, 1.0, 0.042)  # n ~ 5.4k
    return DomainContext(mesh, name="corridor8")


@pytest.fixture(scope="session")
def blob_ctx():
    mesh = generate_blob_mesh(0.028)  # n ~ 5k, concave, simply connected
    return DomainContext(mesh, name="blob")


@pytest.fixture(scope="session")
def holes_coarse_ctx():
    mesh = generate_holes_mesh(**HOLES_COARSE)  # n ~ 181
    return DomainContext(mesh, name="holes-coarse")


@pytest.fixture(scope="session")
def holes_fine_ctx():
    mesh = generate_holes_mesh(**HOLES_FINE)  # n ~ 5.1k
    return DomainContext(mesh, name="holes-fine")


def nearest_vertex(mesh, x, y):
    return int(np.argmin(np.hypot(mesh.vertices[:, 0] - x,
                                  mesh.vertices[:, 1] - y)))


@pytest.fixture(scope="session")
def laplacian_small(disk_small):
    return assemble_cotan(disk_small)


@pytest.fixture(scope="session")
def kernel_small(laplacian_small):
    return poisson_kernel(laplacian_small)
