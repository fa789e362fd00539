"""Cotangent Laplacians with interior/boundary block structure.

The symmetric matrix follows the convention with nonnegative off-diagonal
weights on Delaunay edges,

    w_ij = (cot a_ij + cot b_ij) / 2,      L_ii = -sum_j L_ij,

so the matrix is negative semidefinite and its interior block is negative
definite on connected meshes with boundary.  The factorization handle works
on the negated (positive definite) interior block; callers see results in
the signed convention above.

Cotangents are computed from edge-vector dot/cross products rather than
angles, avoiding trigonometric round-off.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import DegenerateGeometryError, FactorizationError
from .mesh import TriMesh


class InteriorFactor:
    """Prefactorization of -L_II; solves against many right-hand sides.

    Each ``solve`` call runs back-substitution only; concurrent solves
    against independent right-hand sides are safe.
    """

    def __init__(self, lc_ii: sp.spmatrix):
        mat = (-lc_ii).tocsc()
        try:
            self._lu = splu(mat)
        except RuntimeError as exc:
            raise FactorizationError(f"interior block factorization failed: {exc}")
        self._definiteness_probe(mat)
        self.shape = mat.shape

    def _definiteness_probe(self, mat):
        rng = np.random.default_rng(0)
        for _ in range(4):
            x = rng.standard_normal(mat.shape[0])
            if float(x @ (mat @ x)) <= 0.0:
                raise FactorizationError(
                    "interior block is not positive definite after negation "
                    "(severely non-Delaunay mesh)"
                )

    def solve_neg(self, rhs: np.ndarray) -> np.ndarray:
        """Solve (-L_II) x = rhs."""
        return self._lu.solve(np.asarray(rhs, dtype=float))

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve L_II x = rhs (signed convention)."""
        return -self._lu.solve(np.asarray(rhs, dtype=float))


@dataclass
class LaplacianSet:
    """Assembled cotangent matrix plus block index maps and factor cache."""

    mesh: TriMesh
    lc: sp.csr_matrix
    areas: np.ndarray
    interior: np.ndarray
    boundary: np.ndarray
    _factor: InteriorFactor | None = None
    _cache: dict = field(default_factory=dict)

    @property
    def lc_ii(self) -> sp.csr_matrix:
        return self.lc[self.interior][:, self.interior]

    @property
    def lc_ib(self) -> sp.csr_matrix:
        return self.lc[self.interior][:, self.boundary]

    @property
    def factor_ii(self) -> InteriorFactor:
        if self._factor is None:
            self._factor = factor_interior(self)
        return self._factor


def assemble_cotan(mesh: TriMesh) -> LaplacianSet:
    """Assemble the symmetric cotangent Laplacian of a mesh.

    Raises :class:`DegenerateGeometryError` when a triangle has an angle of
    exactly 0 or pi (singular cotangent).
    """
    v = mesh.vertices
    t = mesh.triangles
    n = mesh.n

    rows, cols, vals = [], [], []
    # Corner c of each triangle contributes cot(angle at c)/2 to edge (a, b).
    for c0, c1, c2 in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        pk = v[t[:, c0]]
        pi = v[t[:, c1]]
        pj = v[t[:, c2]]
        u = pi - pk
        w = pj - pk
        cross = u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0]
        if np.any(cross == 0.0):
            bad = int(np.flatnonzero(cross == 0.0)[0])
            raise DegenerateGeometryError(f"triangle {bad} has a 0/pi angle")
        cot = (u * w).sum(axis=1) / np.abs(cross)
        half = 0.5 * cot
        rows.append(t[:, c1])
        cols.append(t[:, c2])
        vals.append(half)
        rows.append(t[:, c2])
        cols.append(t[:, c1])
        vals.append(half)

    off = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    ).tocsr()
    diag = -np.asarray(off.sum(axis=1)).ravel()
    lc = (off + sp.diags(diag)).tocsr()
    return LaplacianSet(
        mesh=mesh,
        lc=lc,
        areas=mesh.vertex_areas.copy(),
        interior=mesh.interior_vertices.copy(),
        boundary=mesh.boundary_vertices.copy(),
    )


def factor_interior(ls: LaplacianSet) -> InteriorFactor:
    """Prefactor the (negated) interior block for repeated solves."""
    if ls.interior.size == 0:
        raise FactorizationError("interior block is empty (all vertices on boundary)")
    fac = InteriorFactor(ls.lc_ii)
    ls._factor = fac
    return fac


class DiagScaledOperator:
    """Matrix-free D^{-1} Lc operator (never materialized densely)."""

    def __init__(self, lc: sp.spmatrix, diag: np.ndarray):
        self._lc = lc
        self._diag = diag
        self.shape = lc.shape

    def apply(self, v: np.ndarray) -> np.ndarray:
        return (self._lc @ np.asarray(v, dtype=float)) / self._diag

    __matmul__ = apply
    matvec = apply


def area_weighted(ls: LaplacianSet) -> DiagScaledOperator:
    """Operator form of the area-weighted Laplacian A^{-1} Lc."""
    if np.any(ls.areas <= 0):
        raise DegenerateGeometryError("zero vertex area")
    return DiagScaledOperator(ls.lc, ls.areas)


def normalized(ls: LaplacianSet) -> DiagScaledOperator:
    """Operator form of the unit-diagonal normalized Laplacian Z^{-1} Lc."""
    diag = ls.lc.diagonal()
    if np.any(diag == 0.0):
        raise DegenerateGeometryError("zero diagonal entry in Lc")
    return DiagScaledOperator(ls.lc, diag)


def harmonic_extension(ls: LaplacianSet, boundary_values: np.ndarray) -> np.ndarray:
    """Extend boundary data to a discretely harmonic function on all vertices."""
    b = np.asarray(boundary_values, dtype=float)
    if b.shape[0] != ls.boundary.size:
        raise ValueError("boundary data length mismatch")
    out = np.zeros((ls.mesh.n,) + b.shape[1:])
    out[ls.boundary] = b
    if ls.interior.size:
        rhs = ls.lc_ib @ b
        out[ls.interior] = ls.factor_ii.solve_neg(rhs)
    return out


def dump_coo(ls: LaplacianSet) -> str:
    """Debug dump of Lc as 'row col value' lines (coordinate format)."""
    coo = ls.lc.tocoo()
    order = np.lexsort((coo.col, coo.row))
    lines = [
        f"{coo.row[i]} {coo.col[i]} {coo.data[i]:.17g}"
        for i in order
        if coo.data[i] != 0.0
    ]
    return "\n".join(lines) + "\n"
