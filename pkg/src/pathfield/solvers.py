"""Distance fields from the Laplacian, and the discrete Poisson kernel.

Every solver returns a :class:`ScalarField` oriented so the target vertex is
the global minimum, with the raw solver orientation recoverable through
``sign`` (raw = sign * values).  A solve whose residual exceeds the warning
threshold gets a ``precision`` flag instead of failing.

Field orientation per kind:

* dirichlet-green: Lc_II x = e_p gives boundary 0, negative interior values
  with the minimum at the pole; kept as-is (sign +1).
* neumann-green: Lc x = e_p - a/sum(a) (the area-balanced source), pinned at
  one vertex and shifted to zero area-weighted mean; minimum at the pole
  (sign +1).
* heat: (A - t*Lc) h = a_p e_p, equivalent to a single backward Euler step
  of the heat equation; h peaks at the pole, so values = -h (sign -1).
* resistance / biharmonic: kernel-difference distances, zero at the target
  (sign +1); dense pseudo-inverse, guarded by a size budget.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .config import DEFAULTS, Settings
from .errors import BudgetExceededError, InvalidTargetError
from .laplacian import LaplacianSet
from .mesh import TriMesh

FIELD_KINDS = (
    "dirichlet-green", "neumann-green", "heat-dirichlet", "heat-neumann",
    "resistance", "biharmonic",
    "tv", "kl", "chi2", "hellinger", "alpha", "power-p", "custom-f",
)


class PrecisionWarning(UserWarning):
    """A linear solve exceeded the residual warning threshold."""


@dataclass(frozen=True)
class ScalarField:
    """Per-vertex distance-like values with the target as global minimum."""

    values: np.ndarray
    kind: str
    target: int
    params: dict = dc_field(default_factory=dict)
    sign: int = 1
    residual: float | None = None
    precision_flags: tuple[str, ...] = ()

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def raw(self) -> np.ndarray:
        """Solver-orientation values (before the descent flip)."""
        return self.sign * self.values


def _flag(residual, warn_at, context):
    if residual is not None and residual > warn_at:
        warnings.warn(
            f"{context}: residual {residual:.2e} exceeds {warn_at:.0e}",
            PrecisionWarning,
            stacklevel=3,
        )
        return ("precision",)
    return ()


def green_dirichlet(ls: LaplacianSet, p: int,
                    settings: Settings = DEFAULTS) -> ScalarField:
    """Dirichlet Green's function column with pole (target) at interior p."""
    mesh = ls.mesh
    if mesh.is_boundary[p]:
        raise InvalidTargetError(f"vertex {p} is on the boundary")
    pos = int(np.searchsorted(ls.interior, p))
    e = np.zeros(ls.interior.size)
    e[pos] = 1.0
    x = ls.factor_ii.solve(e)
    residual = float(np.abs(ls.lc_ii @ x - e).max())
    values = np.zeros(mesh.n)
    values[ls.interior] = x
    return ScalarField(values, "dirichlet-green", p, {}, 1, residual,
                       _flag(residual, settings.residual_warn, "dirichlet-green"))


def _neumann_factor(ls: LaplacianSet, r: int):
    key = ("neumann", r)
    if key not in ls._cache:
        keep = np.arange(ls.mesh.n) != r
        ls._cache[key] = (splu((-ls.lc[keep][:, keep]).tocsc()), keep)
    return ls._cache[key]


def green_neumann(ls: LaplacianSet, p: int, r: int | None = None,
                  settings: Settings = DEFAULTS) -> ScalarField:
    """Neumann Green's function column with pole at p.

    Solves the singular-consistent system Lc x = e_p - a/sum(a) by pinning
    vertex ``r`` (any vertex other than p; defaults to the lowest admissible
    index), then shifts to zero area-weighted mean.
    """
    n = ls.mesh.n
    if r is None:
        r = 0 if p != 0 else 1
    if r == p:
        raise InvalidTargetError("excluded vertex r must differ from target p")
    a = ls.areas
    rhs = -a / a.sum()
    rhs[p] += 1.0
    lu, keep = _neumann_factor(ls, r)
    x = np.zeros(n)
    x[keep] = -lu.solve(rhs[keep])
    x -= (a @ x) / a.sum()
    residual = float(np.abs(ls.lc @ x - rhs).max())
    return ScalarField(x, "neumann-green", p, {"excluded": r}, 1, residual,
                       _flag(residual, settings.residual_warn, "neumann-green"))


def _heat_factor(ls: LaplacianSet, t: float, bc: str):
    key = ("heat", bc, float(t))
    if key not in ls._cache:
        if bc == "dirichlet":
            mat = sp.diags(ls.areas[ls.interior]) - t * ls.lc_ii
        else:
            mat = sp.diags(ls.areas) - t * ls.lc
        ls._cache[key] = splu(mat.tocsc())
    return ls._cache[key]


def heat_kernel(ls: LaplacianSet, p: int, t: float, bc: str = "dirichlet",
                settings: Settings = DEFAULTS) -> ScalarField:
    """Single backward-Euler heat kernel column, oriented for descent.

    Solves (I - t * A^{-1}Lc) h = e_p through the symmetrized system
    (A - t*Lc) h = a_p e_p, with Dirichlet rows eliminated or Neumann
    (no boundary condition).
    """
    if t <= 0:
        raise ValueError(f"heat time must be positive, got {t}")
    if bc not in ("dirichlet", "neumann"):
        raise ValueError(f"bc must be dirichlet or neumann, got {bc!r}")
    mesh = ls.mesh
    if bc == "dirichlet" and mesh.is_boundary[p]:
        raise InvalidTargetError(f"vertex {p} is on the boundary")
    lu = _heat_factor(ls, t, bc)
    h = np.zeros(mesh.n)
    if bc == "dirichlet":
        pos = int(np.searchsorted(ls.interior, p))
        rhs = np.zeros(ls.interior.size)
        rhs[pos] = ls.areas[p]
        sol = lu.solve(rhs)
        h[ls.interior] = sol
        mat = sp.diags(ls.areas[ls.interior]) - t * ls.lc_ii
        residual = float(np.abs(mat @ sol - rhs).max() / ls.areas[p])
    else:
        rhs = np.zeros(mesh.n)
        rhs[p] = ls.areas[p]
        h = lu.solve(rhs)
        mat = sp.diags(ls.areas) - t * ls.lc
        residual = float(np.abs(mat @ h - rhs).max() / ls.areas[p])
    kind = "heat-dirichlet" if bc == "dirichlet" else "heat-neumann"
    return ScalarField(-h, kind, p, {"t": float(t)}, -1, residual,
                       _flag(residual, settings.residual_warn, kind))


def _pinv_with_ones_nullspace(mat: np.ndarray) -> np.ndarray:
    """Pseudo-inverse of a symmetric PSD matrix whose nullspace is span(1)."""
    n = mat.shape[0]
    c = float(np.trace(mat)) / (n * n)
    ones = np.full((n, n), 1.0 / n)
    return np.linalg.inv(mat + c * n * ones) - ones / (c * n)


def _kernel_distance(ls: LaplacianSet, p: int, cache_key: str, build,
                     settings: Settings):
    n = ls.mesh.n
    if n > settings.dense_budget:
        raise BudgetExceededError(
            f"mesh has {n} vertices, above the dense budget "
            f"{settings.dense_budget}; this distance needs the full "
            f"pseudo-inverse"
        )
    if cache_key not in ls._cache:
        ls._cache[cache_key] = _pinv_with_ones_nullspace(build())
    g = ls._cache[cache_key]
    values = np.diag(g) + g[p, p] - 2.0 * g[:, p]
    values[p] = 0.0
    return values


def resistance_field(ls: LaplacianSet, p: int,
                     settings: Settings = DEFAULTS) -> ScalarField:
    """Effective-resistance distance from p, via the Laplacian pseudo-inverse.

    R(p, q) = G_pp + G_qq - 2 G_pq with G the pseudo-inverse of the (positive
    semidefinite) cotangent Laplacian, i.e. each edge a resistor of
    conductance w_ij.
    """
    values = _kernel_distance(
        ls, p, "resistance-pinv", lambda: (-ls.lc).toarray(), settings)
    return ScalarField(values, "resistance", p, {}, 1, None, ())


def biharmonic_field(ls: LaplacianSet, p: int,
                     settings: Settings = DEFAULTS) -> ScalarField:
    """Biharmonic distance from p, via the squared-Laplacian pseudo-inverse."""
    def build():
        k = (-ls.lc).toarray()
        return k @ (k / ls.areas[:, None])

    values = _kernel_distance(ls, p, "biharmonic-pinv", build, settings)
    return ScalarField(values, "biharmonic", p, {}, 1, None, ())


# ---------------------------------------------------------------------------
# Poisson kernel
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PoissonKernel:
    """Row-stochastic matrix of boundary harmonic measures.

    ``dense[i, c]`` is the harmonic measure of boundary vertex
    ``boundary[c]`` seen from vertex i; rows sum to 1 and boundary rows are
    exact indicators.  The sparse/log views are populated by
    :func:`pathfield.divergence.sparsify`.
    """

    dense: np.ndarray
    boundary: np.ndarray
    residual: float
    row_sum_error: float
    threshold: float | None = None
    sparse: sp.csr_matrix | None = None
    log_sparse: sp.csr_matrix | None = None
    log_dense: np.ndarray | None = None
    dropped_mass: np.ndarray | None = None
    row_cut: float | None = None
    sparsity_percent: float | None = None

    def __post_init__(self):
        self.dense.setflags(write=False)

    @property
    def n(self) -> int:
        return self.dense.shape[0]

    @property
    def k(self) -> int:
        return self.dense.shape[1]

    def column_of(self, vertex: int) -> int:
        c = int(np.searchsorted(self.boundary, vertex))
        if c >= self.k or self.boundary[c] != vertex:
            raise InvalidTargetError(f"vertex {vertex} is not a boundary vertex")
        return c

    def sparsity_report(self) -> dict:
        return {
            "threshold": self.threshold,
            "sparsity_percent": self.sparsity_percent,
            "max_dropped_row_mass": (
                float(self.dropped_mass.max()) if self.dropped_mass is not None else None
            ),
        }


def poisson_kernel(ls: LaplacianSet, settings: Settings = DEFAULTS) -> PoissonKernel:
    """Solve the k harmonic-extension columns P_IB = -Lc_II^{-1} Lc_IB.

    All columns share the interior prefactorization, one back-substitution
    per boundary vertex.  Solver noise can leave entries a hair below zero
    where the true measure underflows; anything above -1e-12 is clipped to 0
    so that logarithms stay defined (larger negatives, as arise on
    non-Delaunay meshes, are kept).
    """
    mesh = ls.mesh
    n, k = mesh.n, ls.boundary.size
    dense = np.zeros((n, k))
    dense[ls.boundary, np.arange(k)] = 1.0
    residual = 0.0
    if ls.interior.size:
        rhs = ls.lc_ib.toarray()
        p_ib = ls.factor_ii.solve_neg(rhs)
        residual = float(np.abs(ls.lc_ii @ p_ib + rhs).max())
        tiny = (p_ib > -1e-12) & (p_ib < 0.0)
        p_ib[tiny] = 0.0
        dense[ls.interior] = p_ib
    row_sum_error = float(np.abs(dense.sum(axis=1) - 1.0).max())
    if residual > settings.residual_warn:
        warnings.warn(
            f"poisson kernel residual {residual:.2e}", PrecisionWarning, stacklevel=2)
    return PoissonKernel(dense, ls.boundary.copy(), residual, row_sum_error)


def harmonic_measure(pk: PoissonKernel, z: int, E) -> float:
    """Probability that a random walk from vertex z first exits through E."""
    cols = [pk.column_of(int(b)) for b in E]
    return float(pk.dense[z, cols].sum())


def green_from_poisson(pk: PoissonKernel, mesh: TriMesh, p: int, z: int) -> float:
    """Reconstruct the Dirichlet Green's value D(p, z) from kernel row z.

    Uses the boundary-integral identity D(p, z) = -log|z - p|/(2 pi)
    + sum_b P[z, b] log|p - s_b| / (2 pi); the kernel rows already carry the
    boundary measure.  Cross-validation helper only.
    """
    if z == p:
        raise InvalidTargetError("log singularity at z == p")
    vz = mesh.vertices[z]
    vp = mesh.vertices[p]
    svecs = mesh.vertices[pk.boundary]
    d = np.hypot(svecs[:, 0] - vp[0], svecs[:, 1] - vp[1])
    with np.errstate(divide="ignore"):
        logs = np.log(d)
    total = float(pk.dense[z] @ logs)
    return (-math.log(float(np.hypot(*(vz - vp)))) + total) / (2.0 * math.pi)


# ---------------------------------------------------------------------------
# Dispatch used by the service, CLI and benchmarks
# ---------------------------------------------------------------------------

LAPLACE_METHODS = {
    "dirichlet-green": lambda ls, p, prm, st: green_dirichlet(ls, p, st),
    "neumann-green": lambda ls, p, prm, st: green_neumann(
        ls, p, prm.get("excluded"), st),
    "heat-dirichlet": lambda ls, p, prm, st: heat_kernel(
        ls, p, _need_t(prm), "dirichlet", st),
    "heat-neumann": lambda ls, p, prm, st: heat_kernel(
        ls, p, _need_t(prm), "neumann", st),
    "resistance": lambda ls, p, prm, st: resistance_field(ls, p, st),
    "biharmonic": lambda ls, p, prm, st: biharmonic_field(ls, p, st),
}

METHOD_ALIASES = {
    "d": "dirichlet-green", "green": "dirichlet-green",
    "n": "neumann-green",
    "hd": "heat-dirichlet", "hn": "heat-neumann",
    "r": "resistance", "b": "biharmonic",
    "power": "power-p", "x2": "chi2",
}


def _need_t(params):
    t = params.get("t")
    if t is None:
        raise InvalidTargetError("heat kernels need the time parameter t")
    return float(t)


def canonical_method(name: str) -> str:
    name = name.strip().lower()
    return METHOD_ALIASES.get(name, name)
