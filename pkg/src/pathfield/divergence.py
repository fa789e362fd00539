"""f-divergence distances over Poisson-kernel rows.

The divergence between a target vertex p and a query vertex q is

    DV(q, p) = sum_b  P[q, b] * f(P[p, b] / P[q, b])

for a convex f with f(1) = 0, i.e. the f-divergence of the two harmonic
measures, weighted by the query row.  The swapped order (weight by the
target row) is available behind a flag; both generate identical descent
paths.

Zero handling: structural zeros (boundary indicator rows) and double-
precision underflow are clamped; with clamp c the evaluation is

    sum_b  max(Q, c) * f(max(P, c) / max(Q, c)),

which converges to the standard f-divergence convention (terms Q = 0
contribute P * lim f(x)/x) as c -> 0.  Log-family divergences use
c = 1e-300; power-family ones use c = 1e-150 so squared ratios stay inside
double range.  A field gets a ``clamped`` precision flag when clamping fires
at an interior query row.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .errors import DivergenceDomainError, InvalidTargetError
from .solvers import PoissonKernel, ScalarField

_CLAMP_LOG = 1e-300
_CLAMP_POWER = 1e-150
_NEG_NOISE = 1e-10  # solver round-off can leave values this far below zero


@dataclass(frozen=True)
class FDivergence:
    """A convex generator f on the positive reals with f(1) = 0."""

    name: str
    f: Callable[[np.ndarray], np.ndarray]
    strictly_convex: bool
    params: dict = dc_field(default_factory=dict)
    clamp: float = _CLAMP_LOG

    def __post_init__(self):
        val = float(self.f(np.array([1.0]))[0])
        if abs(val) > 1e-12:
            raise ValueError(f"f(1) must be 0, got {val} for {self.name}")
        _spot_check_convexity(self.f, self.name)


def _spot_check_convexity(f, name, trials=100):
    rng = np.random.default_rng(12345)
    x = rng.uniform(1e-3, 10.0, size=(trials, 3))
    x.sort(axis=1)
    lo, mid, hi = x[:, 0], x[:, 1], x[:, 2]
    lam = (hi - mid) / (hi - lo)
    interp = lam * f(lo) + (1.0 - lam) * f(hi)
    if np.any(f(mid) > interp + 1e-9):
        raise ValueError(f"{name} failed the sampled convexity check")


def builtin_f(name: str, *, alpha: float | None = None,
              power: int | None = None) -> FDivergence:
    """Construct one of the built-in divergence generators.

    tv: |1-x|           kl: -log x          chi2: x^2 - 1
    hellinger: (sqrt(x)-1)^2
    alpha: 4/(1-a^2) * (1 - x^((1+a)/2)),  a != +-1
    power-p: |1-x|^p for integer p >= 1 (p=1 is tv, p=2 matches chi2 paths)
    """
    if name == "tv":
        return FDivergence("tv", lambda x: np.abs(1.0 - x), False,
                           clamp=_CLAMP_POWER)
    if name == "kl":
        return FDivergence("kl", lambda x: -np.log(x), True, clamp=_CLAMP_LOG)
    if name == "chi2":
        return FDivergence("chi2", lambda x: x * x - 1.0, True,
                           clamp=_CLAMP_POWER)
    if name == "hellinger":
        return FDivergence("hellinger", lambda x: (np.sqrt(x) - 1.0) ** 2, True,
                           clamp=_CLAMP_POWER)
    if name == "alpha":
        if alpha is None or alpha in (1.0, -1.0):
            raise ValueError("alpha divergence needs alpha != +-1")
        a = float(alpha)
        scale = 4.0 / (1.0 - a * a)
        expo = (1.0 + a) / 2.0
        return FDivergence("alpha", lambda x: scale * (1.0 - x ** expo), True,
                           {"alpha": a}, clamp=_CLAMP_LOG)
    if name == "power-p":
        if power is None or int(power) < 1 or power != int(power):
            raise ValueError("power-p needs an integer exponent p >= 1")
        p = int(power)
        return FDivergence("power-p", lambda x: np.abs(1.0 - x) ** p, p > 1,
                           {"power": p}, clamp=_CLAMP_POWER)
    raise ValueError(f"unknown divergence {name!r}")


def _clamped_rows(P_row, Q_row, clamp):
    if clamp is None or clamp <= 0.0:
        if np.any(Q_row <= 0.0) or np.any(P_row <= 0.0):
            raise DivergenceDomainError(
                "zero kernel entry and clamping is disabled")
        return P_row, Q_row, False
    fired = bool(np.any((P_row < clamp) != (Q_row < clamp)))
    return np.maximum(P_row, clamp), np.maximum(Q_row, clamp), fired


def _settle(value: float) -> float:
    # Row sums deviate from 1 by solver round-off; Jensen nonnegativity then
    # holds only up to that noise.
    if -_NEG_NOISE < value < 0.0:
        return 0.0
    return value


def dv_pair(pk: PoissonKernel, fd: FDivergence, p: int, q: int,
            swap_order: bool = False, clamp: float | None = None) -> float:
    """Divergence distance between target p and query q."""
    if clamp is None:
        clamp = fd.clamp
    P_row, Q_row = pk.dense[p], pk.dense[q]
    if swap_order:
        P_row, Q_row = Q_row, P_row
    ps, qs, _ = _clamped_rows(P_row, Q_row, clamp)
    return _settle(float(qs @ fd.f(ps / qs)))


def dv_at(pk: PoissonKernel, fd: FDivergence, p: int, queries,
          swap_order: bool = False, clamp: float | None = None) -> np.ndarray:
    """Divergence distances from target p to a batch of query vertices."""
    if clamp is None:
        clamp = fd.clamp
    queries = np.asarray(queries, dtype=np.int64)
    ps = np.maximum(pk.dense[p], clamp)
    qs = np.maximum(pk.dense[queries], clamp)
    if swap_order:
        vals = (ps[None, :] * fd.f(qs / ps[None, :])).sum(axis=1)
    else:
        vals = (qs * fd.f(ps[None, :] / qs)).sum(axis=1)
    vals[(vals > -_NEG_NOISE) & (vals < 0.0)] = 0.0
    vals[queries == p] = 0.0
    return vals


def dv_field(pk: PoissonKernel, fd: FDivergence, p: int,
             swap_order: bool = False, clamp: float | None = None) -> ScalarField:
    """Divergence distance from target p to every vertex."""
    if not 0 <= p < pk.n:
        raise InvalidTargetError(f"target {p} out of range")
    if clamp is None:
        clamp = fd.clamp
    dense = pk.dense
    if clamp is None or clamp <= 0.0:
        if np.any(dense <= 0.0):
            raise DivergenceDomainError(
                "zero kernel entries and clamping is disabled")
        ps_t = dense[p]
        qs = dense
        fired_interior = False
    else:
        ps_t = np.maximum(dense[p], clamp)
        qs = np.maximum(dense, clamp)
        onesided = (dense < clamp) != (dense[p][None, :] < clamp)
        interior = np.ones(pk.n, dtype=bool)
        interior[pk.boundary] = False
        fired_interior = bool(onesided[interior].any())

    if swap_order:
        vals = (ps_t[None, :] * fd.f(qs / ps_t[None, :])).sum(axis=1)
    else:
        vals = (qs * fd.f(ps_t[None, :] / qs)).sum(axis=1)
    vals[(vals > -_NEG_NOISE) & (vals < 0.0)] = 0.0
    vals[p] = 0.0
    flags = ("clamped",) if fired_interior else ()
    params = dict(fd.params)
    if swap_order:
        params["swap_order"] = True
    return ScalarField(vals, fd.name, p, params, 1, None, flags)


# ---------------------------------------------------------------------------
# Sparsification
# ---------------------------------------------------------------------------

def sparsify(pk: PoissonKernel, threshold: float | None = None) -> PoissonKernel:
    """Add sparse + log views, dropping entries below threshold/k per row.

    ``threshold`` is the cut as a fraction of the mean (uniform) row mass
    1/k; the default 1/sqrt(n) reproduces the expected behavior: near-uniform
    rows (disk-like domains) keep everything, while rows whose mass hugs a
    short boundary stretch (corridors, mazes) drop most entries.  Rows are
    not renormalized: the retained entries keep their exact values and the
    per-row dropped mass is recorded.

    Two log views are stored: ``log_sparse`` holds the logs of the retained
    entries (same pattern as ``sparse``), and ``log_dense`` holds the logs of
    every pre-sparsification entry.  The dense logs are what make sparse KL
    sums accurate: for distant vertex pairs the divergence is dominated by
    the logs of entries far below the threshold, which stay meaningful in
    log space long after the masses themselves stop mattering.
    """
    n, k = pk.n, pk.k
    if threshold is None:
        threshold = 1.0 / math.sqrt(n)
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    if threshold >= 1.0:
        # A cut at or above the mean row mass would empty near-uniform rows.
        raise ValueError(f"threshold {threshold} >= 1 would empty rows")
    cut = threshold / k
    keep = pk.dense >= cut if threshold > 0 else pk.dense > 0
    data = np.where(keep, pk.dense, 0.0)
    sparse = sp.csr_matrix(data)
    sparse.eliminate_zeros()
    logs = sp.csr_matrix(
        (np.log(sparse.data), sparse.indices, sparse.indptr), shape=(n, k))
    log_dense = np.log(np.maximum(pk.dense, _CLAMP_LOG))
    dropped = 1.0 - np.asarray(sparse.sum(axis=1)).ravel()
    np.clip(dropped, 0.0, None, out=dropped)
    interior = np.ones(n, dtype=bool)
    interior[pk.boundary] = False
    m = int(interior.sum())
    if m:
        nnz_interior = int(np.diff(sparse.indptr)[interior].sum())
        sparsity = 100.0 * (1.0 - nnz_interior / (m * k))
    else:
        sparsity = 0.0
    return dataclasses.replace(
        pk, threshold=float(threshold), sparse=sparse, log_sparse=logs,
        log_dense=log_dense, dropped_mass=dropped, row_cut=float(cut),
        sparsity_percent=float(sparsity))


def _row_support(pk, i):
    lo, hi = pk.sparse.indptr[i], pk.sparse.indptr[i + 1]
    return pk.sparse.indices[lo:hi], pk.sparse.data[lo:hi], pk.log_sparse.data[lo:hi]


def _aligned(idx, vals, union, fill):
    pos = np.searchsorted(union, idx)
    v = np.full(union.size, fill)
    v[pos] = vals
    return v


def dv_pair_sparse_stats(pk: PoissonKernel, fd: FDivergence, p: int, q: int,
                         swap_order: bool = False) -> tuple[float, int]:
    """Sparse-view divergence plus the number of summation slots touched.

    Log-family divergences (kl, alpha) sum over the support of the weight
    row only, reading both logs from the dense log view; the dropped weight
    mass bounds the error.  TV sums the union of the two sparse supports and
    adds each row's dropped mass as the correction for the unseen tail.
    Other generators evaluate f over the union support with absent weights
    clamped at the row cut.  The second return value counts the multiply-add
    slots, which is what the online cost is proportional to (support size,
    not the boundary size k).
    """
    if pk.sparse is None or pk.log_dense is None:
        raise DivergenceDomainError("kernel has no sparse views; run sparsify")
    if swap_order:
        p, q = q, p
    idx_p, val_p, _ = _row_support(pk, p)
    idx_q, val_q, log_q = _row_support(pk, q)

    if fd.name in ("kl", "alpha"):
        ops = int(idx_q.size)
        log_p_at_q = pk.log_dense[p, idx_q]
        if fd.name == "kl":
            val = float(val_q @ (log_q - log_p_at_q))
        else:
            a = fd.params["alpha"]
            scale = 4.0 / (1.0 - a * a)
            expo = (1.0 + a) / 2.0
            ratio_pow = np.exp(expo * (log_p_at_q - log_q))
            val = float(scale * (val_q @ (1.0 - ratio_pow)))
        return _settle(val), ops

    union = np.union1d(idx_p, idx_q)
    ops = int(union.size)
    if fd.name == "tv":
        vp = _aligned(idx_p, val_p, union, 0.0)
        vq = _aligned(idx_q, val_q, union, 0.0)
        base = float(np.abs(vp - vq).sum())
        corr = float(pk.dropped_mass[p] + pk.dropped_mass[q])
        return base + corr, ops
    cut = pk.row_cut if pk.row_cut and pk.row_cut > 0 else fd.clamp
    vp = np.maximum(pk.dense[p, union], cut)
    vq = _aligned(idx_q, val_q, union, cut)
    return _settle(float(vq @ fd.f(vp / vq))), ops


def dv_pair_sparse(pk: PoissonKernel, fd: FDivergence, p: int, q: int,
                   swap_order: bool = False) -> float:
    """Sparse-view divergence distance between target p and query q."""
    return dv_pair_sparse_stats(pk, fd, p, q, swap_order)[0]
