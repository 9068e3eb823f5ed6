"""The association-scheme SDP relaxation of the TSP and its feasibility checker.

Variables are ``d = n/2`` symmetric matrices ``X(1..d)``; the program is

    min   1/2 <C, X(1)>
    s.t.  X(j) >= 0 entrywise,  sum_j X(j) = J - I,
          I + sum_j cos(2 pi j k / n) X(j)  is PSD      for k = 1..d.

Vertices are 0-based throughout the package.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import linalg
from .errors import DimensionMismatch, DomainError, NotMetric


@dataclass(frozen=True)
class SdpInstance:
    """Even-order metric cost matrix."""

    cost: np.ndarray
    check_metric: bool = field(default=True, compare=False)

    def __post_init__(self):
        C = linalg.as_symmetric(self.cost, "cost")
        n = C.shape[0]
        if n < 4 or n % 2:
            raise DomainError(f"the SDP needs an even number of cities n >= 4, got {n}")
        if np.any(np.diag(C) != 0.0):
            raise DomainError("cost matrix must have a zero diagonal")
        if np.any(C < 0.0):
            raise DomainError("costs must be non-negative")
        if self.check_metric:
            worst = metric_violation(C)
            if worst > 1e-12 * (1.0 + float(np.max(C))):
                raise NotMetric(f"cost matrix violates the triangle inequality by {worst:.3g}")
        object.__setattr__(self, "cost", C)

    @property
    def n(self) -> int:
        return self.cost.shape[0]

    @property
    def d(self) -> int:
        return self.n // 2


def metric_violation(C: np.ndarray) -> float:
    """Largest ``C[i,j] - C[i,k] - C[k,j]`` over all triples (0 when metric)."""
    C = np.asarray(C, dtype=float)
    worst = 0.0
    for k in range(C.shape[0]):
        detour = C[:, k][:, None] + C[k, :][None, :]
        worst = max(worst, float(np.max(C - detour)))
    return worst


@dataclass(frozen=True)
class CandidateSolution:
    """Stack of ``d`` matrices, ``mats[j-1]`` holding ``X(j)``."""

    mats: np.ndarray

    def __post_init__(self):
        mats = np.asarray(self.mats, dtype=float)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise DimensionMismatch(f"expected a (d, n, n) stack, got shape {mats.shape}")
        d, n, _ = mats.shape
        if n % 2 or d != n // 2:
            raise DimensionMismatch(f"need d = n/2 matrices of even order, got d={d}, n={n}")
        if not np.array_equal(mats, mats.transpose(0, 2, 1)):
            raise DimensionMismatch("every X(j) must be symmetric")
        object.__setattr__(self, "mats", mats)

    @property
    def n(self) -> int:
        return self.mats.shape[1]

    @property
    def d(self) -> int:
        return self.mats.shape[0]

    def __getitem__(self, j: int) -> np.ndarray:
        """1-based access: ``sol[1]`` is ``X(1)``."""
        if not 1 <= j <= self.d:
            raise IndexError(j)
        return self.mats[j - 1]

    def permuted(self, perm) -> "CandidateSolution":
        """Relabel vertices: new vertex ``i`` is old vertex ``perm[i]``."""
        perm = np.asarray(perm)
        return CandidateSolution(self.mats[:, perm][:, :, perm])


@dataclass(frozen=True)
class ConstraintReport:
    nonneg_ok: bool
    worst_entry: float
    sum_ok: bool
    sum_deviation: float
    psd_min_eigs: tuple[float, ...]
    psd_methods: tuple[str, ...]
    objective: float
    feasible: bool
    tol: float

    def to_dict(self) -> dict:
        return {
            "nonneg_ok": self.nonneg_ok,
            "worst_entry": self.worst_entry,
            "sum_ok": self.sum_ok,
            "sum_deviation": self.sum_deviation,
            "psd_min_eigs": list(self.psd_min_eigs),
            "objective": self.objective,
            "feasible": self.feasible,
            "tol": self.tol,
        }


def trig_sum(n: int, k: int) -> float:
    """``sum_{j=1}^{n/2} cos(2 pi j k / n)`` by direct summation."""
    if n < 2 or n % 2:
        raise DomainError(f"n must be even and >= 2, got {n}")
    if not 0 < k < n:
        raise DomainError(f"k must satisfy 0 < k < n, got k={k}")
    return math.fsum(math.cos(2.0 * math.pi * j * k / n) for j in range(1, n // 2 + 1))


def cycle_distance(n: int) -> np.ndarray:
    idx = np.arange(n)
    gap = np.abs(idx[:, None] - idx[None, :])
    return np.minimum(gap, n - gap)


def distance_matrix(n: int, j: int) -> np.ndarray:
    """``A_j(C_n)`` for the cycle 0, 1, ..., n-1, 0."""
    if n < 3:
        raise DomainError(f"n must be >= 3, got {n}")
    if not 1 <= j <= n // 2:
        raise DomainError(f"distance j must lie in [1, {n // 2}], got {j}")
    return (cycle_distance(n) == j).astype(float)


def cycle_solution(n: int) -> CandidateSolution:
    if n < 4 or n % 2:
        raise DomainError(f"n must be even and >= 4, got {n}")
    dist = cycle_distance(n)
    return CandidateSolution(np.stack([(dist == j).astype(float) for j in range(1, n // 2 + 1)]))


def cosine_matrix(n: int, d: int | None = None) -> np.ndarray:
    """``Q[k-1, j-1] = cos(2 pi j k / n)`` for ``j, k = 1..d``."""
    d = n // 2 if d is None else d
    jk = np.outer(np.arange(1, d + 1), np.arange(1, d + 1))
    return np.cos(2.0 * np.pi * jk / n)


def assemble_psd_matrix(sol: CandidateSolution, k: int) -> np.ndarray:
    """``I + sum_j cos(2 pi j k / n) X(j)``."""
    if not 1 <= k <= sol.d:
        raise DomainError(f"k must lie in [1, {sol.d}], got {k}")
    weights = cosine_matrix(sol.n)[k - 1]
    M = np.tensordot(weights, sol.mats, axes=1)
    M[np.diag_indices(sol.n)] += 1.0
    return M


def objective(inst: SdpInstance, sol: CandidateSolution, index: int = 1) -> float:
    """``1/2 <C, X(index)>``; the TSP objective reads ``index=1``."""
    if inst.n != sol.n:
        raise DimensionMismatch(f"instance has n={inst.n}, solution has n={sol.n}")
    return 0.5 * float(np.sum(inst.cost * sol[index]))


def verify_feasibility(
    inst: SdpInstance,
    sol: CandidateSolution,
    tol: float = linalg.DEFAULT_PSD_TOL,
    objective_index: int = 1,
) -> ConstraintReport:
    """Check every constraint family of the SDP for ``sol``."""
    if inst.n != sol.n:
        raise DimensionMismatch(f"instance has n={inst.n}, solution has n={sol.n}")
    n = sol.n
    worst = float(np.min(sol.mats))
    target = np.ones((n, n)) - np.eye(n)
    deviation = float(np.max(np.abs(sol.mats.sum(axis=0) - target)))

    mins, methods = [], []
    for k in range(1, sol.d + 1):
        eigs = linalg.spectrum(assemble_psd_matrix(sol, k))
        mins.append(eigs.min_eig)
        methods.append(eigs.method)

    nonneg_ok = worst >= -tol
    sum_ok = deviation <= tol
    feasible = nonneg_ok and sum_ok and all(m >= -tol for m in mins)
    return ConstraintReport(
        nonneg_ok=nonneg_ok,
        worst_entry=worst,
        sum_ok=sum_ok,
        sum_deviation=deviation,
        psd_min_eigs=tuple(mins),
        psd_methods=tuple(methods),
        objective=objective(inst, sol, objective_index),
        feasible=feasible,
        tol=tol,
    )


def cycle_constraint_spectrum(n: int, k: int) -> list[float]:
    """Eigenvalue multiset of the k-th constraint matrix for the cycle solution.

    ``2d`` once when ``k == d``; otherwise ``d`` twice; zeros elsewhere.
    """
    d = n // 2
    if k == d:
        return [0.0] * (n - 1) + [float(2 * d)]
    return [0.0] * (n - 2) + [float(d)] * 2


# -- serialization ----------------------------------------------------------------

def save_solution(sol: CandidateSolution, directory, stem: str = "X") -> Path:
    """Write ``d`` CSV matrices plus a JSON manifest ``{n, d, files}``; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files = []
    for j in range(1, sol.d + 1):
        name = f"{stem}{j}.csv"
        linalg.write_csv(directory / name, sol[j])
        files.append(name)
    manifest = directory / f"{stem}.json"
    manifest.write_text(json.dumps({"n": sol.n, "d": sol.d, "files": files}, indent=2) + "\n")
    return manifest


def load_solution(manifest_path) -> CandidateSolution:
    manifest_path = Path(manifest_path)
    meta = json.loads(manifest_path.read_text())
    mats = [linalg.read_csv(manifest_path.parent / name) for name in meta["files"]]
    sol = CandidateSolution(np.stack(mats))
    if sol.n != meta["n"] or sol.d != meta["d"]:
        raise DimensionMismatch("manifest n/d disagree with the stored matrices")
    return sol
