"""Edge-space polytopes: subtour elimination, the spanning-tree polytope, small exact oracles."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DomainError, NonzeroDiagonal, TooLarge
from .lp_bridge import LpProblem, simplex_solve

MAX_SUBSET_N = 22
MAX_BRUTE_N = 10
_CHUNK = 1 << 16


@dataclass(frozen=True)
class EdgeVector:
    """Weights on the pairs ``(i, j)``, ``i < j``, in row-major upper-triangle order."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.n * (self.n - 1) // 2,):
            raise DomainError(f"need n(n-1)/2 = {self.n * (self.n - 1) // 2} edge weights, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise DomainError("edge weights must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_solution_matrix(cls, X) -> "EdgeVector":
        X = linalg.as_symmetric(X, "X")
        if np.any(np.diag(X) != 0.0):
            raise NonzeroDiagonal("X must have a zero diagonal")
        n = X.shape[0]
        return cls(n, X[np.triu_indices(n, 1)])

    @classmethod
    def from_edges(cls, n: int, edges) -> "EdgeVector":
        """0/1 incidence vector of an edge list."""
        M = np.zeros((n, n))
        for i, j in edges:
            M[i, j] = M[j, i] = 1.0
        return cls(n, M[np.triu_indices(n, 1)])

    def matrix(self) -> np.ndarray:
        M = np.zeros((self.n, self.n))
        iu = np.triu_indices(self.n, 1)
        M[iu] = self.values
        return M + M.T

    def as_dict(self) -> dict[tuple[int, int], float]:
        iu = zip(*np.triu_indices(self.n, 1))
        return {(int(i), int(j)): float(v) for (i, j), v in zip(iu, self.values)}


@dataclass(frozen=True)
class PolytopeReport:
    check: str
    violated: bool
    worst_set: tuple[int, ...]
    value: float
    rhs: float
    degree_ok: bool = True
    bounds_ok: bool = True

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "violated": self.violated,
            "worst_set": list(self.worst_set),
            "value": self.value,
            "rhs": self.rhs,
        }


def _subset_masks(n: int, start: int, stop: int, fixed_zero: bool) -> np.ndarray:
    """0/1 rows for subset codes ``start..stop-1``; with ``fixed_zero`` vertex 0 is always in."""
    codes = np.arange(start, stop, dtype=np.int64)
    if fixed_zero:
        bits = (codes[:, None] >> np.arange(n - 1)) & 1
        return np.hstack([np.ones((codes.size, 1), dtype=np.int64), bits]).astype(float)
    return ((codes[:, None] >> np.arange(n)) & 1).astype(float)


def _lex_smallest(rows: np.ndarray) -> tuple[int, ...]:
    sets = [tuple(int(v) for v in np.nonzero(r)[0]) for r in rows]
    return min(sets)


def _scan(n: int, fixed_zero: bool, score, keep):
    """Find the subsets maximising ``score`` among those where ``keep`` holds.

    Returns ``(best_score, lexicographically smallest maximiser)``.
    """
    total = 1 << (n - 1 if fixed_zero else n)
    best, best_sets = -math.inf, []
    for start in range(0, total, _CHUNK):
        S = _subset_masks(n, start, min(total, start + _CHUNK), fixed_zero)
        sizes = S.sum(axis=1)
        mask = keep(sizes)
        if not np.any(mask):
            continue
        S = S[mask]
        vals = score(S)
        top = float(vals.max())
        if top > best + 1e-12:
            best, best_sets = top, [S[vals >= top - 1e-12]]
        elif top >= best - 1e-12:
            best_sets.append(S[vals >= best - 1e-12])
    return best, _lex_smallest(np.vstack(best_sets))


def subtour_check(x: EdgeVector, tol: float = 1e-9) -> PolytopeReport:
    """Degree equations, ``0 <= x <= 1`` and ``x(delta(S)) >= 2`` for every proper ``S``.

    Only sets containing vertex 0 are scanned (complements give the same cut).
    ``value`` is the smallest cut found and ``worst_set`` the set attaining it.
    """
    n = x.n
    if n > MAX_SUBSET_N:
        raise TooLarge(f"subset enumeration is limited to n <= {MAX_SUBSET_N}, got {n}")
    if n < 3:
        raise DomainError("need n >= 3")
    W = x.matrix()
    degree_ok = bool(np.all(np.abs(W.sum(axis=1) - 2.0) <= tol))
    bounds_ok = bool(np.all(x.values >= -tol) and np.all(x.values <= 1.0 + tol))

    def neg_cut(S):
        return -np.sum((S @ W) * (1.0 - S), axis=1)

    best, worst_set = _scan(n, True, neg_cut, lambda sz: sz < n)
    value = -best
    violated = (not degree_ok) or (not bounds_ok) or value < 2.0 - tol
    return PolytopeReport("subtour", violated, worst_set, value, 2.0, degree_ok, bounds_ok)


def mst_polytope_check(x: EdgeVector, tol: float = 1e-9) -> PolytopeReport:
    """Scale ``x`` by ``(n-1)/n`` and test ``z(E(S)) <= |S| - 1`` for every ``S`` with ``|S| >= 2``.

    The report carries the set with the largest excess ``z(E(S)) - (|S| - 1)``.
    """
    n = x.n
    if n > MAX_SUBSET_N:
        raise TooLarge(f"subset enumeration is limited to n <= {MAX_SUBSET_N}, got {n}")
    Z = x.matrix() * (n - 1) / n
    total_ok = abs(Z.sum() / 2.0 - (n - 1)) <= tol
    bounds_ok = bool(np.all(x.values >= -tol))

    def excess(S):
        inside = 0.5 * np.sum((S @ Z) * S, axis=1)
        return inside - (S.sum(axis=1) - 1.0)

    best, worst_set = _scan(n, False, excess, lambda sz: sz >= 2)
    rhs = float(len(worst_set) - 1)
    violated = best > tol or not total_ok or not bounds_ok
    return PolytopeReport("mst", violated, worst_set, best + rhs, rhs, total_ok, bounds_ok)


def mst_structured_excess(n: int, a1: float, b1: float) -> tuple[float, int, int]:
    """Exact MST-polytope check for a two-group ``X(1)`` of any order.

    ``z(E(S))`` depends only on ``p = |S & U|`` and ``q = |S & W|``, so scanning
    all ``(p, q)`` is equivalent to scanning every subset.  Returns the largest
    excess with the lexicographically smallest ``(p, q)`` realising it, where
    ``p`` is maximised first (so ``S`` fills ``U`` from vertex 0).
    """
    d = n // 2
    scale = (n - 1) / n
    best = (-math.inf, 0, 0)
    for p in range(d, -1, -1):
        for q in range(0, d + 1):
            if p + q < 2:
                continue
            inside = a1 * (p * (p - 1) / 2 + q * (q - 1) / 2) + b1 * p * q
            ex = scale * inside - (p + q - 1)
            if ex > best[0] + 1e-12:
                best = (ex, p, q)
    return best


def mst_first_violation(n_min: int = 6, n_max: int = 64, tol: float = 1e-9) -> tuple[int | None, dict[int, bool]]:
    """Scan even ``n`` for the analytic witness; return the first violating ``n`` and every verdict."""
    from .witness import analytic_a

    verdicts = {}
    for n in range(n_min + n_min % 2, n_max + 1, 2):
        fam = analytic_a(n)
        ex, _, _ = mst_structured_excess(n, fam.a[0], fam.b[0])
        verdicts[n] = bool(ex > tol)
    first = next((n for n, v in verdicts.items() if v), None)
    return first, verdicts


# -- exact oracles ---------------------------------------------------------------

def brute_force_tsp(C) -> tuple[float, list[int]]:
    """Optimal tour by enumerating every permutation with vertex 0 first (``n <= 10``)."""
    C = linalg.as_symmetric(C, "cost")
    n = C.shape[0]
    if n > MAX_BRUTE_N:
        raise TooLarge(f"brute-force TSP is limited to n <= {MAX_BRUTE_N}, got {n}")
    if n < 3:
        raise DomainError("need n >= 3")
    perms = np.array(list(itertools.permutations(range(1, n))), dtype=np.int64)
    tours = np.hstack([np.zeros((perms.shape[0], 1), dtype=np.int64), perms])
    costs = C[tours, np.roll(tours, -1, axis=1)].sum(axis=1)
    best = int(np.argmin(costs))
    return float(costs[best]), [int(v) for v in tours[best]]


def hamiltonian_cycles(n: int) -> list[tuple[int, ...]]:
    """Every Hamiltonian cycle of ``K_n`` once: vertex 0 first, second vertex below the last."""
    if n < 3:
        raise DomainError("need n >= 3")
    return [(0,) + p for p in itertools.permutations(range(1, n)) if p[0] < p[-1]]


def tour_edges(tour) -> list[tuple[int, int]]:
    return [tuple(sorted((tour[i], tour[(i + 1) % len(tour)]))) for i in range(len(tour))]


def _edge_index(n: int) -> dict[tuple[int, int], int]:
    return {e: t for t, e in enumerate(itertools.combinations(range(n), 2))}


def degree_polytope_lp(n: int, objective) -> LpProblem:
    """``max objective . x`` over ``0 <= x <= 1`` with every vertex degree equal to 2."""
    idx = _edge_index(n)
    m = len(idx)
    lp = LpProblem(m, objective, bounds=[(0.0, 1.0)] * m)
    for v in range(n):
        row = np.zeros(m)
        for (i, j), t in idx.items():
            if v in (i, j):
                row[t] = 1.0
        lp.add_row(row, "==", 2.0)
    return lp


def subtour_lp(C) -> LpProblem:
    """Subtour-elimination LP for cost ``C`` (as a maximisation of ``-C . x``)."""
    C = linalg.as_symmetric(C, "cost")
    n = C.shape[0]
    if n > 12:
        raise TooLarge("explicit subtour rows are limited to n <= 12")
    idx = _edge_index(n)
    lp = degree_polytope_lp(n, -C[np.triu_indices(n, 1)])
    for size in range(2, n - 1):
        for rest in itertools.combinations(range(1, n), size - 1):
            S = {0, *rest}
            row = np.zeros(len(idx))
            for (i, j), t in idx.items():
                if (i in S) != (j in S):
                    row[t] = 1.0
            lp.add_row(row, ">=", 2.0)
    return lp


def subtour_lp_value(C) -> float:
    sol = simplex_solve(subtour_lp(C))
    if sol.status != "optimal":
        raise DomainError(f"subtour LP returned status {sol.status}")
    return -sol.objective_value


@dataclass(frozen=True)
class FiveCityReport:
    cycles_feasible: bool
    probes: int
    probes_on_cycles: int
    halves_decomposed: bool
    halves_weights: tuple[float, ...]

    @property
    def ok(self) -> bool:
        return self.cycles_feasible and self.probes_on_cycles == self.probes and self.halves_decomposed


def n5_report(seed=0, trials: int = 200, tol: float = 1e-8) -> FiveCityReport:
    """Degree constraints plus bounds describe exactly the tour polytope of ``K_5``.

    Checks every tour against the subtour system, probes vertices of the degree
    polytope with random objectives, and writes the all-halves point as a convex
    combination of tours.
    """
    n = 5
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    cycles = hamiltonian_cycles(n)
    vectors = np.array([EdgeVector.from_edges(n, tour_edges(t)).values for t in cycles])
    cycles_feasible = len(cycles) == 12 and all(
        not subtour_check(EdgeVector(n, v), tol).violated for v in vectors
    )

    on_cycle = 0
    for _ in range(trials):
        sol = simplex_solve(degree_polytope_lp(n, rng.normal(size=vectors.shape[1])))
        if sol.status == "optimal" and np.min(np.max(np.abs(vectors - sol.x), axis=1)) <= tol:
            on_cycle += 1

    halves = np.full(vectors.shape[1], 0.5)
    combo = LpProblem(len(cycles), np.zeros(len(cycles)))
    for t in range(vectors.shape[1]):
        combo.add_row(vectors[:, t], "==", halves[t])
    combo.add_row(np.ones(len(cycles)), "==", 1.0)
    res = simplex_solve(combo)
    decomposed = res.status == "optimal" and bool(
        np.max(np.abs(res.x @ vectors - halves)) <= tol and np.all(res.x >= -tol)
    )
    weights = tuple(float(w) for w in res.x) if res.status == "optimal" else ()
    return FiveCityReport(cycles_feasible, trials, on_cycle, decomposed, weights)


def n5_equivalence_check(seed=0, trials: int = 200) -> bool:
    return n5_report(seed, trials).ok
