"""The k-cycle-cover SDP on ``k + 1`` equal groups.

Covering ``n = ck(k+1)`` vertices by ``k`` equal cycles costs at least ``2k``
when intergroup edges cost 1 and intragroup edges cost 0, yet the SDP (same
constraints as the TSP one, objective read from ``X(k)``) admits structured
solutions of cost ``O(k / n)`` times that.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .errors import DimensionMismatch, DomainError, InfeasibleWitness, ParityError, TooLarge
from .tsp_sdp import CandidateSolution, SdpInstance, verify_feasibility
from .witness import StructuredFamily, WitnessCertificate, a_hat_vector, b_hat, expand_family, family_from_a


def _check_parameters(k: int, c: int) -> None:
    if k < 2 or c < 1:
        raise DomainError(f"need k >= 2 and c >= 1, got k={k}, c={c}")
    if k % 2 == 0 and c % 2:
        raise ParityError(f"k={k} is even, so c must be even (got c={c})")


@dataclass(frozen=True)
class KCycleInstance:
    k: int
    c: int
    cost: np.ndarray

    def __post_init__(self):
        _check_parameters(self.k, self.c)
        if self.d % self.k:
            raise ParityError(f"d={self.d} is not a multiple of k={self.k}")
        if self.cost.shape != (self.n, self.n):
            raise DimensionMismatch(f"cost must be {self.n}x{self.n}")

    @property
    def n(self) -> int:
        return self.c * self.k * (self.k + 1)

    @property
    def d(self) -> int:
        return self.n // 2

    @property
    def group_size(self) -> int:
        return self.c * self.k

    @property
    def cycle_length(self) -> int:
        return self.c * (self.k + 1)


def kcycle_cost_matrix(k: int, c: int) -> KCycleInstance:
    """``(J_{k+1} - I_{k+1}) (x) J_{ck}``."""
    _check_parameters(k, c)
    groups = linalg.all_ones(k + 1) - linalg.identity(k + 1)
    return KCycleInstance(k, c, linalg.kron(groups, linalg.all_ones(c * k)))


def kcycle_analytic_a(k: int, c: int) -> StructuredFamily:
    """Weights on multiples of ``k`` only: ``2/(n-k-1) (cos(pi i/d) + k)``, halved at ``i = d``."""
    _check_parameters(k, c)
    n = c * k * (k + 1)
    d = n // 2
    a = np.zeros(d)
    for i in range(k, d + 1, k):
        weight = 1.0 if i == d else 2.0
        a[i - 1] = weight / (n - k - 1) * (math.cos(math.pi * i / d) + k)
    return family_from_a(n, a, groups=k + 1)


def expand_kcycle_family(inst: KCycleInstance, fam: StructuredFamily) -> CandidateSolution:
    if fam.n != inst.n or fam.groups != inst.k + 1:
        raise DimensionMismatch(
            f"family (n={fam.n}, groups={fam.groups}) does not fit instance (n={inst.n}, groups={inst.k + 1})"
        )
    return expand_family(fam)


def kcycle_objective(inst: KCycleInstance, sol: CandidateSolution) -> float:
    """``1/2 <C, X(k)>``."""
    if sol.n != inst.n:
        raise DimensionMismatch(f"instance has n={inst.n}, solution has n={sol.n}")
    return 0.5 * float(np.sum(inst.cost * sol[inst.k]))


def structured_objective(k: int, c: int, b_k: float) -> float:
    """Objective of any structured family: ``(c^2/2) (k+1) k^3 b_k``."""
    return 0.5 * c * c * (k + 1) * k**3 * b_k


# -- brute force ---------------------------------------------------------------

def brute_force_kcycle(cost, k: int) -> tuple[float, list[list[int]]]:
    """Cheapest cover of all vertices by ``k`` vertex-disjoint cycles of equal length.

    Enumerates set partitions (each block keyed by its smallest vertex) and the
    cheapest cycle on each block.  Limited to ``n <= 12``.
    """
    C = linalg.as_symmetric(cost, "cost")
    n = C.shape[0]
    if n > 12:
        raise TooLarge(f"brute-force cycle covers are limited to n <= 12, got {n}")
    if n % k or n // k < 3:
        raise DomainError(f"cannot split n={n} into {k} cycles of length >= 3")
    length = n // k

    @lru_cache(maxsize=None)
    def best_cycle(block: tuple[int, ...]) -> tuple[float, tuple[int, ...]]:
        head, rest = block[0], block[1:]
        best = (math.inf, block)
        for perm in itertools.permutations(rest):
            if perm[0] > perm[-1]:
                continue  # each cycle once per direction
            tour = (head,) + perm
            total = sum(C[tour[i], tour[(i + 1) % length]] for i in range(length))
            if total < best[0]:
                best = (total, tour)
        return best

    def search(remaining: tuple[int, ...]) -> tuple[float, list[tuple[int, ...]]]:
        if not remaining:
            return 0.0, []
        head, rest = remaining[0], remaining[1:]
        best = (math.inf, [])
        for others in itertools.combinations(rest, length - 1):
            block = (head,) + others
            cost_block, tour = best_cycle(block)
            left = tuple(v for v in rest if v not in others)
            cost_rest, tours = search(left)
            if cost_block + cost_rest < best[0]:
                best = (cost_block + cost_rest, [tour] + tours)
        return best

    total, tours = search(tuple(range(n)))
    return float(total), [list(t) for t in tours]


# -- certificate -----------------------------------------------------------------

def kcycle_bound(k: int, n: int) -> float:
    return math.pi**2 * k / ((k + 1) * n)


def kcycle_gap_certificate(k: int, c: int, tol: float = linalg.DEFAULT_PSD_TOL, seed: int = 0) -> WitnessCertificate:
    """Build, verify and certify the analytic k-cycle family on ``(J - I) (x) J_{ck}``."""
    inst = kcycle_cost_matrix(k, c)
    fam = kcycle_analytic_a(k, c)
    sol = expand_kcycle_family(inst, fam)
    report = verify_feasibility(SdpInstance(inst.cost), sol, tol, objective_index=k)

    integer_opt = 2.0 * k
    if inst.n <= 12:
        brute, _ = brute_force_kcycle(inst.cost, k)
        if abs(brute - integer_opt) > 1e-12:
            raise InfeasibleWitness(f"brute-force cover cost {brute} contradicts CYCOPT = 2k = {integer_opt}")
    if not report.feasible:
        raise InfeasibleWitness(f"analytic k-cycle family failed verification at k={k}, c={c}")
    closed = structured_objective(k, c, fam.b[k - 1])
    if abs(report.objective - closed) > 1e-10:
        raise InfeasibleWitness(f"objective {report.objective} differs from closed form {closed}")

    bhats = np.array([b_hat(fam, j) for j in range(1, fam.d + 1)])
    ratio = report.objective / integer_opt
    bound = kcycle_bound(k, inst.n)
    return WitnessCertificate(
        n=inst.n,
        a=fam.a,
        b=fam.b,
        a_hat=a_hat_vector(fam),
        b_hat=bhats,
        report=report,
        sdp_cost=report.objective,
        integer_opt=integer_opt,
        ratio=ratio,
        theorem_bound=bound,
        feasible=report.feasible and ratio <= bound + 1e-10,
        seed=seed,
        k=k,
        c=c,
    )


def valid_parameters(n_max: int) -> list[tuple[int, int]]:
    """All ``(k, c)`` obeying the parity rule with ``ck(k+1) <= n_max``."""
    out = []
    k = 2
    while k * (k + 1) <= n_max:
        c = 1
        while c * k * (k + 1) <= n_max:
            if not (k % 2 == 0 and c % 2):
                out.append((k, c))
            c += 1
        k += 1
    return out
