"""Cut-semimetric instances and the structured feasible solutions that beat them.

The instance puts ``n/2`` cities at 0 and ``n/2`` at 1 on a line.  Every tour
costs at least 2, while the SDP admits solutions of cost ``(n/2)^2 b_1``,
roughly ``pi^2 / n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DomainError, IdentityViolation, InfeasibleWitness
from .tsp_sdp import CandidateSolution, ConstraintReport, SdpInstance, cosine_matrix, verify_feasibility


def cut_cost_matrix(n: int) -> np.ndarray:
    """``[[0, 1], [1, 0]] (x) J_{n/2}``: cost 1 across the two halves, 0 inside."""
    if n < 4 or n % 2:
        raise DomainError(f"the cut instance needs an even n >= 4, got {n}")
    return linalg.kron([[0.0, 1.0], [1.0, 0.0]], linalg.all_ones(n // 2))


@dataclass(frozen=True)
class StructuredFamily:
    """Per-index intragroup weight ``a[j]`` and intergroup weight ``b[j]``.

    The vertex set is split into ``groups`` consecutive blocks of equal size;
    ``X(j)`` carries ``a[j]`` inside a block, ``b[j]`` across blocks and 0 on
    the diagonal.  ``groups=2`` is the TSP construction; the k-cycle one uses
    ``groups = k + 1``.
    """

    n: int
    a: np.ndarray
    b: np.ndarray
    groups: int = 2

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if self.n % 2 or self.n % self.groups:
            raise DomainError(f"n={self.n} must be even and divisible by groups={self.groups}")
        if a.shape != (self.d,) or b.shape != (self.d,):
            raise DomainError(f"a and b must have length d={self.d}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def d(self) -> int:
        return self.n // 2

    @property
    def group_size(self) -> int:
        return self.n // self.groups

    def row_sums(self) -> np.ndarray:
        """Row sum of each ``X(j)``: ``(m-1) a_j + (n-m) b_j`` with ``m`` the group size."""
        m = self.group_size
        return (m - 1) * self.a + (self.n - m) * self.b

    def coupling_residual(self) -> float:
        target = np.full(self.d, 2.0)
        target[-1] = 1.0
        return float(np.max(np.abs(self.row_sums() - target)))

    @property
    def nonnegative(self) -> bool:
        return bool(np.all(self.a >= 0.0) and np.all(self.b >= 0.0))


def family_from_a(n: int, a, groups: int = 2) -> StructuredFamily:
    """Complete ``a`` with the ``b`` that gives ``X(j)`` the row sums of ``A_j(C_n)``."""
    if n % 2 or n % groups:
        raise DomainError(f"n={n} must be even and divisible by groups={groups}")
    a = np.asarray(a, dtype=float)
    m = n // groups
    target = np.full(n // 2, 2.0)
    target[-1] = 1.0
    b = (target - (m - 1) * a) / (n - m)
    return StructuredFamily(n, a, b, groups)


def expand_family(fam: StructuredFamily) -> CandidateSolution:
    """Materialise ``X(j) = (b_j J_g + (a_j - b_j) I_g) (x) J_m - a_j I_n``."""
    g, m, n = fam.groups, fam.group_size, fam.n
    same = np.repeat(np.arange(g), m)
    same = same[:, None] == same[None, :]
    mats = np.where(same[None, :, :], fam.a[:, None, None], fam.b[:, None, None])
    idx = np.arange(n)
    mats[:, idx, idx] = 0.0
    return CandidateSolution(mats)


def analytic_a(n: int) -> StructuredFamily:
    """``a_i = 2/(n-2) (cos(pi i / d) + 1)`` for ``i = 1..d``."""
    if n < 6 or n % 2:
        raise DomainError(f"the analytic family needs an even n >= 6, got {n}")
    d = n // 2
    i = np.arange(1, d + 1)
    a = 2.0 / (n - 2) * (np.cos(np.pi * i / d) + 1.0)
    return family_from_a(n, a)


def _check_k(fam: StructuredFamily, k: int):
    if not 1 <= k <= fam.d:
        raise DomainError(f"k must lie in [1, {fam.d}], got {k}")


def a_hat(fam: StructuredFamily, k: int) -> float:
    """``a^(k) = sum_i cos(2 pi i k / n) a_i``."""
    _check_k(fam, k)
    return float(cosine_matrix(fam.n)[k - 1] @ fam.a)


def b_hat(fam: StructuredFamily, k: int) -> float:
    """``b^(k) = sum_i cos(2 pi i k / n) b_i``, checked against its closed form in ``a^(k)``.

    For two groups the closed form is ``-(1 - 2/n) a^(k) - 2/n``; in general,
    with group size ``m``, it is ``-(1 + (m-1) a^(k)) / (n - m)``.
    """
    _check_k(fam, k)
    direct = float(cosine_matrix(fam.n)[k - 1] @ fam.b)
    m = fam.group_size
    closed = -(1.0 + (m - 1) * a_hat(fam, k)) / (fam.n - m)
    if abs(direct - closed) > 1e-8:
        raise IdentityViolation(
            f"b^({k}) direct sum {direct!r} disagrees with closed form {closed!r}; family is corrupted"
        )
    return direct


def a_hat_vector(fam: StructuredFamily) -> np.ndarray:
    return cosine_matrix(fam.n) @ fam.a


def constraint_spectrum(fam: StructuredFamily, k: int) -> list[float]:
    """Closed-form eigenvalue multiset of the k-th constraint matrix of an expanded family.

    ``(1 - a^(k)) I + (b^(k) J_g + (a^(k) - b^(k)) I_g) (x) J_m`` has
    ``1 - a^(k)`` with multiplicity ``g (m - 1)``, ``1 + (m-1) a^(k) - m b^(k)``
    with multiplicity ``g - 1`` and ``1 + (m-1) a^(k) + (n-m) b^(k)`` once.
    """
    ak = a_hat(fam, k)
    bk = float(cosine_matrix(fam.n)[k - 1] @ fam.b)
    g, m = fam.groups, fam.group_size
    vals = [1.0 - ak] * (g * (m - 1))
    vals += [1.0 + (m - 1) * ak - m * bk] * (g - 1)
    vals.append(1.0 + (m - 1) * ak + (fam.n - m) * bk)
    return sorted(vals)


def range_test(fam: StructuredFamily, lower: float, tol: float = 1e-8) -> list[bool]:
    """Per-k verdict of ``lower - tol <= a^(k) <= 1 + tol``."""
    ah = a_hat_vector(fam)
    return [bool(lower - tol <= v <= 1.0 + tol) for v in ah]


def random_family(n: int, rng: np.random.Generator, groups: int = 2) -> StructuredFamily:
    """Random row-sum-consistent family with ``sum a = 1``, feasible or not.

    A feasible base point mixes the analytic family with the uniform vector
    ``a_i = 1/d`` (strictly feasible).  It is then pulled towards a random
    simplex point shaped by the upper bounds that keep ``b >= 0``, by a
    log-uniform amount in ``[1e-4, 1]``, so both verdicts occur at every
    ``n``.  Normalisation can lift entries past those bounds, giving ``b < 0``.
    """
    d = n // 2
    m = n // groups
    upper = np.full(d, 2.0 / (m - 1))
    upper[-1] = 1.0 / (m - 1)
    raw = rng.uniform(0.0, 1.0, d) * upper
    raw /= raw.sum()
    if groups == 2:
        anchor = analytic_a(n).a
    else:
        from .kcycle import kcycle_analytic_a

        k = groups - 1
        anchor = kcycle_analytic_a(k, n // (k * (k + 1))).a
    t = rng.uniform()
    base = t * anchor + (1.0 - t) * np.full(d, 1.0 / d)
    s = 10.0 ** rng.uniform(-4.0, 0.0)
    return family_from_a(n, (1.0 - s) * base + s * raw, groups)


@dataclass(frozen=True)
class WitnessCertificate:
    n: int
    a: np.ndarray
    b: np.ndarray
    a_hat: np.ndarray
    b_hat: np.ndarray
    report: ConstraintReport
    sdp_cost: float
    integer_opt: float
    ratio: float
    theorem_bound: float
    feasible: bool
    seed: int
    k: int | None = None
    c: int | None = None
    cvetkovic: dict | None = field(default=None)

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "a": [float(x) for x in self.a],
            "b": [float(x) for x in self.b],
            "a_hat": [float(x) for x in self.a_hat],
            "min_eigs": [float(x) for x in self.report.psd_min_eigs],
            "sdp_cost": self.sdp_cost,
            "integer_opt": self.integer_opt,
            "ratio": self.ratio,
            "bound": self.theorem_bound,
            "feasible": self.feasible,
            "seed": self.seed,
        }
        if self.k is not None:
            out["k"] = self.k
            out["c"] = self.c
        if self.cvetkovic is not None:
            out["cvetkovic"] = self.cvetkovic
        return out


TSP_OPT_CUT = 2.0


def gap_certificate(n: int, tol: float = linalg.DEFAULT_PSD_TOL, seed: int = 0) -> WitnessCertificate:
    """Build, verify and certify the analytic witness on the cut instance of order ``n``."""
    from .polytope import brute_force_tsp
    from .spectral import verify_cvetkovic

    fam = analytic_a(n)
    inst = SdpInstance(cut_cost_matrix(n))
    sol = expand_family(fam)
    report = verify_feasibility(inst, sol, tol)

    integer_opt = TSP_OPT_CUT
    if n <= 10:
        brute, _ = brute_force_tsp(inst.cost)
        if abs(brute - integer_opt) > 1e-12:
            raise InfeasibleWitness(f"brute-force tour cost {brute} contradicts TSPOPT = 2")

    bhats = np.array([b_hat(fam, k) for k in range(1, fam.d + 1)])
    ratio = report.objective / integer_opt
    bound = math.pi**2 / (2 * n)
    closed_cost = (n / 2) ** 2 * fam.b[0]
    if not report.feasible:
        raise InfeasibleWitness(f"analytic witness failed verification at n={n}: {report.to_dict()}")
    if abs(report.objective - closed_cost) > 1e-10:
        raise InfeasibleWitness(f"objective {report.objective} differs from (n/2)^2 b_1 = {closed_cost}")

    cv = verify_cvetkovic(inst, sol[1], tol)
    return WitnessCertificate(
        n=n,
        a=fam.a,
        b=fam.b,
        a_hat=a_hat_vector(fam),
        b_hat=bhats,
        report=report,
        sdp_cost=report.objective,
        integer_opt=integer_opt,
        ratio=ratio,
        theorem_bound=bound,
        feasible=report.feasible and ratio <= bound + 1e-10 and cv.feasible,
        seed=seed,
        cvetkovic=cv.to_dict(),
    )

