"""Row sums are forced: every feasible SDP solution has ``X(i) e = 2e`` (``e`` for ``i = d``, n even).

The cosine coefficient matrix ``Q`` has an explicit inverse with nonpositive
entries.  Combining the PSD constraints with weights ``-Q^{-1}`` isolates
``X(i) <= 2I`` (``<= I`` for ``i = d`` when n is even), and together with
``sum_j X(j) = J - I`` this pins every row sum.

Odd ``n`` is supported here only: ``d = (n-1)/2`` and all bounds are ``2I``.
Solutions may be passed as :class:`CandidateSolution` or as raw ``(d, n, n)``
stacks, the latter being the only way to express odd ``n``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DomainError, VerificationFailed
from .tsp_sdp import CandidateSolution, cycle_distance


@dataclass(frozen=True)
class QMatrix:
    n: int
    entries: np.ndarray

    @property
    def d(self) -> int:
        return self.n // 2

    @property
    def parity(self) -> str:
        return "even" if self.n % 2 == 0 else "odd"


def q_matrix(n: int) -> QMatrix:
    """``Q[i-1, j-1] = cos(2 pi i j / n)`` for ``i, j = 1..floor(n/2)``."""
    if n < 3:
        raise DomainError(f"need n >= 3, got {n}")
    d = n // 2
    ij = np.outer(np.arange(1, d + 1), np.arange(1, d + 1))
    return QMatrix(n, np.cos(2.0 * np.pi * ij / n))


def _closed_form(q: QMatrix) -> np.ndarray:
    n, d = q.n, q.d
    ij = np.outer(np.arange(1, d + 1), np.arange(1, d + 1))
    cosines = np.cos(2.0 * np.pi * ij / n)
    if q.parity == "odd":
        return 4.0 / n * (cosines - 1.0)
    inv = (2.0 * cosines - 2.0) / d
    sign = (-1.0) ** np.arange(1, d + 1)
    inv[:, -1] = (sign - 1.0) / d
    inv[-1, :] = (sign - 1.0) / d
    inv[-1, -1] = 0.0 if d % 2 == 0 else -1.0 / d
    return inv


def q_inverse_closed_form(q: QMatrix, tol: float = 1e-9) -> np.ndarray:
    """Explicit ``Q^{-1}``; raises :class:`VerificationFailed` if ``Q Q^{-1} != I`` or an entry is positive."""
    inv = _closed_form(q)
    err = float(np.max(np.abs(q.entries @ inv - np.eye(q.d))))
    if err > tol:
        raise VerificationFailed(f"Q Q^-1 deviates from I by {err:.3g} (n={q.n})")
    if np.max(inv) > 1e-12:
        raise VerificationFailed(f"closed-form inverse has a positive entry (n={q.n})")
    return inv


def q_inverse_numeric(q: QMatrix) -> np.ndarray:
    """Reference inverse by LU factorisation."""
    return np.linalg.inv(q.entries)


def row_sum_targets(n: int) -> np.ndarray:
    """``-(Q^{-1} e)``: 2 everywhere, except 1 at ``i = d`` when n is even."""
    d = n // 2
    t = np.full(d, 2.0)
    if n % 2 == 0:
        t[-1] = 1.0
    return t


def _stack(sol) -> np.ndarray:
    mats = sol.mats if isinstance(sol, CandidateSolution) else np.asarray(sol, dtype=float)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2] or mats.shape[0] != mats.shape[1] // 2:
        raise DomainError(f"expected a (floor(n/2), n, n) stack, got {mats.shape}")
    return mats


def constraint_matrices(sol) -> np.ndarray:
    """``M_k = I + sum_j cos(2 pi j k / n) X(j)`` for ``k = 1..d``, stacked."""
    mats = _stack(sol)
    n = mats.shape[1]
    Q = q_matrix(n).entries
    return np.eye(n)[None] + np.tensordot(Q, mats, axes=1)


@dataclass(frozen=True)
class UpperBoundReport:
    ok: bool
    max_eigs: tuple[float, ...]
    bounds: tuple[float, ...]
    telescoping_residuals: tuple[float, ...]
    combination_min_eigs: tuple[float, ...]

    def __bool__(self) -> bool:
        return self.ok


def derive_upper_bounds(sol, tol: float = 1e-8) -> UpperBoundReport:
    """Check ``X(i) <= t_i I`` directly and through the ``-Q^{-1}``-weighted constraint sum.

    ``sum_r -(Q^{-1})_{ir} M_r`` must equal ``t_i I - X(i)`` (the telescoping
    residual) and, being a nonnegative combination, be PSD whenever ``sol`` is
    feasible.
    """
    mats = _stack(sol)
    n, d = mats.shape[1], mats.shape[0]
    targets = row_sum_targets(n)
    weights = -q_inverse_closed_form(q_matrix(n))
    M = constraint_matrices(mats)
    combos = np.tensordot(weights, M, axes=1)

    max_eigs, residuals, combo_mins = [], [], []
    for i in range(d):
        max_eigs.append(linalg.spectrum(mats[i]).max_eig)
        expected = targets[i] * np.eye(n) - mats[i]
        residuals.append(float(np.max(np.abs(combos[i] - expected))))
        sym = 0.5 * (combos[i] + combos[i].T)
        combo_mins.append(linalg.spectrum(sym).min_eig)
    ok = all(
        lam <= t + tol and r <= 1e-8 and cm >= -tol
        for lam, t, r, cm in zip(max_eigs, targets, residuals, combo_mins)
    )
    return UpperBoundReport(ok, tuple(max_eigs), tuple(targets), tuple(residuals), tuple(combo_mins))


@dataclass(frozen=True)
class RowSumReport:
    ok: bool
    worst_matrix: int  # 1-based index j of X(j)
    worst_row: int
    deviation: float

    def __bool__(self) -> bool:
        return self.ok


def row_sum_theorem_check(sol, tol: float = 1e-8) -> RowSumReport:
    """``X(i) e`` against ``t_i e`` for every ``i``; reports the worst offending row."""
    mats = _stack(sol)
    dev = np.abs(mats.sum(axis=2) - row_sum_targets(mats.shape[1])[:, None])
    j, row = np.unravel_index(int(np.argmax(dev)), dev.shape)
    worst = float(dev[j, row])
    return RowSumReport(worst <= tol, int(j) + 1, int(row), worst)


def cycle_stack(n: int) -> np.ndarray:
    """Distance matrices ``A_1..A_d`` of ``C_n`` for any ``n >= 3``, odd included."""
    if n < 3:
        raise DomainError(f"need n >= 3, got {n}")
    dist = cycle_distance(n)
    return np.stack([(dist == j).astype(float) for j in range(1, n // 2 + 1)])


def random_cycle_mixture(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Convex combination of ``count`` vertex-relabelled cycle solutions."""
    base = cycle_stack(n)
    weights = rng.dirichlet(np.ones(count))
    out = np.zeros_like(base)
    for w in weights:
        p = rng.permutation(n)
        out += w * base[:, p][:, :, p]
    # averaging symmetric matrices in floating point keeps them exactly symmetric
    return out


@dataclass(frozen=True)
class PerturbationCertificate:
    quadratic_form: float
    bound: float
    excess: float
    row_sum: float

    @property
    def exceeds(self) -> bool:
        return self.quadratic_form > self.bound


def perturbation_certificate(X1, eps: float = 0.05) -> PerturbationCertificate:
    """Push one row of ``X(1)`` to sum ``2 + 2 eps`` and exhibit a vector violating ``X(1) <= 2I``.

    Weight ``2 eps`` moves onto edge ``(0, 1)`` and off edge ``(1, 2)``, so only
    rows 0 and 2 change.  With ``v = e + eps e_0``,
    ``v^T X v = 2n + 4 eps + 4 eps^2`` while ``2 v^T v = 2n + 4 eps + 2 eps^2``.
    """
    X = np.array(linalg.as_symmetric(X1, "X1"))
    n = X.shape[0]
    if n < 3:
        raise DomainError("need n >= 3")
    for (i, j), delta in (((0, 1), 2 * eps), ((1, 2), -2 * eps)):
        X[i, j] += delta
        X[j, i] += delta
    v = np.ones(n)
    v[0] += eps
    qf = float(v @ X @ v)
    bound = 2.0 * float(v @ v)
    return PerturbationCertificate(qf, bound, qf - bound, float(X[0].sum()))


def expected_excess(eps: float) -> float:
    return 2.0 * eps * eps
