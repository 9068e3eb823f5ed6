"""The single-matrix spectral SDP relaxation and algebraic connectivity.

Feasible ``X`` are weighted 2-regular graphs whose Laplacian ``2I - X`` has
second-smallest eigenvalue at least that of the n-cycle,
``h_n = 2 - 2 cos(2 pi / n)``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, DomainError, RowSumError, VerdictMismatch
from .tsp_sdp import SdpInstance


@dataclass(frozen=True)
class SpectralReport:
    row_sum_ok: bool
    diag_ok: bool
    entry_bound_ok: bool
    lambda2: float
    h_n: float
    direct_min_eig: float
    objective: float
    feasible: bool

    def to_dict(self) -> dict:
        return asdict(self)


def laplacian(X, tol: float = 1e-8) -> np.ndarray:
    """``2I - X`` for a symmetric ``X`` whose rows all sum to 2."""
    X = linalg.as_symmetric(X, "X")
    dev = float(np.max(np.abs(X.sum(axis=1) - 2.0)))
    if dev > tol:
        raise RowSumError(f"row sums of X deviate from 2 by {dev:.3g}")
    return 2.0 * np.eye(X.shape[0]) - X


def h_value(n: int) -> float:
    """Algebraic connectivity of the n-cycle."""
    if n < 3:
        raise DomainError(f"n must be >= 3, got {n}")
    return 2.0 - 2.0 * math.cos(2.0 * math.pi / n)


def algebraic_connectivity(L: np.ndarray, kernel_tol: float = 1e-8) -> float:
    """Second-smallest eigenvalue of a Laplacian, checking the smallest is ~0."""
    vals = linalg.spectrum(L).eigenvalues
    if abs(vals[0]) > kernel_tol * (1.0 + abs(vals[-1])):
        raise DomainError(f"smallest Laplacian eigenvalue is {vals[0]!r}, not 0")
    return vals[1]


def verify_cvetkovic(inst: SdpInstance, X, tol: float = linalg.DEFAULT_PSD_TOL) -> SpectralReport:
    """Check ``X`` against every constraint of the spectral SDP.

    The semidefinite constraint ``2I - X + h_n (J - I) >= 0`` is decided twice:
    from the spectrum of the shifted matrix itself and from ``lambda_2(2I - X) >= h_n``.
    The two verdicts must agree.
    """
    X = linalg.as_symmetric(X, "X")
    n = X.shape[0]
    if inst.n != n:
        raise DimensionMismatch(f"instance has n={inst.n}, X has n={n}")
    h = h_value(n)
    row_sum_ok = float(np.max(np.abs(X.sum(axis=1) - 2.0))) <= tol
    diag_ok = bool(np.all(np.abs(np.diag(X)) <= tol))
    off = X[~np.eye(n, dtype=bool)]
    entry_bound_ok = bool(np.all(off <= 1.0 + tol))

    L = 2.0 * np.eye(n) - X
    shifted = L + h * (np.ones((n, n)) - np.eye(n))
    direct_ok, direct_min = linalg.psd_check(shifted, tol)

    if row_sum_ok:
        lam2 = algebraic_connectivity(L)
        reduced_ok = lam2 >= h - tol
        if direct_ok != reduced_ok:
            raise VerdictMismatch(
                f"direct PSD check says {direct_ok} (min eig {direct_min!r}) but "
                f"lambda_2 = {lam2!r} vs h_n = {h!r} says {reduced_ok}"
            )
    else:
        # without e in the kernel the reduction to lambda_2 does not apply
        lam2 = linalg.spectrum(L).eigenvalues[1]

    return SpectralReport(
        row_sum_ok=row_sum_ok,
        diag_ok=diag_ok,
        entry_bound_ok=entry_bound_ok,
        lambda2=lam2,
        h_n=h,
        direct_min_eig=direct_min,
        objective=0.5 * float(np.sum(inst.cost * X)),
        feasible=row_sum_ok and diag_ok and entry_bound_ok and direct_ok,
    )


def witness_laplacian_spectrum(n: int, a1: float, b1: float) -> list[float]:
    """Closed-form spectrum of ``2I - X(1)`` for a two-group structured ``X(1)``."""
    d = n // 2
    vals = [2.0 + a1] * (n - 2)
    vals += [2.0 + a1 - d * (a1 + b1), 2.0 + a1 - d * (a1 - b1)]
    return sorted(vals)
