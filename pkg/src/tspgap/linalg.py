"""Dense symmetric linear algebra.

Matrices are plain ``numpy.ndarray`` objects of dtype float64.  Spectra are
computed by one of three routes:

* the real cosine sum for symmetric circulants,
* the closed form for matrices of the shape ``c*I + B (x) J_m``,
* a classical (largest-pivot) Jacobi eigenvalue iteration for everything else.

:func:`spectrum` picks the cheapest applicable route; the individual routes
are public so they can be cross-checked against each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DomainError, NonSymmetricCirculant, NoConvergence, NotSymmetric

DEFAULT_PSD_TOL = 1e-8
DEFAULT_JACOBI_TOL = 1e-12

METHODS = ("closed_form_circulant", "closed_form_kronecker", "jacobi")


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[float, ...]
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown spectrum method {self.method!r}")
        vals = tuple(sorted(float(v) for v in self.eigenvalues))
        object.__setattr__(self, "eigenvalues", vals)

    @property
    def min_eig(self) -> float:
        return self.eigenvalues[0]

    @property
    def max_eig(self) -> float:
        return self.eigenvalues[-1]

    def __len__(self):
        return len(self.eigenvalues)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.eigenvalues)


def as_symmetric(A, name: str = "matrix") -> np.ndarray:
    """Return ``A`` as a float array, raising unless it is square and exactly symmetric."""
    arr = np.asarray(A, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise NotSymmetric(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.array_equal(arr, arr.T):
        raise NotSymmetric(f"{name} is not symmetric")
    return arr


def identity(n: int) -> np.ndarray:
    _check_order(n)
    return np.eye(n)


def all_ones(n: int) -> np.ndarray:
    _check_order(n)
    return np.ones((n, n))


def kron(A, B) -> np.ndarray:
    """Kronecker product; block ``(i, j)`` of the result is ``A[i, j] * B``."""
    return np.kron(np.asarray(A, dtype=float), np.asarray(B, dtype=float))


def _check_order(n):
    if int(n) != n or n < 1:
        raise DomainError(f"matrix order must be a positive integer, got {n!r}")


# -- circulants --------------------------------------------------------------

def circulant(first_row: Sequence[float]) -> np.ndarray:
    """Circulant matrix with entry ``(s, t) = m[(t - s) mod n]``.

    For a symmetric first row (``m[j] == m[n-j]``) this coincides with the
    ``m[(s - t) mod n]`` convention.
    """
    m = np.asarray(first_row, dtype=float)
    n = m.shape[0]
    _check_order(n)
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return m[idx]


def is_circulant(A: np.ndarray) -> bool:
    """Exact structural test: every row is the cyclic shift of the first."""
    n = A.shape[0]
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return bool(np.array_equal(A, A[0][idx]))


def circulant_eigenvalues(first_row: Sequence[float], tol: float = 1e-12) -> Spectrum:
    """Eigenvalues of a symmetric circulant from the real cosine sum.

    ``lambda_t = sum_s m_s cos(2 pi s t / n)`` for ``t = 1..n``; the sine part
    cancels because ``m_s == m_{n-s}``.
    """
    m = np.asarray(first_row, dtype=float)
    n = m.shape[0]
    _check_order(n)
    mirrored = m[(-np.arange(n)) % n]
    scale = 1.0 + float(np.max(np.abs(m)))
    if np.max(np.abs(m - mirrored)) > tol * scale:
        raise NonSymmetricCirculant("first row must satisfy m[j] == m[n-j]")
    st = np.outer(np.arange(n), np.arange(1, n + 1)) % n
    vals = np.cos(2.0 * np.pi * st / n).T @ m
    return Spectrum(tuple(vals), "closed_form_circulant")


# -- Kronecker structure -------------------------------------------------------

@dataclass(frozen=True)
class KronStructure:
    """``A == shift * I_n + blocks (x) J_m`` with ``blocks`` of order ``n // m``."""

    shift: float
    blocks: np.ndarray
    block_size: int


def _divisors_desc(n: int) -> list[int]:
    return [m for m in range(n, 1, -1) if n % m == 0]


def kron_structure(A: np.ndarray, atol: float | None = None) -> KronStructure | None:
    """Detect ``A = c*I + B (x) J_m`` for the largest possible block size ``m >= 2``.

    Returns ``None`` when no such decomposition exists.
    """
    n = A.shape[0]
    if n < 2:
        return None
    if atol is None:
        atol = 1e-13 * (1.0 + float(np.max(np.abs(A))))
    diag = np.diag(A)
    for m in _divisors_desc(n):
        p = n // m
        tiles = A.reshape(p, m, p, m)
        rep = tiles[:, 0, :, 1]
        off = tiles - rep[:, None, :, None]
        # diagonal entries of A sit on the block diagonals and are tested separately
        off_flat = off.reshape(n, n).copy()
        np.fill_diagonal(off_flat, 0.0)
        if np.max(np.abs(off_flat)) > atol:
            continue
        shifts = diag - np.repeat(np.diag(rep), m)
        if np.max(shifts) - np.min(shifts) > atol:
            continue
        return KronStructure(float(np.mean(shifts)), rep.copy(), m)
    return None


def kron_eigenvalues(ks: KronStructure) -> Spectrum:
    """Spectrum of ``c*I + B (x) J_m``: ``c`` repeated ``p(m-1)`` times and ``c + m*lambda(B)``."""
    p = ks.blocks.shape[0]
    inner = spectrum(ks.blocks).eigenvalues
    vals = [ks.shift] * (p * (ks.block_size - 1))
    vals.extend(ks.shift + ks.block_size * lam for lam in inner)
    return Spectrum(tuple(vals), "closed_form_kronecker")


# -- Jacobi ------------------------------------------------------------------

def jacobi_eigenvalues(A, tol: float = DEFAULT_JACOBI_TOL, max_rotations: int | None = None) -> Spectrum:
    """Classical Jacobi iteration with largest-pivot selection.

    The pivot is the largest off-diagonal magnitude, ties going to the lowest
    row and then the lowest column.  Iteration stops once the off-diagonal
    Frobenius norm is at most ``tol * max(1, ||A||_F)``.  Raises
    :class:`NoConvergence` after ``100 n^2`` rotations.
    """
    a = np.array(as_symmetric(A), dtype=float)
    n = a.shape[0]
    if max_rotations is None:
        max_rotations = 100 * n * n
    if n == 1:
        return Spectrum((float(a[0, 0]),), "jacobi")

    threshold2 = (tol * max(1.0, float(np.linalg.norm(a)))) ** 2

    rotations = 0
    while True:
        work = np.abs(a)
        np.fill_diagonal(work, 0.0)
        if float(np.sum(work * work)) <= threshold2:
            break
        if rotations >= max_rotations:
            raise NoConvergence(f"Jacobi did not converge within {max_rotations} rotations (n={n})")
        flat = int(np.argmax(work))
        p, q = divmod(flat, n)
        apq = a[p, q]

        app, aqq = a[p, p], a[q, q]
        diff = aqq - app
        if abs(apq) < 1e-150 * abs(diff):
            t = apq / diff  # theta would overflow; t ~ 1/(2 theta)
        else:
            theta = diff / (2.0 * apq)
            t = 1.0 / (abs(theta) + math.hypot(theta, 1.0))
            if theta < 0.0:
                t = -t
        c = 1.0 / math.sqrt(t * t + 1.0)
        s = t * c

        col_p = a[:, p].copy()
        col_q = a[:, q].copy()
        new_p = c * col_p - s * col_q
        new_q = s * col_p + c * col_q
        a[:, p] = new_p
        a[:, q] = new_q
        a[p, :] = new_p
        a[q, :] = new_q
        a[p, p] = app - t * apq
        a[q, q] = aqq + t * apq
        a[p, q] = a[q, p] = 0.0

        rotations += 1

    return Spectrum(tuple(np.diag(a)), "jacobi")


# -- dispatch & PSD ------------------------------------------------------------

def spectrum(A, method: str | None = None) -> Spectrum:
    """Eigenvalues of a symmetric matrix.

    With ``method=None`` the circulant closed form is used when the matrix is
    exactly circulant, then the Kronecker closed form when applicable, else
    Jacobi.  Passing a method name forces that route.
    """
    arr = as_symmetric(A)
    if method is None:
        if arr.shape[0] > 2 and is_circulant(arr):
            return circulant_eigenvalues(arr[0])
        ks = kron_structure(arr)
        if ks is not None and ks.blocks.shape[0] < arr.shape[0]:
            return kron_eigenvalues(ks)
        return jacobi_eigenvalues(arr)
    if method == "closed_form_circulant":
        if not is_circulant(arr):
            raise DomainError("matrix is not circulant")
        return circulant_eigenvalues(arr[0])
    if method == "closed_form_kronecker":
        ks = kron_structure(arr)
        if ks is None:
            raise DomainError("matrix has no c*I + B (x) J structure")
        return kron_eigenvalues(ks)
    if method == "jacobi":
        return jacobi_eigenvalues(arr)
    raise ValueError(f"unknown spectrum method {method!r}")


def default_psd_tol(A) -> float:
    return DEFAULT_PSD_TOL * (1.0 + float(np.max(np.abs(np.asarray(A)))))


def psd_check(A, tol: float | None = None, method: str | None = None) -> tuple[bool, float]:
    """Return ``(min_eig >= -tol, min_eig)``.

    ``tol=None`` means ``1e-8 * (1 + max|A_ij|)``.
    """
    if tol is None:
        tol = default_psd_tol(A)
    if tol < 0:
        raise DomainError("tol must be non-negative")
    lam = spectrum(A, method).min_eig
    return lam >= -tol, lam


# -- CSV -----------------------------------------------------------------------

def format_csv(A) -> str:
    arr = np.asarray(A, dtype=float)
    lines = [f"n={arr.shape[0]}"]
    lines.extend(",".join(f"{x:.17g}" for x in row) for row in arr)
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n="):
        raise DomainError("matrix CSV must start with a 'n=<order>' header")
    n = int(lines[0][2:])
    rows = [[float(tok) for tok in ln.split(",")] for ln in lines[1:]]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise DomainError(f"matrix CSV body is not {n}x{n}")
    return np.array(rows)


def write_csv(path, A) -> None:
    Path(path).write_text(format_csv(A))


def read_csv(path) -> np.ndarray:
    return parse_csv(Path(path).read_text())
