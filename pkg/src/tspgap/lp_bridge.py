"""Linear programs equivalent to the SDP on structured families, and a simplex solver.

For the structured families of :mod:`tspgap.witness` the k-th semidefinite
constraint collapses to ``lower <= a^(k) <= 1`` (``lower = -2/(n-2)`` for the
TSP, ``-1/(ck-1)`` for k-cycle covers), so feasibility of the whole SDP is an
LP in ``a_1..a_d``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, IterationLimit, NoConvergence, ParityError

INF = math.inf
RELATIONS = ("<=", ">=", "==")


@dataclass
class LpProblem:
    """``maximize objective . x`` subject to rows and per-variable bounds."""

    num_vars: int
    objective: np.ndarray
    ineq_rows: list = field(default_factory=list)   # (coef, "<=" | ">=", rhs)
    eq_rows: list = field(default_factory=list)     # (coef, rhs)
    bounds: list = field(default_factory=list)      # (lower, upper), +-inf allowed
    labels: list = field(default_factory=list)      # one label per ineq row, optional

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        if self.objective.shape != (self.num_vars,):
            raise DomainError("objective length must equal num_vars")
        if not self.bounds:
            self.bounds = [(0.0, INF)] * self.num_vars
        if len(self.bounds) != self.num_vars:
            raise DomainError("need one (lower, upper) pair per variable")
        self.ineq_rows = [(np.asarray(c, dtype=float), rel, float(r)) for c, rel, r in self.ineq_rows]
        self.eq_rows = [(np.asarray(c, dtype=float), float(r)) for c, r in self.eq_rows]
        for coef, rel, _ in self.ineq_rows:
            if coef.shape != (self.num_vars,) or rel not in ("<=", ">="):
                raise DomainError("malformed inequality row")
        for coef, _ in self.eq_rows:
            if coef.shape != (self.num_vars,):
                raise DomainError("malformed equality row")

    def add_row(self, coef, rel: str, rhs: float, label: str | None = None) -> None:
        if rel == "==":
            self.eq_rows.append((np.asarray(coef, dtype=float), float(rhs)))
            return
        self.ineq_rows.append((np.asarray(coef, dtype=float), rel, float(rhs)))
        self.labels.append(label or f"row{len(self.ineq_rows) - 1}")

    def all_rows(self) -> list[tuple[np.ndarray, str, float, str]]:
        """Every constraint, bounds included, as ``(coef, rel, rhs, label)``."""
        rows = []
        for i, (coef, rel, rhs) in enumerate(self.ineq_rows):
            label = self.labels[i] if i < len(self.labels) else f"row{i}"
            rows.append((coef, rel, rhs, label))
        for i, (coef, rhs) in enumerate(self.eq_rows):
            rows.append((coef, "==", rhs, f"eq{i}"))
        for i, (lo, hi) in enumerate(self.bounds):
            unit = np.zeros(self.num_vars)
            unit[i] = 1.0
            if lo > -INF:
                rows.append((unit, ">=", lo, f"lower{i}"))
            if hi < INF:
                rows.append((unit, "<=", hi, f"upper{i}"))
        return rows

    def violations(self, x, tol: float = 1e-8) -> list[tuple[str, float]]:
        """Rows violated by ``x`` beyond ``tol`` as ``(label, amount)``."""
        x = np.asarray(x, dtype=float)
        out = []
        for coef, rel, rhs, label in self.all_rows():
            lhs = float(coef @ x)
            if rel == "<=":
                excess = lhs - rhs
            elif rel == ">=":
                excess = rhs - lhs
            else:
                excess = abs(lhs - rhs)
            if excess > tol:
                out.append((label, excess))
        return out

    def is_feasible(self, x, tol: float = 1e-8) -> bool:
        return not self.violations(x, tol)

    def to_json(self) -> str:
        rows = [
            {"coef": [float(v) for v in coef], "rel": rel, "rhs": rhs}
            for coef, rel, rhs, _ in self.all_rows()
        ]
        return json.dumps({"n_vars": self.num_vars, "maximize": [float(v) for v in self.objective], "rows": rows})

    @classmethod
    def from_json(cls, text: str) -> "LpProblem":
        """Inverse of :meth:`to_json`; bounds come back as explicit rows on free variables."""
        data = json.loads(text)
        n = data["n_vars"]
        lp = cls(n, data["maximize"], bounds=[(-INF, INF)] * n)
        for row in data["rows"]:
            if row["rel"] not in RELATIONS:
                raise DomainError(f"unknown relation {row['rel']!r}")
            lp.add_row(row["coef"], row["rel"], row["rhs"])
        return lp


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray
    objective_value: float
    iterations: int


# -- simplex ---------------------------------------------------------------------

def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    pivot_row = T[row]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, pivot_row)


def _iterate(T, basis, allowed, tol, budget, counter, refresh=None) -> str:
    """Bland's-rule primal simplex on tableau ``T`` (objective in the last row).

    The last row holds reduced costs ``-c_j + ...``; a negative entry means the
    column improves the (maximisation) objective.  ``refresh`` is called every
    ``_REFRESH_EVERY`` pivots to rebuild the tableau from the original rows.
    """
    m = T.shape[0] - 1
    while True:
        z = T[-1, :-1]
        entering = next((j for j in allowed if z[j] < -tol), None)
        if entering is None:
            return "optimal"
        col = T[:m, entering]
        candidates = np.nonzero(col > tol)[0]
        if candidates.size == 0:
            return "unbounded"
        ratios = T[candidates, -1] / col[candidates]
        best = ratios.min()
        ties = candidates[ratios <= best + tol * max(1.0, abs(best))]
        leave = min(ties, key=lambda r: basis[r])
        if counter[0] >= budget:
            raise IterationLimit(f"simplex exceeded {budget} pivots")
        _pivot(T, leave, entering)
        basis[leave] = entering
        counter[0] += 1
        if refresh is not None and counter[0] % _REFRESH_EVERY == 0:
            refresh()


def _standardize(lp: LpProblem):
    """Rewrite ``lp`` over non-negative variables ``y`` with ``x = offset + transform @ y``."""
    cols, offset = [], np.zeros(lp.num_vars)
    rows = []  # (coef over x, rel, rhs)
    for i, (lo, hi) in enumerate(lp.bounds):
        if lo > -INF:
            offset[i] = lo
            cols.append((i, 1.0))
            if hi < INF:
                unit = np.zeros(lp.num_vars)
                unit[i] = 1.0
                rows.append((unit, "<=", hi))
        elif hi < INF:
            offset[i] = hi
            cols.append((i, -1.0))
        else:
            cols.append((i, 1.0))
            cols.append((i, -1.0))
    transform = np.zeros((lp.num_vars, len(cols)))
    for j, (i, sign) in enumerate(cols):
        transform[i, j] = sign

    rows.extend(lp.ineq_rows)
    for coef, rhs in lp.eq_rows:
        rows.append((coef, "<=", rhs))
        rows.append((coef, ">=", rhs))

    std_rows = []
    for coef, rel, rhs in rows:
        a = coef @ transform
        b = rhs - float(coef @ offset)
        if (rel == ">=" and b <= 0.0) or (rel == "<=" and b < 0.0):
            a, b = -a, -b
            rel = "<=" if rel == ">=" else ">="
        std_rows.append((a, rel, b))
    return transform, offset, std_rows


def simplex_solve(lp: LpProblem, tol: float = 1e-9, max_pivots: int = 100_000) -> LpSolution:
    """Two-phase dense tableau simplex with Bland's anti-cycling rule.

    The tableau is rebuilt from the original rows every ``_REFRESH_EVERY``
    pivots.  A final point violating a row by more than ``_ACCEPT_TOL`` raises
    :class:`NoConvergence`; on the family LPs this first happens at n = 94.
    """
    transform, offset, rows = _standardize(lp)
    ny = transform.shape[1]
    m = len(rows)
    n_art = sum(1 for _, rel, _ in rows if rel == ">=")
    n_cols = ny + m + n_art
    T = np.zeros((m + 1, n_cols + 1))
    basis = [0] * m
    art_cols = []
    a_idx = ny + m
    for r, (coef, rel, rhs) in enumerate(rows):
        T[r, :ny] = coef
        T[r, -1] = rhs
        if rel == "<=":
            T[r, ny + r] = 1.0
            basis[r] = ny + r
        else:
            T[r, ny + r] = -1.0
            T[r, a_idx] = 1.0
            basis[r] = a_idx
            art_cols.append(a_idx)
            a_idx += 1

    A0 = T[:m, :-1].copy()
    b0 = T[:m, -1].copy()

    counter = [0]
    real_cols = list(range(ny + m))
    if art_cols:
        # phase 1: maximise -sum(artificials)
        T[-1, art_cols] = 1.0
        for r in range(m):
            if basis[r] in art_cols:
                T[-1] -= T[r]
        c_phase1 = np.zeros(T.shape[1] - 1)
        c_phase1[art_cols] = -1.0
        _iterate(T, basis, real_cols + art_cols, tol, max_pivots, counter,
                 lambda: _reinvert(T, A0, b0, c_phase1, basis))
        _reinvert(T, A0, b0, c_phase1, basis)
        infeasibility = -T[-1, -1]
        scale = 1.0 + float(np.max(np.abs(T[:m, -1]))) if m else 1.0
        if infeasibility > tol * scale:
            return LpSolution("infeasible", np.full(lp.num_vars, np.nan), math.nan, counter[0])
        art_set = set(art_cols)
        keep = []
        for r in range(m):
            if basis[r] in art_set:
                swap = next((j for j in real_cols if abs(T[r, j]) > tol), None)
                if swap is None:
                    continue  # redundant row
                _pivot(T, r, swap)
                basis[r] = swap
                counter[0] += 1
            keep.append(r)
        T = np.vstack([T[keep], T[-1:]])
        basis = [basis[r] for r in keep]
        T = np.delete(T, art_cols, axis=1)
        A0 = np.delete(A0[keep], art_cols, axis=1)
        b0 = b0[keep]
        m = len(basis)

    c_full = np.zeros(T.shape[1] - 1)
    c_full[:ny] = lp.objective @ transform
    T[-1] = 0.0
    T[-1, :-1] = -c_full
    for r in range(m):
        j = basis[r]
        if T[-1, j] != 0.0:
            T[-1] -= T[-1, j] * T[r]
    def refresh():
        _reinvert(T, A0, b0, c_full, basis)

    for _ in range(_REINVERSIONS):
        status = _iterate(T, basis, real_cols, tol, max_pivots, counter, refresh)
        if status == "unbounded":
            return LpSolution("unbounded", np.full(lp.num_vars, np.nan), math.inf, counter[0])
        refresh()
        if not np.any(T[-1, real_cols] < -tol):
            break

    y = np.zeros(T.shape[1] - 1)
    for r in range(m):
        y[basis[r]] = max(T[r, -1], 0.0)
    x = offset + transform @ y[:ny]
    bad = lp.violations(x, _ACCEPT_TOL)
    if bad:
        # round-off steered the tableau to a wrong basis; refuse rather than report it
        raise NoConvergence(f"simplex lost feasibility: {bad[0][0]} off by {bad[0][1]:.3g}")
    return LpSolution("optimal", x, float(lp.objective @ x), counter[0])


_REINVERSIONS = 5
_REFRESH_EVERY = 50
_ACCEPT_TOL = 1e-7


def _reinvert(T, A0, b0, c_full, basis) -> None:
    """Rebuild the tableau for ``basis`` from the original rows, discarding accumulated round-off."""
    m = len(basis)
    if m == 0:
        return
    B = A0[:, basis]
    try:
        T[:m, :-1] = np.linalg.solve(B, A0)
        T[:m, -1] = np.linalg.solve(B, b0)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence("simplex basis became singular") from exc
    cb = c_full[basis]
    T[-1, :-1] = cb @ T[:m, :-1] - c_full
    T[-1, -1] = cb @ T[:m, -1]


# -- the structured-family LPs -------------------------------------------------------

def _cos_rows(n: int) -> np.ndarray:
    d = n // 2
    ik = np.outer(np.arange(1, d + 1), np.arange(1, d + 1))
    return np.cos(2.0 * np.pi * ik / n)


def _family_lp(n: int, lower: float, upper: float, objective_index: int) -> LpProblem:
    d = n // 2
    obj = np.zeros(d)
    obj[objective_index - 1] = 1.0
    ubs = [upper] * (d - 1) + [upper / 2.0]
    lp = LpProblem(d, obj, bounds=[(0.0, u) for u in ubs])
    Q = _cos_rows(n)
    for k in range(1, d + 1):
        lp.add_row(Q[k - 1], ">=", lower, f"cos{k}>=")
        lp.add_row(Q[k - 1], "<=", 1.0, f"cos{k}<=")
    lp.add_row(np.ones(d), "==", 1.0)
    return lp


def build_tsp_lp(n: int) -> LpProblem:
    """``max a_1`` s.t. ``-2/(n-2) <= a^(k) <= 1``, ``sum a = 1``, ``0 <= a_i <= 4/(n-2)`` (``2/(n-2)`` for ``a_d``)."""
    if n < 6 or n % 2:
        raise DomainError(f"need an even n >= 6, got {n}")
    return _family_lp(n, -2.0 / (n - 2), 4.0 / (n - 2), 1)


def build_kcycle_lp(k: int, c: int) -> LpProblem:
    """The k-cycle analogue: ``n = ck(k+1)``, objective ``a_k``, ``-1/(ck-1) <= a^(j) <= 1``."""
    if k < 2 or c < 1:
        raise DomainError(f"need k >= 2 and c >= 1, got k={k}, c={c}")
    if k % 2 == 0 and c % 2:
        raise ParityError(f"k={k} is even, so c must be even (got c={c})")
    n = c * k * (k + 1)
    return _family_lp(n, -1.0 / (c * k - 1), 2.0 / (c * k - 1), k)


# -- LP <=> SDP agreement ----------------------------------------------------------

@dataclass(frozen=True)
class EquivalenceTrial:
    lp_feasible: bool
    sdp_feasible: bool
    range_ok: tuple[bool, ...]
    psd_ok: tuple[bool, ...]

    @property
    def agrees(self) -> bool:
        return self.lp_feasible == self.sdp_feasible and self.range_ok == self.psd_ok


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def equivalence_trials(n: int, trials: int, seed=0, tol: float = 1e-8, groups: int = 2) -> list[EquivalenceTrial]:
    """Compare LP-row feasibility with full SDP verification on random families.

    Besides the overall verdicts, each constraint ``k`` is compared separately:
    the range test on ``a^(k)`` against the sign of the smallest eigenvalue of
    the k-th constraint matrix.
    """
    from .tsp_sdp import SdpInstance, verify_feasibility
    from .witness import cut_cost_matrix, expand_family, random_family, range_test

    rng = _as_rng(seed)
    if groups == 2:
        lp = build_tsp_lp(n)
        cost = cut_cost_matrix(n)
        lower = -2.0 / (n - 2)
    else:
        from .kcycle import kcycle_cost_matrix

        k = groups - 1
        c = n // (k * (k + 1))
        lp = build_kcycle_lp(k, c)
        cost = kcycle_cost_matrix(k, c).cost
        lower = -1.0 / (c * k - 1)
    inst = SdpInstance(cost, check_metric=False)

    out = []
    for _ in range(trials):
        fam = random_family(n, rng, groups)
        report = verify_feasibility(inst, expand_family(fam), tol)
        out.append(
            EquivalenceTrial(
                lp_feasible=lp.is_feasible(fam.a, tol),
                sdp_feasible=report.feasible,
                range_ok=tuple(range_test(fam, lower, tol)),
                psd_ok=tuple(m >= -tol for m in report.psd_min_eigs),
            )
        )
    return out


def check_equivalence(n: int, trials: int = 100, seed=0, tol: float = 1e-8) -> bool:
    if n < 6 or n % 2:
        raise DomainError(f"need an even n >= 6, got {n}")
    return all(t.agrees for t in equivalence_trials(n, trials, seed, tol))
