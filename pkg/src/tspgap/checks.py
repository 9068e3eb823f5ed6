"""Invariant batteries runnable from the command line.

Each suite is a list of named zero-argument checks returning ``True`` on
success.  All randomness derives from one seed through
``numpy.random.SeedSequence.spawn``, one child per suite, so the outcome of a
suite does not depend on which other suites ran.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import appendix_algebra as alg
from . import kcycle, linalg, lp_bridge, polytope, spectral, tsp_sdp, witness

SUITES = ("linalg", "sdp", "lp", "spectral", "kcycle", "polytope", "appendix")


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    ok: bool
    detail: str = ""

    def to_dict(self) -> dict:
        out = {"suite": self.suite, "name": self.name, "ok": self.ok}
        if self.detail:
            out["detail"] = self.detail
        return out


def _close(a, b, tol) -> bool:
    return bool(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))) <= tol)


# -- linalg ----------------------------------------------------------------------

def _linalg_checks(rng: np.random.Generator) -> list[tuple[str, Callable[[], bool]]]:
    def circulant_vs_jacobi():
        for n in range(3, 17):
            half = rng.normal(size=n // 2 + 1)
            row = np.array([half[min(j, n - j)] for j in range(n)])
            A = linalg.circulant(row)
            if not _close(linalg.circulant_eigenvalues(row).eigenvalues, linalg.jacobi_eigenvalues(A).eigenvalues, 1e-8):
                return False
        return True

    def kron_vs_jacobi():
        for p, m in ((2, 3), (3, 4), (4, 2)):
            B = rng.normal(size=(p, p))
            B = B + B.T
            A = 0.7 * np.eye(p * m) + linalg.kron(B, np.ones((m, m)))
            got = linalg.spectrum(A, "closed_form_kronecker").eigenvalues
            if not _close(got, linalg.jacobi_eigenvalues(A).eigenvalues, 1e-8):
                return False
        return True

    def jacobi_trace_and_frobenius():
        A = rng.normal(size=(9, 9))
        A = A + A.T
        vals = linalg.jacobi_eigenvalues(A).as_array()
        return abs(vals.sum() - np.trace(A)) < 1e-9 and abs(np.sum(vals**2) - np.sum(A * A)) < 1e-8

    def psd_of_gram():
        G = rng.normal(size=(7, 3))
        return linalg.psd_check(G @ G.T)[0] and not linalg.psd_check(-np.eye(3))[0]

    return [
        ("circulant closed form agrees with Jacobi", circulant_vs_jacobi),
        ("Kronecker closed form agrees with Jacobi", kron_vs_jacobi),
        ("Jacobi preserves trace and Frobenius norm", jacobi_trace_and_frobenius),
        ("Gram matrices are PSD, -I is not", psd_of_gram),
    ]


# -- sdp -------------------------------------------------------------------------

def _sdp_checks(rng: np.random.Generator) -> list[tuple[str, Callable[[], bool]]]:
    def cycle_solutions_feasible():
        for n in range(4, 33, 2):
            inst = tsp_sdp.SdpInstance(np.ones((n, n)) - np.eye(n))
            if not tsp_sdp.verify_feasibility(inst, tsp_sdp.cycle_solution(n)).feasible:
                return False
        return True

    def cycle_spectra_table():
        for n in range(4, 25, 2):
            sol = tsp_sdp.cycle_solution(n)
            for k in range(1, n // 2 + 1):
                got = linalg.spectrum(tsp_sdp.assemble_psd_matrix(sol, k)).eigenvalues
                if not _close(got, tsp_sdp.cycle_constraint_spectrum(n, k), 1e-8):
                    return False
        return True

    def trig_identity():
        return all(
            abs(tsp_sdp.trig_sum(n, k) - (-1 + (-1) ** k) / 2) < 1e-12
            for n in range(2, 41, 2)
            for k in range(1, n)
        )

    def relabelling_invariance():
        n = 10
        sol = witness.expand_family(witness.analytic_a(n))
        perm = rng.permutation(n)
        inst = tsp_sdp.SdpInstance(witness.cut_cost_matrix(n))
        moved = tsp_sdp.SdpInstance(inst.cost[perm][:, perm])
        a = tsp_sdp.verify_feasibility(inst, sol)
        b = tsp_sdp.verify_feasibility(moved, sol.permuted(perm))
        return a.feasible and b.feasible and abs(a.objective - b.objective) < 1e-12

    def witness_sweep():
        for n in range(6, 41, 2):
            cert = witness.gap_certificate(n)
            if not cert.feasible or cert.ratio > math.pi**2 / (2 * n) + 1e-10:
                return False
        return True

    return [
        ("cycle distance matrices are feasible", cycle_solutions_feasible),
        ("cycle constraint spectra match the case table", cycle_spectra_table),
        ("half-period cosine sums", trig_identity),
        ("verification is invariant under relabelling", relabelling_invariance),
        ("analytic witnesses certify ratio <= pi^2/(2n)", witness_sweep),
    ]


# -- lp --------------------------------------------------------------------------

def _lp_checks(rng: np.random.Generator) -> list[tuple[str, Callable[[], bool]]]:
    def toy_problems():
        one = lp_bridge.simplex_solve(lp_bridge.LpProblem(1, [1.0], bounds=[(0.0, 1.0)]))
        bad = lp_bridge.LpProblem(1, [1.0])
        bad.add_row([1.0], "<=", 0.0)
        bad.add_row([1.0], ">=", 1.0)
        return one.status == "optimal" and abs(one.x[0] - 1.0) < 1e-12 and lp_bridge.simplex_solve(bad).status == "infeasible"

    def lp_optimum_vs_analytic():
        for n in range(6, 41, 2):
            lp = lp_bridge.build_tsp_lp(n)
            sol = lp_bridge.simplex_solve(lp)
            if sol.status != "optimal" or sol.objective_value < witness.analytic_a(n).a[0] - 1e-8:
                return False
            if lp.violations(sol.x, 1e-8):
                return False
            fam = witness.family_from_a(n, sol.x)
            inst = tsp_sdp.SdpInstance(witness.cut_cost_matrix(n))
            if not tsp_sdp.verify_feasibility(inst, witness.expand_family(fam)).feasible:
                return False
        return True

    def equivalence():
        return all(lp_bridge.check_equivalence(n, 40, rng) for n in (6, 10, 16))

    def json_round_trip():
        lp = lp_bridge.build_tsp_lp(8)
        back = lp_bridge.LpProblem.from_json(lp.to_json())
        a = lp_bridge.simplex_solve(lp)
        b = lp_bridge.simplex_solve(back)
        return abs(a.objective_value - b.objective_value) < 1e-9

    return [
        ("toy LPs", toy_problems),
        ("LP optimum dominates the analytic a_1 and expands to a feasible SDP point", lp_optimum_vs_analytic),
        ("range test agrees with eigenvalue test", equivalence),
        ("LP JSON round trip", json_round_trip),
    ]


# -- spectral --------------------------------------------------------------------

def _spectral_checks(rng: np.random.Generator) -> list[tuple[str, Callable[[], bool]]]:
    def tightness():
        for n in range(6, 65, 2):
            fam = witness.analytic_a(n)
            X = witness.expand_family(fam)[1]
            rep = spectral.verify_cvetkovic(tsp_sdp.SdpInstance(witness.cut_cost_matrix(n)), X)
            if not rep.feasible or abs(rep.lambda2 - spectral.h_value(n)) > 1e-9:
                return False
            got = linalg.spectrum(spectral.laplacian(X)).eigenvalues
            if not _close(got, spectral.witness_laplacian_spectrum(n, fam.a[0], fam.b[0]), 1e-8):
                return False
        return True

    def implication():
        for n in (6, 10, 16, 24):
            inst = tsp_sdp.SdpInstance(witness.cut_cost_matrix(n))
            for _ in range(10):
                fam = witness.random_family(n, rng)
                sol = witness.expand_family(fam)
                if tsp_sdp.verify_feasibility(inst, sol).feasible and not spectral.verify_cvetkovic(inst, sol[1]).feasible:
                    return False
        return True

    def cycle_h():
        return all(
            abs(linalg.spectrum(2 * np.eye(n) - tsp_sdp.distance_matrix(n, 1)).eigenvalues[1] - spectral.h_value(n)) < 1e-12
            for n in range(3, 65)
        )

    return [
        ("witness X(1) has algebraic connectivity h_n", tightness),
        ("SDP-feasible families pass the spectral SDP", implication),
        ("h_n is the cycle's algebraic connectivity", cycle_h),
    ]


# -- kcycle ----------------------------------------------------------------------

def _kcycle_checks(rng: np.random.Generator) -> list[tuple[str, Callable[[], bool]]]:
    params = kcycle.valid_parameters(72)

    def certificates():
        return all(kcycle.kcycle_gap_certificate(k, c).feasible for k, c in params)

    def b_k_bound():
        for k, c in kcycle.valid_parameters(128):
            fam = kcycle.kcycle_analytic_a(k, c)
            d = fam.d
            if fam.b[k - 1] > math.pi**2 / (c * d * d * (k + 1)) + 1e-10:
                return False
        return True

    def unit_sum():
        return all(abs(kcycle.kcycle_analytic_a(k, c).a.sum() - 1.0) < 1e-10 for k, c in kcycle.valid_parameters(128))

    def equivalence():
        for k, c in ((2, 2), (3, 1), (3, 2)):
            n = c * k * (k + 1)
            if not all(t.agrees for t in lp_bridge.equivalence_trials(n, 20, rng, groups=k + 1)):
                return False
        return True

    return [
        ("analytic k-cycle families are certified", certificates),
        ("b_k stays below pi^2/(c d^2 (k+1))", b_k_bound),
        ("analytic a sums to one", unit_sum),
        ("k-cycle range test agrees with eigenvalue test", equivalence),
    ]


# -- polytope --------------------------------------------------------------------

def _polytope_checks(rng: np.random.Generator) -> list[tuple[str, Callable[[], bool]]]:
    def witness_violates_subtour():
        for n in range(6, 17, 2):
            fam = witness.analytic_a(n)
            rep = polytope.subtour_check(polytope.EdgeVector.from_solution_matrix(witness.expand_family(fam)[1]))
            if not rep.violated or rep.worst_set != tuple(range(n // 2)):
                return False
            if abs(rep.value - (n / 2) ** 2 * fam.b[0]) > 1e-10:
                return False
        return True

    def brute_force_cut():
        return all(polytope.brute_force_tsp(witness.cut_cost_matrix(n))[0] == 2.0 for n in (4, 6, 8))

    def relaxation_ordering():
        for _ in range(5):
            n = int(rng.integers(4, 8))
            pts = rng.uniform(size=(n, 2))
            C = np.hypot(pts[:, None, 0] - pts[None, :, 0], pts[:, None, 1] - pts[None, :, 1])
            C = 0.5 * (C + C.T)
            if polytope.brute_force_tsp(C)[0] < polytope.subtour_lp_value(C) - 1e-8:
                return False
        return True

    def five_cities():
        return polytope.n5_equivalence_check(rng, 50)

    def mst_crossover():
        first, verdicts = polytope.mst_first_violation(6, 64)
        return first is not None and all(v for n, v in verdicts.items() if n >= first)

    return [
        ("witness X(1) violates a subtour cut at a group", witness_violates_subtour),
        ("cut instance has tour cost 2", brute_force_cut),
        ("subtour LP is below the tour optimum", relaxation_ordering),
        ("degree polytope of K_5 is the tour polytope", five_cities),
        ("spanning-tree polytope violation persists", mst_crossover),
    ]


# -- appendix --------------------------------------------------------------------

def _appendix_checks(rng: np.random.Generator) -> list[tuple[str, Callable[[], bool]]]:
    def inverse_matches_numeric():
        for n in range(5, 65):
            q = alg.q_matrix(n)
            if not _close(alg.q_inverse_closed_form(q), alg.q_inverse_numeric(q), 1e-8):
                return False
        return True

    def inverse_row_sums():
        for n in range(6, 65, 2):
            inv = alg.q_inverse_closed_form(alg.q_matrix(n))
            if not _close(inv.sum(axis=1), -alg.row_sum_targets(n), 1e-9):
                return False
        return True

    def bounds_and_row_sums():
        for n in (6, 7, 8, 9, 10):
            mix = alg.random_cycle_mixture(n, 4, rng)
            if not (alg.derive_upper_bounds(mix) and alg.row_sum_theorem_check(mix)):
                return False
        return True

    def perturbation():
        cert = alg.perturbation_certificate(tsp_sdp.distance_matrix(8, 1), 0.05)
        return cert.exceeds and abs(cert.excess - alg.expected_excess(0.05)) < 1e-12

    return [
        ("closed-form Q^-1 matches numeric inversion", inverse_matches_numeric),
        ("Q^-1 e = -2e + e_d", inverse_row_sums),
        ("upper bounds and row sums hold on cycle mixtures", bounds_and_row_sums),
        ("perturbed row sum breaks X(1) <= 2I", perturbation),
    ]


_BUILDERS = {
    "linalg": _linalg_checks,
    "sdp": _sdp_checks,
    "lp": _lp_checks,
    "spectral": _spectral_checks,
    "kcycle": _kcycle_checks,
    "polytope": _polytope_checks,
    "appendix": _appendix_checks,
}


def run_suite(suite: str, seed: int = 0) -> list[CheckResult]:
    """Run one suite, or all of them for ``suite == "all"``; exceptions count as failures."""
    if suite != "all" and suite not in _BUILDERS:
        raise KeyError(suite)
    children = np.random.SeedSequence(seed).spawn(len(SUITES))
    names = SUITES if suite == "all" else (suite,)
    results = []
    for name in names:
        rng = np.random.default_rng(children[SUITES.index(name)])
        for label, check in _BUILDERS[name](rng):
            try:
                ok, detail = bool(check()), ""
            except Exception as exc:  # a crash is a failed invariant, not a crash of the runner
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            results.append(CheckResult(name, label, ok, detail))
    return results
