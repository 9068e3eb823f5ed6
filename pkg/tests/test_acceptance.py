"""Acceptance criteria, one test each.

Every test prints a single ``ACCEPTANCE <id> PASS|FAIL <detail>`` line to the
terminal (bypassing capture) before asserting.  Run the file directly with
``python tests/test_acceptance.py`` to get the same lines without pytest.
"""
import math
import sys
from fractions import Fraction
from functools import cache

import numpy as np
import pytest

from tspgap import appendix_algebra as aa
from tspgap import kcycle, linalg, lp_bridge, polytope, spectral, tsp_sdp, witness

SWEEP = range(6, 257, 2)
KCYCLE_PAIRS = [(2, 2), (2, 4), (3, 1), (3, 2), (4, 2)]


@cache
def sweep_certificates():
    return {n: witness.gap_certificate(n, 1e-8) for n in SWEEP}


def criterion_1():
    bad = []
    for n, cert in sweep_certificates().items():
        rep = cert.report
        mats = witness.expand_family(witness.analytic_a(n)).mats
        min_eig = min(rep.psd_min_eigs)
        exact_nonneg = bool(np.all(mats >= 0.0))
        sum_dev = float(np.max(np.abs(mats.sum(axis=0) - (np.ones((n, n)) - np.eye(n)))))
        if not (cert.feasible and len(rep.psd_min_eigs) == n // 2 and min_eig >= -1e-8 and exact_nonneg
                and sum_dev <= 1e-10):
            bad.append(n)
    worst = min(min(c.report.psd_min_eigs) for c in sweep_certificates().values())
    return not bad, f"{len(SWEEP)} orders, worst min eig {worst:.3e}, failures {bad}"


def criterion_2():
    certs = sweep_certificates()
    over = [n for n, c in certs.items() if not c.ratio <= math.pi**2 / (2 * n) + 1e-10]
    c6 = certs[6]
    n6 = (
        abs(c6.ratio - 0.75) <= 1e-10
        and abs(c6.sdp_cost - 1.5) <= 1e-10
        and c6.integer_opt == 2.0
        and abs(c6.a[0] - 0.75) <= 1e-10
        and abs(c6.b[0] - 1 / 6) <= 1e-10
    )
    return not over and n6, f"n=6 cost {c6.sdp_cost!r} ratio {c6.ratio!r}; bound exceeded at {over}"


def criterion_3():
    worst = 0.0
    for n in range(4, 65, 2):
        sol = tsp_sdp.cycle_solution(n)
        for k in range(1, n // 2 + 1):
            M = tsp_sdp.assemble_psd_matrix(sol, k)
            circ = linalg.spectrum(M, "closed_form_circulant").as_array()
            jac = linalg.spectrum(M, "jacobi").as_array()
            table = np.array(sorted(tsp_sdp.cycle_constraint_spectrum(n, k)))
            worst = max(worst, np.max(np.abs(circ - jac)), np.max(np.abs(circ - table)), np.max(np.abs(jac - table)))
    return worst <= 1e-8, f"largest pairwise eigenvalue gap {worst:.3e}"


def criterion_4():
    parts, disagreements = [], 0
    for n in (6, 10, 16, 24, 32):
        trials = lp_bridge.equivalence_trials(n, 100, seed=n, tol=1e-8)
        assert len(trials) == 100
        disagreements += sum(not t.agrees for t in trials)
        parts.append(f"n={n}:{sum(t.sdp_feasible for t in trials)}/100 feasible")
    return disagreements == 0, f"{disagreements} disagreements; " + ", ".join(parts)


def criterion_5():
    rep = polytope.subtour_check(polytope.EdgeVector.from_solution_matrix(
        witness.expand_family(witness.analytic_a(6))[1]))
    ok = (
        rep.violated
        and abs(rep.value - 1.5) <= 1e-12
        and rep.rhs == 2.0
        and set(rep.worst_set) in ({0, 1, 2}, {3, 4, 5})
    )
    return ok, f"value {rep.value!r} rhs {rep.rhs} worst set {list(rep.worst_set)}"


def criterion_6():
    bad, worst = [], 0.0
    for n in range(6, 129, 2):
        X1 = witness.expand_family(witness.analytic_a(n))[1]
        rep = spectral.verify_cvetkovic(tsp_sdp.SdpInstance(witness.cut_cost_matrix(n)), X1, 1e-8)
        gap = abs(rep.lambda2 - (2 - 2 * math.cos(2 * math.pi / n)))
        worst = max(worst, gap)
        if not rep.feasible or gap > 1e-9:
            bad.append(n)
    return not bad, f"largest |lambda2 - h_n| {worst:.3e}, failures {bad}"


def criterion_7():
    details, ok = [], True
    for k, c in KCYCLE_PAIRS:
        cert = kcycle.kcycle_gap_certificate(k, c, 1e-8)
        bound = math.pi**2 * k / ((k + 1) * cert.n)
        good = cert.feasible and cert.report.feasible and cert.ratio <= bound + 1e-10
        ok &= good
        details.append(f"({k},{c}) ratio {cert.ratio:.4g} <= {bound:.4g}")
    for k, c in [(2, 2), (3, 1)]:
        inst = kcycle.kcycle_cost_matrix(k, c)
        brute, _ = kcycle.brute_force_kcycle(inst.cost, k)
        ok &= inst.n == 12 and brute == 2 * k
        details.append(f"brute ({k},{c}) = {brute:g}")
    return ok, "; ".join(details)


QINV_6 = [
    [Fraction(-1, 3), Fraction(-1), Fraction(-2, 3)],
    [Fraction(-1), Fraction(-1), Fraction(0)],
    [Fraction(-2, 3), Fraction(0), Fraction(-1, 3)],
]


def criterion_8():
    worst = 0.0
    for n in list(range(6, 65, 2)) + list(range(5, 64, 2)):
        q = aa.q_matrix(n)
        worst = max(worst, float(np.max(np.abs(q.entries @ aa.q_inverse_closed_form(q) - np.eye(q.d)))))
    inv6 = aa.q_inverse_closed_form(aa.q_matrix(6))
    n6_ok = all(abs(inv6[i, j] - float(QINV_6[i][j])) <= 1e-12 for i in range(3) for j in range(3))

    rows_ok = True
    for n in range(5, 65):
        rows_ok &= bool(aa.row_sum_theorem_check(aa.cycle_stack(n)))
    for n in range(6, 65, 2):
        rows_ok &= bool(aa.row_sum_theorem_check(witness.expand_family(witness.analytic_a(n))))
    # the derivation route (nonnegative combinations of the constraints) on smaller orders
    for n in range(5, 17):
        rows_ok &= bool(aa.derive_upper_bounds(aa.cycle_stack(n)))
    for n in range(6, 17, 2):
        rows_ok &= bool(aa.derive_upper_bounds(witness.expand_family(witness.analytic_a(n))))

    rng = np.random.default_rng(8)
    mixtures = 0
    for n in (6, 8, 10):
        inst = tsp_sdp.SdpInstance(np.ones((n, n)) - np.eye(n))
        for _ in range(20):
            mix = aa.random_cycle_mixture(n, int(rng.integers(2, 6)), rng)
            feasible = tsp_sdp.verify_feasibility(inst, tsp_sdp.CandidateSolution(mix)).feasible
            good = feasible and bool(aa.row_sum_theorem_check(mix)) and bool(aa.derive_upper_bounds(mix))
            rows_ok &= good
            mixtures += good
    ok = worst <= 1e-9 and n6_ok and rows_ok
    return ok, f"max |QQ^-1 - I| {worst:.3e}; n=6 inverse {'matches' if n6_ok else 'differs'}; {mixtures}/60 mixtures"


def criterion_9():
    rep = polytope.n5_report(seed=0, trials=200, tol=1e-8)
    ok = rep.ok and len(polytope.hamiltonian_cycles(5)) == 12 and rep.probes == 200
    return ok, f"{rep.probes_on_cycles}/{rep.probes} probes on cycles; halves decomposed {rep.halves_decomposed}"


def criterion_10():
    costs = [sweep_certificates()[n].sdp_cost for n in range(6, 65, 2)]
    decreasing = all(b < a for a, b in zip(costs, costs[1:]))
    first, verdicts = polytope.mst_first_violation(6, 64, 1e-9)
    persists = first is not None and all(v for n, v in verdicts.items() if n >= first)
    # the (p, q) reduction against a full subset scan where that is affordable
    agree = True
    for n in range(6, 17, 2):
        fam = witness.analytic_a(n)
        full = polytope.mst_polytope_check(polytope.EdgeVector.from_solution_matrix(witness.expand_family(fam)[1]))
        agree &= full.violated == verdicts[n]
    ok = decreasing and persists and agree
    return ok, f"costs strictly decreasing {decreasing}; first MST violation n={first}; persists {persists}"


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}


def _line(cid, ok, detail):
    return f"ACCEPTANCE {cid:>2} {'PASS' if ok else 'FAIL'} {detail}"


def _run(cid):
    try:
        ok, detail = CRITERIA[cid]()
    except Exception as exc:  # a crash is a failure of the criterion
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return bool(ok), detail


@pytest.mark.parametrize("cid", sorted(CRITERIA))
def test_criterion(cid, capsys):
    ok, detail = _run(cid)
    with capsys.disabled():
        print("\n" + _line(cid, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = [(cid, *_run(cid)) for cid in sorted(CRITERIA)]
    for cid, ok, detail in results:
        print(_line(cid, ok, detail))
    sys.exit(0 if all(ok for _, ok, _ in results) else 1)
