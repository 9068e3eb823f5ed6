import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tspgap import linalg, tsp_sdp
from tspgap.errors import DimensionMismatch, DomainError, NotMetric, NotSymmetric

even_n = st.integers(2, 32).map(lambda h: 2 * h)


def unit_costs(n):
    return np.ones((n, n)) - np.eye(n)


class TestInstance:
    def test_accepts_metric(self):
        inst = tsp_sdp.SdpInstance(unit_costs(6))
        assert (inst.n, inst.d) == (6, 3)

    def test_rejects_odd(self):
        with pytest.raises(DomainError):
            tsp_sdp.SdpInstance(unit_costs(5))

    def test_rejects_asymmetric(self):
        C = unit_costs(4)
        C[0, 1] = 2.0
        with pytest.raises(NotSymmetric):
            tsp_sdp.SdpInstance(C)

    def test_rejects_nonmetric(self):
        C = unit_costs(4)
        C[0, 1] = C[1, 0] = 5.0
        with pytest.raises(NotMetric):
            tsp_sdp.SdpInstance(C)
        assert tsp_sdp.SdpInstance(C, check_metric=False).n == 4

    def test_rejects_nonzero_diagonal(self):
        with pytest.raises(DomainError):
            tsp_sdp.SdpInstance(np.ones((4, 4)))


class TestTrigSum:
    @given(even_n, st.data())
    @settings(max_examples=80, deadline=None)
    def test_half_period_identity(self, n, data):
        k = data.draw(st.integers(1, n - 1))
        assert tsp_sdp.trig_sum(n, k) == pytest.approx((-1 + (-1) ** k) / 2, abs=1e-12)

    def test_values(self):
        assert tsp_sdp.trig_sum(6, 1) == pytest.approx(-1.0, abs=1e-15)
        assert tsp_sdp.trig_sum(6, 2) == pytest.approx(0.0, abs=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            tsp_sdp.trig_sum(6, 0)
        with pytest.raises(DomainError):
            tsp_sdp.trig_sum(5, 1)


class TestDistanceMatrices:
    def test_partition_of_complete_graph(self):
        for n in range(4, 21, 2):
            sol = tsp_sdp.cycle_solution(n)
            assert np.array_equal(sol.mats.sum(axis=0), unit_costs(n))

    def test_row_sums(self):
        sol = tsp_sdp.cycle_solution(10)
        for j in range(1, 5):
            assert np.all(sol[j].sum(axis=1) == 2)
        assert np.all(sol[5].sum(axis=1) == 1)

    def test_first_is_cycle(self):
        A = tsp_sdp.distance_matrix(6, 1)
        assert A[0, 1] == A[0, 5] == 1 and A[0, 2] == 0

    def test_bad_index(self):
        with pytest.raises(DomainError):
            tsp_sdp.distance_matrix(6, 4)


class TestCandidateSolution:
    def test_shape_checks(self):
        with pytest.raises(DimensionMismatch):
            tsp_sdp.CandidateSolution(np.zeros((2, 6, 6)))
        M = np.zeros((3, 6, 6))
        M[0, 0, 1] = 1.0
        with pytest.raises(DimensionMismatch):
            tsp_sdp.CandidateSolution(M)

    def test_one_based(self):
        sol = tsp_sdp.cycle_solution(6)
        assert np.array_equal(sol[1], tsp_sdp.distance_matrix(6, 1))
        with pytest.raises(IndexError):
            sol[0]

    def test_save_load(self, tmp_path):
        sol = tsp_sdp.cycle_solution(8)
        manifest = tsp_sdp.save_solution(sol, tmp_path)
        assert np.array_equal(tsp_sdp.load_solution(manifest).mats, sol.mats)


class TestVerify:
    @pytest.mark.parametrize("n", [4, 6, 8, 12, 20])
    def test_cycle_solution_feasible(self, n):
        rep = tsp_sdp.verify_feasibility(tsp_sdp.SdpInstance(unit_costs(n)), tsp_sdp.cycle_solution(n))
        assert rep.feasible and rep.worst_entry == 0.0 and rep.sum_deviation == 0.0
        # the objective is the tour length: n unit edges
        assert rep.objective == pytest.approx(n)

    def test_cycle_spectrum_case_table_vs_lapack(self):
        for n in range(4, 33, 2):
            sol = tsp_sdp.cycle_solution(n)
            for k in range(1, n // 2 + 1):
                M = tsp_sdp.assemble_psd_matrix(sol, k)
                assert np.allclose(np.linalg.eigvalsh(M), tsp_sdp.cycle_constraint_spectrum(n, k), atol=1e-9)

    def test_case_table_n6(self):
        assert tsp_sdp.cycle_constraint_spectrum(6, 3) == [0.0] * 5 + [6.0]
        assert tsp_sdp.cycle_constraint_spectrum(6, 1) == [0.0] * 4 + [3.0, 3.0]

    def test_detects_negative_entry(self):
        mats = tsp_sdp.cycle_solution(6).mats.copy()
        mats[0, 0, 1] = mats[0, 1, 0] = -0.1
        rep = tsp_sdp.verify_feasibility(tsp_sdp.SdpInstance(unit_costs(6)), tsp_sdp.CandidateSolution(mats))
        assert not rep.nonneg_ok and not rep.feasible

    def test_detects_psd_violation(self):
        sol = tsp_sdp.CandidateSolution(1.2 * tsp_sdp.cycle_solution(6).mats)
        rep = tsp_sdp.verify_feasibility(tsp_sdp.SdpInstance(unit_costs(6)), sol)
        assert not rep.sum_ok and not rep.feasible

    def test_order_mismatch(self):
        with pytest.raises(DimensionMismatch):
            tsp_sdp.verify_feasibility(tsp_sdp.SdpInstance(unit_costs(8)), tsp_sdp.cycle_solution(6))

    @given(st.integers(3, 10).map(lambda h: 2 * h), st.integers(0, 2**32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_relabelling_invariance(self, n, seed):
        # permuting vertices in both C and X changes nothing
        rng = np.random.default_rng(seed)
        pts = rng.uniform(size=(n, 2))
        C = np.hypot(pts[:, None, 0] - pts[None, :, 0], pts[:, None, 1] - pts[None, :, 1])
        C = 0.5 * (C + C.T)
        np.fill_diagonal(C, 0.0)
        perm = rng.permutation(n)
        sol = tsp_sdp.cycle_solution(n)
        a = tsp_sdp.verify_feasibility(tsp_sdp.SdpInstance(C, check_metric=False), sol)
        b = tsp_sdp.verify_feasibility(
            tsp_sdp.SdpInstance(C[perm][:, perm], check_metric=False), sol.permuted(perm)
        )
        assert a.feasible and b.feasible
        assert a.objective == pytest.approx(b.objective, abs=1e-12)

    @given(st.integers(2, 8).map(lambda h: 2 * h), st.integers(0, 2**32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_relaxation_of_any_tour(self, n, seed):
        # relabelling the cycle solution along any tour gives a feasible point whose cost is the tour length
        rng = np.random.default_rng(seed)
        perm = rng.permutation(n)
        sol = tsp_sdp.cycle_solution(n).permuted(perm)
        C = unit_costs(n) * 3.0
        rep = tsp_sdp.verify_feasibility(tsp_sdp.SdpInstance(C), sol)
        assert rep.feasible and rep.objective == pytest.approx(3.0 * n)

    def test_report_dict(self):
        rep = tsp_sdp.verify_feasibility(tsp_sdp.SdpInstance(unit_costs(4)), tsp_sdp.cycle_solution(4))
        d = rep.to_dict()
        assert d["feasible"] is True and len(d["psd_min_eigs"]) == 2
        assert math.isfinite(d["objective"])


def test_cosine_matrix_symmetric():
    Q = tsp_sdp.cosine_matrix(10)
    assert np.array_equal(Q, Q.T)
    assert linalg.spectrum(Q).eigenvalues  # a well-formed symmetric matrix
