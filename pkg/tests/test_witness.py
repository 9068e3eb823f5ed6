import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tspgap import linalg, tsp_sdp, witness
from tspgap.errors import DomainError, IdentityViolation

even_n = st.integers(3, 40).map(lambda h: 2 * h)


class TestCutInstance:
    def test_structure(self):
        C = witness.cut_cost_matrix(6)
        assert C[:3, :3].sum() == 0 and C[3:, 3:].sum() == 0 and C[:3, 3:].sum() == 9

    def test_metric(self):
        assert tsp_sdp.SdpInstance(witness.cut_cost_matrix(8)).n == 8

    def test_odd(self):
        with pytest.raises(DomainError):
            witness.cut_cost_matrix(7)


class TestAnalyticFamily:
    def test_n6_values(self):
        # exact rationals at n = 6: a = (3/4, 1/4, 0), b = (1/6, 1/2, 1/3)
        fam = witness.analytic_a(6)
        assert np.allclose(fam.a, [0.75, 0.25, 0.0], atol=1e-15)
        assert np.allclose(fam.b, [1 / 6, 1 / 2, 1 / 3], atol=1e-15)

    def test_n6_b_by_fractions(self):
        # independent oracle: exact arithmetic on the row-sum coupling (d-1) a + d b = 2 (1 at i=d)
        a = [Fraction(3, 4), Fraction(1, 4), Fraction(0)]
        b = [(Fraction(2 if i < 2 else 1) - 2 * a[i]) / 3 for i in range(3)]
        assert b == [Fraction(1, 6), Fraction(1, 2), Fraction(1, 3)]
        assert np.allclose(witness.analytic_a(6).b, [float(x) for x in b], atol=1e-15)

    @given(even_n)
    @settings(max_examples=40, deadline=None)
    def test_unit_sum_and_bounds(self, n):
        fam = witness.analytic_a(n)
        assert fam.a.sum() == pytest.approx(1.0, abs=1e-10)
        assert fam.b.sum() == pytest.approx(1.0, abs=1e-10)
        assert fam.nonnegative
        assert fam.coupling_residual() < 1e-12

    @given(even_n)
    @settings(max_examples=40, deadline=None)
    def test_b_closed_form(self, n):
        fam = witness.analytic_a(n)
        d = n // 2
        i = np.arange(1, d)
        assert np.allclose(fam.b[:-1], 2 / n * (1 - np.cos(np.pi * i / d)), atol=1e-14)
        assert fam.b[-1] == pytest.approx(2 / n, abs=1e-14)

    @given(even_n)
    @settings(max_examples=40, deadline=None)
    def test_a_hat_values(self, n):
        ah = witness.a_hat_vector(witness.analytic_a(n))
        assert ah[0] == pytest.approx((n / 2 - 2) / (n - 2), abs=1e-10)
        assert np.allclose(ah[1:], -2 / (n - 2), atol=1e-10)

    def test_too_small(self):
        with pytest.raises(DomainError):
            witness.analytic_a(4)


class TestExpansion:
    def test_blocks(self):
        fam = witness.analytic_a(6)
        X1 = witness.expand_family(fam)[1]
        assert np.all(np.diag(X1) == 0)
        assert X1[0, 1] == fam.a[0] and X1[0, 3] == fam.b[0]

    @given(even_n)
    @settings(max_examples=20, deadline=None)
    def test_sums_to_complement_of_identity(self, n):
        sol = witness.expand_family(witness.analytic_a(n))
        assert np.max(np.abs(sol.mats.sum(axis=0) - (np.ones((n, n)) - np.eye(n)))) < 1e-12

    def test_b_hat_identity_guard(self):
        fam = witness.analytic_a(8)
        b = fam.b.copy()
        b[0] += 0.01
        broken = witness.StructuredFamily(8, fam.a, b)
        with pytest.raises(IdentityViolation):
            witness.b_hat(broken, 1)

    @given(st.integers(3, 12).map(lambda h: 2 * h), st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_closed_form_spectrum_vs_lapack(self, n, seed):
        fam = witness.random_family(n, np.random.default_rng(seed))
        sol = witness.expand_family(fam)
        for k in range(1, fam.d + 1):
            M = tsp_sdp.assemble_psd_matrix(sol, k)
            assert np.allclose(np.linalg.eigvalsh(M), witness.constraint_spectrum(fam, k), atol=1e-9)

    @given(st.integers(3, 12).map(lambda h: 2 * h), st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_b_hat_closed_form_random(self, n, seed):
        fam = witness.random_family(n, np.random.default_rng(seed))
        for k in range(1, fam.d + 1):
            bh = witness.b_hat(fam, k)
            assert bh == pytest.approx(-(1 - 2 / n) * witness.a_hat(fam, k) - 2 / n, abs=1e-10)


class TestRandomFamily:
    def test_deterministic(self):
        a = witness.random_family(10, np.random.default_rng(3))
        b = witness.random_family(10, np.random.default_rng(3))
        assert np.array_equal(a.a, b.a)

    @given(st.integers(3, 16).map(lambda h: 2 * h), st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_coupling_consistent(self, n, seed):
        fam = witness.random_family(n, np.random.default_rng(seed))
        assert fam.a.sum() == pytest.approx(1.0, abs=1e-12)
        assert fam.coupling_residual() < 1e-12
        assert np.all(fam.a >= 0)
        # b >= 0 exactly when every a_i respects the upper bound 4/(n-2) (2/(n-2) at i = d)
        upper = np.full(fam.d, 4.0 / (n - 2))
        upper[-1] = 2.0 / (n - 2)
        assert bool(np.all(fam.b >= -1e-12)) == bool(np.all(fam.a <= upper + 1e-12))


class TestCertificate:
    def test_n6(self):
        cert = witness.gap_certificate(6)
        assert cert.sdp_cost == pytest.approx(1.5, abs=1e-10)
        assert cert.ratio == pytest.approx(0.75, abs=1e-10)
        assert cert.integer_opt == 2.0 and cert.feasible

    def test_n8(self):
        # (n/2)^2 b_1 = 16 * (1/4)(1 - cos(pi/4)) = 4 - 2 sqrt 2
        cert = witness.gap_certificate(8)
        assert cert.sdp_cost == pytest.approx(4 - 2 * math.sqrt(2), abs=1e-12)

    @pytest.mark.parametrize("n", [6, 10, 20, 50, 100])
    def test_bound(self, n):
        cert = witness.gap_certificate(n)
        assert cert.feasible and cert.ratio <= math.pi**2 / (2 * n) + 1e-10

    def test_json_field_order(self):
        d = witness.gap_certificate(6).to_dict()
        assert list(d)[:11] == [
            "n", "a", "b", "a_hat", "min_eigs", "sdp_cost", "integer_opt", "ratio", "bound", "feasible", "seed",
        ]
        assert "cvetkovic" in d and "k" not in d

    def test_odd_rejected(self):
        with pytest.raises(DomainError):
            witness.gap_certificate(7)

    def test_min_eigs_nonnegative(self):
        cert = witness.gap_certificate(12)
        assert min(cert.report.psd_min_eigs) >= -1e-8
        assert all(m == "closed_form_kronecker" for m in cert.report.psd_methods)

    def test_kronecker_route_matches_jacobi(self):
        sol = witness.expand_family(witness.analytic_a(10))
        for k in range(1, 6):
            M = tsp_sdp.assemble_psd_matrix(sol, k)
            a = linalg.spectrum(M, "closed_form_kronecker").as_array()
            b = linalg.spectrum(M, "jacobi").as_array()
            assert np.allclose(a, b, atol=1e-8)
