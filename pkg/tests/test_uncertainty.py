import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hamca import uncertainty as un


class TestOperators:
    @pytest.mark.parametrize("l", [1.0, 0.5])
    def test_three_sites(self, l):
        X, P = un.build_xp(1, l)
        assert np.array_equal(np.diag(X).real, [-l, 0, l])
        assert P[1, 2] == -1j / (2 * l) and P[1, 0] == 1j / (2 * l)
        assert P[1, 1] == 0 and P[0, 2] == 0

    def test_commutator_interior(self):
        X, P = un.build_xp(5, 0.7)
        C = un.commutator(X, P)
        for r in range(1, 10):
            row = C[r]
            assert row[r - 1] == pytest.approx(0.5j) and row[r + 1] == pytest.approx(0.5j)
            assert np.count_nonzero(np.abs(row) > 1e-15) == 2

    @given(st.integers(1, 20), st.floats(0.05, 5.0))
    def test_self_adjoint(self, R, l):
        X, P = un.build_xp(R, l)
        for A in (X, P, un.commutator(X, P) * 1j, P @ P):
            assert np.max(np.abs(A - A.conj().T), initial=0.0) <= 1e-12

    def test_commutator_antihermitian(self):
        X, P = un.build_xp(6)
        C = un.commutator(X, P)
        assert np.allclose(C, -C.conj().T, atol=1e-12)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            un.build_xp(0)
        with pytest.raises(ValueError):
            un.build_xp(3, 0.0)


class TestReport:
    def test_point_state(self):
        rep = un.uncertainty_report(un.LatticeState.point(8))
        assert rep.dX == 0 and rep.robertson_rhs == 0 and rep.satisfied_robertson
        assert rep.dP == pytest.approx(1 / math.sqrt(2))

    def test_two_site(self):
        for l in (1.0, 0.3):
            s = un.LatticeState.on_sites(8, {-1: 1, 1: 1}, l)
            rep = un.uncertainty_report(s)
            assert rep.mean_x == pytest.approx(0, abs=1e-15)
            assert rep.dX == pytest.approx(l, rel=1e-15)

    def test_wide_gaussian(self):
        s = un.LatticeState.gaussian(240, 20.0)
        rep = un.uncertainty_report(s)
        assert rep.product == pytest.approx(0.5, rel=0.05)
        assert rep.scaled_rhs == pytest.approx(0.5, rel=0.05)
        assert rep.paper_rhs == pytest.approx(1.0, rel=0.05)

    def test_continuum_trend(self):
        gaps = []
        for sigma in (5.0, 10.0, 20.0):
            rep = un.uncertainty_report(un.LatticeState.gaussian(int(12 * sigma), sigma))
            gaps.append(abs(rep.product - 0.5))
        # O((l/sigma)^2): halving l/sigma divides the gap by about four
        assert all(3.5 < a / b < 4.5 for a, b in zip(gaps, gaps[1:]))

    @pytest.mark.parametrize("k", [0.3, 1.0, 2.0])
    def test_plane_wave(self, k):
        for l in (1.0, 0.5):
            s = un.LatticeState.gaussian(int(200 / l), 20.0, l, k)
            rep = un.uncertainty_report(s)
            assert rep.mean_p == pytest.approx(math.sin(k * l) / l, rel=1e-3)

    def test_unnormalized(self):
        a = np.zeros(21, complex)
        a[10] = 2
        with pytest.raises(un.StateError):
            un.uncertainty_report(un.LatticeState(a))

    def test_guard(self):
        with pytest.raises(un.StateError):
            un.uncertainty_report(un.LatticeState.point(8, 7))
        with pytest.raises(un.StateError):
            un.uncertainty_report(un.LatticeState.gaussian(10, 5.0))

    def test_zero_state(self):
        with pytest.raises(un.StateError):
            un.LatticeState.from_amplitudes(np.zeros(5))

    def test_row(self):
        row = un.uncertainty_report(un.LatticeState.point(5)).row(3)
        assert row["state_id"] == 3 and set(row) >= {"dX", "dP", "robertson_rhs", "paper_rhs"}

    def test_robertson_thousand(self):
        for s in un.random_states(2024, 1000):
            rep = un.uncertainty_report(s)
            assert rep.satisfied_robertson

    @given(st.integers(0, 2**31), st.floats(0.1, 3.0))
    def test_robertson_property(self, seed, l):
        s = un.random_guarded_state(np.random.default_rng(seed), 10, l)
        rep = un.uncertainty_report(s)
        assert rep.product >= rep.robertson_rhs - un.ROBERTSON_SLACK
        assert rep.dX >= 0 and rep.dP >= 0


class TestSearch:
    def test_printed_bound_reports(self):
        res = un.min_deltaX_search(bound="paper")
        assert res.target == pytest.approx(1 / math.sqrt(2))
        js = res.to_json()
        assert js["optimizer"] == "grid + SLSQP" and js["bound"] == "paper"
        if res.dX_min is not None:
            rep = un.uncertainty_report(res.state)
            assert abs(rep.product - rep.paper_rhs) <= 1e-6 * rep.paper_rhs

    @pytest.mark.parametrize("bound", ["scaled", "shift"])
    def test_saturating_states(self, bound):
        res = un.min_deltaX_search(bound=bound)
        assert res.dX_min is not None and res.dX_min > 0
        rep = un.uncertainty_report(res.state)
        rhs = un.BOUNDS[bound](rep)
        assert abs(rep.product - rhs) <= 1e-6 * rhs
        assert rep.dX == pytest.approx(res.dX_min)
        # a single site state has dX = 0 and cannot saturate
        assert res.family >= 2

    def test_scaled_value_scales_with_l(self):
        a = un.min_deltaX_search(l=1.0, family=(3,), bound="scaled")
        b = un.min_deltaX_search(l=0.5, family=(3,), bound="scaled")
        assert b.dX_min == pytest.approx(0.5 * a.dX_min, rel=1e-4)

    def test_errors(self):
        with pytest.raises(ValueError):
            un.min_deltaX_search(family=())
        with pytest.raises(ValueError):
            un.min_deltaX_search(bound="other")
        with pytest.raises(ValueError):
            un.min_deltaX_search(R=4, family=(5,))
