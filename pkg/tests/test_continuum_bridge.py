import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hamca import ca_engine as ca
from hamca import continuum_bridge as cb
from hamca.conservation import q_symmetrized
from hamca.exact_core import GaussMatrix, GaussVector
from hamca.random_models import make_rng, random_admissible, random_gauss_vector


def solution(seed=0, dim=3, N=80):
    r = make_rng(seed)
    H = random_admissible(r, dim)
    return ca.evolve(random_gauss_vector(r, dim), random_gauss_vector(r, dim), H, N)


def midpoint_error(lam, K, t=0.5):
    st_ = cb.StationaryState.from_eigenpair(lam, [1.0])
    sig = cb.stationary_signal(st_, K, offset=-(K // 2))
    return abs(sig.value(t)[0] - np.exp(-1j * t * st_.energy))


class TestReconstruct:
    def test_sample_points_exact(self):
        hist = solution()
        sig = cb.ContinuumSignal.from_history(hist)
        c = hist.to_complex()
        for n in range(20, 61):
            assert np.array_equal(cb.reconstruct(sig, float(n)), c[n])

    def test_single_sample_midpoint(self):
        samples = np.zeros(41)
        samples[20] = 1
        sig = cb.ContinuumSignal(samples, 1.0, None, offset=-20)
        assert sig.value(0.5)[0] == pytest.approx(2 / math.pi, abs=1e-15)
        sig2 = cb.ContinuumSignal(samples, 0.3, None, offset=-20)
        assert sig2.value(0.15)[0] == pytest.approx(2 / math.pi, abs=1e-15)

    def test_stationary_midpoints_converge(self):
        errs = [midpoint_error(1.0, K) for K in (256, 512, 1024, 2048, 4096)]
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 1e-3

    def test_error_estimate_covers_truth(self):
        for K in (256, 1024, 4096):
            st_ = cb.StationaryState.from_eigenpair(1.0, [1.0])
            sig = cb.stationary_signal(st_, K, offset=-(K // 2))
            true = abs(sig.value(0.5)[0] - np.exp(-0.5j * st_.energy))
            assert true <= sig.error_estimate(0.5)
        assert sig.error_estimate(3.0) == 0

    def test_edge_guard(self):
        sig = cb.ContinuumSignal.from_history(solution(N=40))
        lo, hi = sig.guarded_range
        assert (lo, hi) == (10.0, 30.0)
        with pytest.raises(cb.EdgeGuardError):
            sig.value(9.5)
        with pytest.raises(cb.EdgeGuardError):
            cb.modified_schrodinger_residual(sig, 29.5)

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            cb.ContinuumSignal(np.ones(5), l=0)
        with pytest.raises(ValueError):
            cb.ContinuumSignal(np.ones(5), guard=0.5)

    def test_derivative_weights(self):
        # first and second derivatives of a smooth bandlimited signal
        st_ = cb.StationaryState.from_eigenpair(0.4, [1.0])
        sig = cb.stationary_signal(st_, 4096, offset=-2048)
        E = st_.energy
        t = 0.3
        assert sig.value(t, order=1)[0] == pytest.approx(-1j * E * np.exp(-1j * E * t), abs=2e-3)
        assert sig.value(t, order=2)[0] == pytest.approx(-(E**2) * np.exp(-1j * E * t), abs=2e-3)

    @given(st.integers(0, 2**31), st.floats(-3, 3), st.floats(-3, 3), st.floats(30.0, 50.0))
    def test_linearity(self, seed, a, b, t):
        r = np.random.default_rng(seed)
        x, y = r.normal(size=(81, 2)), r.normal(size=(81, 2))
        f = lambda s: cb.ContinuumSignal(s).value(t)
        assert np.allclose(f(a * x + b * y), a * f(x) + b * f(y), atol=1e-9)


class TestResidual:
    def test_zero_at_samples(self):
        hist = solution()
        sig = cb.ContinuumSignal.from_history(hist)
        for n in range(21, 60):
            assert np.max(np.abs(cb.modified_schrodinger_residual(sig, float(n)))) < 1e-9

    def test_stationary_midpoint_shrinks(self):
        st_ = cb.StationaryState.from_eigenpair(1.0, [1.0])
        res = []
        for K in (256, 512, 1024, 2048, 4096):
            sig = cb.stationary_signal(st_, K, offset=-(K // 2))
            res.append(abs(cb.modified_schrodinger_residual(sig, 0.5)[0]))
        assert all(b < a for a, b in zip(res, res[1:]))

    def test_corrupted_slice_localized(self):
        hist = solution(N=200)
        bad = hist.with_slice(100, hist[100] + GaussVector.of([5, 0, 0]))
        sig = cb.ContinuumSignal.from_history(bad)
        norms = {n: float(np.linalg.norm(cb.modified_schrodinger_residual(sig, float(n)))) for n in range(60, 141)}
        assert {n for n, v in norms.items() if v > 1e-9} == {99, 100, 101}
        mid = {n: float(np.linalg.norm(cb.modified_schrodinger_residual(sig, n + 0.5))) for n in range(60, 140)}
        peak = max(mid, key=mid.get)
        assert abs(peak + 0.5 - 100) <= 1.5
        assert mid[peak] > 10 * mid[60]

    def test_discrete_residual(self):
        for lam in (0.0, 1.0, 2.0, -1.3):
            st_ = cb.StationaryState.from_eigenpair(lam, [1.0, 0.5j])
            h = cb.stationary_history(st_, 50)
            assert np.max(np.abs(cb.discrete_residual(h, lam * np.eye(2)))) <= 1e-12 * np.max(np.abs(h))


class TestDispersion:
    @pytest.mark.parametrize("le,lE", [(2, math.pi / 2), (0, 0.0), (1, math.pi / 6), (-2, -math.pi / 2)])
    def test_examples(self, le, lE):
        assert cb.dispersion(le) == pytest.approx(lE, abs=1e-15)

    def test_scale(self):
        assert cb.dispersion(1.0, l=0.5) == pytest.approx(math.pi / 3)

    def test_inadmissible(self):
        with pytest.raises(cb.InadmissibleError):
            cb.dispersion(2.0001)
        with pytest.raises(cb.InadmissibleError):
            cb.StationaryState.from_eigenpair(-3, [1])

    @given(st.floats(-2, 2))
    def test_inverse_and_band(self, le):
        E = cb.dispersion(le)
        assert abs(2 * math.sin(E) - le) <= 1e-12
        assert abs(E) <= math.pi / 2 + 1e-12

    @given(st.floats(-0.2, 0.2))
    def test_series(self, le):
        h = le / 2
        # next term of arcsin is (3/40) h^5
        assert abs(cb.dispersion(le) - cb.dispersion_series(le)) <= 0.08 * abs(h) ** 5 + 1e-16

    def test_stationary_examples(self):
        const = cb.stationary_history(cb.StationaryState.from_eigenpair(0.0, [1.0]), 10)
        assert np.allclose(const, 1)
        assert 2 * math.sin(cb.dispersion(1.0)) == pytest.approx(1.0, abs=1e-15)
        edge = cb.stationary_history(cb.StationaryState.from_eigenpair(2.0, [1.0]), 8)[:, 0]
        assert np.allclose(edge, np.exp(-1j * np.arange(9) * math.pi / 2))


class TestQ:
    def test_equals_symmetrized_at_samples(self):
        hist = solution()
        sig = cb.ContinuumSignal.from_history(hist)
        for n in range(21, 60):
            assert cb.continuum_Q(sig, float(n)) == pytest.approx(float(q_symmetrized(hist, n)), abs=1e-9)

    def test_stationary_cos(self):
        st_ = cb.StationaryState.from_eigenpair(1.0, [1.0])
        sig = cb.stationary_signal(st_, 4096, offset=-2048)
        for t in (0.0, 0.25, 0.5, 3.7):
            err = cb.continuum_Q_error(sig, t)
            assert abs(cb.continuum_Q(sig, t) - math.cos(st_.energy)) <= max(err, 1e-12)

    def test_free_constant(self):
        hist = ca.evolve(GaussVector.of([1]), GaussVector.of([1]), GaussMatrix.zeros(1), 40)
        sig = cb.ContinuumSignal.from_history(hist)
        for t in (15.0, 20.5, 24.25):
            assert cb.continuum_Q(sig, t) == pytest.approx(1.0, abs=0.05)
        assert cb.continuum_Q(sig, 20.0) == 1.0

    def test_expansion(self):
        # Q = psi^* psi + (l^2/2) Re psi^* psi'' + O(l^4); for a stationary state that is 1 - (lE)^2/2
        for le in (0.1, 0.2):
            st_ = cb.StationaryState.from_eigenpair(le, [1.0])
            sig = cb.stationary_signal(st_, 4096, offset=-2048)
            E = st_.energy
            assert cb.continuum_Q_expansion(sig, 0.5) == pytest.approx(1 - E**2 / 2, abs=5e-4)
            assert abs(cb.continuum_Q(sig, 0.5) - cb.continuum_Q_expansion(sig, 0.5)) <= E**4 / 24 + 1e-3
