import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hamca import ca_engine as ca
from hamca.exact_core import DimensionError, GaussianInt, GaussMatrix, GaussVector, as_hamiltonian
from hamca.random_models import make_rng, random_gauss_vector, random_self_adjoint

from conftest import admissible, gauss, self_adjoint

I = GaussianInt(0, 1)
E0, E1 = GaussVector.of([1, 0]), GaussVector.of([0, 1])


def pauli_sequence():
    # psi_0 .. psi_7 written out by hand from the Pauli stepping
    return [E0, E1, (1 - I) * E0, (-I) * E1, (-I) * E0, (-1 - I) * E1, -E0, -E1]


def solution(seed, dim=3, N=15):
    r = make_rng(seed)
    H = random_self_adjoint(r, dim, 2)
    return ca.evolve(random_gauss_vector(r, dim), random_gauss_vector(r, dim), H, N)


class TestEvolve:
    def test_pauli_steps(self, pauli):
        p0, p1, H = pauli
        assert ca.evolve_step(p0, p1, H) == GaussVector.of([1 - I, 0])
        assert ca.evolve_step(p1, GaussVector.of([1 - I, 0]), H) == GaussVector.of([0, -I])

    def test_pauli_sequence(self, pauli):
        hist = ca.evolve(*pauli, 7)
        assert hist.states == pauli_sequence()
        assert hist.solution

    def test_free_dynamics(self):
        H = GaussMatrix.zeros(2)
        a, b = GaussVector.of([3, I]), GaussVector.of([1, -2])
        assert ca.evolve_step(a, b, H) == a
        const = ca.evolve(a, a, H, 6)
        assert all(s == a for s in const.states)

    def test_dim1_against_closed_form(self):
        from hamca.spectral import closed_form_states

        H = GaussMatrix.diag([1])
        hist = ca.evolve(GaussVector.of([1]), GaussVector.of([1]), H, 40)
        assert hist[2] == GaussVector.of([1 - I])
        cf = closed_form_states(hist[0], hist[1], H, range(41))
        assert np.allclose(cf, hist.to_complex(), rtol=1e-12, atol=1e-12)

    def test_dimension_mismatch(self, pauli):
        p0, _, H = pauli
        with pytest.raises(DimensionError):
            ca.evolve_step(p0, GaussVector.of([1, 2, 3]), H)
        with pytest.raises(DimensionError):
            ca.evolve(GaussVector.of([1]), GaussVector.of([1]), H, 3)

    def test_slice_cap(self, pauli):
        with pytest.raises(ValueError):
            ca.evolve(*pauli, 100, max_slices=50)

    def test_history_immutable(self, pauli):
        hist = ca.evolve(*pauli, 4)
        with pytest.raises(ValueError):
            hist.re[0, 0] = 5

    @given(st.integers(0, 2**31), st.integers(1, 6))
    def test_time_reversal(self, seed, dim):
        # running backwards is the forward rule with H -> -H
        hist = solution(seed, dim)
        back = hist.reversed()
        again = ca.evolve(back[0], back[1], -hist.H.H, hist.N)
        assert ca.histories_equal(again, back)

    @given(st.integers(0, 2**31), st.integers(1, 6))
    def test_time_reversal_with_conjugation(self, seed, dim):
        # conjugate the reversed list and evolve with the transposed (= conjugated) H
        hist = solution(seed, dim)
        back = hist.reversed()
        conj0, conj1 = back[0].conj(), back[1].conj()
        again = ca.evolve(conj0, conj1, hist.H.H.transpose(), hist.N)
        assert all(again[n] == back[n].conj() for n in range(len(back)))

    def test_literal_reversal_fails_for_complex_dynamics(self, pauli):
        hist = ca.evolve(*pauli, 8)
        back = hist.reversed()
        assert not ca.histories_equal(ca.evolve(back[0], back[1], hist.H, hist.N), back)


class TestXP:
    def test_pauli_recombines(self, pauli):
        p0, p1, H = pauli
        xp = ca.evolve_xp(p0.re, p0.im, p1.re, p1.im, H, 7)
        assert xp.recombine().states == pauli_sequence()

    def test_antisymmetric_h(self):
        H = as_hamiltonian(GaussMatrix.of([[0, I], [-I, 0]]))
        x0, p0, x1, p1 = [2, -1], [0, 3], [1, 1], [-2, 0]
        xp = ca.evolve_xp(x0, p0, x1, p1, H, 20)
        ref = ca.evolve(GaussVector(x0, p0), GaussVector(x1, p1), H, 20)
        assert ca.histories_equal(xp.recombine(), ref)
        # with h_S = 0 the x update uses x only and the p update uses p only
        assert (xp.xs[2] == np.array(x0, dtype=object) + H.h_A @ np.array(x1, dtype=object)).all()

    def test_zero_h(self):
        H = as_hamiltonian(GaussMatrix.zeros(2))
        xp = ca.evolve_xp([1, 2], [3, 4], [5, 6], [7, 8], H, 5)
        assert (xp.xs[2] == xp.xs[0]).all() and (xp.ps[3] == xp.ps[1]).all()

    def test_random_agreement(self):
        for j in range(100):
            r = make_rng(77, j)
            d = int(r.integers(1, 9))
            H = random_self_adjoint(r, d, 2)
            a, b = random_gauss_vector(r, d), random_gauss_vector(r, d)
            N = int(r.integers(1, 201))
            xp = ca.evolve_xp(a.re, a.im, b.re, b.im, H, N)
            assert ca.histories_equal(xp.recombine(), ca.evolve(a, b, H, N))


class TestAction:
    def test_vanishes_on_pauli(self, pauli):
        hist = ca.evolve(*pauli, 12)
        val = ca.action_eval(hist)
        assert val.value == 0
        assert all(s == 0 for s in val.per_step)
        assert val.window == (1, 11)

    def test_zero_history(self):
        hist = ca.CAHistory.from_states([GaussVector.zeros(2)] * 5, GaussMatrix.identity(2))
        assert ca.action_eval(hist).value == 0

    def test_constant_dim1(self):
        c = GaussianInt(2, -3)
        hist = ca.CAHistory.from_states([GaussVector.of([c])] * 10, GaussMatrix.diag([2]))
        M = 6
        assert ca.action_eval(hist, (2, 2 + M - 1)).value == 2 * M * c.norm2()

    def test_value_is_sum_of_summands(self):
        hist = solution(5).with_slice(4, GaussVector.of([1, 2, 3]))
        val = ca.action_eval(hist, (2, 9))
        assert sum(val.per_step, GaussianInt(0)) == val.value
        assert val.value.im == 0  # real for self-adjoint H

    @pytest.mark.parametrize("window", [(0, 3), (1, 15), (5, 4)])
    def test_window_errors(self, window):
        with pytest.raises(ca.WindowError):
            ca.action_eval(solution(1), window)

    @given(admissible(), st.integers(0, 2**31))
    def test_per_step_zero_on_solutions(self, H, seed):
        r = make_rng(seed)
        hist = ca.evolve(random_gauss_vector(r, H.dim), random_gauss_vector(r, H.dim), H, 12)
        assert all(s == 0 for s in ca.action_eval(hist).per_step)


class TestIntegerVariation:
    def test_square_and_cube(self):
        for f in range(-10, 11):
            assert ca.integer_variation(lambda x: x * x, f, 1) == 2 * f
            assert ca.integer_variation(lambda x: x**3, f, 1) == 3 * f * f + 1

    def test_zero_delta(self):
        assert ca.integer_variation(lambda x: x**5 + 7, 3, 0) == 0

    def test_coefficient_list(self):
        assert ca.integer_variation([0, 0, 0, 1], 4, 1) == 49

    def test_quadratic_box_exhaustive(self):
        for coeffs in ([5], [1, -3], [2, 7, -4], [0, 0, 1]):
            for f in range(-20, 21):
                deriv = sum(k * c * f ** (k - 1) for k, c in enumerate(coeffs) if k)
                for df in range(-20, 21):
                    if df:
                        assert ca.integer_variation(coeffs, f, df) == deriv


class TestStationarity:
    def test_pauli_stationary(self, pauli):
        rep = ca.stationarity_check(ca.evolve(*pauli, 12))
        assert rep.stationary
        assert len(rep.sites) == 11 * 2
        assert all(c == 0 for c in rep.coeff_psistar + rep.coeff_psi)

    def test_corruption_localized(self, pauli):
        hist = ca.evolve(*pauli, 12)
        bad = hist.with_slice(5, hist[5] + GaussVector.of([1, 0]))
        rep = ca.stationarity_check(bad)
        assert {n for n, _ in rep.violations} <= {4, 5, 6}
        assert any(n in (4, 6) for n, _ in rep.violations)

    def test_coefficient_matches_equation_of_motion(self):
        # coefficient of a psi*-variation is -i psi_dot + H psi at that site
        hist = solution(11).with_slice(6, GaussVector.of([2, -1, I]))
        H = hist.H.H
        for n in range(1, hist.N):
            dot = hist[n + 1] - hist[n - 1]
            expected = (-I) * dot + H @ hist[n]
            for a in range(hist.dim):
                assert ca.single_site_variation(hist, n, a, GaussianInt(2, -1)) == expected[a]

    def test_zero_delta_noop(self, pauli):
        hist = ca.evolve(*pauli, 6)
        assert ca.single_site_variation(hist, 3, 0, 0) == 0

    def test_boundary_site_rejected(self, pauli):
        with pytest.raises(ca.WindowError):
            ca.single_site_variation(ca.evolve(*pauli, 6), 0, 0, 1)

    def test_sampled_trials(self, pauli):
        rep = ca.stationarity_check(ca.evolve(*pauli, 12), trials=7, rng_seed=3)
        assert len(rep.sites) == 7 and rep.stationary

    def test_needs_three_slices(self, pauli):
        with pytest.raises(ValueError):
            ca.stationarity_check(ca.evolve(*pauli, 1))

    @given(st.integers(0, 2**31), st.integers(1, 14), st.integers(0, 2))
    def test_corrupt_and_detect(self, seed, n, a):
        hist = solution(seed)
        bad = hist.with_slice(n, hist[n] + GaussVector.basis(3, a).scale(GaussianInt(1, 1)))
        rep = ca.stationarity_check(bad)
        assert not rep.stationary
        assert all(abs(m - n) <= 1 for m, _ in rep.violations)


@given(st.integers(1, 4).flatmap(lambda d: st.tuples(self_adjoint(d), st.just(d))), gauss, gauss,
       st.integers(0, 2**31))
def test_linearity(Hd, a, b, seed):
    H, d = Hd
    r = make_rng(seed)
    u0, u1, v0, v1 = (random_gauss_vector(r, d) for _ in range(4))
    N = 10
    lhs = ca.evolve(a * u0 + b * v0, a * u1 + b * v1, H, N)
    rhs = ca.linear_combination(a, ca.evolve(u0, u1, H, N), b, ca.evolve(v0, v1, H, N))
    assert ca.histories_equal(lhs, rhs)


def test_eom_residual(pauli):
    hist = ca.evolve(*pauli, 6)
    assert all(ca.eom_residual(hist, n).is_zero() for n in range(1, 6))
    bad = hist.with_slice(3, GaussVector.of([1, 1]))
    assert not ca.eom_residual(bad, 2).is_zero()
