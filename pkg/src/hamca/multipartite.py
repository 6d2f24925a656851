"""Many-time multipartite CA: one clock per subsystem.

A multipartite state is a Gaussian-integer tensor Psi indexed by (n_1..n_m, a_1..a_m):
clock axes first, then component axes. The module verifies candidate solutions
(products, superpositions of products, axis-wise evolved data) against the many-time
equations of motion; it does not propagate interacting systems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Sequence

import numpy as np

from .ca_engine import CAHistory
from .conservation import q_series
from .continuum_bridge import ContinuumSignal, StationaryState, stationary_history
from .exact_core import (
    DimensionError,
    GaussianInt,
    GaussMatrix,
    HamiltonianSpec,
    _freeze,
    as_hamiltonian,
    is_self_adjoint,
)

MAX_ENTRIES = 10**7


class BoundaryError(IndexError):
    pass


# ---------------------------------------------------------------------------
# Leibniz rule


@dataclass
class LeibnizReport:
    n: int
    derivative_of_product: int
    corrected_rule: Fraction
    naive_rule: int

    @property
    def corrected_holds(self) -> bool:
        return self.corrected_rule == self.derivative_of_product

    @property
    def naive_fails(self) -> bool:
        return self.naive_rule != self.derivative_of_product


def leibniz_demo(A: Sequence[int], B: Sequence[int], n: int) -> LeibnizReport:
    """Compare d[A_n B_n] with the averaged product rule and the naive Leibniz rule."""
    if not 1 <= n <= min(len(A), len(B)) - 2:
        raise IndexError(f"n={n} is not interior to the sequences")
    a_dot = A[n + 1] - A[n - 1]
    b_dot = B[n + 1] - B[n - 1]
    true = A[n + 1] * B[n + 1] - A[n - 1] * B[n - 1]
    corrected = Fraction(a_dot * (B[n + 1] + B[n - 1]) + (A[n + 1] + A[n - 1]) * b_dot, 2)
    naive = a_dot * B[n] + A[n] * b_dot
    return LeibnizReport(n, true, corrected, naive)


# ---------------------------------------------------------------------------
# tensor container and exact tensor algebra


def _apply_on_axis(Mr, Mi, Tr, Ti, axis: int):
    """(M applied to component axis ``axis``) of the tensor (Tr + i Ti)."""

    def td(M, T):
        return np.moveaxis(np.tensordot(M, T, axes=([1], [axis])), 0, axis)

    return td(Mr, Tr) - td(Mi, Ti), td(Mr, Ti) + td(Mi, Tr)


@dataclass(frozen=True)
class MultiHistory:
    re: np.ndarray
    im: np.ndarray
    hams: tuple[HamiltonianSpec, ...]
    interaction: GaussMatrix | None = None
    factors: tuple[CAHistory, ...] | None = field(default=None, repr=False)
    l: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "hams", tuple(as_hamiltonian(h) for h in self.hams))
        m = len(self.hams)
        if self.re.shape != self.im.shape or self.re.ndim != 2 * m:
            raise DimensionError("tensor must have one clock axis and one component axis per subsystem")
        if self.re.size > MAX_ENTRIES:
            raise ValueError(f"tensor with {self.re.size} entries exceeds cap {MAX_ENTRIES}")
        if tuple(h.dim for h in self.hams) != self.dims:
            raise DimensionError("component extents must match the subsystem Hamiltonians")
        if self.interaction is not None:
            if self.interaction.dim != int(np.prod(self.dims)):
                raise DimensionError("interaction must act on the full product component space")
            if not is_self_adjoint(self.interaction):
                raise ValueError("interaction must be self-adjoint")
        if self.factors is not None:
            ref = _product_arrays(self.factors)
            if not ((ref[0] == self.re).all() and (ref[1] == self.im).all()):
                raise ValueError("tensor is not the product of its recorded factors")
        _freeze(self.re)
        _freeze(self.im)

    @property
    def m(self) -> int:
        return len(self.hams)

    @property
    def clocks(self) -> tuple[int, ...]:
        return self.re.shape[: self.m]

    @property
    def dims(self) -> tuple[int, ...]:
        return self.re.shape[self.m:]

    def __getitem__(self, idx) -> GaussianInt:
        return GaussianInt(self.re[idx], self.im[idx])

    def to_complex(self) -> np.ndarray:
        return self.re.astype(float) + 1j * self.im.astype(float)

    def interaction_free(self) -> bool:
        return self.interaction is None or self.interaction.is_zero()


def _product_arrays(histories: Sequence[CAHistory]):
    m = len(histories)
    re = np.ones((1,) * (2 * m), dtype=object)
    im = np.zeros((1,) * (2 * m), dtype=object)
    for k, h in enumerate(histories):
        shape = [1] * (2 * m)
        shape[k], shape[m + k] = h.re.shape
        fr, fi = h.re.reshape(shape), h.im.reshape(shape)
        re, im = re * fr - im * fi, re * fi + im * fr
    return re, im


def build_product(histories: Sequence[CAHistory], require_solution: bool = True) -> MultiHistory:
    """Psi[n_1..n_m, a_1..a_m] = prod_k psi_(k)[n_k][a_k], with independent clocks."""
    if require_solution and not all(h.solution for h in histories):
        raise ValueError("product factors must be solution histories")
    re, im = _product_arrays(histories)
    return MultiHistory(re, im, tuple(h.H for h in histories), None, tuple(histories), histories[0].l)


def combine(a, P: MultiHistory, b, Q: MultiHistory) -> MultiHistory:
    """a P + b Q over Z[i]; the result keeps no factor record (generally entangled)."""
    a, b = GaussianInt.coerce(a), GaussianInt.coerce(b)
    if P.re.shape != Q.re.shape:
        raise DimensionError("tensors must have equal shapes")
    re = a.re * P.re - a.im * P.im + b.re * Q.re - b.im * Q.im
    im = a.re * P.im + a.im * P.re + b.re * Q.im + b.im * Q.re
    return MultiHistory(re, im, P.hams, P.interaction, None, P.l)


def with_interaction(P: MultiHistory, interaction: GaussMatrix | None) -> MultiHistory:
    return MultiHistory(P.re.copy(), P.im.copy(), P.hams, interaction, None, P.l)


def with_entry(P: MultiHistory, idx, delta) -> MultiHistory:
    delta = GaussianInt.coerce(delta)
    re, im = P.re.copy(), P.im.copy()
    re[idx] += delta.re
    im[idx] += delta.im
    return MultiHistory(re, im, P.hams, P.interaction, None, P.l)


def evolve_free(initial_re, initial_im, hams: Sequence, clocks: Sequence[int], l: float = 1.0) -> MultiHistory:
    """Axis-wise leapfrog for interaction-free systems.

    ``initial`` has extent 2 on every clock axis (Psi on n_k in {0, 1}); each axis k
    is extended with Psi(n_k + 1) = Psi(n_k - 1) - i H_k Psi(n_k) acting on component
    axis k. Any Z[i]-combination of products, entangled or not, is admissible data.
    """
    hams = tuple(as_hamiltonian(h) for h in hams)
    m = len(hams)
    re = np.array(initial_re, dtype=object)
    im = np.array(initial_im, dtype=object)
    if re.shape[:m] != (2,) * m:
        raise DimensionError("initial data needs extent 2 on every clock axis")
    for k, (h, N) in enumerate(zip(hams, clocks)):
        if N < 2:
            raise ValueError("every clock window needs at least two slices")
        sr = [np.take(re, 0, axis=k), np.take(re, 1, axis=k)]
        si = [np.take(im, 0, axis=k), np.take(im, 1, axis=k)]
        axis = m - 1 + k  # component axis k after dropping clock axis k
        for n in range(1, N - 1):
            hr, hi = _apply_on_axis(h.H.re, h.H.im, sr[n], si[n], axis)
            sr.append(sr[n - 1] + hi)
            si.append(si[n - 1] - hr)
        re, im = np.stack(sr, axis=k), np.stack(si, axis=k)
    return MultiHistory(re, im, hams, None, None, l)


# ---------------------------------------------------------------------------
# equations of motion and action


def _interior(a: np.ndarray, m: int, skip: int | None = None, shift: int = 0):
    """Restrict every clock axis to its interior; along ``skip`` shift by ``shift``."""
    idx = []
    for k in range(m):
        n = a.shape[k]
        if k == skip:
            idx.append(slice(1 + shift, n - 1 + shift))
        else:
            idx.append(slice(1, n - 1))
    return a[tuple(idx)]


def _hamiltonian_terms(P: MultiHistory, re, im):
    """(sum_k H_(k) + I) applied to a tensor with the layout of P (clock axes first)."""
    m = P.m
    tr = np.zeros(re.shape, dtype=object)
    ti = np.zeros(re.shape, dtype=object)
    for k, h in enumerate(P.hams):
        hr, hi = _apply_on_axis(h.H.re, h.H.im, re, im, m + k)
        tr, ti = tr + hr, ti + hi
    if not P.interaction_free():
        D = int(np.prod(P.dims))
        cl = re.shape[:m]
        fr, fi = re.reshape(cl + (D,)), im.reshape(cl + (D,))
        Ir, Ii = P.interaction.re, P.interaction.im
        xr = fr @ Ir.T - fi @ Ii.T
        xi = fr @ Ii.T + fi @ Ir.T
        tr = tr + xr.reshape(re.shape)
        ti = ti + xi.reshape(re.shape)
    return tr, ti


def _axis_dots(P: MultiHistory, re, im):
    """sum_k [Psi(n_k + 1) - Psi(n_k - 1)] on the common interior."""
    m = P.m
    dr = 0
    di = 0
    for k in range(m):
        dr = dr + _interior(re, m, k, 1) - _interior(re, m, k, -1)
        di = di + _interior(im, m, k, 1) - _interior(im, m, k, -1)
    return dr, di


def residual_map(P: MultiHistory, re=None, im=None):
    """sum_k Psi_dot(axis k) + i (sum_k H_(k) Psi + I Psi) at every interior site.

    Shape: (clock_k - 2 for each k) + dims. Zero certifies the many-time equation.
    """
    re = P.re if re is None else re
    im = P.im if im is None else im
    m = P.m
    if any(c < 3 for c in re.shape[:m]):
        raise BoundaryError("every clock window needs an interior")
    dr, di = _axis_dots(P, re, im)
    hr, hi = _hamiltonian_terms(P, _interior(re, m), _interior(im, m))
    # LHS - (1/i) RHS = LHS + i RHS
    return dr - hi, di + hr


def multi_eom_residual(P: MultiHistory, clock_site: Sequence[int], comp_site: Sequence[int]) -> GaussianInt:
    m = P.m
    if len(clock_site) != m or len(comp_site) != m:
        raise IndexError("site needs one clock and one component index per subsystem")
    for n, c in zip(clock_site, P.clocks):
        if not 1 <= n <= c - 2:
            raise BoundaryError(f"clock index {n} is not interior (window {c})")
    slab = tuple(slice(n - 1, n + 2) for n in clock_site)
    rr, ri = residual_map(P, P.re[slab], P.im[slab])
    idx = (0,) * m + tuple(comp_site)
    return GaussianInt(rr[idx], ri[idx])


@dataclass
class MultiActionValue:
    value: GaussianInt
    per_site: np.ndarray  # integer summand (real part) per clock site in the window
    per_site_im: np.ndarray
    window: tuple[tuple[int, int], ...]


def multi_action_eval(P: MultiHistory, window: Sequence[tuple[int, int]] | None = None) -> MultiActionValue:
    """Windowed multipartite action: sum over clock sites of
    sum_k Im(Psi^* Psi_dot_k) + Psi^* H_(k) Psi, plus Psi^* I Psi."""
    m = P.m
    window = tuple(window) if window is not None else tuple((1, c - 2) for c in P.clocks)
    for (lo, hi), c in zip(window, P.clocks):
        if lo < 1 or hi > c - 2 or lo > hi:
            raise BoundaryError(f"window [{lo}, {hi}] not interior to clock window {c}")
    slab = tuple(slice(lo - 1, hi + 2) for lo, hi in window)
    re, im = P.re[slab], P.im[slab]
    cr, ci = _interior(re, m), _interior(im, m)
    dr, di = _axis_dots(P, re, im)
    hr, hi_ = _hamiltonian_terms(P, cr, ci)
    comp = tuple(range(m, 2 * m))
    # Im(conj(Psi) Psi_dot) summed; conj(Psi) (H Psi) summed (real and imaginary parts)
    kin = (cr * di - ci * dr).sum(axis=comp)
    pot_re = (cr * hr + ci * hi_).sum(axis=comp)
    pot_im = (cr * hi_ - ci * hr).sum(axis=comp)
    per = kin + pot_re
    total = GaussianInt(int(per.sum()), int(pot_im.sum()))
    return MultiActionValue(total, per, pot_im, window)


# ---------------------------------------------------------------------------
# correlations


def pair_correlator(P: MultiHistory, Gs: Sequence[GaussMatrix]):
    """Per-axis two-time pattern for G_1 x ... x G_m at every clock site (n_k >= 1).

    Sum over the 2^m choices (u_k, v_k) in {(n_k, n_k - 1), (n_k - 1, n_k)} of
    Psi(u)^dagger (G_1 x ... x G_m) Psi(v). On products this is prod_k q_{G_k}(n_k).
    """
    m = P.m
    if len(Gs) != m:
        raise ValueError("one G per subsystem required")
    comp = tuple(range(m, 2 * m))
    tot_r = 0
    tot_i = 0
    for choice in iproduct((0, 1), repeat=m):
        # choice 0: (u, v) = (n, n-1); choice 1: (u, v) = (n-1, n)
        us = tuple(slice(1, None) if c == 0 else slice(None, -1) for c in choice)
        vs = tuple(slice(None, -1) if c == 0 else slice(1, None) for c in choice)
        ar, ai = P.re[us], P.im[us]
        br, bi = P.re[vs], P.im[vs]
        for k, G in enumerate(Gs):
            br, bi = _apply_on_axis(G.re, G.im, br, bi, m + k)
        tot_r = tot_r + (ar * br + ai * bi).sum(axis=comp)
        tot_i = tot_i + (ar * bi - ai * br).sum(axis=comp)
    return tot_r, tot_i


@dataclass
class CorrelationReport:
    applicable: bool
    factorizes: bool | None
    pair: tuple[np.ndarray, np.ndarray]
    factor_product: tuple[np.ndarray, np.ndarray] | None
    connected: tuple[np.ndarray, np.ndarray] | None
    note: str = "per-axis two-time correlator (implementation choice)"

    @property
    def connected_nonzero(self) -> bool:
        if self.connected is None:
            return False
        return bool(self.connected[0].any() or self.connected[1].any())


def _gmul(ar, ai, br, bi):
    return ar * br - ai * bi, ar * bi + ai * br


def correlation_check(P: MultiHistory, Gs: Sequence[GaussMatrix]) -> CorrelationReport:
    """Exact factorization test of pair correlators on interaction-free tensors.

    With recorded factors the pair correlator is compared with prod_k q_{G_k} from
    the factors. For m = 2 the tensor-only connected part
    q_{G1xG2} q_{1x1} - q_{G1x1} q_{1xG2} is also reported; it vanishes on products.
    """
    m = P.m
    applicable = P.interaction_free() and P.factors is not None
    pair = pair_correlator(P, Gs)
    fprod = None
    factorizes = None
    if P.factors is not None:
        qr = np.ones((1,) * m, dtype=object)
        qi = np.zeros((1,) * m, dtype=object)
        for k, (h, G) in enumerate(zip(P.factors, Gs)):
            q = q_series(h, G)
            shape = [1] * m
            shape[k] = len(q)
            fr = np.array([z.re for z in q], dtype=object).reshape(shape)
            fi = np.array([z.im for z in q], dtype=object).reshape(shape)
            qr, qi = _gmul(qr, qi, fr, fi)
        fprod = (qr, qi)
        factorizes = bool((qr == pair[0]).all() and (qi == pair[1]).all())
    connected = None
    if m == 2:
        ids = [GaussMatrix.identity(d) for d in P.dims]
        q11 = pair_correlator(P, ids)
        qg1 = pair_correlator(P, [Gs[0], ids[1]])
        q1g = pair_correlator(P, [ids[0], Gs[1]])
        a = _gmul(*pair, *q11)
        b = _gmul(*qg1, *q1g)
        connected = (a[0] - b[0], a[1] - b[1])
    return CorrelationReport(applicable, factorizes, pair, fprod, connected)


# ---------------------------------------------------------------------------
# continuum side


@dataclass(frozen=True)
class MultiSignal:
    """Complex-float multipartite tensor reconstructed separately along each clock axis."""

    values: np.ndarray
    hams: tuple[np.ndarray, ...]
    l: float = 1.0
    interaction: np.ndarray | None = None
    offsets: tuple[int, ...] | None = None
    guard: float = 0.25

    @classmethod
    def from_history(cls, P: MultiHistory, guard: float = 0.25) -> MultiSignal:
        inter = None if P.interaction_free() else P.interaction.to_complex()
        return cls(P.to_complex(), tuple(h.to_complex() for h in P.hams), P.l, inter, None, guard)

    @property
    def m(self) -> int:
        return len(self.hams)

    def axis_signal(self, k: int) -> ContinuumSignal:
        # a 1-D handle used only for its weights and guard logic
        off = 0 if self.offsets is None else self.offsets[k]
        return ContinuumSignal(np.zeros((self.values.shape[k], 1)), self.l, None, off, self.guard)

    def evaluate(self, ts: Sequence[float], orders: Sequence[int] | None = None) -> np.ndarray:
        orders = orders or [0] * self.m
        X = self.values
        for k, (t, o) in enumerate(zip(ts, orders)):
            sig = self.axis_signal(k)
            sig.check(t)
            X = np.tensordot(sig.weights(t, o), X, axes=([0], [0]))
        return X

    def apply_hamiltonian(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros_like(X)
        for k, H in enumerate(self.hams):
            out = out + np.moveaxis(np.tensordot(H, X, axes=([1], [k])), 0, k)
        if self.interaction is not None:
            out = out + (self.interaction @ X.reshape(-1)).reshape(X.shape)
        return out

    def residual(self, ts: Sequence[float]) -> np.ndarray:
        """sum_k [Psi(t_k + l) - Psi(t_k - l)] + i (sum_k H_(k) + I) Psi(t)."""
        ts = list(ts)
        lhs = 0
        for k in range(self.m):
            up, dn = ts.copy(), ts.copy()
            up[k] += self.l
            dn[k] -= self.l
            lhs = lhs + self.evaluate(up) - self.evaluate(dn)
        return lhs + 1j * self.apply_hamiltonian(self.evaluate(ts))

    def single_time_residual(self, t: float) -> np.ndarray:
        """Identified clocks t_k = t: 2 l dPsi/dt + i (sum_k H_(k) + I) Psi (factor two explicit)."""
        ts = [t] * self.m
        d = 0
        for k in range(self.m):
            orders = [0] * self.m
            orders[k] = 1
            d = d + self.evaluate(ts, orders)
        return 2 * self.l * d + 1j * self.apply_hamiltonian(self.evaluate(ts))


def multi_time_residual_continuum(P, ts: Sequence[float]) -> np.ndarray:
    sig = P if isinstance(P, MultiSignal) else MultiSignal.from_history(P)
    return sig.residual(ts)


def stationary_product_signal(states: Sequence[StationaryState], K: int, l: float = 1.0,
                              offsets: Sequence[int] | None = None, guard: float = 0.25) -> MultiSignal:
    """Product of stationary factors, each sampled at K clock values; H_(k) = eigenvalue * 1."""
    m = len(states)
    offsets = tuple(offsets) if offsets is not None else (0,) * m
    X = np.ones((1,) * (2 * m), dtype=complex)
    for k, (st, off) in enumerate(zip(states, offsets)):
        h = stationary_history(st, K - 1, l, off)
        shape = [1] * (2 * m)
        shape[k], shape[m + k] = h.shape
        X = X * h.reshape(shape)
    hams = tuple(st.eigenvalue * np.eye(st.vector.shape[0]) for st in states)
    return MultiSignal(X, hams, l, None, offsets, guard)


def analytic_single_time_residual(states: Sequence[StationaryState], l: float) -> complex:
    """Coefficient of Psi in the single-time residual for a stationary product: i sum_k (lam_k - 2 l E_k)."""
    return 1j * math.fsum(st.eigenvalue - 2 * l * st.energy for st in states)


def single_axis_history(P: MultiHistory) -> CAHistory:
    """For m = 1 the tensor is an ordinary history."""
    if P.m != 1:
        raise ValueError("only defined for a single subsystem")
    return CAHistory(P.re.copy(), P.im.copy(), P.hams[0], P.l, solution=False)
