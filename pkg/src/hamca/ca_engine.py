"""Leapfrog evolution of a single Hamiltonian CA, its action and integer variations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exact_core import (
    DimensionError,
    GaussianInt,
    GaussMatrix,
    GaussVector,
    HamiltonianSpec,
    _freeze,
    _obj,
    as_hamiltonian,
)

DEFAULT_MAX_SLICES = 1_000_000


class WindowError(IndexError):
    pass


@dataclass(frozen=True)
class CAHistory:
    """psi_0 .. psi_N stored as two (N+1, dim) object arrays of Python ints."""

    re: np.ndarray
    im: np.ndarray
    H: HamiltonianSpec
    l: float = 1.0
    solution: bool = False

    def __post_init__(self):
        if self.re.ndim != 2 or self.re.shape != self.im.shape:
            raise DimensionError("history arrays must be (N+1, dim) and of equal shape")
        if self.re.shape[0] < 2:
            raise ValueError("a history needs at least the two initial slices")
        if self.re.shape[1] != self.H.dim:
            raise DimensionError("state dimension does not match the Hamiltonian")
        if not self.l > 0:
            raise ValueError("scale l must be positive")
        _freeze(self.re)
        _freeze(self.im)

    @classmethod
    def from_states(cls, states: Sequence[GaussVector], H, l: float = 1.0, solution: bool = False) -> CAHistory:
        dims = {len(s) for s in states}
        if len(dims) != 1:
            raise DimensionError("all slices must share one dimension")
        re = np.array([list(s.re) for s in states], dtype=object).reshape(len(states), -1)
        im = np.array([list(s.im) for s in states], dtype=object).reshape(len(states), -1)
        return cls(re, im, as_hamiltonian(H), l, solution)

    @property
    def N(self) -> int:
        return self.re.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.re.shape[1]

    def __len__(self):
        return self.re.shape[0]

    def __getitem__(self, n: int) -> GaussVector:
        return GaussVector(self.re[n], self.im[n])

    @property
    def states(self) -> list[GaussVector]:
        return [self[n] for n in range(len(self))]

    def to_complex(self) -> np.ndarray:
        return self.re.astype(float) + 1j * self.im.astype(float)

    def with_slice(self, n: int, psi: GaussVector) -> CAHistory:
        """Copy with slice n replaced; the result is no longer flagged as a solution."""
        re, im = self.re.copy(), self.im.copy()
        re[n], im[n] = psi.re, psi.im
        return CAHistory(re, im, self.H, self.l, solution=False)

    def reversed(self) -> CAHistory:
        return CAHistory(self.re[::-1].copy(), self.im[::-1].copy(), self.H, self.l, solution=False)


@dataclass(frozen=True)
class XPHistory:
    xs: np.ndarray
    ps: np.ndarray
    H: HamiltonianSpec

    def recombine(self, l: float = 1.0) -> CAHistory:
        return CAHistory(self.xs.copy(), self.ps.copy(), self.H, l, solution=False)


@dataclass(frozen=True)
class ActionValue:
    value: GaussianInt
    per_step: list[GaussianInt] = field(default_factory=list)
    window: tuple[int, int] = (0, 0)


def _step(pr, pi, cr, ci, Hr, Hi):
    # psi_prev - i H psi_curr, with H psi = (Hr cr - Hi ci) + i (Hr ci + Hi cr)
    return pr + (Hr @ ci + Hi @ cr), pi - (Hr @ cr - Hi @ ci)


def evolve_step(psi_prev: GaussVector, psi_curr: GaussVector, H) -> GaussVector:
    H = as_hamiltonian(H)
    if not (len(psi_prev) == len(psi_curr) == H.dim):
        raise DimensionError("slices and Hamiltonian must share one dimension")
    r, i = _step(psi_prev.re, psi_prev.im, psi_curr.re, psi_curr.im, H.H.re, H.H.im)
    return GaussVector(r, i)


def evolve(psi0: GaussVector, psi1: GaussVector, H, N: int, l: float = 1.0,
           max_slices: int = DEFAULT_MAX_SLICES) -> CAHistory:
    """Iterate psi_{n+1} = psi_{n-1} - i H psi_n exactly up to psi_N."""
    H = as_hamiltonian(H)
    if N < 1:
        raise ValueError("N must be at least 1")
    if N + 1 > max_slices:
        raise ValueError(f"history of {N + 1} slices exceeds cap {max_slices}")
    d = H.dim
    if len(psi0) != d or len(psi1) != d:
        raise DimensionError("initial slices and Hamiltonian must share one dimension")
    re = np.zeros((N + 1, d), dtype=object)
    im = np.zeros((N + 1, d), dtype=object)
    re[0], im[0], re[1], im[1] = psi0.re, psi0.im, psi1.re, psi1.im
    Hr, Hi = H.H.re, H.H.im
    for n in range(1, N):
        re[n + 1], im[n + 1] = _step(re[n - 1], im[n - 1], re[n], im[n], Hr, Hi)
    return CAHistory(re, im, H, l, solution=True)


def evolve_xp(x0, p0, x1, p1, H, N: int) -> XPHistory:
    """Leapfrog on the real form: x' = h_S p + h_A x, p' = -h_S x + h_A p (dot = central difference)."""
    H = as_hamiltonian(H)
    if N < 1:
        raise ValueError("N must be at least 1")
    d = H.dim
    init = [_obj(v) for v in (x0, p0, x1, p1)]
    if any(v.shape != (d,) for v in init):
        raise DimensionError("initial x/p vectors must match the Hamiltonian dimension")
    hS, hA = H.h_S, H.h_A
    xs = np.zeros((N + 1, d), dtype=object)
    ps = np.zeros((N + 1, d), dtype=object)
    xs[0], ps[0], xs[1], ps[1] = init
    for n in range(1, N):
        xs[n + 1] = xs[n - 1] + hS @ ps[n] + hA @ xs[n]
        ps[n + 1] = ps[n - 1] - hS @ xs[n] + hA @ ps[n]
    return XPHistory(_freeze(xs), _freeze(ps), H)


def _rowdot(ar, ai, br, bi):
    """Row-wise sum_a conj(a) * b for stacks of vectors; returns (re, im) object arrays."""
    return (ar * br + ai * bi).sum(axis=1), (ar * bi - ai * br).sum(axis=1)


def _summands(sr, si, pr, pi, Hr, Hi, lo: int, hi: int):
    """2i * action summand for n in [lo, hi], psi* given independently as (sr, si).

    Returned scaled by 2i so that every entry is a Gaussian integer even when
    psi* is not the conjugate of psi. Arrays are (..., rows, dim); leading axes batch.
    """
    n = slice(lo, hi + 1)
    up, dn = slice(lo + 1, hi + 2), slice(lo - 1, hi)
    dr = pr[..., up, :] - pr[..., dn, :]
    di = pi[..., up, :] - pi[..., dn, :]
    dsr = sr[..., up, :] - sr[..., dn, :]
    dsi = si[..., up, :] - si[..., dn, :]
    s_r, s_i, p_r, p_i = sr[..., n, :], si[..., n, :], pr[..., n, :], pi[..., n, :]
    # psi*_n . psi_dot_n  and  psi*_dot_n . psi_n  (plain products, psi* is its own variable)
    ar = (s_r * dr - s_i * di).sum(axis=-1)
    ai = (s_r * di + s_i * dr).sum(axis=-1)
    br = (dsr * p_r - dsi * p_i).sum(axis=-1)
    bi = (dsr * p_i + dsi * p_r).sum(axis=-1)
    hr = p_r @ Hr.T - p_i @ Hi.T
    hi_ = p_r @ Hi.T + p_i @ Hr.T
    cr = (s_r * hr - s_i * hi_).sum(axis=-1)
    ci = (s_r * hi_ + s_i * hr).sum(axis=-1)
    # 2i * [ (a - b)/(2i) + c ] = (a - b) + 2i c
    return (ar - br) - 2 * ci, (ai - bi) + 2 * cr


def _halve_2i(zr, zi) -> GaussianInt:
    # z / (2i) = (zi - i zr) / 2
    if zr % 2 or zi % 2:
        raise ArithmeticError("action summand is not a Gaussian integer")
    return GaussianInt(zi // 2, -zr // 2)


def action_eval(hist: CAHistory, window: tuple[int, int] | None = None) -> ActionValue:
    """Windowed action sum_n [Im(psi_n^* psi_dot_n) + psi_n^* H psi_n]; endpoints are boundary data."""
    lo, hi = window if window is not None else (1, hist.N - 1)
    if lo < 1 or hi > hist.N - 1 or lo > hi:
        raise WindowError(f"window [{lo}, {hi}] not interior to history with N={hist.N}")
    zr, zi = _summands(hist.re, -hist.im, hist.re, hist.im, hist.H.H.re, hist.H.H.im, lo, hi)
    per_step = [_halve_2i(a, b) for a, b in zip(zr, zi)]
    total = GaussianInt(sum(z.re for z in per_step), sum(z.im for z in per_step))
    return ActionValue(total, per_step, (lo, hi))


def integer_variation(g: Callable[[int], int] | Sequence[int], f: int, df: int) -> int:
    """[g(f+df) - g(f-df)] / (2 df), and 0 for df = 0.

    ``g`` is either a callable or a coefficient list ``[c0, c1, ...]``.
    """
    if df == 0:
        return 0
    if not callable(g):
        coeffs = list(g)
        g = lambda x: sum(c * x**k for k, c in enumerate(coeffs))  # noqa: E731
    num = g(f + df) - g(f - df)
    q, r = divmod(num, 2 * df)
    if r:
        raise ArithmeticError("variation quotient is not an integer; g must have integer coefficients")
    return q


def eom_residual(hist: CAHistory, n: int) -> GaussVector:
    """psi_{n+1} - psi_{n-1} + i H psi_n at interior slice n."""
    if not 1 <= n <= hist.N - 1:
        raise WindowError(f"slice {n} is not interior")
    step = evolve_step(hist[n - 1], hist[n], hist.H)
    return hist[n + 1] - step


@dataclass
class StationarityReport:
    sites: list[tuple[int, int]]
    coeff_psistar: list[GaussianInt]
    coeff_psi: list[GaussianInt]
    violations: list[tuple[int, int]]

    @property
    def stationary(self) -> bool:
        return not self.violations


def _padded(hist: CAHistory):
    z = np.zeros((1, hist.dim), dtype=object)
    pr = np.concatenate([z, hist.re, z])
    pi = np.concatenate([z, hist.im, z])
    return pr, pi


def _variation_coefficients(pr, pi, sr, si, Hr, Hi, ns, comps, deltas, vary_star: bool) -> list[GaussianInt]:
    """[S(v + delta) - S(v - delta)] / (2 delta) for the variables psi*_n^a (or psi_n^a), batched over sites.

    Works in padded coordinates: slice n of the history is row n+1. Only summands
    n-1..n+1 involve the varied entry, so each site gets a 5-row slab (padded rows
    n-1..n+3, varied entry at slab row 2); the zero padding never enters the difference.
    """
    ns = np.asarray(ns, dtype=int)
    rows = ns[:, None] + np.arange(-1, 4)[None, :]
    site = np.arange(len(ns))
    dr = np.array([d.re for d in deltas], dtype=object)
    di = np.array([d.im for d in deltas], dtype=object)
    totals = []
    for sgn in (1, -1):
        ar, ai, br, bi = (x[rows] for x in ((sr, si, pr, pi) if vary_star else (pr, pi, sr, si)))
        ar[site, 2, comps] += sgn * dr
        ai[site, 2, comps] += sgn * di
        q = (ar, ai, br, bi) if vary_star else (br, bi, ar, ai)
        zr, zi = _summands(q[0], q[1], q[2], q[3], Hr, Hi, 1, 3)
        totals.append((zr.sum(axis=-1), zi.sum(axis=-1)))
    out = []
    for k, d in enumerate(deltas):
        diff2i = GaussianInt(totals[0][0][k] - totals[1][0][k], totals[0][1][k] - totals[1][1][k])
        out.append(diff2i.exact_div(d * GaussianInt(0, 4)))  # = 2i * 2 delta * coefficient
    return out


def stationarity_check(hist: CAHistory, trials: int | None = None, rng_seed: int = 0,
                       max_delta: int = 5) -> StationarityReport:
    """Vary psi*_n^a and psi_n^a at interior sites by random Gaussian integers.

    ``trials=None`` scans every interior site. The action is bilinear, so the
    variation quotient is exactly the coefficient of the varied entry; it vanishes
    iff the corresponding equation of motion holds at that site.
    """
    if len(hist) < 3:
        raise ValueError("need at least three slices")
    rng = np.random.default_rng(rng_seed)
    all_sites = [(n, a) for n in range(1, hist.N) for a in range(hist.dim)]
    if trials is None:
        sites = all_sites
    else:
        picks = rng.integers(0, len(all_sites), size=trials)
        sites = [all_sites[k] for k in picks]
    pr, pi = _padded(hist)
    sr, si = pr, -pi
    Hr, Hi = hist.H.H.re, hist.H.H.im
    deltas = []
    for _ in sites:
        delta = GaussianInt(0, 0)
        while not delta:
            delta = GaussianInt(*(int(v) for v in rng.integers(-max_delta, max_delta + 1, size=2)))
        deltas.append(delta)
    if not sites:
        return StationarityReport([], [], [], [])
    ns = [n for n, _ in sites]
    comps = [a for _, a in sites]
    cs = _variation_coefficients(pr, pi, sr, si, Hr, Hi, ns, comps, deltas, vary_star=True)
    cp = _variation_coefficients(pr, pi, sr, si, Hr, Hi, ns, comps, deltas, vary_star=False)
    bad = [site for site, c1, c2 in zip(sites, cs, cp) if c1 or c2]
    return StationarityReport(sites, cs, cp, bad)


def single_site_variation(hist: CAHistory, n: int, a: int, delta) -> GaussianInt:
    """Variation quotient of the action for psi*_n^a; 0 by convention when delta = 0."""
    if not 1 <= n <= hist.N - 1:
        raise WindowError(f"slice {n} is not interior")
    delta = GaussianInt.coerce(delta)
    if not delta:
        return GaussianInt(0)
    pr, pi = _padded(hist)
    return _variation_coefficients(pr, pi, pr, -pi, hist.H.H.re, hist.H.H.im, [n], [a], [delta], True)[0]


def linear_combination(a, hist_a: CAHistory, b, hist_b: CAHistory) -> CAHistory:
    a, b = GaussianInt.coerce(a), GaussianInt.coerce(b)
    re = a.re * hist_a.re - a.im * hist_a.im + b.re * hist_b.re - b.im * hist_b.im
    im = a.re * hist_a.im + a.im * hist_a.re + b.re * hist_b.im + b.im * hist_b.re
    return CAHistory(re, im, hist_a.H, hist_a.l, solution=hist_a.solution and hist_b.solution)


def histories_equal(a: CAHistory, b: CAHistory) -> bool:
    return a.re.shape == b.re.shape and bool((a.re == b.re).all() and (a.im == b.im).all())


def pauli_example() -> tuple[GaussVector, GaussVector, HamiltonianSpec]:
    """sigma_x with psi_0 = (1, 0), psi_1 = (0, 1)."""
    H = as_hamiltonian(GaussMatrix.of([[0, 1], [1, 0]]))
    return GaussVector.of([1, 0]), GaussVector.of([0, 1]), H
