"""Sampling-theorem map between CA histories and bandlimited wave functions psi(t).

Samples psi_n sit at t = n l. Reconstruction is the plain sinc series over a
finite window, so quantitative claims are restricted to a guarded central part of
the window and every value can be paired with a truncation-error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ca_engine import CAHistory

PI = math.pi


class EdgeGuardError(ValueError):
    """Requested time too close to the window edge for a reliable reconstruction."""


class InadmissibleError(ValueError):
    """|l eps| > 2: no real stationary energy exists."""


def _sinc_weights(m: np.ndarray, d: float, order: int) -> np.ndarray:
    """Derivative `order` of sin(pi x)/(pi x) at x = d + m, m integer, |d| <= 1/2.

    sin(pi x) = (-1)^m sin(pi d) and cos(pi x) = (-1)^m cos(pi d) keep the
    kernel exact at the sample points and avoid large sine arguments.
    """
    x = d + m.astype(float)
    sgn = np.where(m % 2 == 0, 1.0, -1.0)
    sd, cd = math.sin(PI * d), math.cos(PI * d)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    if order == 0:
        w = sgn * sd / (PI * xs)
        series = 1 - (PI * x) ** 2 / 6
    elif order == 1:
        w = sgn * (cd / xs - sd / (PI * xs**2))
        series = -(PI**2) * x / 3 + PI**4 * x**3 / 30
    elif order == 2:
        w = sgn * (-PI * sd / xs - 2 * cd / xs**2 + 2 * sd / (PI * xs**3))
        series = -(PI**2) / 3 + PI**4 * x**2 / 10
    else:
        raise ValueError("only derivative orders 0, 1, 2 are supported")
    return np.where(small, series, w)


@dataclass(frozen=True)
class ContinuumSignal:
    """Bandlimited reconstruction handle over a finite window of samples.

    Row j of ``samples`` is the sample at clock index ``offset + j``.
    """

    samples: np.ndarray
    l: float = 1.0
    H: np.ndarray | None = None
    offset: int = 0
    guard: float = 0.25

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim == 1:
            s = s[:, None]
        object.__setattr__(self, "samples", s)
        if not self.l > 0:
            raise ValueError("scale l must be positive")
        if not 0 <= self.guard < 0.5:
            raise ValueError("guard fraction must lie in [0, 0.5)")

    @classmethod
    def from_history(cls, hist: CAHistory, guard: float = 0.25, window: tuple[int, int] | None = None):
        lo, hi = window if window is not None else (0, hist.N)
        return cls(hist.to_complex()[lo:hi + 1], hist.l, hist.H.to_complex(), lo, guard)

    @property
    def K(self) -> int:
        return self.samples.shape[0]

    @property
    def bandlimit(self) -> float:
        return PI / self.l

    @property
    def guarded_range(self) -> tuple[float, float]:
        """Allowed t interval: the central part of the window left after the guard."""
        span = (self.K - 1) * self.guard
        return (self.offset + span) * self.l, (self.offset + self.K - 1 - span) * self.l

    def check(self, *ts: float):
        lo, hi = self.guarded_range
        eps = 1e-12 * max(1.0, abs(lo), abs(hi))
        for t in ts:
            if not lo - eps <= t <= hi + eps:
                raise EdgeGuardError(f"t={t} outside guarded range [{lo}, {hi}]")

    def _split(self, t: float):
        x = t / self.l
        k0 = round(x)
        d = x - k0
        m = k0 - (self.offset + np.arange(self.K))
        return x, m, d

    def weights(self, t: float, order: int = 0) -> np.ndarray:
        x, m, d = self._split(t)
        if d == 0 and order == 0:
            return (m == 0).astype(float)
        return _sinc_weights(m, d, order) / self.l**order

    def value(self, t: float, order: int = 0, guarded: bool = True) -> np.ndarray:
        if guarded:
            self.check(t)
        x, m, d = self._split(t)
        if d == 0 and order == 0:
            return self.samples[int(np.flatnonzero(m == 0)[0])].copy()
        return self.weights(t, order) @ self.samples

    __call__ = value

    def error_estimate(self, t: float) -> float:
        """Truncation estimate from a Dirichlet-type tail bound.

        The neglected tail on each side is sum_n a_n / (n - t/l) with
        a_n = (-1)^n psi_n sin(pi d)/pi; its size is bounded by twice the largest
        partial sum of the a_n over the neglected range divided by the distance to
        the window edge. Partial sums beyond the window are estimated from the
        outer quarter of the samples on that side. Zero at sample points.
        """
        x, m, d = self._split(t)
        sd = abs(math.sin(PI * d))
        if sd == 0:
            return 0.0
        q = max(1, self.K // 4)
        alt = self.samples * np.where(np.arange(self.K) % 2 == 0, 1.0, -1.0)[:, None]
        s_hi = np.max(np.linalg.norm(np.cumsum(alt[-q:], axis=0), axis=1))
        s_lo = np.max(np.linalg.norm(np.cumsum(alt[:q][::-1], axis=0), axis=1))
        n_lo, n_hi = self.offset, self.offset + self.K - 1
        return sd / PI * 2 * (s_hi / (n_hi + 1 - x) + s_lo / (x - n_lo + 1))


def _signal(obj) -> ContinuumSignal:
    return obj if isinstance(obj, ContinuumSignal) else ContinuumSignal.from_history(obj)


def reconstruct(hist, t: float) -> np.ndarray:
    """psi(t) = sum_n psi_n sinc((t - n l)/l) over the window; exact at t = n l."""
    return _signal(hist).value(t)


def modified_schrodinger_residual(hist, t: float) -> np.ndarray:
    """psi(t + l) - psi(t - l) + i H psi(t): the finite-l Schrodinger form with 2 sinh(l d/dt) as shift difference."""
    sig = _signal(hist)
    if sig.H is None:
        raise ValueError("signal carries no Hamiltonian")
    sig.check(t - sig.l, t, t + sig.l)
    return sig.value(t + sig.l) - sig.value(t - sig.l) + 1j * (sig.H @ sig.value(t))


def continuum_Q(hist, t: float) -> float:
    """(1/2) Re psi(t)^dagger (psi(t + l) + psi(t - l)), i.e. Re psi^* cosh(l d/dt) psi."""
    sig = _signal(hist)
    sig.check(t - sig.l, t, t + sig.l)
    p = sig.value(t)
    return float(0.5 * np.real(np.vdot(p, sig.value(t + sig.l) + sig.value(t - sig.l))))


def continuum_Q_expansion(hist, t: float) -> float:
    """psi^dagger psi + (l^2/2) Re psi^dagger psi'' with psi'' from the twice-differentiated sinc series."""
    sig = _signal(hist)
    sig.check(t)
    p = sig.value(t)
    p2 = sig.value(t, order=2)
    return float(np.real(np.vdot(p, p)) + sig.l**2 / 2 * np.real(np.vdot(p, p2)))


def continuum_Q_error(hist, t: float) -> float:
    """First-order propagation of the truncation estimates into continuum_Q."""
    sig = _signal(hist)
    ts = (t - sig.l, t, t + sig.l)
    e_m, e_0, e_p = (sig.error_estimate(s) for s in ts)
    mags = [float(np.linalg.norm(sig.value(s))) for s in ts]
    return 0.5 * (e_0 * (mags[0] + mags[2]) + mags[1] * (e_m + e_p)) + 0.5 * e_0 * (e_m + e_p)


def dispersion(l_eps: float, l: float = 1.0) -> float:
    """Stationary energy E with l E = arcsin(l eps / 2)."""
    if abs(l_eps) > 2:
        raise InadmissibleError(f"|l eps| = {abs(l_eps)} > 2 has no real stationary energy")
    return math.asin(l_eps / 2) / l


def dispersion_series(l_eps: float) -> float:
    """Leading terms of l E: (l eps/2) [1 + (l eps/2)^2 / 6]."""
    h = l_eps / 2
    return h * (1 + h * h / 6)


@dataclass(frozen=True)
class StationaryState:
    eigenvalue: float
    energy: float
    vector: np.ndarray

    @classmethod
    def from_eigenpair(cls, l_eps: float, vector, l: float = 1.0) -> StationaryState:
        v = np.asarray(vector, dtype=complex)
        return cls(float(l_eps), dispersion(l_eps, l), v)


def stationary_history(state: StationaryState, N: int, l: float = 1.0, offset: int = 0) -> np.ndarray:
    """psi_n = exp(-i n l E) v for n = offset .. offset + N; rows are slices."""
    if abs(state.eigenvalue) > 2:
        raise InadmissibleError("inadmissible eigenvalue")
    n = np.arange(offset, offset + N + 1)
    return np.exp(-1j * n * l * state.energy)[:, None] * state.vector[None, :]


def stationary_signal(state: StationaryState, K: int, l: float = 1.0, offset: int = 0,
                      H: np.ndarray | None = None, guard: float = 0.25) -> ContinuumSignal:
    """K stationary samples starting at clock index ``offset``; H defaults to eigenvalue * identity."""
    d = state.vector.shape[0]
    H = state.eigenvalue * np.eye(d) if H is None else np.asarray(H, dtype=complex)
    return ContinuumSignal(stationary_history(state, K - 1, l, offset), l, H, offset, guard)


def discrete_residual(samples: np.ndarray, H) -> np.ndarray:
    """psi_{n+1} - psi_{n-1} + i H psi_n on every interior row of a float history."""
    s = np.asarray(samples, dtype=complex)
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    return s[2:] - s[:-2] + 1j * s[1:-1] @ H.T

