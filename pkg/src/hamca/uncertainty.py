"""Position and momentum on a finite spatial lattice, and uncertainty bounds.

X_rs = l r delta_rs and P_rs = -i (delta_{r,s-1} - delta_{r,s+1}) / 2l on sites
r = -R..R. The lattice is hard-truncated; states must keep negligible weight near
the edges so that only interior rows of P matter.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .random_models import make_rng

GUARD_SITES = 3
GUARD_THRESHOLD = 1e-8
NORM_TOL = 1e-12
ROBERTSON_SLACK = 1e-10


class StateError(ValueError):
    """State is unnormalized or has weight near the lattice edge."""


def build_xp(R: int, l: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    if R < 1:
        raise ValueError("half-width R must be at least 1")
    if not l > 0:
        raise ValueError("spacing l must be positive")
    r = np.arange(-R, R + 1)
    X = np.diag(l * r).astype(complex)
    n = 2 * R + 1
    P = np.zeros((n, n), dtype=complex)
    idx = np.arange(n - 1)
    P[idx, idx + 1] = -1j / (2 * l)
    P[idx + 1, idx] = 1j / (2 * l)
    return X, P


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


@dataclass(frozen=True)
class LatticeState:
    amplitudes: np.ndarray
    l: float = 1.0
    normalized: bool = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.ndim != 1 or a.size % 2 == 0:
            raise ValueError("amplitudes must cover an odd number of sites -R..R")
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "normalized", abs(float(np.vdot(a, a).real) - 1) <= NORM_TOL)

    @classmethod
    def from_amplitudes(cls, amps, l: float = 1.0) -> LatticeState:
        a = np.asarray(amps, dtype=complex)
        nrm = np.linalg.norm(a)
        if nrm == 0:
            raise StateError("zero state cannot be normalized")
        return cls(a / nrm, l)

    @classmethod
    def point(cls, R: int, r: int = 0, l: float = 1.0) -> LatticeState:
        a = np.zeros(2 * R + 1, dtype=complex)
        a[r + R] = 1
        return cls(a, l)

    @classmethod
    def on_sites(cls, R: int, sites: dict[int, complex], l: float = 1.0) -> LatticeState:
        a = np.zeros(2 * R + 1, dtype=complex)
        for r, v in sites.items():
            a[r + R] = v
        return cls.from_amplitudes(a, l)

    @classmethod
    def gaussian(cls, R: int, sigma: float, l: float = 1.0, k: float = 0.0, center: float = 0.0) -> LatticeState:
        """exp(-(x - x0)^2 / 4 sigma^2 + i k x) on x = l r; sigma is the position spread."""
        x = l * np.arange(-R, R + 1)
        a = np.exp(-((x - center) ** 2) / (4 * sigma**2) + 1j * k * x)
        return cls.from_amplitudes(a, l)

    @property
    def R(self) -> int:
        return (self.amplitudes.size - 1) // 2

    def guard_ok(self, sites: int = GUARD_SITES, threshold: float = GUARD_THRESHOLD) -> bool:
        a = np.abs(self.amplitudes)
        if a.size <= 2 * sites:
            return False
        return bool(a[:sites].max() < threshold and a[-sites:].max() < threshold)


@dataclass
class UncertaintyReport:
    dX: float
    dP: float
    robertson_rhs: float
    paper_rhs: float
    satisfied_robertson: bool
    satisfied_paper: bool
    mean_x: float
    mean_p: float
    p2: float
    comm: complex
    # half of the printed bound, and the form built from the lattice shift operator
    scaled_rhs: float
    shift_rhs: float

    @property
    def product(self) -> float:
        return self.dX * self.dP

    @property
    def satisfied_scaled(self) -> bool:
        return self.product >= self.scaled_rhs

    @property
    def satisfied_shift(self) -> bool:
        return self.product >= self.shift_rhs

    def row(self, state_id) -> dict:
        return {
            "state_id": state_id,
            "dX": self.dX,
            "dP": self.dP,
            "robertson_rhs": self.robertson_rhs,
            "paper_rhs": self.paper_rhs,
            "scaled_rhs": self.scaled_rhs,
            "shift_rhs": self.shift_rhs,
            "satisfied_robertson": self.satisfied_robertson,
            "satisfied_paper": self.satisfied_paper,
            "satisfied_scaled": self.satisfied_scaled,
            "satisfied_shift": self.satisfied_shift,
        }


def _moments(v: np.ndarray, X: np.ndarray, P: np.ndarray):
    xv, pv = X @ v, P @ v
    mx = np.vdot(v, xv).real
    mp = np.vdot(v, pv).real
    x2 = np.vdot(xv, xv).real
    p2 = np.vdot(pv, pv).real
    comm = complex(np.vdot(xv, pv) - np.vdot(pv, xv))
    return mx, mp, x2, p2, comm


def uncertainty_report(state: LatticeState, check: bool = True,
                       ops: tuple[np.ndarray, np.ndarray] | None = None) -> UncertaintyReport:
    if check:
        if not state.normalized:
            raise StateError("state is not normalized")
        if not state.guard_ok():
            raise StateError(f"amplitude within {GUARD_SITES} sites of the edge exceeds {GUARD_THRESHOLD}")
    X, P = ops if ops is not None else build_xp(state.R, state.l)
    v = state.amplitudes
    mx, mp, x2, p2, comm = _moments(v, X, P)
    dX = math.sqrt(max(x2 - mx * mx, 0.0))
    dP = math.sqrt(max(p2 - mp * mp, 0.0))
    l2 = state.l**2
    rob = abs(comm) / 2
    printed = float(abs(1 + l2 * p2 / 2))
    return UncertaintyReport(
        dX, dP, rob, printed,
        dX * dP >= rob - ROBERTSON_SLACK,
        dX * dP >= printed,
        float(mx), float(mp), float(p2), comm,
        printed / 2, abs(1 - l2 * p2 / 2) / 2,
    )


def random_guarded_state(rng: np.random.Generator, R: int, l: float = 1.0) -> LatticeState:
    """Random complex amplitudes on a random interval that keeps clear of the guard band."""
    lo, hi = -R + GUARD_SITES, R - GUARD_SITES
    a = int(rng.integers(lo, hi + 1))
    b = int(rng.integers(a, hi + 1))
    amps = np.zeros(2 * R + 1, dtype=complex)
    k = b - a + 1
    amps[a + R:b + R + 1] = rng.normal(size=k) + 1j * rng.normal(size=k)
    return LatticeState.from_amplitudes(amps, l)


def random_states(seed: int, count: int, R: int = 12, l: float = 1.0) -> list[LatticeState]:
    return [random_guarded_state(make_rng(seed, 9, j), R, l) for j in range(count)]


# ---------------------------------------------------------------------------
# constrained minimum-Delta X search


BOUNDS = {
    "paper": lambda rep: rep.paper_rhs,
    "scaled": lambda rep: rep.scaled_rhs,
    "shift": lambda rep: rep.shift_rhs,
}


@dataclass
class MinSearchResult:
    dX_min: float | None
    state: LatticeState | None
    family: int | None
    bound: str
    target: float
    tolerance: float
    optimizer: str = "grid + SLSQP"
    candidates: int = 0

    @property
    def discrepancy(self) -> float | None:
        return None if self.dX_min is None else self.dX_min - self.target

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "dX_min": self.dX_min,
            "target": self.target,
            "discrepancy": self.discrepancy,
            "family_sites": self.family,
            "tolerance": self.tolerance,
            "optimizer": self.optimizer,
            "feasible_candidates": self.candidates,
            "amplitudes": None if self.state is None else
            [[float(z.real), float(z.imag)] for z in self.state.amplitudes],
        }


def _family_vector(theta: np.ndarray, k: int, R: int) -> np.ndarray:
    """k consecutive sites centred on 0; theta holds k real then k imaginary parts."""
    v = np.zeros(2 * R + 1, dtype=complex)
    start = R - (k - 1) // 2
    v[start:start + k] = theta[:k] + 1j * theta[k:]
    n = np.linalg.norm(v)
    return v / n if n > 0 else v


def min_deltaX_search(l: float = 1.0, R: int = 8, family: Sequence[int] = (2, 3, 4), bound: str = "paper",
                      tolerance: float = 1e-6, grid: Sequence[float] = (-1.0, -0.5, 0.0, 0.5, 1.0),
                      phases: Sequence[float] = (0.0, math.pi / 4, math.pi / 2), refine: int = 8) -> MinSearchResult:
    """Minimize Delta X over k-site states with Delta X Delta P = rhs (relative tolerance).

    The grid seeds real amplitude patterns times a linear phase e^{i phi r}; the best
    ``refine`` seeds per family (ranked by constraint violation, then Delta X) are
    refined with SLSQP under the equality constraint. No global optimality is claimed.
    """
    family = list(family)
    if not family:
        raise ValueError("empty trial family")
    if bound not in BOUNDS:
        raise ValueError(f"unknown bound {bound!r}")
    if any(k < 1 or k > 2 * (R - GUARD_SITES) + 1 for k in family):
        raise ValueError("family support does not fit inside the guarded lattice")
    rhs_of = BOUNDS[bound]
    ops = build_xp(R, l)
    target = l / math.sqrt(2)

    def rep_of(theta, k):
        v = _family_vector(theta, k, R)
        return uncertainty_report(LatticeState(v, l), check=False, ops=ops)

    def gap(theta, k):
        rep = rep_of(theta, k)
        rhs = rhs_of(rep)
        return (rep.product - rhs) / max(rhs, 1e-300)

    best: tuple[float, np.ndarray, int] | None = None
    feasible = 0
    for k in family:
        seeds = []
        sites = np.arange(k) - (k - 1) // 2
        for amps in itertools.product(grid, repeat=k):
            a = np.array(amps)
            if not a.any():
                continue
            for ph in phases:
                z = a * np.exp(1j * ph * sites)
                theta = np.concatenate([z.real, z.imag])
                seeds.append((abs(gap(theta, k)), rep_of(theta, k).dX, theta))
        seeds.sort(key=lambda s: (round(s[0], 12), s[1]))
        for _, _, theta0 in seeds[:refine]:
            res = minimize(
                lambda th: rep_of(th, k).dX ** 2,
                theta0,
                method="SLSQP",
                constraints=[{"type": "eq", "fun": lambda th: gap(th, k)}],
                options={"maxiter": 200, "ftol": 1e-12},
            )
            th = res.x
            if not np.all(np.isfinite(th)) or np.linalg.norm(th) == 0:
                continue
            g = gap(th, k)
            if not math.isfinite(g) or abs(g) > tolerance:
                continue
            feasible += 1
            dx = rep_of(th, k).dX
            if best is None or dx < best[0] - 1e-12:
                best = (dx, th, k)
    if best is None:
        return MinSearchResult(None, None, None, bound, target, tolerance, candidates=0)
    dx, th, k = best
    return MinSearchResult(dx, LatticeState(_family_vector(th, k, R), l), k, bound, target, tolerance,
                           candidates=feasible)
