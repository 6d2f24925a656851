"""Two-time conserved correlators q_G and the symmetrized quantity."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ca_engine import CAHistory, WindowError
from .exact_core import DimensionError, GaussianInt, GaussMatrix, commutes


def _apply_rows(G: GaussMatrix, re, im):
    # rows are vectors; returns G v for every row
    return re @ G.re.T - im @ G.im.T, re @ G.im.T + im @ G.re.T


def _check_G(hist: CAHistory, G: GaussMatrix):
    if G.dim != hist.dim:
        raise DimensionError(f"G has dim {G.dim}, history has dim {hist.dim}")


def q_series(hist: CAHistory, G: GaussMatrix, lo: int = 1, hi: int | None = None) -> list[GaussianInt]:
    """q_G(n) = psi_n^* G psi_{n-1} + psi_{n-1}^* G psi_n for n in [lo, hi], all at once."""
    _check_G(hist, G)
    hi = hist.N if hi is None else hi
    if lo < 1 or hi > hist.N or lo > hi:
        raise WindowError(f"q_G index range [{lo}, {hi}] outside [1, {hist.N}]")
    re, im = hist.re[lo - 1:hi + 1], hist.im[lo - 1:hi + 1]
    gr, gi = _apply_rows(G, re, im)
    # conj(a) . (G b) for (a, b) = (psi_n, psi_{n-1}) and (psi_{n-1}, psi_n)
    ar, ai = re[1:], im[1:]
    br, bi = re[:-1], im[:-1]
    g_prev_r, g_prev_i = gr[:-1], gi[:-1]
    g_curr_r, g_curr_i = gr[1:], gi[1:]
    qr = (ar * g_prev_r + ai * g_prev_i).sum(axis=1) + (br * g_curr_r + bi * g_curr_i).sum(axis=1)
    qi = (ar * g_prev_i - ai * g_prev_r).sum(axis=1) + (br * g_curr_i - bi * g_curr_r).sum(axis=1)
    return [GaussianInt(a, b) for a, b in zip(qr, qi)]


def q_of_G(hist: CAHistory, G: GaussMatrix, n: int) -> GaussianInt:
    if not 1 <= n <= hist.N:
        raise WindowError(f"q_G needs 1 <= n <= N={hist.N}, got {n}")
    return q_series(hist, G, n, n)[0]


@dataclass
class ConservedSeries:
    G: GaussMatrix
    values: list[GaussianInt]
    is_real: bool

    @property
    def constant(self) -> bool:
        return all(v == self.values[0] for v in self.values)

    def first_change(self) -> int | None:
        """Offset of the first value differing from values[0] (n = offset + 1)."""
        for k, v in enumerate(self.values):
            if v != self.values[0]:
                return k
        return None

    def rows(self):
        """(n, Re q, Im q, constant_so_far) table rows."""
        out, still = [], True
        for k, v in enumerate(self.values):
            still = still and v == self.values[0]
            out.append((k + 1, v.re, v.im, still))
        return out


def conserved_series(hist: CAHistory, G: GaussMatrix) -> ConservedSeries:
    vals = q_series(hist, G)
    return ConservedSeries(G, vals, all(v.im == 0 for v in vals))


def conservation_law_terms(hist: CAHistory, G: GaussMatrix) -> list[GaussianInt]:
    """psi_n^* G psi_dot_n + psi_dot_n^* G psi_n at every interior n (zero when conserved)."""
    _check_G(hist, G)
    re, im = hist.re, hist.im
    dr, di = re[2:] - re[:-2], im[2:] - im[:-2]
    cr, ci = re[1:-1], im[1:-1]
    gdr, gdi = _apply_rows(G, dr, di)
    gcr, gci = _apply_rows(G, cr, ci)
    tr = (cr * gdr + ci * gdi).sum(axis=1) + (dr * gcr + di * gci).sum(axis=1)
    ti = (cr * gdi - ci * gdr).sum(axis=1) + (dr * gci - di * gcr).sum(axis=1)
    return [GaussianInt(a, b) for a, b in zip(tr, ti)]


@dataclass
class TheoremAReport:
    commutes: bool
    solution: bool
    law_holds: bool
    constant: bool
    first_violation: int | None
    series: ConservedSeries = field(repr=False)

    @property
    def applicable(self) -> bool:
        return self.commutes and self.solution

    @property
    def verified(self) -> bool:
        return self.applicable and self.law_holds and self.constant


def verify_theorem_A(hist: CAHistory, G: GaussMatrix) -> TheoremAReport:
    """Check the discrete conservation law for G on a history.

    A non-commuting G is reported through ``commutes=False`` (the law is still
    evaluated, for diagnostics) rather than raised.
    """
    comm = commutes(G, hist.H.H)
    terms = conservation_law_terms(hist, G)
    bad = next((k + 1 for k, t in enumerate(terms) if t), None)
    series = conserved_series(hist, G)
    return TheoremAReport(comm, hist.solution, bad is None, series.constant, bad, series)


def q_symmetrized2(hist: CAHistory) -> list[int]:
    """2 * (1/2) Re psi_n^*(psi_{n+1} + psi_{n-1}) for n = 1..N-1, as integers."""
    re, im = hist.re, hist.im
    sr, si = re[2:] + re[:-2], im[2:] + im[:-2]
    return [int(v) for v in (re[1:-1] * sr + im[1:-1] * si).sum(axis=1)]


def q_symmetrized(hist: CAHistory, n: int) -> Fraction:
    if not 1 <= n <= hist.N - 1:
        raise WindowError(f"symmetrized quantity needs 1 <= n <= N-1={hist.N - 1}, got {n}")
    re, im = hist.re, hist.im
    two_q = int(np.sum(re[n] * (re[n + 1] + re[n - 1]) + im[n] * (im[n + 1] + im[n - 1])))
    return Fraction(two_q, 2)

