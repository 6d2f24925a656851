"""Spectral analysis of H, the closed-form solution, and periodicity / ontology checks."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ca_engine import CAHistory, _step, evolve
from .exact_core import (
    GaussMatrix,
    GaussVector,
    as_hamiltonian,
    det,
)

ADMISSIBLE_TOL = 1e-9


class SingularClosedFormError(ValueError):
    """Some eigenvalue sits exactly on the band edge |l eps| = 2 (cos phi = 0)."""


class SpectralInstabilityWarning(RuntimeWarning):
    pass


def jacobi_eigh(S: np.ndarray, tol: float = 1e-12, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi for a real symmetric matrix; returns (eigenvalues, column eigenvectors).

    Stops once the off-diagonal Frobenius norm is below ``tol`` times the matrix norm.
    """
    A = np.array(S, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    scale = np.linalg.norm(A) or 1.0
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * cp - s * cq, s * cp + c * cq
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :], A[q, :] = c * rp - s * rq, s * rp + c * rq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p], V[:, q] = c * vp - s * vq, s * vp + c * vq
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    return np.diag(A).copy(), V


def real_embedding(Hc: np.ndarray) -> np.ndarray:
    A, B = Hc.real, Hc.imag
    return np.block([[A, -B], [B, A]])


@dataclass
class SpectralData:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    admissible: bool
    residual: float = 0.0
    boundary: bool = False

    @property
    def strictly_admissible(self) -> bool:
        return self.admissible and not self.boundary

    @property
    def phases(self) -> np.ndarray:
        """phi_a = arcsin(l eps_a / 2); complex for inadmissible eigenvalues."""
        lam = self.eigenvalues.astype(complex) / 2
        return np.arcsin(lam) if self.admissible else np.emath.arcsin(lam)

    def to_json(self) -> dict:
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "admissible": self.admissible,
            "boundary": self.boundary,
            "residual": self.residual,
            "eigenvectors_re": self.eigenvectors.real.tolist(),
            "eigenvectors_im": self.eigenvectors.imag.tolist(),
        }


def _complex_eigvecs(w: np.ndarray, V: np.ndarray, dim: int) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(w)
    w, V = w[order], V[:, order]
    cand = V[:dim] + 1j * V[dim:]
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
    vals, vecs = [], []
    start = 0
    while start < len(w):
        stop = start + 1
        while stop < len(w) and w[stop] - w[stop - 1] <= 1e-8 * scale:
            stop += 1
        # each complex eigenvector appears twice in the embedding, as (x; y) and (-y; x)
        k = (stop - start) // 2
        U, _, _ = np.linalg.svd(cand[:, start:stop], full_matrices=False)
        vecs.append(U[:, :k])
        vals.extend([float(np.mean(w[start:stop]))] * k)
        start = stop
    return np.array(vals), np.hstack(vecs) if vecs else np.zeros((dim, 0), complex)


def spectrum(H) -> SpectralData:
    H = as_hamiltonian(H)
    Hc = H.to_complex()
    d = H.dim
    if d == 0:
        return SpectralData(np.zeros(0), np.zeros((0, 0), complex), True)
    w, V = jacobi_eigh(real_embedding(Hc))
    vals, vecs = _complex_eigvecs(w, V, d)
    if vecs.shape[1] != d:
        raise RuntimeError("eigenvector extraction lost rank; spectrum too clustered")
    resid = float(np.max(np.abs(vecs @ np.diag(vals) @ vecs.conj().T - Hc)))
    admissible = bool(np.all(np.abs(vals) <= 2 + ADMISSIBLE_TOL))
    two = GaussMatrix.identity(d).scale(2)
    boundary = not det(H.H - two) or not det(H.H + two)
    return SpectralData(vals, vecs, admissible, resid, boundary)


def _as_complex(v) -> np.ndarray:
    return v.to_complex() if isinstance(v, GaussVector) else np.asarray(v, dtype=complex)


def closed_form_states(psi0, psi1, H, ns: Sequence[int], spec: SpectralData | None = None) -> np.ndarray:
    """psi_n from the closed-form solution for every n in ``ns``; rows are states."""
    spec = spectrum(H) if spec is None else spec
    if spec.boundary:
        raise SingularClosedFormError("an eigenvalue equals +-2; use exact iteration instead")
    if not spec.admissible:
        warnings.warn("H has eigenvalues outside [-2, 2]: solutions grow exponentially",
                      SpectralInstabilityWarning, stacklevel=2)
    V = spec.eigenvectors
    phi = spec.phases
    a = V.conj().T @ _as_complex(psi0)
    b = V.conj().T @ _as_complex(psi1)
    ns = np.asarray(ns)
    e = np.exp(1j * phi)
    plus = e * a + b
    minus = a / e - b
    sign = np.where(ns % 2 == 0, 1.0, -1.0)[:, None]
    nphi = ns[:, None] * phi[None, :]
    coeff = (np.exp(-1j * nphi) * plus + sign * np.exp(1j * nphi) * minus) / (2 * np.cos(phi))
    return coeff @ V.T


def closed_form_state(psi0, psi1, H, n: int, spec: SpectralData | None = None) -> np.ndarray:
    return closed_form_states(psi0, psi1, H, [n], spec)[0]


def transfer_matrices(H, kmax: int) -> list[GaussMatrix]:
    """T(0..kmax) from T(k+1) = T(k-1) - i H T(k), T(0) = 1, T(1) = 0, exact."""
    H = as_hamiltonian(H)
    d = H.dim
    Hr, Hi = H.H.re, H.H.im
    Tr = [GaussMatrix.identity(d).re.copy(), np.zeros((d, d), dtype=object)]
    Ti = [np.zeros((d, d), dtype=object), np.zeros((d, d), dtype=object)]
    for k in range(1, kmax):
        Tr.append(Tr[k - 1] + (Hr @ Ti[k] + Hi @ Tr[k]))
        Ti.append(Ti[k - 1] - (Hr @ Tr[k] - Hi @ Ti[k]))
    return [GaussMatrix(r, i) for r, i in zip(Tr[:kmax + 1], Ti[:kmax + 1])]


def transfer_matrices_closed_form(H, kmax: int, spec: SpectralData | None = None) -> list[np.ndarray]:
    """T(k) columns from the closed form: psi_n = T(n+1) psi_1 + T(n) psi_0 with psi_0 = 0, psi_1 = e_j."""
    H = as_hamiltonian(H)
    d = H.dim
    cols = [closed_form_states(np.zeros(d), np.eye(d)[j], H, range(-1, kmax), spec) for j in range(d)]
    # row n+1 of cols[j] is psi_n with psi_1 = e_j; that is column j of T(n+1)
    return [np.column_stack([c[k] for c in cols]) for k in range(kmax + 1)]


@dataclass
class CompositionReport:
    m: int
    n: int
    exact: bool
    holds: bool
    max_deviation: float = 0.0


def composition_check(hist: CAHistory, m: int, n: int, exact: bool = True, tol: float = 1e-9) -> CompositionReport:
    """psi_n = T(n-m+1) psi_{m+1} + T(n-m) psi_m."""
    if not 0 <= m < n <= hist.N:
        raise IndexError(f"need 0 <= m < n <= N={hist.N}, got m={m}, n={n}")
    k = n - m
    if exact:
        T = transfer_matrices(hist.H, k + 1)
        rhs = T[k + 1] @ hist[m + 1] + T[k] @ hist[m]
        return CompositionReport(m, n, True, rhs == hist[n])
    T = transfer_matrices_closed_form(hist.H, k + 1)
    c = hist.to_complex()
    rhs = T[k + 1] @ c[m + 1] + T[k] @ c[m]
    dev = float(np.max(np.abs(rhs - c[n])) / max(1.0, np.max(np.abs(c[n]))))
    return CompositionReport(m, n, False, dev <= tol, dev)


@dataclass
class CycleReport:
    period: int | None = None
    antiperiod: int | None = None
    ontological: bool | None = None
    first_superposition_index: int | None = None
    steps_scanned: int = 0
    superposition_indices: list[int] = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {
            "period": self.period,
            "antiperiod": self.antiperiod,
            "ontological": self.ontological,
            "first_superposition_index": self.first_superposition_index,
            "steps_scanned": self.steps_scanned,
        }


def _parallel(vr, vi, br, bi) -> bool:
    # v || b over Q(i)  <=>  v_a b_c - v_c b_a = 0 for all a, c
    pr = np.outer(vr, br) - np.outer(vi, bi)
    pi = np.outer(vr, bi) + np.outer(vi, br)
    return bool((pr == pr.T).all() and (pi == pi.T).all())


def _basis_arrays(basis: Sequence[GaussVector]):
    if not basis:
        raise ValueError("ontology scan needs a nonempty basis")
    for b in basis:
        if b.is_zero():
            raise ValueError("basis vectors must be nonzero")
    for x in range(len(basis)):
        for y in range(x + 1, len(basis)):
            if _parallel(basis[x].re, basis[x].im, basis[y].re, basis[y].im):
                raise ValueError(f"basis vectors {x} and {y} are linearly dependent")
    return [(b.re, b.im) for b in basis]


def _is_basis_multiple(vr, vi, barr) -> bool:
    if not any(vr) and not any(vi):
        return True  # zero state: 0 times any basis vector
    return any(_parallel(vr, vi, br, bi) for br, bi in barr)


def ontology_scan(hist: CAHistory, basis: Sequence[GaussVector]) -> CycleReport:
    """Classify each slice as a Gaussian-rational multiple of one basis vector or a superposition."""
    barr = _basis_arrays(basis)
    sup = [n for n in range(len(hist)) if not _is_basis_multiple(hist.re[n], hist.im[n], barr)]
    return CycleReport(ontological=not sup, first_superposition_index=sup[0] if sup else None,
                       steps_scanned=len(hist), superposition_indices=sup)


def detect_cycle(psi0: GaussVector, psi1: GaussVector, H, max_steps: int,
                 basis: Sequence[GaussVector] | None = None) -> CycleReport:
    """Smallest k <= max_steps with (psi_k, psi_{k+1}) = +-(psi_0, psi_1), streaming two slices.

    Slices psi_0 .. psi_{k+1} are also classified against ``basis`` (standard basis
    by default), so ``ontological`` covers one full period when one is found.
    """
    H = as_hamiltonian(H)
    d = H.dim
    basis = [GaussVector.basis(d, a) for a in range(d)] if basis is None else basis
    barr = _basis_arrays(basis) if d else []
    zero = psi0.is_zero() and psi1.is_zero()
    r0, i0, r1, i1 = psi0.re, psi0.im, psi1.re, psi1.im
    nr0, ni0, nr1, ni1 = -r0, -i0, -r1, -i1
    pr, pi, cr, ci = r0, i0, r1, i1
    rep = CycleReport()
    sup = [n for n, (a, b) in enumerate(((r0, i0), (r1, i1))) if d and not _is_basis_multiple(a, b, barr)]
    Hr, Hi = H.H.re, H.H.im
    for k in range(1, max_steps + 1):
        pr, pi, (cr, ci) = cr, ci, _step(pr, pi, cr, ci, Hr, Hi)
        # now (pr, ci..) hold (psi_k, psi_{k+1})
        if d and not _is_basis_multiple(cr, ci, barr):
            sup.append(k + 1)
        same = (pr == r0).all() and (pi == i0).all() and (cr == r1).all() and (ci == i1).all()
        if rep.antiperiod is None and not zero:
            if (pr == nr0).all() and (pi == ni0).all() and (cr == nr1).all() and (ci == ni1).all():
                rep.antiperiod = k
        if same:
            rep.period = k
            break
    rep.steps_scanned = k if max_steps >= 1 else 0
    rep.ontological = not sup
    rep.first_superposition_index = sup[0] if sup else None
    rep.superposition_indices = sup
    return rep


def growth_rate(H) -> float:
    """Asymptotic log growth per step: max over eigenvalues of arccosh(|lambda|/2), 0 if admissible."""
    vals = spectrum(H).eigenvalues
    over = np.abs(vals[np.abs(vals) > 2]) / 2
    return float(np.max(np.arccosh(over))) if over.size else 0.0


def bound_constant(psi0, psi1, H) -> float:
    """sup_n ||psi_n|| <= (||a|| + ||b||) / min |cos phi| for strictly admissible H (eigenbasis coords)."""
    spec = spectrum(H)
    V = spec.eigenvectors
    a = np.abs(V.conj().T @ _as_complex(psi0))
    b = np.abs(V.conj().T @ _as_complex(psi1))
    return float(np.linalg.norm((a + b) / np.abs(np.cos(spec.phases))))


def exact_norm_log(re_row, im_row) -> float:
    """log ||psi|| for a slice with arbitrarily large integer entries."""
    s = int(sum(int(a) * int(a) + int(b) * int(b) for a, b in zip(re_row, im_row)))
    return 0.5 * math.log(s) if s else float("-inf")


def evolve_and_scan(psi0: GaussVector, psi1: GaussVector, H, N: int,
                    basis: Sequence[GaussVector] | None = None) -> CycleReport:
    hist = evolve(psi0, psi1, H, N)
    d = hist.dim
    basis = [GaussVector.basis(d, a) for a in range(d)] if basis is None else basis
    return ontology_scan(hist, basis)

