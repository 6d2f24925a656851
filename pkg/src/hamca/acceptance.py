"""Acceptance battery: ten criteria, each with a time budget and a pass/fail/skipped status.

Every criterion draws its randomness from ``make_rng(seed, criterion, trial)``, so a
criterion's verdict does not depend on which other criteria ran or in what order.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import ca_engine as ca
from . import multipartite as mp
from . import spectral as sp
from .conservation import q_series, q_symmetrized
from .continuum_bridge import (
    ContinuumSignal,
    StationaryState,
    continuum_Q,
    continuum_Q_error,
    discrete_residual,
    dispersion,
    modified_schrodinger_residual,
    stationary_history,
    stationary_signal,
)
from .exact_core import GaussianInt, GaussMatrix, GaussVector, polynomial
from .random_models import make_rng, random_admissible, random_gauss_vector
from .uncertainty import (
    LatticeState,
    ROBERTSON_SLACK,
    min_deltaX_search,
    random_states,
    uncertainty_report,
)

PASS, FAIL, SKIP = "pass", "fail", "skipped"

# the Pauli run written out slice by slice: psi_0 .. psi_7
PAULI_EXPECTED = [
    ["1", "0"], ["0", "1"], ["1-i", "0"], ["0", "-i"],
    ["-i", "0"], ["0", "-1-i"], ["-1", "0"], ["0", "-1"],
]


@dataclass
class SuiteConfig:
    seed: int = 0
    max_steps: int | None = None  # evolution-step cap; criteria needing more are skipped
    pauli: dict = field(default_factory=lambda: {"H": [["0", "1"], ["1", "0"]], "psi0": ["1", "0"], "psi1": ["0", "1"]})
    action_hamiltonians: int = 100
    stationarity_trials: int = 100
    theorem_hamiltonians: int = 50
    theorem_steps: int = 10_000
    closed_form_hamiltonians: int = 100
    closed_form_steps: int = 1000
    closed_form_max_dim: int = 16
    windows: tuple[int, ...] = (256, 512, 1024, 2048, 4096)
    multi_pairs: int = 50
    robertson_states: int = 1000
    linearity_trials: int = 100
    only: tuple[int, ...] | None = None


@dataclass
class CriterionResult:
    id: int
    name: str
    status: str
    budget_s: float
    seconds: float = 0.0
    cpu_seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        return (f"criterion {self.id:2d} [{self.status.upper():7s}] {self.name} "
                f"({self.cpu_seconds:.2f}s cpu / {self.budget_s:g}s budget)")

    def verdict(self) -> dict:
        # timing-free view, byte-stable across runs
        return {"id": self.id, "name": self.name, "status": self.status, "detail": self.detail}


class Skip(Exception):
    pass


def _need(cfg: SuiteConfig, steps: int):
    if cfg.max_steps is not None and steps > cfg.max_steps:
        raise Skip(f"needs {steps} evolution steps, cap is {cfg.max_steps}")


def _gv(entries) -> GaussVector:
    return GaussVector.of(entries)


def _random_solution(seed: int, crit: int, j: int, dims=(1, 8), N: int = 20, strict: bool = True):
    r = make_rng(seed, crit, j)
    d = int(r.integers(dims[0], dims[1] + 1))
    H = random_admissible(r, d, strict=strict)
    return ca.evolve(random_gauss_vector(r, d), random_gauss_vector(r, d), H, N), r


# ---------------------------------------------------------------------------
# criteria


def c1_pauli(cfg: SuiteConfig) -> dict:
    _need(cfg, 24)
    from .io import matrix_from_json

    H = matrix_from_json(cfg.pauli["H"])
    hist = ca.evolve(_gv(cfg.pauli["psi0"]), _gv(cfg.pauli["psi1"]), H, 12)
    mismatch = [n for n in range(8) if hist[n] != _gv(PAULI_EXPECTED[n])]
    cyc = sp.detect_cycle(hist[0], hist[1], H, 24)
    scan = sp.ontology_scan(hist, [GaussVector.basis(2, 0), GaussVector.basis(2, 1)])
    ok = not mismatch and cyc.antiperiod == 6 and cyc.period == 12 and scan.ontological and cyc.ontological
    return {"ok": ok, "sequence_mismatch_at": mismatch, "antiperiod": cyc.antiperiod, "period": cyc.period,
            "ontological": bool(scan.ontological)}


def c2_action(cfg: SuiteConfig) -> dict:
    N = 20
    _need(cfg, N)
    bad = []
    for j in range(cfg.action_hamiltonians):
        hist, r = _random_solution(cfg.seed, 2, j, N=N)
        full = ca.action_eval(hist)
        lo = int(r.integers(1, N - 1))
        hi = int(r.integers(lo, N))
        part = ca.action_eval(hist, (lo, hi))
        if full.value or part.value or any(full.per_step):
            bad.append(j)
    return {"ok": not bad, "hamiltonians": cfg.action_hamiltonians, "nonzero_cases": bad}


def c3_stationarity(cfg: SuiteConfig) -> dict:
    N = 20
    _need(cfg, N)
    not_stationary, undetected = [], []
    for j in range(cfg.stationarity_trials):
        hist, r = _random_solution(cfg.seed, 3, j, N=N)
        if not ca.stationarity_check(hist, rng_seed=j).stationary:
            not_stationary.append(j)
        n = int(r.integers(2, N - 1))
        delta = GaussVector.zeros(hist.dim)
        while delta.is_zero():
            delta = random_gauss_vector(r, hist.dim, 2)
        bad = hist.with_slice(n, hist[n] + delta)
        rep = ca.stationarity_check(bad, rng_seed=j)
        if not any(abs(m - n) == 1 for m, _ in rep.violations):
            undetected.append(j)
    return {"ok": not not_stationary and not undetected, "trials": cfg.stationarity_trials,
            "solutions_not_stationary": not_stationary, "corruptions_undetected": undetected}


def c4_theorem_a(cfg: SuiteConfig) -> dict:
    N = cfg.theorem_steps
    _need(cfg, N)
    drifted = []
    for j in range(cfg.theorem_hamiltonians):
        hist, _ = _random_solution(cfg.seed, 4, j, dims=(1, 6), N=N)
        H = hist.H.H
        for g, G in enumerate((GaussMatrix.identity(hist.dim), H, polynomial(H, [3, 2, 1]))):
            q = q_series(hist, G)
            if any(v != q[0] for v in q):
                drifted.append((j, g))
    # sigma_y anticommutes with sigma_x: q must change along the Pauli run
    p0, p1, X = ca.pauli_example()
    Y = GaussMatrix.of([[0, GaussianInt(0, -1)], [GaussianInt(0, 1), 0]])
    q = q_series(ca.evolve(p0, p1, X, 24), Y)
    drift = any(v != q[0] for v in q)
    return {"ok": not drifted and drift, "hamiltonians": cfg.theorem_hamiltonians, "steps": N,
            "non_constant": drifted, "noncommuting_drift_observed": drift}


def c5_closed_form(cfg: SuiteConfig) -> dict:
    N = cfg.closed_form_steps
    _need(cfg, N)
    worst = 0.0
    comp_fail = []
    for j in range(cfg.closed_form_hamiltonians):
        hist, r = _random_solution(cfg.seed, 5, j, dims=(1, cfg.closed_form_max_dim), N=N)
        cf = sp.closed_form_states(hist[0], hist[1], hist.H, range(N + 1))
        it = hist.to_complex()
        scale = np.maximum(np.linalg.norm(it, axis=1), 1.0)
        worst = max(worst, float(np.max(np.linalg.norm(cf - it, axis=1) / scale)))
        m = int(r.integers(0, 40))
        n = int(r.integers(m + 1, 60))
        if not sp.composition_check(hist, m, n, exact=True).holds:
            comp_fail.append(j)
    return {"ok": worst <= 1e-9 and not comp_fail, "max_relative_deviation": float(f"{worst:.3e}"),
            "composition_failures": comp_fail}


def c6_dispersion(cfg: SuiteConfig) -> dict:
    grid = np.linspace(-2, 2, 257)
    err = max(abs(2 * math.sin(dispersion(x)) - x) for x in grid)
    edges = (dispersion(2.0), dispersion(-2.0))
    edge_ok = edges == (math.pi / 2, -math.pi / 2)
    worst = 0.0
    for j in range(20):
        r = make_rng(cfg.seed, 6, j)
        d = int(r.integers(1, 9))
        H = random_admissible(r, d, strict=False)
        spec = sp.spectrum(H)
        Hc = H.to_complex()
        for lam, v in zip(spec.eigenvalues, spec.eigenvectors.T):
            lam = float(np.clip(lam, -2, 2))
            s = stationary_history(StationaryState.from_eigenpair(lam, v), 64)
            res = discrete_residual(s, Hc)
            worst = max(worst, float(np.max(np.abs(res))) / float(np.max(np.abs(s))))
    return {"ok": err <= 1e-12 and edge_ok and worst <= 1e-12, "grid_error": float(f"{err:.3e}"),
            "band_edges_exact": edge_ok, "stationary_relative_residual": float(f"{worst:.3e}")}


def c7_sampling(cfg: SuiteConfig) -> dict:
    _need(cfg, 40)
    # exact at sample points on an integer solution history
    hist, _ = _random_solution(cfg.seed, 7, 0, N=40)
    sig = ContinuumSignal.from_history(hist)
    c = hist.to_complex()
    sample_exact = all(np.array_equal(sig.value(float(n)), c[n]) for n in range(10, 31))
    q_match = max(abs(continuum_Q(sig, float(n)) - float(q_symmetrized(hist, n))) for n in range(12, 29))
    # window sweep on lambda = 1 stationary samples, centred window, fixed t
    st = StationaryState.from_eigenpair(1.0, [1.0])
    t = 0.5
    resid, q_dev, q_err = [], [], []
    for K in cfg.windows:
        s = stationary_signal(st, K + 1, offset=-(K // 2))
        resid.append(float(np.linalg.norm(modified_schrodinger_residual(s, t))))
        q_dev.append(abs(continuum_Q(s, t) - math.cos(st.energy)))
        q_err.append(continuum_Q_error(s, t))
    monotone = all(b < a for a, b in zip(resid, resid[1:]))
    within = all(d <= e for d, e in zip(q_dev, q_err))
    q_sample = abs(continuum_Q(stationary_signal(st, 257, offset=-128), 0.0) - math.cos(st.energy))
    ok = sample_exact and q_match <= 1e-9 and monotone and within and q_sample <= 1e-12
    return {"ok": ok, "sample_points_exact": sample_exact, "Q_vs_q_symmetrized": q_match,
            "windows": list(cfg.windows), "midpoint_residuals": [float(f"{x:.6e}") for x in resid],
            "monotone": monotone, "Q_cos_within_estimate": within, "Q_cos_at_sample": float(f"{q_sample:.3e}")}


def c8_multipartite(cfg: SuiteConfig) -> dict:
    _need(cfg, 8)
    leib_bad = []
    for j in range(200):
        r = make_rng(cfg.seed, 8, 0, j)
        A = [int(v) for v in r.integers(-50, 51, size=12)]
        B = [int(v) for v in r.integers(-50, 51, size=12)]
        n = int(r.integers(1, 11))
        if not mp.leibniz_demo(A, B, n).corrected_holds:
            leib_bad.append(j)
    sq = [k * k for k in range(8)]
    witness = mp.leibniz_demo(sq, sq, 3)
    eom_bad, corr_bad = [], []
    for j in range(cfg.multi_pairs):
        r = make_rng(cfg.seed, 8, 1, j)
        dims = [int(v) for v in r.integers(1, 4, size=2)]
        clocks = [int(v) for v in r.integers(3, 9, size=2)]
        Hs = [random_admissible(r, d) for d in dims]

        def product():
            hs = [ca.evolve(random_gauss_vector(r, d), random_gauss_vector(r, d), H, c - 1)
                  for d, H, c in zip(dims, Hs, clocks)]
            return mp.build_product(hs)

        P, Q = product(), product()
        a = GaussianInt(*(int(v) for v in r.integers(-3, 4, size=2)))
        b = GaussianInt(*(int(v) for v in r.integers(-3, 4, size=2)))
        for T in (P, Q, mp.combine(a, P, b, Q)):
            rr, ri = mp.residual_map(T)
            if rr.any() or ri.any():
                eom_bad.append(j)
        Gs = [polynomial(H.H, [int(v) for v in r.integers(-2, 3, size=2)]) for H in Hs]
        if not mp.correlation_check(P, Gs).factorizes:
            corr_bad.append(j)
    ok = not leib_bad and witness.naive_fails and not eom_bad and not corr_bad
    return {"ok": ok, "corrected_rule_failures": leib_bad, "naive_fails_on_witness": witness.naive_fails,
            "eom_nonzero": eom_bad, "correlator_not_factorized": corr_bad, "pairs": cfg.multi_pairs}


def c9_uncertainty(cfg: SuiteConfig) -> dict:
    worst = math.inf
    for st in random_states(cfg.seed, cfg.robertson_states):
        rep = uncertainty_report(st)
        worst = min(worst, rep.product - rep.robertson_rhs)
    rob_ok = worst >= -ROBERTSON_SLACK
    wide = uncertainty_report(LatticeState.gaussian(240, 20.0))
    wide_ok = abs(wide.product - 0.5) <= 0.05 * 0.5
    searches = {b: min_deltaX_search(bound=b).to_json() for b in ("paper", "scaled", "shift")}
    for s in searches.values():
        s.pop("amplitudes")
    reported = all("target" in s and "discrepancy" in s for s in searches.values())
    return {"ok": rob_ok and wide_ok and reported, "robertson_min_slack": float(f"{worst:.3e}"),
            "wide_gaussian_product": wide.product, "min_deltaX": searches}


def c10_linearity(cfg: SuiteConfig) -> dict:
    N = 20
    _need(cfg, N)
    single_bad, multi_bad = [], []
    for j in range(cfg.linearity_trials):
        r = make_rng(cfg.seed, 10, j)
        d = int(r.integers(1, 6))
        H = random_admissible(r, d)
        a = GaussianInt(*(int(v) for v in r.integers(-4, 5, size=2)))
        b = GaussianInt(*(int(v) for v in r.integers(-4, 5, size=2)))
        u0, u1, v0, v1 = (random_gauss_vector(r, d) for _ in range(4))
        hu, hv = ca.evolve(u0, u1, H, N), ca.evolve(v0, v1, H, N)
        hw = ca.evolve(a * u0 + b * v0, a * u1 + b * v1, H, N)
        if not ca.histories_equal(hw, ca.linear_combination(a, hu, b, hv)):
            single_bad.append(j)
        dims = [int(v) for v in r.integers(1, 4, size=2)]
        clocks = [int(v) for v in r.integers(3, 9, size=2)]
        Hs = [random_admissible(r, dd) for dd in dims]
        shape = (2, 2, *dims)
        X = [r.integers(-3, 4, size=shape).astype(object) for _ in range(4)]
        P = mp.evolve_free(X[0], X[1], Hs, clocks)
        Q = mp.evolve_free(X[2], X[3], Hs, clocks)
        Wr = a.re * X[0] - a.im * X[1] + b.re * X[2] - b.im * X[3]
        Wi = a.re * X[1] + a.im * X[0] + b.re * X[3] + b.im * X[2]
        W = mp.evolve_free(Wr, Wi, Hs, clocks)
        C = mp.combine(a, P, b, Q)
        if not ((W.re == C.re).all() and (W.im == C.im).all()):
            multi_bad.append(j)
    return {"ok": not single_bad and not multi_bad, "trials": cfg.linearity_trials,
            "single_failures": single_bad, "multi_failures": multi_bad}


CRITERIA: dict[int, tuple[str, float, Callable[[SuiteConfig], dict]]] = {
    1: ("Pauli ontological run", 1.0, c1_pauli),
    2: ("action vanishes on solutions", 10.0, c2_action),
    3: ("stationarity and corrupt-and-detect", 10.0, c3_stationarity),
    4: ("conserved q_G for commuting G", 60.0, c4_theorem_a),
    5: ("closed form vs iteration, composition law", 60.0, c5_closed_form),
    6: ("dispersion relation", 1.0, c6_dispersion),
    7: ("sampling bridge", 120.0, c7_sampling),
    8: ("multipartite many-time checks", 60.0, c8_multipartite),
    9: ("uncertainty relations", 120.0, c9_uncertainty),
    10: ("superposition / linearity", 10.0, c10_linearity),
}


def run_criterion(cid: int, cfg: SuiteConfig) -> CriterionResult:
    name, budget, fn = CRITERIA[cid]
    t0, c0 = time.perf_counter(), time.process_time()
    try:
        detail = fn(cfg)
        status = PASS if detail.pop("ok") else FAIL
    except Skip as exc:
        detail, status = {"reason": str(exc)}, SKIP
    except Exception as exc:  # a crash is a failure of that criterion, not of the suite
        detail, status = {"error": f"{type(exc).__name__}: {exc}"}, FAIL
    dt, cpu = time.perf_counter() - t0, time.process_time() - c0
    # budgets are charged in process CPU time so parallel workers sharing cores are not penalized
    if status == PASS and cpu >= budget:
        status = FAIL
        detail["reason"] = f"time budget exceeded ({cpu:.2f}s >= {budget:g}s)"
    return CriterionResult(cid, name, status, budget, dt, cpu, detail)


def _run_one(args):
    cid, cfg = args
    return run_criterion(cid, cfg)


@dataclass
class SuiteResult:
    results: list[CriterionResult]

    @property
    def passed(self) -> bool:
        return all(r.status != FAIL for r in self.results)

    @property
    def failed(self) -> list[int]:
        return [r.id for r in self.results if r.status == FAIL]

    def verdict(self) -> dict:
        return {"overall": PASS if self.passed else FAIL, "failed": self.failed,
                "criteria": [r.verdict() for r in self.results]}

    def timings(self) -> dict:
        return {str(r.id): {"wall_s": round(r.seconds, 4), "cpu_s": round(r.cpu_seconds, 4), "budget_s": r.budget_s}
                for r in self.results}


def run_suite(cfg: SuiteConfig | None = None, jobs: int = 1) -> SuiteResult:
    cfg = cfg or SuiteConfig()
    ids = sorted(cfg.only) if cfg.only else sorted(CRITERIA)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_one, [(i, cfg) for i in ids]))
    else:
        results = [run_criterion(i, cfg) for i in ids]
    return SuiteResult(sorted(results, key=lambda r: r.id))


def config_dict(cfg: SuiteConfig) -> dict:
    d = asdict(cfg)
    d["windows"] = list(cfg.windows)
    d["only"] = None if cfg.only is None else list(cfg.only)
    return d
