"""Config-driven command line driver.

    hamca [command] --config run.json [--seed S] [--out DIR] [--jobs N] [--format csv|jsonl]

Each run writes its artifacts plus ``manifest.json`` (config hash, versions, output
checksums) into the output directory. Errors are reported as one JSON record on
stderr (and ``error.json`` when the output directory is known).
Exit codes: 0 ok, 1 internal error, 2 config error, 3 precondition error, 4 acceptance failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import platform
import sys
import warnings
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Callable

import numpy as np
import scipy

from . import __version__
from . import acceptance
from . import ca_engine as ca
from . import multipartite as mp
from . import spectral as sp
from .conservation import verify_theorem_A
from .continuum_bridge import (
    ContinuumSignal,
    EdgeGuardError,
    InadmissibleError,
    StationaryState,
    continuum_Q,
    dispersion,
    modified_schrodinger_residual,
    stationary_signal,
)
from .exact_core import DimensionError, GaussMatrix, GaussVector, NotSelfAdjointError, as_hamiltonian, polynomial
from .io import dumps, history_lines, matrix_from_json, parse_strings, read_history, sha256_file, table_text, tensor_to_json
from .random_models import make_rng, random_admissible, random_gauss_vector
from .uncertainty import LatticeState, StateError, min_deltaX_search, random_states, uncertainty_report

COMMANDS = ("evolve", "conserve", "closed-form", "cycle", "reconstruct", "dispersion", "multi", "uncertainty", "suite")
EXIT_OK, EXIT_INTERNAL, EXIT_CONFIG, EXIT_PRECONDITION, EXIT_ACCEPTANCE = 0, 1, 2, 3, 4


class ConfigError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


PRECONDITION_ERRORS = (PreconditionError, InadmissibleError, EdgeGuardError, StateError,
                       sp.SingularClosedFormError, ca.WindowError, mp.BoundaryError)


@dataclass
class RunConfig:
    command: str
    params: dict
    seed: int = 0
    out: Path = Path("out")
    fmt: str = "csv"
    jobs: int = 1
    l: float = 1.0
    config_bytes: bytes = b""
    base: Path = field(default=Path("."))

    def get(self, key, default=None):
        return self.params.get(key, default)

    def path(self, key) -> Path:
        p = Path(self.params[key])
        p = p if p.is_absolute() else self.base / p
        if not p.exists():
            raise ConfigError(f"{key}: file {p} does not exist")
        return p


# ---------------------------------------------------------------------------
# config parsing


def load_config(args: argparse.Namespace) -> RunConfig:
    raw: dict = {}
    data = b""
    base = Path(".")
    if args.config:
        cp = Path(args.config)
        if not cp.exists():
            raise ConfigError(f"config file {cp} does not exist")
        data = cp.read_bytes()
        try:
            raw = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        base = cp.parent
    command = args.command or raw.get("command")
    if not command:
        raise ConfigError("no command given (positional argument or config key 'command')")
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    output = raw.get("output", {}) or {}
    seed = args.seed if args.seed is not None else raw.get("seed", 0)
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    fmt = args.format or output.get("format", "csv")
    if fmt not in ("csv", "jsonl"):
        raise ConfigError("format must be csv or jsonl")
    out = Path(args.out or output.get("path", "out"))
    l = raw.get("l", 1.0)
    if not isinstance(l, (int, float)) or not l > 0:
        raise ConfigError("l must be a positive number")
    jobs = args.jobs if args.jobs is not None else raw.get("jobs", 1)
    if not isinstance(jobs, int) or jobs < 1:
        raise ConfigError("jobs must be a positive integer")
    return RunConfig(command, raw, seed, out, fmt, jobs, float(l), data, base)


def _matrix(cfg: RunConfig, key: str) -> GaussMatrix:
    if f"{key}_file" in cfg.params:
        obj = json.loads(cfg.path(f"{key}_file").read_text(encoding="utf-8"))
    else:
        obj = cfg.params[key]
    try:
        return matrix_from_json(obj)
    except (ValueError, TypeError, DimensionError) as exc:
        raise ConfigError(f"{key}: {exc}") from None


def _vector(obj, key: str) -> GaussVector:
    try:
        re, im = parse_strings(obj)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{key}: {exc}") from None
    return GaussVector(re, im)


def _hamiltonian(cfg: RunConfig, key: str = "H"):
    if key not in cfg.params and f"{key}_file" not in cfg.params:
        rnd = cfg.get("random")
        if rnd is None:
            raise ConfigError(f"config needs '{key}', '{key}_file' or a 'random' block")
        rng = make_rng(cfg.seed, 0)
        return random_admissible(rng, int(rnd.get("dim", 2)), strict=bool(rnd.get("strict", True))), rng
    try:
        return as_hamiltonian(_matrix(cfg, key)), None
    except NotSelfAdjointError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def _history(cfg: RunConfig, default_N: int = 24) -> ca.CAHistory:
    if "history_file" in cfg.params:
        try:
            return read_history(cfg.path("history_file"))
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"history_file: {exc}") from None
    H, rng = _hamiltonian(cfg)
    if rng is not None and "psi0" not in cfg.params:
        bound = int(cfg.get("random", {}).get("bound", 3))
        psi0, psi1 = random_gauss_vector(rng, H.dim, bound), random_gauss_vector(rng, H.dim, bound)
    else:
        if "psi0" not in cfg.params or "psi1" not in cfg.params:
            raise ConfigError("config needs 'psi0' and 'psi1' (or 'history_file')")
        psi0, psi1 = _vector(cfg.params["psi0"], "psi0"), _vector(cfg.params["psi1"], "psi1")
    N = cfg.get("N", default_N)
    if not isinstance(N, int) or N < 1:
        raise ConfigError("N must be a positive integer")
    try:
        return ca.evolve(psi0, psi1, H, N, cfg.l)
    except DimensionError as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# commands: each returns (summary dict, {file name: text})


Outputs = dict[str, str]


def _ext(cfg: RunConfig) -> str:
    return "csv" if cfg.fmt == "csv" else "jsonl"


def cmd_evolve(cfg: RunConfig):
    hist = _history(cfg)
    rows = [{"n": n, "component": a, "re": int(hist.re[n, a]), "im": int(hist.im[n, a])}
            for n in range(len(hist)) for a in range(hist.dim)]
    files = {"history.jsonl": "".join(s + "\n" for s in history_lines(hist)),
             f"states.{_ext(cfg)}": table_text(rows, cfg.fmt)}
    return {"N": hist.N, "dim": hist.dim, "action": str(ca.action_eval(hist).value)}, files


def _g_list(cfg: RunConfig, H) -> list[tuple[str, GaussMatrix]]:
    out = []
    for k, coeffs in enumerate(cfg.get("G_poly", [[1], [0, 1]])):
        out.append((f"poly{k}", polynomial(H.H, [int(c) for c in coeffs])))
    for k, G in enumerate(cfg.get("G", [])):
        try:
            out.append((f"G{k}", matrix_from_json(G)))
        except ValueError as exc:
            raise ConfigError(f"G[{k}]: {exc}") from None
    return out


def cmd_conserve(cfg: RunConfig):
    hist = _history(cfg)
    rows, summary = [], {}
    for name, G in _g_list(cfg, hist.H):
        if G.dim != hist.dim:
            raise ConfigError(f"{name} has the wrong dimension")
        rep = verify_theorem_A(hist, G)
        for n, qr, qi, still in rep.series.rows():
            rows.append({"G": name, "n": n, "re_q": qr, "im_q": qi, "constant_so_far": still})
        summary[name] = {"commutes": rep.commutes, "constant": rep.constant, "first_violation": rep.first_violation,
                         "value": str(rep.series.values[0])}
    return summary, {f"conserve.{_ext(cfg)}": table_text(rows, cfg.fmt)}


def cmd_closed_form(cfg: RunConfig):
    hist = _history(cfg)
    spec = sp.spectrum(hist.H)
    if not spec.admissible:
        raise PreconditionError("closed form needs an admissible H (all eigenvalues in [-2, 2])")
    if spec.boundary:
        raise PreconditionError("closed form is singular: H has eigenvalue +-2")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        cf = sp.closed_form_states(hist[0], hist[1], hist.H, range(hist.N + 1), spec)
    it = hist.to_complex()
    rows = []
    for n in range(hist.N + 1):
        dev = float(np.linalg.norm(cf[n] - it[n]) / max(1.0, np.linalg.norm(it[n])))
        for a in range(hist.dim):
            rows.append({"n": n, "component": a, "re": float(cf[n, a].real), "im": float(cf[n, a].imag),
                         "iter_re": int(hist.re[n, a]), "iter_im": int(hist.im[n, a]), "rel_dev": dev})
    eig = [{"index": k, "eigenvalue": float(v), "phase": float(p.real)}
           for k, (v, p) in enumerate(zip(spec.eigenvalues, spec.phases))]
    worst = max(r["rel_dev"] for r in rows)
    files = {f"closed_form.{_ext(cfg)}": table_text(rows, cfg.fmt),
             f"eigenvalues.{_ext(cfg)}": table_text(eig, cfg.fmt),
             "spectrum.json": dumps(spec.to_json()) + "\n"}
    return {"max_relative_deviation": worst, "eigenvalues": [float(v) for v in spec.eigenvalues]}, files


def cmd_cycle(cfg: RunConfig):
    H, rng = _hamiltonian(cfg)
    if "psi0" in cfg.params:
        psi0, psi1 = _vector(cfg.params["psi0"], "psi0"), _vector(cfg.params["psi1"], "psi1")
    elif rng is not None:
        psi0, psi1 = random_gauss_vector(rng, H.dim), random_gauss_vector(rng, H.dim)
    else:
        raise ConfigError("cycle needs 'psi0' and 'psi1'")
    basis = None
    if "basis" in cfg.params:
        basis = [_vector(b, "basis") for b in cfg.params["basis"]]
    max_steps = cfg.get("max_steps", 1000)
    if not isinstance(max_steps, int) or max_steps < 0:
        raise ConfigError("max_steps must be a nonnegative integer")
    try:
        rep = sp.detect_cycle(psi0, psi1, H, max_steps, basis)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = rep.to_json()
    return out, {"cycle.json": dumps(out) + "\n"}


def _t_grid(cfg: RunConfig, sig: ContinuumSignal) -> list[float]:
    if "ts" in cfg.params:
        return [float(t) for t in cfg.params["ts"]]
    lo, hi = sig.guarded_range
    g = cfg.get("t_grid", {})
    lo = float(g.get("start", lo + sig.l))
    hi = float(g.get("stop", hi - sig.l))
    count = int(g.get("count", 41))
    return [float(t) for t in np.linspace(lo, hi, count)]


def cmd_reconstruct(cfg: RunConfig):
    guard = float(cfg.get("guard", 0.25))
    st = cfg.get("stationary")
    if st is not None:
        K = int(st.get("K", 257))
        try:
            state = StationaryState.from_eigenpair(float(st["eigenvalue"]), [complex(v) for v in st.get("vector", [1])],
                                                   cfg.l)
        except KeyError:
            raise ConfigError("stationary block needs 'eigenvalue'") from None
        sig = stationary_signal(state, K, cfg.l, int(st.get("offset", -(K // 2))), guard=guard)
    else:
        hist = _history(cfg, 64)
        win = cfg.get("window")
        sig = ContinuumSignal.from_history(hist, guard, tuple(win) if win else None)
    rows = []
    for t in _t_grid(cfg, sig):
        v = sig.value(t)
        res = float(np.linalg.norm(modified_schrodinger_residual(sig, t)))
        row = {"t": t}
        for a, z in enumerate(v):
            row[f"re_{a}"] = float(z.real)
            row[f"im_{a}"] = float(z.imag)
        row["residual_norm"] = res
        row["Q"] = continuum_Q(sig, t)
        row["error_estimate"] = sig.error_estimate(t)
        rows.append(row)
    summary = {"K": sig.K, "guarded_range": list(sig.guarded_range),
               "max_residual": max(r["residual_norm"] for r in rows) if rows else None}
    return summary, {f"reconstruct.{_ext(cfg)}": table_text(rows, cfg.fmt)}


def cmd_dispersion(cfg: RunConfig):
    g = cfg.get("grid", {})
    start, stop, step = float(g.get("start", -2.0)), float(g.get("stop", 2.0)), float(g.get("step", 0.25))
    if step <= 0 or stop < start:
        raise ConfigError("dispersion grid needs step > 0 and stop >= start")
    count = int(round((stop - start) / step)) + 1
    xs = [start + k * step for k in range(count)]
    rows = [{"l_eps": x, "l_E": dispersion(x)} for x in xs]  # |x| > 2 raises a precondition error
    return {"points": len(rows), "endpoints": [rows[0]["l_E"], rows[-1]["l_E"]]}, \
        {f"dispersion.{_ext(cfg)}": table_text(rows, cfg.fmt)}


def cmd_multi(cfg: RunConfig):
    subs = cfg.get("subsystems")
    if not subs or not isinstance(subs, list):
        raise ConfigError("multi needs a nonempty 'subsystems' list")
    hists = []
    for k, s in enumerate(subs):
        sub = RunConfig("evolve", s, cfg.seed, cfg.out, cfg.fmt, 1, cfg.l, b"", cfg.base)
        hists.append(_history(sub, 6))
    P = mp.build_product(hists)
    inter = cfg.get("interaction")
    if inter is not None:
        try:
            P = mp.with_interaction(P, matrix_from_json(inter))
        except (ValueError, DimensionError) as exc:
            raise ConfigError(f"interaction: {exc}") from None
    rr, ri = mp.residual_map(P)
    rows = []
    for idx in np.ndindex(rr.shape):
        clock = [n + 1 for n in idx[:P.m]]
        rows.append({"site": ",".join(str(v) for v in clock + list(idx[P.m:])),
                     "re": int(rr[idx]), "im": int(ri[idx])})
    summary = {"m": P.m, "dims": list(P.dims), "clocks": list(P.clocks),
               "residual_zero": not (rr.any() or ri.any()), "action": str(mp.multi_action_eval(P).value)}
    if "G" in cfg.params:
        Gs = [matrix_from_json(G) for G in cfg.params["G"]]
        rep = mp.correlation_check(P, Gs)
        summary["correlation"] = {"applicable": rep.applicable, "factorizes": rep.factorizes,
                                  "connected_nonzero": rep.connected_nonzero, "note": rep.note}
    files = {"tensor.json": dumps(tensor_to_json(P)) + "\n", f"residual.{_ext(cfg)}": table_text(rows, cfg.fmt)}
    return summary, files


def cmd_uncertainty(cfg: RunConfig):
    R = int(cfg.get("R", 12))
    rows = []
    for j, st in enumerate(random_states(cfg.seed, int(cfg.get("random_states", 100)), R, cfg.l)):
        rows.append(uncertainty_report(st).row(f"random{j}"))
    for j, g in enumerate(cfg.get("gaussians", [])):
        sig = float(g["sigma"])
        st = LatticeState.gaussian(int(g.get("R", max(R, math.ceil(12 * sig / cfg.l)))), sig, cfg.l, float(g.get("k", 0)))
        rows.append(uncertainty_report(st).row(f"gaussian{j}"))
    search = cfg.get("search", {})
    res = {}
    for b in search.get("bounds", ["paper", "scaled", "shift"]):
        try:
            res[b] = min_deltaX_search(cfg.l, int(search.get("R", 8)), search.get("family", [2, 3, 4]), b,
                                       float(search.get("tolerance", 1e-6))).to_json()
        except ValueError as exc:
            raise ConfigError(f"search: {exc}") from None
    summary = {"states": len(rows), "robertson_all": all(r["satisfied_robertson"] for r in rows),
               "min_deltaX": {b: {k: v for k, v in r.items() if k != "amplitudes"} for b, r in res.items()}}
    return summary, {f"uncertainty.{_ext(cfg)}": table_text(rows, cfg.fmt), "min_deltaX.json": dumps(res) + "\n"}


def suite_config(cfg: RunConfig) -> acceptance.SuiteConfig:
    block = dict(cfg.get("suite", {}))
    names = {f.name for f in fields(acceptance.SuiteConfig)}
    bad = set(block) - names
    if bad:
        raise ConfigError(f"unknown suite keys: {sorted(bad)}")
    block["seed"] = cfg.seed
    if "windows" in block:
        block["windows"] = tuple(block["windows"])
    if block.get("only") is not None:
        block["only"] = tuple(block["only"])
    return acceptance.SuiteConfig(**block)


def cmd_suite(cfg: RunConfig):
    sc = suite_config(cfg)
    res = acceptance.run_suite(sc, cfg.jobs)
    for r in res.results:
        print(r.line())
    verdict = res.verdict()
    files = {"verdict.json": dumps(verdict) + "\n"}
    # timings vary run to run; kept out of the deterministic verdict
    timing = {"timings.json": dumps(res.timings()) + "\n"}
    return verdict, files, timing


HANDLERS: dict[str, Callable] = {
    "evolve": cmd_evolve, "conserve": cmd_conserve, "closed-form": cmd_closed_form, "cycle": cmd_cycle,
    "reconstruct": cmd_reconstruct, "dispersion": cmd_dispersion, "multi": cmd_multi,
    "uncertainty": cmd_uncertainty, "suite": cmd_suite,
}


# ---------------------------------------------------------------------------
# driver


def _versions() -> dict:
    return {"hamca": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__}


def write_outputs(cfg: RunConfig, files: Outputs, volatile: Outputs | None = None) -> dict:
    cfg.out.mkdir(parents=True, exist_ok=True)
    sums = {}
    for name in sorted(files):
        p = cfg.out / name
        p.write_text(files[name], encoding="utf-8", newline="\n")
        sums[name] = sha256_file(p)
    for name in sorted(volatile or {}):
        (cfg.out / name).write_text(volatile[name], encoding="utf-8", newline="\n")
    manifest = {
        "command": cfg.command,
        "seed": cfg.seed,
        "format": cfg.fmt,
        "config_sha256": hashlib.sha256(cfg.config_bytes).hexdigest(),
        "versions": _versions(),
        "outputs": sums,
        "unchecksummed": sorted(volatile or {}),
    }
    (cfg.out / "manifest.json").write_text(dumps(manifest) + "\n", encoding="utf-8", newline="\n")
    return manifest


def error_record(kind: str, exc: BaseException, code: int, command: str | None) -> dict:
    return {"error": kind, "type": type(exc).__name__, "message": str(exc), "exit_code": code, "command": command}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hamca", description="Integer Hamiltonian cellular automata toolkit.")
    p.add_argument("command", nargs="?", choices=COMMANDS, help="pipeline to run (overrides config 'command')")
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--seed", type=int, help="64-bit seed (overrides config)")
    p.add_argument("--out", help="output directory (overrides config output.path)")
    p.add_argument("--jobs", type=int, help="worker processes for the suite")
    p.add_argument("--format", choices=("csv", "jsonl"), help="table format")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    out_dir = None
    command = None
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            if exc.code in (0, None):
                return EXIT_OK
            raise ConfigError("invalid command line arguments") from None
        out_dir = args.out
        command = args.command
        cfg = load_config(args)
        out_dir, command = cfg.out, cfg.command
        result = HANDLERS[cfg.command](cfg)
        summary, files = result[0], result[1]
        volatile = result[2] if len(result) > 2 else None
        write_outputs(cfg, files, volatile)
        print(dumps(summary))
        if cfg.command == "suite" and summary["overall"] != acceptance.PASS:
            return EXIT_ACCEPTANCE
        return EXIT_OK
    except ConfigError as exc:
        rec = error_record("config", exc, EXIT_CONFIG, command)
    except (NotSelfAdjointError, DimensionError) as exc:
        rec = error_record("config", exc, EXIT_CONFIG, command)
    except PRECONDITION_ERRORS as exc:
        rec = error_record("precondition", exc, EXIT_PRECONDITION, command)
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        rec = error_record("config", exc, EXIT_CONFIG, command)
    except Exception as exc:  # still a machine-readable record
        rec = error_record("internal", exc, EXIT_INTERNAL, command)
    print(dumps(rec), file=sys.stderr)
    if out_dir is not None:
        try:
            Path(out_dir).mkdir(parents=True, exist_ok=True)
            (Path(out_dir) / "error.json").write_text(dumps(rec) + "\n", encoding="utf-8")
        except OSError:
            pass
    return rec["exit_code"]


if __name__ == "__main__":
    raise SystemExit(main())
