"""File formats: JSON-lines histories, JSON tensors, CSV / JSONL tables.

Gaussian integers are always written as "a+bi" strings so files round-trip exactly.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .ca_engine import CAHistory
from .exact_core import GaussMatrix, as_hamiltonian, format_gauss, parse_gauss, GaussianInt
from .multipartite import MultiHistory


def gauss_strings(re, im) -> list[str]:
    return [format_gauss(GaussianInt(int(a), int(b))) for a, b in zip(re, im)]


def parse_strings(entries: Sequence) -> tuple[list[int], list[int]]:
    zs = [parse_gauss(e) if isinstance(e, str) else GaussianInt.coerce(e) for e in entries]
    return [z.re for z in zs], [z.im for z in zs]


def matrix_from_json(rows) -> GaussMatrix:
    return GaussMatrix.of([[parse_gauss(e) if isinstance(e, str) else e for e in row] for row in rows])


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, no whitespace variance."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


# ---------------------------------------------------------------------------
# histories


def history_lines(hist: CAHistory) -> Iterable[str]:
    yield dumps({"dim": hist.dim, "l": hist.l, "H": hist.H.H.to_strings(), "solution": hist.solution,
                 "N": hist.N})
    for n in range(len(hist)):
        yield dumps({"n": n, "psi": gauss_strings(hist.re[n], hist.im[n])})


def write_history(hist: CAHistory, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in history_lines(hist):
            fh.write(line + "\n")


def read_history(path) -> CAHistory:
    with open(path, encoding="utf-8") as fh:
        lines = [json.loads(s) for s in fh if s.strip()]
    if not lines or "dim" not in lines[0]:
        raise ValueError("history file lacks a header line")
    head, body = lines[0], lines[1:]
    H = as_hamiltonian(matrix_from_json(head["H"]))
    body.sort(key=lambda r: r["n"])
    if [r["n"] for r in body] != list(range(len(body))):
        raise ValueError("history slices must be numbered 0..N without gaps")
    re, im = zip(*(parse_strings(r["psi"]) for r in body)) if body else ((), ())
    re = np.array(re, dtype=object).reshape(len(body), head["dim"])
    im = np.array(im, dtype=object).reshape(len(body), head["dim"])
    return CAHistory(re, im, H, float(head.get("l", 1.0)), bool(head.get("solution", False)))


# ---------------------------------------------------------------------------
# tensors


def tensor_to_json(P: MultiHistory) -> dict:
    return {
        "m": P.m,
        "dims": list(P.dims),
        "clocks": list(P.clocks),
        "l": P.l,
        "H": [h.H.to_strings() for h in P.hams],
        "interaction": None if P.interaction is None else P.interaction.to_strings(),
        "entries": gauss_strings(P.re.reshape(-1), P.im.reshape(-1)),
    }


def tensor_from_json(obj: dict) -> MultiHistory:
    shape = tuple(obj["clocks"]) + tuple(obj["dims"])
    if len(obj["dims"]) != obj["m"] or len(obj["clocks"]) != obj["m"]:
        raise ValueError("tensor header inconsistent with m")
    re, im = parse_strings(obj["entries"])
    if len(re) != int(np.prod(shape)):
        raise ValueError("entry count does not match clocks x dims")
    hams = tuple(as_hamiltonian(matrix_from_json(h)) for h in obj["H"])
    inter = None if obj.get("interaction") is None else matrix_from_json(obj["interaction"])
    return MultiHistory(np.array(re, dtype=object).reshape(shape), np.array(im, dtype=object).reshape(shape),
                        hams, inter, None, float(obj.get("l", 1.0)))


def write_tensor(P: MultiHistory, path) -> None:
    Path(path).write_text(dumps(tensor_to_json(P)) + "\n", encoding="utf-8")


def read_tensor(path) -> MultiHistory:
    return tensor_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


# ---------------------------------------------------------------------------
# tables


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def table_text(rows: Sequence[dict], fmt: str = "csv") -> str:
    """Render rows (dicts with identical keys in order) as CSV or JSON lines."""
    if fmt == "jsonl":
        return "".join(dumps(r) + "\n" for r in rows)
    if fmt != "csv":
        raise ValueError(f"unknown table format {fmt!r}")
    buf = io.StringIO()
    if rows:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(rows[0]))
        for r in rows:
            w.writerow([_cell(v) for v in r.values()])
    return buf.getvalue()


def write_table(rows: Sequence[dict], path, fmt: str = "csv") -> None:
    Path(path).write_text(table_text(rows, fmt), encoding="utf-8")


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
