"""Command-line front end.

Every subcommand is turned into an experiment config (op, map, params, seed,
out, format), validated against :data:`CONFIG_SCHEMA`, and executed by
:func:`run`.  Output is a table written as CSV or JSON.  CSV files start with
a ``#`` comment block (tool version, config hash, seed, wall time) followed by
a deterministic body.

Exit codes: 0 success, 2 a check reported failure, 1 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import jsonschema

from . import __version__, zoo
from .acceptance import CRITERIA, criterion_A13, csv_body
from .birkhoff import banach_density_lower, classify_pair, mean_equicontinuity_modulus, mean_sensitivity_constant
from .chaos import find_scrambled_tuples, independence_set_search, prox_transitivity_test
from .dynamics import MapSystem, load_map, map_from_dict, map_to_dict
from .entropy import horseshoe_search, lap_entropy, markov_entropy_report, sequence_word_count
from .errors import GraphDynError
from .sequences import ArithmeticSequence, Observable, checkpoints, davenport_sum, disjointness_sum, mertens, oscillating_check
from .structure import detect_cycles, diameter_average_check, solenoid_search

OUT_DIR_ENV = "GRAPHDYN_OUT_DIR"

OPS = (
    "mobius", "davenport", "disjoint", "oscillating", "meaneq", "sensitivity", "pair", "banach", "entropy",
    "horseshoe", "seqent", "cycles", "solenoid", "diamcheck", "scrambled", "indep", "proxtrans", "zoo-list",
    "zoo-emit", "zoo-verify", "suite",
)

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["op"],
    "additionalProperties": False,
    "properties": {
        "op": {"enum": list(OPS)},
        "map": {"oneOf": [{"type": "string"}, {"type": "object"}, {"type": "null"}]},
        "params": {"type": "object"},
        "seed": {"type": "integer", "minimum": 0},
        "out": {"type": ["string", "null"]},
        "format": {"enum": ["csv", "json"]},
    },
}


class UsageError(Exception):
    pass


@dataclass
class Table:
    columns: list
    rows: list
    status: int = 0  # 0 ok, 2 a check failed
    extra: dict = field(default_factory=dict)  # structured payload for JSON output


# ---------------------------------------------------------------------------
# Config helpers
# ---------------------------------------------------------------------------


def resolve_map(ref) -> MapSystem:
    """Zoo name (``name`` or ``name:key=value,...``), JSON file path, or inline dict."""
    if ref is None:
        raise UsageError("this operation needs --map")
    if isinstance(ref, dict):
        return map_from_dict(ref)
    if os.path.exists(ref):
        return load_map(ref)
    name, _, rest = ref.partition(":")
    params = {}
    for kv in filter(None, rest.split(",")):
        k, _, v = kv.partition("=")
        params[k] = _parse_value(v)
    return zoo.make(name, **params)


def _parse_value(v: str):
    for cast in (int, float):
        try:
            return cast(v)
        except ValueError:
            pass
    if "/" in v:
        try:
            return Fraction(v)
        except ValueError:
            pass
    return v


def _point(m: MapSystem, v):
    """Command-line point: a number for one-edge systems, else ``edge:offset``."""
    if isinstance(v, (int, float, Fraction)):
        return Fraction(str(v)) if isinstance(v, float) else Fraction(v)
    v = str(v)
    if ":" in v:
        e, _, o = v.partition(":")
        return m.graph.point(e, Fraction(o))
    return Fraction(v)


def config_hash(cfg: dict) -> str:
    canon = json.dumps({k: cfg.get(k) for k in ("op", "map", "params", "seed")}, sort_keys=True, default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def validate_config(cfg: dict) -> dict:
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise UsageError(f"invalid config: {exc.message}") from None
    cfg = dict(cfg)
    cfg.setdefault("params", {})
    cfg.setdefault("seed", 0)
    cfg.setdefault("format", "csv")
    cfg.setdefault("map", None)
    cfg.setdefault("out", None)
    return cfg


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def _trace_rows(tr):
    return [{"N": n, "re": v.real, "im": v.imag, "abs": abs(v)} for n, v in tr]


def op_mobius(cfg, p):
    N = int(p.get("N", 10 ** 6))
    rows = [{"N": n, "re": mertens(n) / n, "im": 0.0, "abs": abs(mertens(n)) / n} for n in checkpoints(N)]
    return Table(["N", "re", "im", "abs"], rows)


def op_davenport(cfg, p):
    _, tr = davenport_sum(float(Fraction(str(p.get("alpha", 0)))), int(p.get("N", 10 ** 6)))
    return Table(["N", "re", "im", "abs"], _trace_rows(tr))


def op_disjoint(cfg, p):
    m = resolve_map(cfg["map"])
    x = float(p.get("x", 0.0))
    _, tr = disjointness_sum(m, x, Observable(p.get("obs", "exp2pii")), ArithmeticSequence.parse(p.get("seq", "mobius")),
                             int(p.get("N", 10 ** 6)))
    return Table(["N", "re", "im", "abs"], _trace_rows(tr))


def op_oscillating(cfg, p):
    grid = int(p.get("grid", 64))
    t = [i / grid for i in range(grid)]
    N_list = [int(n) for n in str(p.get("N", "1000,10000,100000")).split(",")]
    rep = oscillating_check(ArithmeticSequence.parse(p.get("seq", "mobius")), float(p.get("lam", 1.0)), t, N_list)
    rows = [{"kind": "twisted", "t": r["t"], "N": r["N"], "value": r["value"]} for r in rep["rows"]]
    rows += [{"kind": "growth", "t": "", "N": g["N"], "value": g["value"]} for g in rep["growth"]]
    return Table(["kind", "t", "N", "value"], rows,
                 extra={k: rep[k] for k in ("max_over_t", "argmax_t", "growth_bound", "grid_size")})


def _state_str(s):
    import numpy as np

    s = np.atleast_1d(s)
    return " ".join(repr(float(v)) for v in s)


def op_meaneq(cfg, p):
    m = resolve_map(cfg["map"])
    rep = mean_equicontinuity_modulus(m, None, float(p.get("eps", 0.1)), int(p.get("samples", 1000)),
                                      int(p.get("N", 10 ** 4)), cfg["seed"])
    rows = [{"delta": d, "worst_mean": w, "x": _state_str(x), "y": _state_str(y), "accepted": w < rep.eps}
            for d, w, x, y in rep.tested]
    return Table(["delta", "worst_mean", "x", "y", "accepted"], rows, extra={"delta": rep.delta})


def op_sensitivity(cfg, p):
    m = resolve_map(cfg["map"])
    est, (x, y) = mean_sensitivity_constant(m, int(p.get("base", 100)), int(p.get("perturb", 10)),
                                            int(p.get("N", 10 ** 4)), cfg["seed"], float(p.get("radius", 1e-3)))
    return Table(["estimate", "x", "y"], [{"estimate": est, "x": _state_str(x), "y": _state_str(y)}])


def op_pair(cfg, p):
    m = resolve_map(cfg["map"])
    r = classify_pair(m, float(p["x"]), float(p["y"]), int(p.get("N", 10 ** 5)), float(p.get("eps_prox", 0.01)),
                      float(p.get("eps_dist", 0.1)), p.get("L"))
    row = {"x": r.x, "y": r.y, "N": r.N, "mean_distance": r.mean_distance, "liminf_proxy": r.liminf_proxy,
           "limsup_proxy": r.limsup_proxy, "banach_lower": r.banach_lower if r.banach_lower is not None else ""}
    row.update(r.verdicts())
    return Table(list(row), [row])


def op_banach(cfg, p):
    m = resolve_map(cfg["map"])
    v, start = banach_density_lower(m, float(p["x"]), float(p["y"]), float(p.get("eps", 0.05)),
                                    int(p.get("N", 10 ** 5)), int(p.get("L", 1000)))
    return Table(["value", "window_start"], [{"value": v, "window_start": start}])


def op_entropy(cfg, p):
    method = p.get("method", "lap")
    n = int(p.get("n", 20))
    if method == "markov":
        M = _load_matrix(p["matrix"]) if "matrix" in p else None
        if M is None:
            from .dynamics import markov_matrix

            M = markov_matrix(resolve_map(cfg["map"]))
        rep = markov_entropy_report(M)
        rows = [{"n": i + 1, "value": v} for i, v in enumerate(rep.trace)]
        return Table(["n", "value"], rows, extra={"estimate": rep.estimate, "check": rep.check})
    if method != "lap":
        raise UsageError(f"unknown entropy method {method!r}")
    est = lap_entropy(resolve_map(cfg["map"]), n)
    rows = [{"n": i + 1, "laps": c, "log_laps_over_n": t} for i, (c, t) in enumerate(zip(est.lap_counts, est.trace))]
    rows.append({"n": "estimate", "laps": "", "log_laps_over_n": est.estimate})
    return Table(["n", "laps", "log_laps_over_n"], rows, extra={"estimate": est.estimate})


def op_horseshoe(cfg, p):
    r = horseshoe_search(resolve_map(cfg["map"]), int(p.get("nmax", 10)))
    h = r.horseshoe
    row = {"found": r.found, "n": h.n if h else "", "I": _pair(h.I) if h else "", "J1": _pair(h.J1) if h else "",
           "J2": _pair(h.J2) if h else "", "certified": h.certified if h else "", "note": r.reason}
    return Table(list(row), [row], extra={"horseshoe": h.as_dict() if h else None})


def _pair(t):
    return f"[{t[0]}, {t[1]}]"


def _load_matrix(ref):
    if isinstance(ref, list):
        return ref
    if os.path.exists(str(ref)):
        with open(ref) as fh:
            return json.load(fh)
    return json.loads(ref)


def _parse_sequence(spec: str, n: int) -> list:
    spec = str(spec)
    if spec == "2^k":
        return [2 ** k for k in range(n)]
    if spec in ("1..n", "n"):
        return list(range(1, n + 1))
    if spec == "k^2":
        return [k * k for k in range(1, n + 1)]
    if os.path.exists(spec):
        with open(spec) as fh:
            return [int(v) for v in fh.read().replace("\n", ",").split(",") if v.strip()]
    return [int(v) for v in spec.split(",") if v.strip()]


def op_seqent(cfg, p):
    M = _load_matrix(p["matrix"])
    n = int(p.get("n", 10))
    A = _parse_sequence(p.get("A", "1..n"), n)
    c = sequence_word_count(M, A, n)
    return Table(["n", "words", "entropy"], [{"n": n, "words": c, "entropy": math.log(c) / n if c else -math.inf}])


def op_cycles(cfg, p):
    cyc = detect_cycles(resolve_map(cfg["map"]), int(p.get("kmax", 8)))
    rows = []
    for c in cyc:
        for i, X in enumerate(c.components):
            for _, a, b in X.arcs:
                rows.append({"period": c.period, "component": i, "a": str(a), "b": str(b)})
    return Table(["period", "component", "a", "b"], rows, extra={"cycles": [c.to_dict() for c in cyc]})


def op_solenoid(cfg, p):
    m = resolve_map(cfg["map"])
    s = solenoid_search(m, _point(m, p.get("x", "0.1234")), int(p.get("depth", 5)))
    cert = s.certificate
    rows = []
    if cert:
        for c, t in zip(cert.levels, cert.orbit_entry):
            rows.append({"period": c.period, "orbit_entry": t, "image_ok": all(c.image_ok),
                         "disjoint_ok": c.disjoint_ok})
    status = 0 if cert and cert.valid else 2
    return Table(["period", "orbit_entry", "image_ok", "disjoint_ok"], rows, status,
                 extra={"certificate": cert.to_dict() if cert else None, "depth_reached": s.depth_reached,
                        "reason": s.reason})


def op_diamcheck(cfg, p):
    m = resolve_map(cfg["map"])
    period = int(p.get("period", 2))
    cyc = [c for c in detect_cycles(m, period) if c.period == period]
    if not cyc:
        raise UsageError(f"no certified cycle of period {period}")
    eps = Fraction(str(p.get("eps", 0.1)))
    rows = []
    for c in cyc:
        r = diameter_average_check(m, c, int(p.get("N", 10 ** 4)), eps)
        rows.append({"period": period, "eps": float(eps), "lhs": r.lhs, "rhs": r.rhs, "pass": r.passed,
                     "large_components": r.large_components, "count_bound": r.count_bound})
    status = 0 if all(r["pass"] for r in rows) else 2
    return Table(list(rows[0]), rows, status)


def op_scrambled(cfg, p):
    m = resolve_map(cfg["map"])
    found = find_scrambled_tuples(m, int(p.get("n", 3)), int(p.get("samples", 1000)), int(p.get("N", 10 ** 5)),
                                  float(p.get("eps_prox", 0.01)), float(p.get("eps_dist", 0.1)), cfg["seed"])
    rows = [{"points": " ".join(_state_str(x) for x in r.points), "closeness": r.closeness,
             "separation": r.separation} for r in found]
    return Table(["points", "closeness", "separation"], rows)


def op_indep(cfg, p):
    m = resolve_map(cfg["map"])
    arcs = _load_matrix(p["arcs"])
    arcs = [[(Fraction(str(a)), Fraction(str(b)))] for a, b in arcs]
    r = independence_set_search(m, arcs, int(p.get("jmax", 8)), int(p.get("budget", 10 ** 6)))
    row = {"J": " ".join(map(str, r.J)), "size": r.size, "verified": r.verified, "witnesses_ok": r.witnesses_ok,
           "patterns_checked": r.patterns_checked, "budget_exhausted": r.budget_exhausted,
           "first_failure": str(r.first_failure) if r.first_failure else ""}
    return Table(list(row), [row])


def op_proxtrans(cfg, p):
    m = resolve_map(cfg["map"])
    w = prox_transitivity_test(m, int(p.get("samples", 1000)), int(p.get("N", 10 ** 5)), float(p.get("eps", 0.01)),
                               cfg["seed"])
    rows = [{"x": str(t.x), "y": str(t.y), "z": str(t.z), "liminf_xy": t.liminf_xy, "liminf_yz": t.liminf_yz,
             "liminf_xz": t.liminf_xz} for t in w]
    return Table(["x", "y", "z", "liminf_xy", "liminf_yz", "liminf_xz"], rows)


def op_zoo_list(cfg, p):
    return Table(["name"], [{"name": n} for n in zoo.names()])


def op_zoo_emit(cfg, p):
    m = resolve_map(cfg["map"])
    return Table([], [], extra={"definition": map_to_dict(m)})


def op_zoo_verify(cfg, p):
    ref = cfg["map"]
    if ref == "paper_example":
        rep = zoo.verify_paper_example_bounds()
        rows = [{"check": f"count_k{c['k']}", "value": c["count"], "bound": c["bound"], "ok": c["ok"]}
                for c in rep["counts"]]
        rows += [{"check": f"average_k{a['k']}", "value": a["average"], "bound": a["envelope"], "ok": a["ok"]}
                 for a in rep["averages"]]
        w = rep["witness"]
        rows.append({"check": "witness_mean_distance", "value": w["mean_distance"], "bound": 0.4, "ok": w["ok"]})
        return Table(["check", "value", "bound", "ok"], rows, 0 if rep["ok"] else 2)
    m = resolve_map(ref)
    rows = []
    expected = getattr(m, "expected_cycles", None)
    if expected:
        found = {c.period: c for c in detect_cycles(m, max(k for k, _ in expected))}
        for k, (a, b) in expected:
            c = found.get(k)
            ok = c is not None and any(X.contains(X.make(m.graph, [(m._e0, a, b)])) for X in c.components)
            rows.append({"check": f"cycle_period_{k}", "value": k, "bound": f"[{a}, {b}]", "ok": ok})
    else:
        rows.append({"check": "constructed", "value": m.name, "bound": "", "ok": True})
    return Table(["check", "value", "bound", "ok"], rows, 0 if all(r["ok"] for r in rows) else 2)


def _smoke_checks():
    """Small versions of the main experiments; each returns (name, ok, detail)."""
    out = []
    v, _ = davenport_sum(0.0, 10 ** 5)
    out.append(("davenport_alpha0", abs(v.real * 10 ** 5 - mertens(10 ** 5)) < 1e-6, f"{abs(v):.3g}"))
    e = lap_entropy(zoo.make_full_tent(), 20)
    out.append(("lap_full_tent", abs(e.estimate - math.log(2)) < 1e-9, f"{e.estimate:.12f}"))
    s = solenoid_search(zoo.make_doubling_solenoid(4), Fraction(1234, 10000), 4)
    out.append(("solenoid_depth4", s.certificate is not None and s.certificate.valid, str(s.periods_found)))
    r = find_scrambled_tuples(zoo.make_full_tent(), 3, 200, 10 ** 4, seed=0)
    out.append(("scrambled_tent", len(r) >= 1, str(len(r))))
    hs = horseshoe_search(zoo.make_full_tent(), 2)
    out.append(("horseshoe_tent", hs.found, hs.reason))
    rep = mean_equicontinuity_modulus(zoo.make_rotation(zoo.GOLDEN_FRAC), None, 0.1, 100, 1000, 0)
    out.append(("meaneq_rotation", rep.delta is not None, str(rep.delta)))
    return out


def op_suite(cfg, p):
    name = p.get("name", "smoke")
    if name == "smoke":
        res = _smoke_checks()
        rows = [{"criterion": n, "passed": ok, "summary": d} for n, ok, d in res]
    elif name == "acceptance":
        ids = [c for c in str(p.get("only", ",".join(CRITERIA))).split(",") if c]
        results = [CRITERIA[c](cfg["seed"]) for c in ids if c in CRITERIA]
        if "only" not in p:
            results.append(criterion_A13(cfg["seed"], {r.id: r.csv() for r in results}, [r.id for r in results]))
        rows = [{"criterion": r.id, "passed": r.passed, "summary": r.summary} for r in results]
    else:
        raise UsageError(f"unknown suite {name!r}")
    status = 0 if all(r["passed"] for r in rows) else 2
    return Table(["criterion", "passed", "summary"], rows, status)


_OPS = {
    "mobius": op_mobius, "davenport": op_davenport, "disjoint": op_disjoint, "oscillating": op_oscillating,
    "meaneq": op_meaneq, "sensitivity": op_sensitivity, "pair": op_pair, "banach": op_banach, "entropy": op_entropy,
    "horseshoe": op_horseshoe, "seqent": op_seqent, "cycles": op_cycles, "solenoid": op_solenoid,
    "diamcheck": op_diamcheck, "scrambled": op_scrambled, "indep": op_indep, "proxtrans": op_proxtrans,
    "zoo-list": op_zoo_list, "zoo-emit": op_zoo_emit, "zoo-verify": op_zoo_verify, "suite": op_suite,
}


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def render(cfg: dict, table: Table, wall: float) -> str:
    meta = {"tool": f"graphdyn {__version__}", "config_hash": config_hash(cfg), "seed": cfg["seed"],
            "op": cfg["op"], "wall_time_s": round(wall, 3)}
    if cfg["op"] == "zoo-emit":
        # a bare map definition, loadable again through --map
        return json.dumps({**_jsonable(table.extra["definition"]), "meta": meta}, indent=2, sort_keys=True) + "\n"
    if cfg["format"] == "json":
        payload = {"meta": meta, "columns": table.columns,
                   "rows": [{c: _jsonable(r.get(c)) for c in table.columns} for r in table.rows],
                   "extra": _jsonable(table.extra)}
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    head = "".join(f"# {k}: {v}\n" for k, v in meta.items())
    for k, v in table.extra.items():
        head += f"# {k}: {json.dumps(_jsonable(v), sort_keys=True)}\n"
    return head + csv_body(table.columns, table.rows)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if hasattr(v, "item"):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def read_output(text: str) -> tuple:
    """Parse CSV output back into ``(meta, rows)``; the inverse of :func:`render`."""
    meta, body = {}, []
    for line in text.splitlines(keepends=True):
        if line.startswith("# "):
            k, _, v = line[2:].rstrip("\n").partition(": ")
            meta[k] = v
        else:
            body.append(line)
    rows = list(csv.DictReader(io.StringIO("".join(body))))
    return meta, rows


def _destination(cfg) -> str | None:
    if cfg.get("out"):
        return cfg["out"]
    d = os.environ.get(OUT_DIR_ENV)
    if d:
        os.makedirs(d, exist_ok=True)
        return os.path.join(d, f"{cfg['op']}-{config_hash(cfg)[:8]}.{cfg['format']}")
    return None


def run(config: dict, stdout=None) -> int:
    """Validate and execute one experiment config; returns the exit status."""
    stdout = stdout or sys.stdout
    try:
        cfg = validate_config(config)
        t0 = time.perf_counter()
        table = _OPS[cfg["op"]](cfg, cfg["params"])
        text = render(cfg, table, time.perf_counter() - t0)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (GraphDynError, ValueError, TypeError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    dest = _destination(cfg)
    if dest:
        with open(dest, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return table.status


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _common(sp, needs_map=False):
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    if needs_map:
        sp.add_argument("--map", required=True, help="zoo name (name:key=value,...) or JSON map file")


_ARGS = {
    "mobius": [("--N", int, 10 ** 6)],
    "davenport": [("--alpha", str, "0"), ("--N", int, 10 ** 6)],
    "disjoint": [("--x", float, 0.0), ("--obs", str, "exp2pii"), ("--seq", str, "mobius"), ("--N", int, 10 ** 6)],
    "oscillating": [("--seq", str, "mobius"), ("--lam", float, 1.0), ("--grid", int, 64), ("--N", str, "1000,10000,100000")],
    "meaneq": [("--eps", float, 0.1), ("--N", int, 10 ** 4), ("--samples", int, 1000)],
    "sensitivity": [("--N", int, 10 ** 4), ("--base", int, 100), ("--perturb", int, 10), ("--radius", float, 1e-3)],
    "pair": [("--x", float, None), ("--y", float, None), ("--N", int, 10 ** 5), ("--eps-prox", float, 0.01),
             ("--eps-dist", float, 0.1), ("--L", int, None)],
    "banach": [("--x", float, None), ("--y", float, None), ("--eps", float, 0.05), ("--N", int, 10 ** 5), ("--L", int, 1000)],
    "entropy": [("--method", str, "lap"), ("--n", int, 20), ("--matrix", str, None)],
    "horseshoe": [("--nmax", int, 10)],
    "seqent": [("--matrix", str, None), ("--A", str, "1..n"), ("--n", int, 10)],
    "cycles": [("--kmax", int, 8)],
    "solenoid": [("--x", str, "0.1234"), ("--depth", int, 5)],
    "diamcheck": [("--period", int, 2), ("--N", int, 10 ** 4), ("--eps", str, "0.1")],
    "scrambled": [("--n", int, 3), ("--samples", int, 1000), ("--N", int, 10 ** 5), ("--eps-prox", float, 0.01),
                  ("--eps-dist", float, 0.1)],
    "indep": [("--arcs", str, None), ("--jmax", int, 8), ("--budget", int, 10 ** 6)],
    "proxtrans": [("--samples", int, 1000), ("--N", int, 10 ** 5), ("--eps", float, 0.01)],
}
_NEEDS_MAP = {"disjoint", "meaneq", "sensitivity", "pair", "banach", "horseshoe", "cycles", "solenoid", "diamcheck",
              "scrambled", "indep", "proxtrans"}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="graphdyn", description="Dynamics on metric graphs: experiments and checks.")
    ap.add_argument("--version", action="version", version=f"graphdyn {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for op, args in _ARGS.items():
        sp = sub.add_parser(op)
        _common(sp, op in _NEEDS_MAP)
        if op == "entropy":
            sp.add_argument("--map", default=None)
        for flag, typ, default in args:
            sp.add_argument(flag, type=typ, default=default, required=default is None and flag not in ("--L", "--matrix"))
    zp = sub.add_parser("zoo")
    zp.add_argument("action", choices=("list", "emit", "verify"))
    zp.add_argument("name", nargs="?")
    _common(zp)
    sp = sub.add_parser("suite")
    sp.add_argument("name", choices=("acceptance", "smoke"))
    sp.add_argument("--only", default=None, help="comma-separated criterion ids")
    _common(sp)
    rp = sub.add_parser("run", help="run a JSON config file, or: run OP [MAP] [METHOD] [key=value ...]")
    rp.add_argument("items", nargs="+")
    _common(rp)
    return ap


def _config_from_args(ns) -> dict:
    cmd = ns.command
    base = {"seed": ns.seed, "out": ns.out, "format": ns.format}
    if cmd == "zoo":
        if ns.action != "list" and not ns.name:
            raise UsageError(f"zoo {ns.action} needs a system name")
        op = {"list": "zoo-list", "emit": "zoo-emit", "verify": "zoo-verify"}[ns.action]
        if op == "zoo-emit" and ns.format == "csv":
            base["format"] = "json"
        return {"op": op, "map": ns.name, "params": {}, **base}
    if cmd == "suite":
        params = {"name": ns.name}
        if ns.only:
            params["only"] = ns.only
        return {"op": "suite", "map": None, "params": params, **base}
    if cmd == "run":
        return _config_from_run(ns.items, base)
    params = {}
    for flag, _, _ in _ARGS[cmd]:
        key = flag.lstrip("-").replace("-", "_")
        v = getattr(ns, key)
        if v is not None:
            params[key] = v
    return {"op": cmd, "map": getattr(ns, "map", None), "params": params, **base}


def _config_from_run(items, base) -> dict:
    if len(items) == 1 and os.path.exists(items[0]):
        with open(items[0]) as fh:
            cfg = json.load(fh)
        for k, v in base.items():
            if k not in cfg and v is not None:
                cfg[k] = v
        return cfg
    op, rest = items[0], items[1:]
    params, bare = {}, []
    for it in rest:
        if "=" in it:
            k, _, v = it.partition("=")
            params[k] = _parse_value(v)
        else:
            bare.append(it)
    cfg = {"op": op, "map": None, "params": params, **base}
    if bare:
        cfg["map"] = bare[0]
    if len(bare) > 1:
        params["method"] = bare[1]
    return cfg


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        cfg = _config_from_args(ns)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return run(cfg)


if __name__ == "__main__":
    raise SystemExit(main())
