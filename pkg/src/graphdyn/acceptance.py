"""Acceptance experiments A1..A13.

Each ``criterion_*`` function runs one experiment end to end and returns a
:class:`CriterionResult` with a pass flag, a one-line summary and the rows of
its CSV body.  Nothing here is tuned to pass: thresholds are the published
ones and failures are reported as such.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from . import zoo
from ._rng import rng_for
from .birkhoff import mean_distance
from .chaos import check_independence, classify_IE_IN_IT, find_scrambled_tuples, independence_set_search, prox_transitivity_test
from .entropy import find_horseshoe, horseshoe_search, lap_entropy, markov_entropy_report, sequence_word_count
from .metric_graph import ball
from .sequences import ArithmeticSequence, Observable, davenport_sum, disjointness_sum
from .structure import diameter_average_check, solenoid_search

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_all", "csv_body"]


@dataclass
class CriterionResult:
    id: str
    passed: bool
    summary: str
    columns: list
    rows: list = field(default_factory=list)

    def line(self) -> str:
        return f"{self.id} {'PASS' if self.passed else 'FAIL'}: {self.summary}"

    def csv(self) -> str:
        return csv_body(self.columns, self.rows)


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, complex):
        return repr(v)
    return str(v)


def csv_body(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c, "")) for c in columns])
    return buf.getvalue()


# ---------------------------------------------------------------------------


def criterion_A1(seed: int = 0) -> CriterionResult:
    m = zoo.make_rotation(zoo.GOLDEN_FRAC)
    rng = rng_for(seed, "A1")
    X = rng.uniform(0, 1, 100)
    Y = rng.uniform(0, 1, 100)
    rows = []
    for x, y in zip(X, Y):
        d = float(m.float_dist(np.array([x]), np.array([y]))[0])
        md = mean_distance(m, float(x), float(y), 10 ** 4)
        rows.append({"x": x, "y": y, "distance": d, "mean_distance": md, "error": abs(md - d)})
    worst = max(r["error"] for r in rows)
    return CriterionResult("A1", worst <= 1e-12, f"max |mean - d| = {worst:.3g} over 100 pairs (tol 1e-12)",
                           ["x", "y", "distance", "mean_distance", "error"], rows)


def _linear_sieve_mertens(N: int) -> int:
    """Mertens value by a linear sieve, independent of the segmented sieve."""
    mu = np.zeros(N + 1, dtype=np.int8)
    mu[1] = 1
    primes = []
    comp = bytearray(N + 1)
    mu_l = [0] * (N + 1)
    mu_l[1] = 1
    for i in range(2, N + 1):
        if not comp[i]:
            primes.append(i)
            mu_l[i] = -1
        for p in primes:
            ip = i * p
            if ip > N:
                break
            comp[ip] = 1
            if i % p == 0:
                mu_l[ip] = 0
                break
            mu_l[ip] = -mu_l[i]
    return sum(mu_l)


def criterion_A2(seed: int = 0) -> CriterionResult:
    N = 10 ** 6
    alphas = [("0", 0.0), ("1/3", 1.0 / 3.0), ("golden", zoo.GOLDEN_FRAC)]
    rows = []
    parts = []
    ok_all = True
    for label, a in alphas:
        _, tr = davenport_sum(a, N, first=10 ** 4)
        vals = [abs(v) for _, v in tr]
        decreasing = all(b < a_ for a_, b in zip(vals, vals[1:]))
        final_ok = vals[-1] <= 0.01
        for (n, v), av in zip(tr, vals):
            rows.append({"alpha": label, "N": n, "re": v.real, "im": v.imag, "abs": av})
        ok = decreasing and final_ok
        parts.append(f"alpha={label}: {'decreasing' if decreasing else 'NOT decreasing'} {['%.3g' % v for v in vals]}")
        ok_all &= ok
    oracle = Fraction(_linear_sieve_mertens(N), N)
    v0 = davenport_sum(0.0, N)[0]
    exact = v0.imag == 0 and Fraction(v0.real).limit_denominator(N) == oracle and abs(oracle) == Fraction(212, N)
    rows.append({"alpha": "0-oracle", "N": N, "re": float(oracle), "im": 0.0, "abs": float(abs(oracle))})
    ok_all &= exact
    return CriterionResult("A2", ok_all, "; ".join(parts) + f"; alpha=0 matches sieve oracle {oracle}: {exact}",
                           ["alpha", "N", "re", "im", "abs"], rows)


def criterion_A3(seed: int = 0) -> CriterionResult:
    N = 10 ** 6
    mu = ArithmeticSequence("mobius")
    rng = rng_for(seed, "A3")
    cases = [
        ("rotation", zoo.make_rotation(zoo.GOLDEN_FRAC), "exp2pii"),
        ("doubling_solenoid(6)", zoo.make_doubling_solenoid(6), "coord"),
        ("feigenbaum_logistic", zoo.make_feigenbaum_logistic(), "coord"),
    ]
    rows, parts, ok_all = [], [], True
    for name, m, obs in cases:
        x = float(rng.uniform(0, 1))
        _, tr = disjointness_sum(m, x, Observable(obs), mu, N)
        vals = [abs(v) for _, v in tr]
        upticks = [(tr[i + 1][0], vals[i + 1] / vals[i] - 1) for i in range(len(vals) - 1) if vals[i + 1] > vals[i]]
        big = [u for u in upticks if u[1] > 0.2]
        ok = vals[-1] <= 0.05 and not big
        ok_all &= ok
        for (n, v), av in zip(tr, vals):
            rows.append({"system": name, "x": x, "N": n, "re": v.real, "im": v.imag, "abs": av})
        up = ", ".join(f"+{100 * r:.0f}% at N={n}" for n, r in upticks) or "none"
        parts.append(f"{name}: final {vals[-1]:.3g}, upticks {up}")
    return CriterionResult("A3", ok_all, "; ".join(parts), ["system", "x", "N", "re", "im", "abs"], rows)


def criterion_A4(seed: int = 0) -> CriterionResult:
    rows = []
    full = lap_entropy(zoo.make_full_tent(), 20)
    e1 = abs(full.estimate - math.log(2))
    t15 = lap_entropy(zoo.make_tent(Fraction(3, 2)), 25)
    e2 = abs(t15.estimate - math.log(1.5))
    rep = markov_entropy_report([[1, 1], [1, 0]])
    golden = math.log((1 + math.sqrt(5)) / 2)  # root of x^2 - x - 1
    e3 = abs(rep.estimate - golden)
    e4 = abs(rep.estimate - rep.check["path_entropy"])
    rows += [
        {"check": "full_tent_lap_n20", "value": full.estimate, "target": math.log(2), "error": e1, "tol": 1e-9},
        {"check": "tent1.5_lap_n25", "value": t15.estimate, "target": math.log(1.5), "error": e2, "tol": 1e-3},
        {"check": "golden_markov_vs_charpoly", "value": rep.estimate, "target": golden, "error": e3, "tol": 1e-6},
        {"check": "golden_markov_vs_paths_n30", "value": rep.estimate, "target": rep.check["path_entropy"],
         "error": e4, "tol": 2e-2},
    ]
    ok = all(r["error"] <= r["tol"] for r in rows)
    return CriterionResult("A4", ok, ", ".join(f"{r['check']} err {r['error']:.2g}" for r in rows),
                           ["check", "value", "target", "error", "tol"], rows)


def criterion_A5(seed: int = 0) -> CriterionResult:
    rows = []
    hs = find_horseshoe(zoo.make_full_tent(), 2)
    tent_ok = hs is not None and hs.certified and hs.n <= 2
    rows.append({"system": "full_tent", "n_max": 2, "found": hs is not None,
                 "n": hs.n if hs else "", "detail": hs.as_dict() if hs else ""})
    none_ok = True
    for name, m in [("rotation", zoo.make_rotation(zoo.GOLDEN_FRAC)), ("doubling_solenoid(6)", zoo.make_doubling_solenoid(6)),
                    ("feigenbaum_logistic", zoo.make_feigenbaum_logistic())]:
        r = horseshoe_search(m, 10)
        none_ok &= not r.found
        rows.append({"system": name, "n_max": 10, "found": r.found, "n": r.horseshoe.n if r.found else "",
                     "detail": r.reason})
    return CriterionResult("A5", tent_ok and none_ok,
                           f"full tent horseshoe at n={hs.n if hs else None}; zero-entropy maps none: {none_ok}",
                           ["system", "n_max", "found", "n", "detail"], rows)


_A6_X = Fraction(1234, 10000)


def _a6_search():
    return solenoid_search(zoo.make_doubling_solenoid(5), _A6_X, 5)


def criterion_A6(seed: int = 0) -> CriterionResult:
    s = _a6_search()
    cert = s.certificate
    ok = cert is not None and cert.periods == (2, 4, 8, 16, 32) and cert.valid
    rows = []
    if cert:
        for c, t in zip(cert.levels, cert.orbit_entry):
            rows.append({"period": c.period, "orbit_entry": t, "image_ok": all(c.image_ok), "disjoint_ok": c.disjoint_ok,
                         "X0": f"[{c.components[0].arcs[0][1]}, {c.components[0].arcs[0][2]}]"})
    summ = (f"periods {cert.periods}, nesting {cert.nesting_ok}, divisibility {cert.divisibility_ok}, "
            f"counts {cert.counts_ok}" if cert else f"no certificate: {s.reason}")
    return CriterionResult("A6", ok, summ, ["period", "orbit_entry", "image_ok", "disjoint_ok", "X0"], rows)


def criterion_A7(seed: int = 0) -> CriterionResult:
    m = zoo.make_doubling_solenoid(5)
    cert = _a6_search().certificate
    if cert is None:
        return CriterionResult("A7", False, "no certified cycles from A6", [], [])
    rows = []
    for c in cert.levels:
        for eps in (Fraction(1, 20), Fraction(1, 10), Fraction(1, 5)):
            r = diameter_average_check(m, c, 10 ** 4, eps)
            rows.append({"period": c.period, "eps": float(eps), "lhs": r.lhs, "rhs": r.rhs, "pass": r.passed,
                         "large_components": r.large_components, "count_bound": r.count_bound, "count_ok": r.count_ok})
    ok = all(r["pass"] and r["count_ok"] for r in rows)
    return CriterionResult("A7", ok, f"{sum(r['pass'] and r['count_ok'] for r in rows)}/{len(rows)} checks pass",
                           ["period", "eps", "lhs", "rhs", "pass", "large_components", "count_bound", "count_ok"], rows)


def criterion_A8(seed: int = 0) -> CriterionResult:
    rep = zoo.verify_paper_example_bounds()
    rows = [{"kind": "count", "k": c["k"], "value": c["count"], "bound": c["bound"], "ok": c["ok"]} for c in rep["counts"]]
    rows += [{"kind": "average", "k": a["k"], "value": a["average"], "bound": a["envelope"], "ok": a["ok"]}
             for a in rep["averages"]]
    w = rep["witness"]
    rows.append({"kind": "witness", "k": w["v_index"], "value": w["mean_distance"], "bound": w["d_uv"], "ok": w["ok"]})
    return CriterionResult("A8", rep["ok"],
                           f"counts ok {all(c['ok'] for c in rep['counts'])}, averages ok "
                           f"{all(a['ok'] for a in rep['averages'])}, witness rung {w['v_index']} d={w['d_uv']:.4g} "
                           f"mean={w['mean_distance']:.3g}",
                           ["kind", "k", "value", "bound", "ok"], rows)


def criterion_A9(seed: int = 0) -> CriterionResult:
    rows = []
    counts = {}
    for name, m in [("full_tent", zoo.make_full_tent()), ("rotation", zoo.make_rotation(zoo.GOLDEN_FRAC)),
                    ("doubling_solenoid(6)", zoo.make_doubling_solenoid(6))]:
        found = find_scrambled_tuples(m, 3, 10 ** 4, 10 ** 5, 0.01, 0.1, seed)
        counts[name] = len(found)
        best = found[0] if found else None
        rows.append({"system": name, "candidates": len(found),
                     "best": " ".join(repr(float(p)) for p in best.points) if best else "",
                     "closeness": best.closeness if best else "", "separation": best.separation if best else ""})
    ok = counts["full_tent"] >= 1 and counts["rotation"] == 0 and counts["doubling_solenoid(6)"] == 0
    return CriterionResult("A9", ok, ", ".join(f"{k}: {v}" for k, v in counts.items()),
                           ["system", "candidates", "best", "closeness", "separation"], rows)


def criterion_A10(seed: int = 0) -> CriterionResult:
    rows = []
    counts = {}
    for name, m in [("full_tent", zoo.make_full_tent()), ("doubling_solenoid(6)", zoo.make_doubling_solenoid(6))]:
        w = prox_transitivity_test(m, 10 ** 4, 10 ** 5, 0.01, seed)
        counts[name] = len(w)
        first = w[0] if w else None
        rows.append({"system": name, "witnesses": len(w),
                     "first": f"{first.x} {first.y} {first.z}" if first else "",
                     "liminf_xz": first.liminf_xz if first else ""})
    ok = counts["full_tent"] >= 1 and counts["doubling_solenoid(6)"] == 0
    return CriterionResult("A10", ok, ", ".join(f"{k}: {v}" for k, v in counts.items()),
                           ["system", "witnesses", "first", "liminf_xz"], rows)


def criterion_A11(seed: int = 0) -> CriterionResult:
    rows = []
    tent = zoo.make_full_tent()
    arcs = [[(0, Fraction(2, 5))], [(Fraction(3, 5), 1)]]
    fixed = check_independence(tent, arcs, range(11), budget=10 ** 5)
    greedy = independence_set_search(tent, arcs, 11, budget=10 ** 5)
    tent_ok = fixed.verified and len(fixed.witnesses) == 2 ** 11 and fixed.witnesses_ok
    rows.append({"check": "tent_J0..10", "value": len(fixed.witnesses), "ok": tent_ok,
                 "detail": f"first empty pattern {fixed.first_failure}; greedy J {greedy.J}"})
    rot = zoo.make_rotation(zoo.GOLDEN_FRAC)
    g = rot.graph
    rng = rng_for(seed, "A11")
    rot_max = 0
    for _ in range(8):
        a = Fraction(int(rng.integers(0, 1000)), 1000)
        gap = Fraction(int(rng.integers(0, 400)), 1000)
        A = ball(g, g.point("e0", (a + Fraction(3, 20)) % 1), Fraction(3, 20))
        B = ball(g, g.point("e0", (a + Fraction(3, 10) + gap + Fraction(3, 20)) % 1), Fraction(3, 20))
        if A.intersection(B):
            continue
        r = independence_set_search(rot, [A, B], 11, budget=10 ** 5)
        rot_max = max(rot_max, r.size if r.verified else 0)
        rows.append({"check": f"rotation_arcs_a={a}_gap={gap}", "value": r.size, "ok": r.size <= 3,
                     "detail": str(r.J)})
    rot_ok = rot_max <= 3
    tt = classify_IE_IN_IT(tent, Fraction(1, 5), Fraction(4, 5), (0.1, 0.05, 0.02), J_max=10)
    rt = classify_IE_IN_IT(rot, Fraction(1, 5), Fraction(7, 10), (0.1, 0.05, 0.02), J_max=10)
    trend_ok = tt.trend == "non-collapsing" and min(tt.sizes) >= 8 and rt.trend == "collapsing"
    rows.append({"check": "tent_trend", "value": " ".join(map(str, tt.sizes)), "ok": tt.trend == "non-collapsing",
                 "detail": tt.trend})
    rows.append({"check": "rotation_trend", "value": " ".join(map(str, rt.sizes)), "ok": rt.trend == "collapsing",
                 "detail": rt.trend})
    summ = (f"tent J=0..10 verified: {tent_ok} (first empty pattern {fixed.first_failure}); rotation max |J| "
            f"{rot_max}; trends tent {tt.sizes} rotation {rt.sizes}")
    return CriterionResult("A11", tent_ok and rot_ok and trend_ok, summ, ["check", "value", "ok", "detail"], rows)


def _golden_words_bruteforce(n: int) -> int:
    """Count 0/1 words of length n without two consecutive 1s (state 1 cannot follow state 1)."""
    w = np.array(list(product((0, 1), repeat=n)), dtype=np.int8)
    return int((~((w[:, 1:] == 1) & (w[:, :-1] == 1)).any(axis=1)).sum())


def criterion_A12(seed: int = 0) -> CriterionResult:
    rows = []
    full = [[1, 1], [1, 1]]
    seqs = {
        "1..n": lambda n: list(range(1, n + 1)),
        "2^k": lambda n: [2 ** k for k in range(n)],
        "squares": lambda n: [k * k for k in range(1, n + 1)],
        "primes": lambda n: [p for p in range(2, 200) if all(p % q for q in range(2, p))][:n],
    }
    ok_full = True
    for name, gen in seqs.items():
        for n in (5, 10, 15):
            c = sequence_word_count(full, gen(n), n)
            ok = c == 2 ** n
            ok_full &= ok
            rows.append({"matrix": "full", "A": name, "n": n, "count": c, "expected": 2 ** n,
                         "entropy": math.log(c) / n, "ok": ok})
    golden = [[1, 1], [1, 0]]
    target = math.log((1 + math.sqrt(5)) / 2)
    ok_gold = True
    errs = []
    for n in (5, 10, 15, 20):
        c = sequence_word_count(golden, list(range(1, n + 1)), n)
        brute = _golden_words_bruteforce(n)
        ok = c == brute
        ok_gold &= ok
        errs.append(abs(math.log(c) / n - target))
        rows.append({"matrix": "golden", "A": "1..n", "n": n, "count": c, "expected": brute,
                     "entropy": math.log(c) / n, "ok": ok})
    approaching = all(b < a for a, b in zip(errs, errs[1:]))
    return CriterionResult("A12", ok_full and ok_gold and approaching,
                           f"full shift exact 2^n: {ok_full}; golden counts match enumeration: {ok_gold}; "
                           f"distance to log golden ratio {['%.3g' % e for e in errs]}",
                           ["matrix", "A", "n", "count", "expected", "entropy", "ok"], rows)


CRITERIA = {
    "A1": criterion_A1,
    "A2": criterion_A2,
    "A3": criterion_A3,
    "A4": criterion_A4,
    "A5": criterion_A5,
    "A6": criterion_A6,
    "A7": criterion_A7,
    "A8": criterion_A8,
    "A9": criterion_A9,
    "A10": criterion_A10,
    "A11": criterion_A11,
    "A12": criterion_A12,
}


def run_criterion(cid: str, seed: int = 0) -> CriterionResult:
    if cid == "A13":
        return criterion_A13(seed)
    return CRITERIA[cid](seed)


def criterion_A13(seed: int = 0, first: dict | None = None, ids=None) -> CriterionResult:
    """Rerun criteria with the same seed and compare CSV bodies byte for byte.

    ``first`` may hold bodies from an earlier run to avoid recomputing them.
    """
    ids = list(ids or CRITERIA)
    rows = []
    for cid in ids:
        a = first[cid] if first and cid in first else CRITERIA[cid](seed).csv()
        b = CRITERIA[cid](seed).csv()
        rows.append({"criterion": cid, "identical": a == b, "bytes": len(b)})
    ok = all(r["identical"] for r in rows)
    diff = [r["criterion"] for r in rows if not r["identical"]]
    return CriterionResult("A13", ok, f"{len(rows)} criteria rerun; differing: {diff or 'none'}",
                           ["criterion", "identical", "bytes"], rows)


def run_all(seed: int = 0, ids=None) -> list:
    ids = list(ids or CRITERIA)
    results = [CRITERIA[c](seed) for c in ids if c in CRITERIA]
    if ids == list(CRITERIA) or "A13" in ids:
        first = {r.id: r.csv() for r in results}
        results.append(criterion_A13(seed, first, [r.id for r in results]))
    return results
