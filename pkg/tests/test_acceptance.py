"""Acceptance experiments A1..A13, one test each.

Every criterion runs once per session; its PASS/FAIL line is echoed in the
terminal summary (see ``conftest.py``).  Run this file directly to print the
lines without pytest.
"""

import math
from fractions import Fraction

import pytest

from graphdyn import acceptance, zoo

SEED = 0
IDS = list(acceptance.CRITERIA) + ["A13"]
LINES: dict = {}
_results: dict = {}


def _result(cid):
    if cid not in _results:
        if cid == "A13":
            first = {k: r.csv() for k, r in _results.items() if k in acceptance.CRITERIA}
            _results[cid] = acceptance.criterion_A13(SEED, first, list(acceptance.CRITERIA))
        else:
            _results[cid] = acceptance.CRITERIA[cid](SEED)
        LINES[cid] = _results[cid].line()
    return _results[cid]


@pytest.mark.slow
@pytest.mark.parametrize("cid", IDS)
def test_criterion(cid):
    r = _result(cid)
    print(r.line())
    assert r.passed, r.line()


def test_flipped_tent_slope_fails_entropy_criterion(monkeypatch):
    # injected bug: the full tent silently becomes the slope-3/2 tent
    monkeypatch.setattr(zoo, "make_full_tent", lambda: zoo.make_tent(Fraction(3, 2)))
    r = acceptance.criterion_A4(SEED)
    assert not r.passed
    row = next(x for x in r.rows if x["check"] == "full_tent_lap_n20")
    assert row["value"] == pytest.approx(math.log(1.5), abs=1e-3)


def test_csv_body_is_stable():
    a, b = acceptance.criterion_A1(SEED), acceptance.criterion_A1(SEED)
    assert a.csv() == b.csv() and a.csv().startswith("x,y,distance,mean_distance,error\n")


if __name__ == "__main__":
    for cid in IDS:
        print(_result(cid).line(), flush=True)
