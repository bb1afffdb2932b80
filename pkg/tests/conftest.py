from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def tent():
    from graphdyn import zoo

    return zoo.make_full_tent()


def frac(x) -> Fraction:
    return Fraction(x).limit_denominator(10 ** 9) if isinstance(x, float) else Fraction(x)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import IDS, LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for cid in IDS:
            terminalreporter.write_line(LINES.get(cid, f"{cid} NOT RUN"))
