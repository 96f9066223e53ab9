from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from rslab.intervals import normalize

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def rationals(lo=-4, hi=4, max_denom=16):
    return st.integers(lo * max_denom, hi * max_denom).map(lambda n: Fraction(n, max_denom))


@st.composite
def unions(draw, max_components=5, nonempty=True, lo=-4, hi=4):
    n = draw(st.integers(1 if nonempty else 0, max_components))
    pairs = []
    for _ in range(n):
        a = draw(rationals(lo, hi))
        w = Fraction(draw(st.integers(1, 32)), 16)
        pairs.append((a, a + w))
    return normalize(pairs)


def iv(lo, hi):
    return normalize([(Fraction(lo), Fraction(hi))])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1].rstrip(':'))):
            terminalreporter.write_line(line)
