from fractions import Fraction

import pytest

from loopweight.scalar import SpectralParam

# acceptance verdicts, filled by test_acceptance.py and echoed at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}

# sample point for numeric oracles: q and every base symbol get distinct rationals
SAMPLE = {"q": Fraction(3), "a": Fraction(5, 7), "b": Fraction(-2, 11), "a0": Fraction(13, 5),
          "a1": Fraction(4, 9), "b0": Fraction(7, 3)}


def evaluate(s, values=None) -> Fraction:
    """Evaluate a Scalar at rational points from its serialized numerator/denominator."""
    values = values or SAMPLE
    obj = s.to_json()
    names = obj["vars"]

    def poly(rows):
        total = Fraction(0)
        for c, *exps in rows:
            t = Fraction(c)
            for name, e in zip(names, exps):
                if e:
                    t *= values[name] ** e
            total += t
        return total

    return poly(obj["num"]) / poly(obj["den"])


def param_value(p: SpectralParam, values=None) -> Fraction:
    values = values or SAMPLE
    return values[p.group] * values["q"] ** p.qexp


@pytest.fixture
def a():
    return SpectralParam("a")


@pytest.fixture
def b():
    return SpectralParam("b")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, msg = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k}: {msg}")
