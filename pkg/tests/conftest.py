from fractions import Fraction

from hypothesis import strategies as st

from microsets.numerals import Numeral


def dyadic(max_exp: int = 64, base: int = 2):
    """Random exact base-adic rationals as Fractions."""
    return st.builds(
        lambda n, e: Fraction(n, base**e),
        st.integers(min_value=-(10**6), max_value=10**6),
        st.integers(min_value=0, max_value=max_exp),
    )


def num(q, base: int = 2) -> Numeral:
    return Numeral.from_fraction(Fraction(q), base)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
