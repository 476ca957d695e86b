import random
from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from wpva.coeffs import RatFunc
from wpva.diffpoly import Variable

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

small_q = st.fractions(min_value=-6, max_value=6, max_denominator=5)


@st.composite
def ratfuncs(draw, allow_den=True):
    num = draw(st.lists(small_q, min_size=1, max_size=4))
    if allow_den and draw(st.booleans()):
        den = draw(st.lists(small_q, min_size=1, max_size=3))
        if all(c == 0 for c in den):
            den = [Fraction(1)]
        return RatFunc.from_coeffs(num, den)
    return RatFunc.from_coeffs(num)


MIXED_VARS = (
    Variable("u", 0, Fraction(1)),
    Variable("w", 0, Fraction(2)),
    Variable("psi", 1, Fraction(1, 2)),
    Variable("chi", 1, Fraction(3, 2)),
    Variable("phi", 0, Fraction(1, 2)),
)


@pytest.fixture
def rng():
    return random.Random(1234)
