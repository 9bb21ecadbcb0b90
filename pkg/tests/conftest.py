"""Shared strategies and helpers for the test suite."""

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from stratlab.polyalg import Polynomial


def fractions_st(max_num=6, max_den=4):
    return st.builds(
        Fraction,
        st.integers(min_value=-max_num, max_value=max_num),
        st.integers(min_value=1, max_value=max_den),
    )


def polynomials_st(nvars=2, max_degree=3, max_terms=4):
    """Random sparse polynomials with small rational coefficients."""
    exponent = st.tuples(*([st.integers(min_value=0, max_value=max_degree)] * nvars))
    term = st.tuples(exponent, fractions_st())
    return st.lists(term, min_size=0, max_size=max_terms).map(
        lambda terms: Polynomial(nvars, dict(terms))
    )


def points_st(nvars=2, max_num=4, max_den=3):
    return st.tuples(*([fractions_st(max_num, max_den)] * nvars))


@pytest.fixture
def xy():
    return Polynomial.variables(2)


@pytest.fixture
def xyz():
    return Polynomial.variables(3)
