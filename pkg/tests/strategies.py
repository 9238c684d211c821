"""Shared hypothesis strategies."""

from fractions import Fraction

from hypothesis import strategies as st

small_ints = st.integers(min_value=-6, max_value=6)
rationals = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 7))


def int_matrices(max_rows=6, max_cols=6, elements=small_ints):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(elements, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def rat_matrices(max_rows=5, max_cols=5):
    return int_matrices(max_rows, max_cols, rationals)


def nonzero_vectors(size, elements=small_ints):
    return st.lists(elements, min_size=size, max_size=size).filter(any)
