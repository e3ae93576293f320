import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conelab.field import (BudgetExceeded, Scalar, enumerate_points, first_irreducible, index_point,
                           is_square, make_field, point_index, rank, row_reduce, span, trace)

FIELDS = [make_field(3), make_field(5), make_field(7), make_field(3, 2, [1, 0, 1]),
          make_field(3, 3, [1, 2, 0, 1]), make_field(5, 2, [3, 0, 1])]


def test_make_field_basic():
    assert make_field(3).q == 3
    F9 = make_field(3, 2, [1, 0, 1])
    assert F9.q == 9 and F9.modulus == (1, 0, 1)


@pytest.mark.parametrize("args", [(4, 1, None), (2, 1, None), (3, 0, None), (3, 2, None),
                                  (3, 2, [2, 0, 1]), (3, 2, [1, 0, 2]), (3, 1, [1, 1])])
def test_make_field_rejects(args):
    with pytest.raises(ValueError):
        make_field(*args)


def test_first_irreducible():
    assert first_irreducible(3, 2) == [1, 0, 1]
    spec = make_field(5, 3, first_irreducible(5, 3))
    assert spec.q == 125


@pytest.mark.parametrize("spec", FIELDS, ids=repr)
def test_field_axioms_exhaustive(spec):
    q = spec.q
    a = np.arange(q)
    assert np.all(spec.add[a, 0] == a)
    assert np.all(spec.mul[a, 1] == a)
    assert np.all(spec.add[a, spec.neg[a]] == 0)
    assert np.all(spec.mul[a[1:], spec.inv[a[1:]]] == 1)
    # associativity and distributivity over all triples
    A, B, C = np.meshgrid(a, a, a, indexing="ij")
    assert np.all(spec.mul[spec.mul[A, B], C] == spec.mul[A, spec.mul[B, C]])
    assert np.all(spec.mul[A, spec.add[B, C]] == spec.add[spec.mul[A, B], spec.mul[A, C]])
    # no zero divisors
    assert np.count_nonzero(spec.mul[1:, 1:] == 0) == 0


@pytest.mark.parametrize("spec", FIELDS, ids=repr)
def test_trace_is_additive_and_onto(spec):
    a = np.arange(spec.q)
    tr = spec.trace_table
    assert np.all((tr[:, None] + tr[None, :]) % spec.p == tr[spec.add[a[:, None], a[None, :]]])
    assert set(tr.tolist()) == set(range(spec.p))
    # each value taken q/p times
    assert np.all(np.bincount(tr, minlength=spec.p) == spec.q // spec.p)


@pytest.mark.parametrize("spec", FIELDS, ids=repr)
def test_half_the_units_are_squares(spec):
    assert spec.is_sq.sum() == (spec.q - 1) // 2
    assert spec.eta_table[0] == 0


def test_trace_examples(F3, F9):
    assert trace(Scalar(F3, 2)) == 2
    x = F9.element([0, 1])
    assert trace(x) == 0
    assert trace(F9.element(1)) == 2


def test_square_examples(F3, F5, F7):
    assert is_square(F7.element(2))
    assert not is_square(F3.element(2))
    assert is_square(F5.element(4))
    with pytest.raises(ValueError):
        is_square(F5.element(0))


def test_minus_one_square(F3, F5, F9):
    assert not F3.minus_one_is_square
    assert F5.minus_one_is_square
    assert F9.minus_one_is_square


def test_integer_embedding_in_extension(F9):
    four = F9.element(4)
    assert four == F9.element(1)
    assert four == 1
    assert F9.from_code(4) != F9.element(4)
    with pytest.raises(ValueError):
        F9.from_code(9)


@given(st.integers(0, 8), st.integers(0, 8), st.integers(1, 8))
def test_scalar_operators(a, b, c):
    F9 = make_field(3, 2, [1, 0, 1])
    x, y, z = F9.from_code(a), F9.from_code(b), F9.from_code(c)
    assert (x + y) - y == x
    assert (x * z) / z == x
    assert -(-x) == x
    assert z * z.inverse() == 1


def test_enumeration_order(F3, F7):
    assert enumerate_points(F3, 1)[:, 0].tolist() == [0, 1, 2]
    pts = enumerate_points(F3, 2)
    assert pts[:4].tolist() == [[0, 0], [1, 0], [2, 0], [0, 1]]
    X = enumerate_points(F7, 4)
    assert len(X) == 2401 and len(np.unique(X, axis=0)) == 2401
    assert np.all(point_index(F7, X) == np.arange(2401))
    assert np.all(index_point(F7, np.arange(2401), 4) == X)


def test_enumeration_budget(F7):
    with pytest.raises(BudgetExceeded):
        enumerate_points(F7, 5, budget=1000)


def test_span_examples(F3):
    assert span(F3, [[1, 0]]).points().tolist() == [[0, 0], [1, 0], [2, 0]]
    assert span(F3, [[1, 1, 1, 0], [0, 1, 2, 2]]).size == 9
    pts = span(F3, [[1, 1, 1, 0], [0, 1, 2, 2]]).points()
    assert len(np.unique(pts, axis=0)) == 9
    assert span(F3, [[1, 0], [2, 0]]).size == 3


@settings(max_examples=50)
@given(st.lists(st.lists(st.integers(0, 4), min_size=3, max_size=3), min_size=1, max_size=4))
def test_row_reduce_preserves_span(rows):
    F5 = make_field(5)
    R = row_reduce(F5, rows)
    S = span(F5, rows)
    assert rank(F5, rows) == len(R) == S.dim
    for v in rows:
        assert S.contains(np.array(v))
