from fractions import Fraction

import numpy as np
import pytest

from conelab.cone import (cone_enumerate, cone_equation, cone_ift_brute, cone_ift_closed, cone_ift_table,
                          cone_size_closed, dual_cone_mask, gamma, sigma_ift)
from conelab.field import enumerate_points, make_field

CASES = [(3, 1, None, 3), (3, 1, None, 4), (5, 1, None, 3), (5, 1, None, 4), (7, 1, None, 4),
         (3, 1, None, 5), (5, 1, None, 5), (3, 2, [1, 0, 1], 3), (3, 2, [1, 0, 1], 4), (3, 2, [2, 1, 1], 4)]


def test_sizes(F3, F7):
    assert cone_enumerate(F3, 4).size == 21
    assert cone_enumerate(F7, 4).size == 301
    assert cone_enumerate(F3, 3).size == 9
    assert cone_size_closed(F7, 4) == 301


@pytest.mark.parametrize("p,ell,mod,n", CASES)
def test_size_closed_form(p, ell, mod, n):
    spec = make_field(p, ell, mod)
    assert cone_enumerate(spec, n).size == cone_size_closed(spec, n)


@pytest.mark.parametrize("p,ell,mod,n", CASES)
def test_closed_matches_brute_everywhere(p, ell, mod, n):
    spec = make_field(p, ell, mod)
    cone = cone_enumerate(spec, n)
    X = enumerate_points(spec, n)
    brute = cone_ift_brute(cone, X)
    assert np.max(np.abs(brute.imag)) < 1e-9
    assert np.allclose(brute.real, cone_ift_closed(spec, X), atol=1e-12)


def test_value_set_q3_n4(F3):
    t = cone_ift_table(F3, 4)
    assert (t.origin, t.dual, t.off) == (Fraction(7, 27), Fraction(-2, 27), Fraction(1, 27))
    vals = cone_ift_closed(F3, enumerate_points(F3, 4))
    assert set(np.round(vals * 27).astype(int).tolist()) == {7, -2, 1}
    assert t.origin == Fraction(21, 81)


def test_gamma_examples(F3):
    assert gamma(F3, [0, 0, 0, 0]) == 0
    assert gamma(F3, [1, 1, 1, 0]) == 2
    assert gamma(F3, [0, 0, 1, 1]) == 2
    assert gamma(F3, np.array([[1, 1, 1, 0], [0, 0, 1, 1]])).tolist() == [2, 2]
    with pytest.raises(ValueError):
        gamma(F3, [1, 1])


def test_odd_dimension_magnitudes(F5):
    X = enumerate_points(F5, 3)
    vals = cone_ift_closed(F5, X)
    G = gamma(F5, X)
    nonzero = np.any(X, axis=1)
    assert np.allclose(np.abs(vals[G != 0]), 1 / 25)
    cone = cone_enumerate(F5, 3)
    sig = sigma_ift(cone, X)
    assert np.allclose(sig[(G == 0) & nonzero], 0)
    assert sig[0] == pytest.approx(1)


def test_sigma_examples(F3):
    cone = cone_enumerate(F3, 4)
    X = enumerate_points(F3, 4)
    sig = sigma_ift(cone, X)
    assert sig[0] == pytest.approx(1)
    assert np.allclose(np.abs(sig[~dual_cone_mask(F3, X)]), 1 / 7)


def test_membership(F3):
    cone = cone_enumerate(F3, 4)
    assert cone.contains([0, 0, 0, 0])
    assert cone.contains([1, 0, 1, 1])
    assert not cone.contains([1, 0, 0, 0])
    assert np.all(cone_equation(F3, cone.points))
    with pytest.raises(ValueError):
        cone_enumerate(F3, 2)


def test_cone_csv(tmp_path, F3):
    cone = cone_enumerate(F3, 3)
    cone.write_csv(tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "index,xi1,xi2,xi3" and len(lines) == 10
