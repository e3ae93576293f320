import math
from fractions import Fraction

import numpy as np
import pytest

from conelab.cone import cone_enumerate
from conelab.field import BudgetExceeded, make_field
from conelab.spectral import (GridFn, SurfaceMeasure, extension, fourier, inverse_fourier, lp_surface_norm,
                              lr_counting_norm, read_binary, read_csv, restrict_fourier, write_binary, write_csv)


def rand_grid(spec, n, seed=0):
    rng = np.random.default_rng(seed)
    N = spec.q**n
    return GridFn(spec, n, rng.normal(size=N) + 1j * rng.normal(size=N))


def test_simple_transforms(F3):
    delta = GridFn.indicator(F3, 1, [0])
    assert np.allclose(fourier(delta).values, 1)
    ones = GridFn(F3, 1, np.ones(3))
    assert np.allclose(fourier(ones).values, [3, 0, 0])
    assert np.allclose(inverse_fourier(ones).values, [1, 0, 0])
    assert np.allclose(inverse_fourier(GridFn.indicator(F3, 2, [0])).values, 1 / 9)


@pytest.mark.parametrize("p,ell,mod,n", [(7, 1, None, 2), (5, 1, None, 2), (3, 1, None, 4), (3, 2, [1, 0, 1], 2)])
def test_round_trip_and_plancherel(p, ell, mod, n):
    spec = make_field(p, ell, mod)
    g = rand_grid(spec, n)
    hat = fourier(g)
    assert np.allclose(inverse_fourier(hat).values, g.values, atol=1e-9)
    assert np.allclose(fourier(inverse_fourier(g)).values, g.values, atol=1e-9)
    assert np.sum(np.abs(hat.values) ** 2) == pytest.approx(spec.q**n * np.sum(np.abs(g.values) ** 2))


@pytest.mark.parametrize("p,ell,mod,n", [(3, 1, None, 4), (5, 1, None, 3), (3, 2, [2, 1, 1], 2), (3, 1, None, 6)])
def test_separable_matches_naive(p, ell, mod, n):
    spec = make_field(p, ell, mod)
    g = rand_grid(spec, n, seed=3)
    assert np.allclose(fourier(g).values, fourier(g, method="naive").values, atol=1e-8)
    assert np.allclose(inverse_fourier(g).values, inverse_fourier(g, method="naive").values, atol=1e-10)


def test_naive_limit(F5):
    with pytest.raises(BudgetExceeded):
        fourier(rand_grid(F5, 5), method="naive")
    with pytest.raises(BudgetExceeded):
        fourier(rand_grid(F5, 3), budget=100)


def test_gridfn_shape(F3):
    with pytest.raises(ValueError):
        GridFn(F3, 2, np.zeros(8))


def test_extension_examples(F3):
    cone = cone_enumerate(F3, 4)
    m = cone.measure()
    E1 = extension(m, np.ones(21))
    assert E1.values[0] == pytest.approx(1)
    # x = (1, 0, 0, 0) has Gamma = 1, off the dual cone
    assert E1.values[1] == pytest.approx(1 / 7)
    f = np.zeros(21)
    f[7] = 1
    assert np.allclose(np.abs(extension(m, f).values), 1 / 21)


@pytest.mark.parametrize("p,ell,mod,n", [(3, 1, None, 4), (5, 1, None, 3), (3, 2, [1, 0, 1], 3)])
def test_extension_paths_agree_and_adjoint(p, ell, mod, n):
    spec = make_field(p, ell, mod)
    cone = cone_enumerate(spec, n)
    m = cone.measure()
    rng = np.random.default_rng(1)
    f = rng.normal(size=cone.size) + 1j * rng.normal(size=cone.size)
    a = extension(m, f)
    b = extension(m, f, method="direct")
    assert np.allclose(a.values, b.values, atol=1e-10)
    g = rand_grid(spec, n, seed=2)
    lhs = np.vdot(g.values, a.values)  # <Ef, g> with conjugation on g
    rhs = np.vdot(restrict_fourier(m, g), f) / cone.size
    assert lhs == pytest.approx(rhs)


def test_extension_shape_check(F3):
    m = cone_enumerate(F3, 4).measure()
    with pytest.raises(ValueError):
        extension(m, np.ones(5))
    with pytest.raises(ValueError):
        SurfaceMeasure(F3, np.zeros((0, 4)))


def test_norm_examples(F3):
    assert lr_counting_norm(GridFn(F3, 2, np.ones(9)), 2) == pytest.approx(3)
    for r in [1, 2, "5/2", Fraction(10, 3), "inf"]:
        assert lr_counting_norm(GridFn.indicator(F3, 2, [0]), r) == pytest.approx(1)
    assert lr_counting_norm(np.full(9, -2.5), math.inf) == 2.5
    for p in [1, 2, "3/2", "inf"]:
        assert lp_surface_norm(np.ones(21), p) == pytest.approx(1)
    d = np.zeros(21)
    d[0] = 1
    assert lp_surface_norm(d, 2) == pytest.approx(21**-0.5)
    assert lp_surface_norm(np.full(7, 2.0), 3) == pytest.approx(2)
    with pytest.raises(ValueError):
        lp_surface_norm(d, "1/2")
    with pytest.raises(ValueError):
        lr_counting_norm(d, 0.5)


def test_norms_are_scale_safe():
    big = np.full(10, 1e200)
    assert lr_counting_norm(big, 3) == pytest.approx(1e200 * 10 ** (1 / 3))


def test_dump_round_trips(tmp_path, F5):
    g = rand_grid(F5, 2)
    write_csv(g, tmp_path / "g.csv")
    assert np.array_equal(read_csv(F5, 2, tmp_path / "g.csv").values, g.values)
    write_binary(g, tmp_path / "g.bin")
    assert np.array_equal(read_binary(F5, 2, tmp_path / "g.bin").values, g.values)
    assert (tmp_path / "g.bin").stat().st_size == 25 * 16
