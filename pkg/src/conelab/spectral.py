"""Dense Fourier analysis on F^n.

Conventions: g_hat(xi) = sum_x e(-xi.x) g(x) and
f_check(x) = q^{-n} sum_xi e(xi.x) f(xi).  The fast path applies one
q x q character matrix per coordinate (cost n * q^{n+1}); the naive path
builds the full q^n x q^n kernel and is kept as an oracle for tiny grids.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .field import DEFAULT_BUDGET, BudgetExceeded, FieldSpec, enumerate_points

NAIVE_LIMIT = 3**6


@dataclass(frozen=True, eq=False)
class GridFn:
    """Complex function on F^n, values indexed by the canonical point encoding."""

    spec: FieldSpec
    dim: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.spec.q**self.dim,):
            raise ValueError(f"expected {self.spec.q**self.dim} values, got {vals.shape}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, spec: FieldSpec, dim: int) -> "GridFn":
        return cls(spec, dim, np.zeros(spec.q**dim, dtype=complex))

    @classmethod
    def indicator(cls, spec: FieldSpec, dim: int, indices) -> "GridFn":
        vals = np.zeros(spec.q**dim, dtype=complex)
        vals[np.asarray(indices, dtype=np.int64)] = 1.0
        return cls(spec, dim, vals)


@dataclass(frozen=True, eq=False)
class SurfaceMeasure:
    """Normalized counting measure on a finite support (points as codes)."""

    spec: FieldSpec
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.int64)
        if pts.ndim != 2 or len(pts) == 0:
            raise ValueError("support must be a nonempty (N, n) array")
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def indices(self) -> np.ndarray:
        return self.points @ (self.spec.q ** np.arange(self.dim, dtype=np.int64))


def _char_matrix(spec: FieldSpec, sign: int) -> np.ndarray:
    grid = spec.mul[np.arange(spec.q)[:, None], np.arange(spec.q)[None, :]]
    E = spec.char_table[grid]
    return E if sign > 0 else E.conj()


def _separable(spec: FieldSpec, dim: int, values: np.ndarray, sign: int) -> np.ndarray:
    M = _char_matrix(spec, sign)
    arr = values.reshape((spec.q,) * dim)
    for axis in range(dim):
        arr = np.moveaxis(np.tensordot(M, arr, axes=([1], [axis])), 0, axis)
    return arr.reshape(-1)


def _naive(spec: FieldSpec, dim: int, values: np.ndarray, sign: int) -> np.ndarray:
    if spec.q**dim > NAIVE_LIMIT:
        raise BudgetExceeded(f"naive transform limited to {NAIVE_LIMIT} points")
    X = enumerate_points(spec, dim)
    K = spec.char_table[spec.dot_matrix(X, X)]
    if sign < 0:
        K = K.conj()
    return K @ values


def _check(g: GridFn, budget: int | None):
    if budget is not None and g.spec.q**g.dim > budget:
        raise BudgetExceeded(f"grid of {g.spec.q**g.dim} points exceeds budget {budget}")


def fourier(g: GridFn, method: str = "separable", budget: int | None = DEFAULT_BUDGET) -> GridFn:
    _check(g, budget)
    run = _naive if method == "naive" else _separable
    return GridFn(g.spec, g.dim, run(g.spec, g.dim, g.values, -1))


def inverse_fourier(f: GridFn, method: str = "separable", budget: int | None = DEFAULT_BUDGET) -> GridFn:
    _check(f, budget)
    run = _naive if method == "naive" else _separable
    vals = run(f.spec, f.dim, f.values, +1) / f.spec.q**f.dim
    return GridFn(f.spec, f.dim, vals)


def extension(measure: SurfaceMeasure, f, method: str = "fourier",
              budget: int | None = DEFAULT_BUDGET) -> GridFn:
    """(f dsigma)^check(x) = (1/N) sum over support of f(xi) e(x.xi), at every x.

    ``method="fourier"`` embeds f on the grid and uses the fast inverse
    transform; ``method="direct"`` evaluates the defining sum in blocks.
    """
    spec, dim = measure.spec, measure.dim
    f = np.asarray(f, dtype=complex)
    if f.shape != (measure.size,):
        raise ValueError(f"f needs one value per support point ({measure.size}), got {f.shape}")
    total = spec.q**dim
    if budget is not None and total > budget:
        raise BudgetExceeded(f"grid of {total} points exceeds budget {budget}")
    if method == "direct":
        X = enumerate_points(spec, dim, budget)
        out = np.empty(total, dtype=complex)
        block = max(1, 2_000_000 // measure.size)
        for start in range(0, total, block):
            D = spec.dot_matrix(X[start:start + block], measure.points)
            out[start:start + block] = spec.char_table[D] @ f
        return GridFn(spec, dim, out / measure.size)
    grid = np.zeros(total, dtype=complex)
    np.add.at(grid, measure.indices, f)
    vals = _separable(spec, dim, grid, +1) / measure.size
    return GridFn(spec, dim, vals)


def restrict_fourier(measure: SurfaceMeasure, g: GridFn, budget: int | None = DEFAULT_BUDGET) -> np.ndarray:
    """g_hat evaluated on the support points (the adjoint of ``extension``)."""
    return fourier(g, budget=budget).values[measure.indices]


def _as_exponent(r) -> Fraction | float:
    if isinstance(r, float) and math.isinf(r):
        return math.inf
    if isinstance(r, str):
        if r.strip().lower() in ("inf", "infinity", "oo"):
            return math.inf
        return Fraction(r)
    return Fraction(r)


def lr_counting_norm(u: GridFn | np.ndarray, r) -> float:
    """(sum_x |u(x)|^r)^(1/r) with counting measure; max |u| for r = inf."""
    r = _as_exponent(r)
    vals = np.abs(u.values if isinstance(u, GridFn) else np.asarray(u))
    if r == math.inf:
        return float(vals.max(initial=0.0))
    if r < 1:
        raise ValueError("exponent must be >= 1")
    rf = float(r)
    top = vals.max(initial=0.0)
    if top == 0:
        return 0.0
    return float(top * np.sum((vals / top) ** rf) ** (1.0 / rf))


def lp_surface_norm(f, p) -> float:
    """((1/N) sum |f|^p)^(1/p) for normalized counting measure on N points."""
    p = _as_exponent(p)
    vals = np.abs(np.asarray(f, dtype=complex))
    if p == math.inf:
        return float(vals.max(initial=0.0))
    if p < 1:
        raise ValueError("exponent must be >= 1")
    pf = float(p)
    return float(np.mean(vals**pf) ** (1.0 / pf))


# -- dumps for cross-implementation checks ----------------------------------

def write_csv(g: GridFn, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "re", "im"])
        for i, v in enumerate(g.values):
            w.writerow([i, repr(float(v.real)), repr(float(v.imag))])


def read_csv(spec: FieldSpec, dim: int, path) -> GridFn:
    vals = np.zeros(spec.q**dim, dtype=complex)
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            vals[int(row["index"])] = complex(float(row["re"]), float(row["im"]))
    return GridFn(spec, dim, vals)


def write_binary(g: GridFn, path) -> None:
    """Raw little-endian complex128 values in index order."""
    Path(path).write_bytes(g.values.astype("<c16").tobytes())


def read_binary(spec: FieldSpec, dim: int, path) -> GridFn:
    return GridFn(spec, dim, np.frombuffer(Path(path).read_bytes(), dtype="<c16").copy())
