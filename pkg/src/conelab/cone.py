"""The cone xi_{n-1} xi_n = xi_1^2 + ... + xi_{n-2}^2 and its inverse Fourier transform."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .characters import gauss_power
from .field import DEFAULT_BUDGET, FieldSpec, enumerate_points, point_index
from .spectral import SurfaceMeasure


def _real(z: complex) -> int:
    """Exact integer from an even power of G_1."""
    if abs(z.imag) > 1e-6 * max(1.0, abs(z)):
        raise ArithmeticError(f"expected a real value, got {z}")
    return int(round(z.real))


def cone_equation(spec: FieldSpec, xi) -> np.ndarray:
    """Boolean mask: does each row of ``xi`` lie on C_n."""
    xi = np.asarray(xi, dtype=np.int64)
    lhs = spec.mul[xi[..., -2], xi[..., -1]]
    return lhs == spec.norm(xi[..., :-2])


def cone_size_closed(spec: FieldSpec, n: int) -> int:
    """|C_n| = q^{n-1} + (q-1) G_1^{n-2} (even n), q^{n-1} (odd n)."""
    if n % 2:
        return spec.q ** (n - 1)
    return spec.q ** (n - 1) + (spec.q - 1) * _real(gauss_power(spec, n - 2))


@dataclass(frozen=True, eq=False)
class ConeVariety:
    spec: FieldSpec
    n: int
    points: np.ndarray

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def indices(self) -> np.ndarray:
        return point_index(self.spec, self.points)

    def contains(self, x) -> bool:
        return bool(cone_equation(self.spec, np.asarray(x)[None, :])[0])

    def measure(self) -> SurfaceMeasure:
        return SurfaceMeasure(self.spec, self.points)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index"] + [f"xi{i + 1}" for i in range(self.n)])
            for idx, row in zip(self.indices, self.points):
                w.writerow([int(idx)] + [int(c) for c in row])


def cone_enumerate(spec: FieldSpec, n: int, budget: int | None = DEFAULT_BUDGET) -> ConeVariety:
    if n < 3:
        raise ValueError("the cone needs n >= 3")
    X = enumerate_points(spec, n, budget)
    pts = X[cone_equation(spec, X)]
    pts.setflags(write=False)
    return ConeVariety(spec, n, pts)


def gamma(spec: FieldSpec, x) -> np.ndarray | int:
    """Gamma(x) = x_1^2 + ... + x_{n-2}^2 - 4 x_{n-1} x_n, vectorized over rows."""
    x = np.asarray(x, dtype=np.int64)
    if x.shape[-1] < 3:
        raise ValueError("Gamma needs dimension >= 3")
    four = spec.code(4)
    cross = spec.mul[four, spec.mul[x[..., -2], x[..., -1]]]
    out = spec.add[spec.norm(x[..., :-2]), spec.neg[cross]]
    return int(out) if np.ndim(out) == 0 else out


def dual_cone_mask(spec: FieldSpec, x) -> np.ndarray:
    """Membership in C_n^* = {Gamma = 0}."""
    return np.asarray(gamma(spec, x)) == 0


@dataclass(frozen=True)
class ConeIFTTable:
    """The few values C_n^check can take, as exact numerator / q^n.

    ``origin`` is the value at 0, ``dual`` on C_n^* minus 0, and for even n
    ``off`` is the value off C_n^*; for odd n the off-dual value is
    ``off * eta(-Gamma(x))``.
    """

    q: int
    n: int
    origin: Fraction
    dual: Fraction
    off: Fraction


def cone_ift_table(spec: FieldSpec, n: int) -> ConeIFTTable:
    q = spec.q
    qn = Fraction(1, q**n)
    if n % 2 == 0:
        g = _real(gauss_power(spec, n - 2))
        dual = (q - 1) * g * qn
        return ConeIFTTable(q, n, Fraction(1, q) + dual, dual, -g * qn)
    g = _real(gauss_power(spec, n - 1))
    return ConeIFTTable(q, n, Fraction(1, q), Fraction(0), g * qn)


def cone_ift_closed(spec: FieldSpec, x) -> np.ndarray | float:
    """C_n^check(x) from the closed form; real-valued, vectorized over rows."""
    x = np.asarray(x, dtype=np.int64)
    n = x.shape[-1]
    t = cone_ift_table(spec, n)
    G = np.asarray(gamma(spec, x))
    zero = ~np.any(x, axis=-1)
    on_dual = G == 0
    if n % 2 == 0:
        off = np.full(G.shape, float(t.off))
    else:
        off = float(t.off) * spec.eta_table[spec.neg[G]]
    out = np.where(on_dual, float(t.dual), off)
    out = np.where(zero, float(t.origin), out)
    return float(out) if out.ndim == 0 else out


def cone_ift_brute(cone: ConeVariety, x, block: int = 4096) -> np.ndarray | complex:
    """q^{-n} sum over xi in C_n of e(x.xi), summed directly."""
    spec = cone.spec
    x = np.asarray(x, dtype=np.int64)
    single = x.ndim == 1
    X = x[None, :] if single else x
    out = np.empty(len(X), dtype=complex)
    for start in range(0, len(X), block):
        D = spec.dot_matrix(X[start:start + block], cone.points)
        out[start:start + block] = spec.char_table[D].sum(axis=1)
    out /= spec.q**cone.n
    return complex(out[0]) if single else out


def sigma_ift(cone: ConeVariety, x) -> np.ndarray | float:
    """dsigma^check(x) = q^n / |C_n| * C_n^check(x)."""
    return cone_ift_closed(cone.spec, x) * (cone.spec.q**cone.n / cone.size)
