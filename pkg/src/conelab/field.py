"""Exact arithmetic in F_{p^ell} for odd p, plus vectors over it.

Elements are stored as integer codes in ``[0, q)``: the code of
``c_0 + c_1 x + ... + c_{ell-1} x^{ell-1}`` is ``sum c_i p**i``.  All
arithmetic goes through lookup tables built once per field, so bulk work is
plain numpy fancy indexing.  Points of F^n are integer arrays of codes; a
point's grid index is ``sum coords[i] * q**i`` (coordinate 0 fastest).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_BUDGET = 5_000_000


class BudgetExceeded(RuntimeError):
    """A requested enumeration is larger than the configured budget."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# -- polynomials over Z_p, coefficient lists low -> high --------------------

def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = [c % p for c in a]
    _poly_trim(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * c) % p
        _poly_trim(a)
    return a


def _is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Exhaustive check: no monic factor of degree <= deg/2."""
    deg = len(modulus) - 1
    for k in range(1, deg // 2 + 1):
        for tail in itertools.product(range(p), repeat=k):
            if not _poly_mod(modulus, list(tail) + [1], p):
                return False
    return True


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """A finite field F_q, q = p**ell, with precomputed operation tables."""

    p: int
    ell: int
    modulus: tuple[int, ...]
    q: int = dc_field(init=False)
    add: np.ndarray = dc_field(init=False, repr=False)
    mul: np.ndarray = dc_field(init=False, repr=False)
    neg: np.ndarray = dc_field(init=False, repr=False)
    inv: np.ndarray = dc_field(init=False, repr=False)
    sq: np.ndarray = dc_field(init=False, repr=False)
    trace_table: np.ndarray = dc_field(init=False, repr=False)
    is_sq: np.ndarray = dc_field(init=False, repr=False)
    eta_table: np.ndarray = dc_field(init=False, repr=False)
    char_table: np.ndarray = dc_field(init=False, repr=False)

    def __post_init__(self):
        p, ell = self.p, self.ell
        q = p**ell
        object.__setattr__(self, "q", q)
        digits = np.array([[(c // p**i) % p for i in range(ell)] for c in range(q)], dtype=np.int64)
        weights = p ** np.arange(ell, dtype=np.int64)

        add = (digits[:, None, :] + digits[None, :, :]) % p @ weights
        if ell == 1:
            mul = np.outer(np.arange(p), np.arange(p)) % p
        else:
            mul = np.empty((q, q), dtype=np.int64)
            for a in range(q):
                for b in range(a, q):
                    prod = np.convolve(digits[a], digits[b])
                    red = _poly_mod(prod.tolist(), self.modulus, p)
                    code = sum(c * p**i for i, c in enumerate(red))
                    mul[a, b] = mul[b, a] = code
        add = add.astype(np.int64)
        neg = ((-digits) % p) @ weights
        inv = np.zeros(q, dtype=np.int64)
        rows, cols = np.nonzero(mul == 1)
        inv[rows] = cols
        sq = mul[np.arange(q), np.arange(q)]

        # absolute trace t + t^p + ... + t^{p^{ell-1}}
        tr = np.arange(q)
        frob = np.arange(q)
        for _ in range(ell - 1):
            nxt = frob
            for _ in range(p - 1):
                nxt = mul[nxt, frob]
            frob = nxt
            tr = add[tr, frob]
        if np.any(tr >= p):
            raise ValueError("trace did not land in the prime field; modulus is invalid")

        is_sq = np.zeros(q, dtype=bool)
        is_sq[sq[1:]] = True
        is_sq[0] = False
        eta = np.where(is_sq, 1, -1).astype(np.int64)
        eta[0] = 0
        chars = np.exp(2j * np.pi * tr / p)

        for name, arr in [("add", add), ("mul", mul), ("neg", neg), ("inv", inv), ("sq", sq),
                          ("trace_table", tr), ("is_sq", is_sq), ("eta_table", eta),
                          ("char_table", chars)]:
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __repr__(self):
        if self.ell == 1:
            return f"F_{self.p}"
        return f"F_{self.q}[mod {list(self.modulus)}]"

    def __eq__(self, other):
        return (isinstance(other, FieldSpec) and self.p == other.p and self.ell == other.ell
                and self.modulus == other.modulus)

    def __hash__(self):
        return hash((self.p, self.ell, self.modulus))

    @property
    def minus_one_is_square(self) -> bool:
        return bool(self.is_sq[self.neg[1]])

    def element(self, value) -> "Scalar":
        """Build a Scalar from an integer (n * 1) or a coefficient list."""
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (list, tuple)):
            if len(value) > self.ell:
                raise ValueError("too many coefficients")
            return Scalar(self, sum((c % self.p) * self.p**i for i, c in enumerate(value)))
        return Scalar(self, int(value) % self.p)

    def from_code(self, code: int) -> "Scalar":
        if not 0 <= code < self.q:
            raise ValueError(f"code {code} outside [0, {self.q})")
        return Scalar(self, int(code))

    def code(self, value) -> int:
        return self.element(value).value

    def elements(self) -> list["Scalar"]:
        return [Scalar(self, c) for c in range(self.q)]

    # -- bulk vector helpers on code arrays -------------------------------

    def vec_add(self, x, y):
        return self.add[np.asarray(x), np.asarray(y)]

    def vec_sub(self, x, y):
        return self.add[np.asarray(x), self.neg[np.asarray(y)]]

    def scale(self, t, x):
        return self.mul[np.asarray(t), np.asarray(x)]

    def dot(self, x, y):
        """Dot product along the last axis, broadcasting the leading axes."""
        x = np.asarray(x)
        y = np.asarray(y)
        if self.ell == 1:
            return np.sum(x * y, axis=-1) % self.p
        prods = self.mul[x, y]
        acc = prods[..., 0]
        for i in range(1, prods.shape[-1]):
            acc = self.add[acc, prods[..., i]]
        return acc

    def dot_matrix(self, X, Y):
        """All pairwise dot products between rows of X (a, n) and Y (b, n)."""
        X = np.asarray(X, dtype=np.int64)
        Y = np.asarray(Y, dtype=np.int64)
        if self.ell == 1:
            return (X @ Y.T) % self.p
        acc = np.zeros((X.shape[0], Y.shape[0]), dtype=np.int64)
        for i in range(X.shape[1]):
            acc = self.add[acc, self.mul[X[:, i, None], Y[None, :, i]]]
        return acc

    def norm(self, x):
        """Sum-of-squares form ||x|| along the last axis."""
        return self.dot(x, x)


@dataclass(frozen=True)
class Scalar:
    """One element of a FieldSpec; supports the usual operators."""

    spec: FieldSpec
    value: int

    def _other(self, other) -> int:
        if isinstance(other, Scalar):
            if other.spec != self.spec:
                raise ValueError("field mismatch")
            return other.value
        return self.spec.code(other)

    def __add__(self, other):
        return Scalar(self.spec, int(self.spec.add[self.value, self._other(other)]))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return Scalar(self.spec, int(self.spec.add[self.value, self.spec.neg[o]]))

    def __rsub__(self, other):
        return Scalar(self.spec, self._other(other)) - self

    def __mul__(self, other):
        return Scalar(self.spec, int(self.spec.mul[self.value, self._other(other)]))

    __rmul__ = __mul__

    def __neg__(self):
        return Scalar(self.spec, int(self.spec.neg[self.value]))

    def inverse(self) -> "Scalar":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse")
        return Scalar(self.spec, int(self.spec.inv[self.value]))

    def __truediv__(self, other):
        return self * Scalar(self.spec, self._other(other)).inverse()

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.spec == other.spec and self.value == other.value
        if isinstance(other, int):
            return self.value == self.spec.code(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.spec, self.value))

    def __int__(self):
        return self.value

    @property
    def coeffs(self) -> tuple[int, ...]:
        p = self.spec.p
        return tuple((self.value // p**i) % p for i in range(self.spec.ell))

    def __repr__(self):
        if self.spec.ell == 1:
            return str(self.value)
        return f"{list(self.coeffs)}"


def first_irreducible(p: int, ell: int) -> list[int]:
    """The first monic irreducible of degree ell, ordering lower coefficients as base-p digits."""
    if ell < 2:
        raise ValueError("need ell >= 2")
    for code in range(p**ell):
        low = [(code // p**i) % p for i in range(ell)]
        if low[0] and _is_irreducible(low + [1], p):
            return low + [1]
    raise ValueError(f"no irreducible of degree {ell} over F_{p}")


def make_field(p: int, ell: int = 1, modulus: Sequence[int] | None = None) -> FieldSpec:
    """Validate parameters and build F_{p^ell}.

    ``modulus`` lists the coefficients of a monic irreducible polynomial of
    degree ``ell``, lowest degree first (x^2 + 1 is ``[1, 0, 1]``).
    """
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        raise ValueError("characteristic 2 is not supported")
    if ell < 1:
        raise ValueError("extension degree must be >= 1")
    if ell == 1:
        if modulus:
            raise ValueError("a modulus is only meaningful for ell > 1")
        return FieldSpec(p, 1, ())
    if modulus is None:
        raise ValueError("ell > 1 requires a modulus polynomial")
    mod = [int(c) % p for c in modulus]
    if len(mod) != ell + 1 or mod[-1] != 1:
        raise ValueError(f"modulus must be monic of degree {ell}")
    if not _is_irreducible(mod, p):
        raise ValueError(f"modulus {mod} is reducible over F_{p}")
    return FieldSpec(p, ell, tuple(mod))


def trace(t: Scalar) -> int:
    return int(t.spec.trace_table[t.value])


def is_square(t: Scalar) -> bool:
    if t.value == 0:
        raise ValueError("is_square is undefined at 0")
    return bool(t.spec.is_sq[t.value])


# -- points ------------------------------------------------------------------

def _check_budget(count: int, budget: int | None):
    if budget is not None and count > budget:
        raise BudgetExceeded(f"{count} points exceeds budget {budget}")


def enumerate_points(spec: FieldSpec, n: int, budget: int | None = DEFAULT_BUDGET) -> np.ndarray:
    """All q**n points as an (q**n, n) code array in canonical index order."""
    total = spec.q**n
    _check_budget(total, budget)
    idx = np.arange(total, dtype=np.int64)
    return np.stack([(idx // spec.q**i) % spec.q for i in range(n)], axis=1) if n else idx[:, None]


def point_index(spec: FieldSpec, pts) -> np.ndarray | int:
    pts = np.asarray(pts, dtype=np.int64)
    weights = spec.q ** np.arange(pts.shape[-1], dtype=np.int64)
    out = pts @ weights
    return int(out) if out.ndim == 0 else out


def index_point(spec: FieldSpec, idx, n: int) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64)
    return np.stack([(idx // spec.q**i) % spec.q for i in range(n)], axis=-1)


# -- linear algebra ----------------------------------------------------------

def row_reduce(spec: FieldSpec, vectors) -> np.ndarray:
    """Reduced row echelon form with zero rows dropped."""
    M = np.array(vectors, dtype=np.int64, copy=True)
    if M.ndim == 1:
        M = M[None, :]
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if M[i, c] != 0), None)
        if piv is None:
            continue
        M[[r, piv]] = M[[piv, r]]
        M[r] = spec.mul[spec.inv[M[r, c]], M[r]]
        for i in range(rows):
            if i != r and M[i, c] != 0:
                f = spec.neg[M[i, c]]
                M[i] = spec.add[M[i], spec.mul[f, M[r]]]
        r += 1
    return M[:r]


def rank(spec: FieldSpec, vectors) -> int:
    return len(row_reduce(spec, vectors))


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of F^n given by an independent basis."""

    spec: FieldSpec
    n: int
    basis: np.ndarray

    def __post_init__(self):
        if len(self.basis) and rank(self.spec, self.basis) != len(self.basis):
            raise ValueError("basis vectors are linearly dependent")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def size(self) -> int:
        return self.spec.q**self.dim

    def points(self, budget: int | None = DEFAULT_BUDGET) -> np.ndarray:
        _check_budget(self.size, budget)
        out = np.zeros((1, self.n), dtype=np.int64)
        for v in self.basis:
            multiples = self.spec.mul[np.arange(self.spec.q)[:, None], v[None, :]]
            out = self.spec.add[out[:, None, :], multiples[None, :, :]].reshape(-1, self.n)
        return out

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=np.int64)
        if not np.any(x):
            return True
        return rank(self.spec, np.vstack([self.basis, x[None, :]])) == self.dim


def span(spec: FieldSpec, vectors: Iterable) -> Subspace:
    V = np.array(list(vectors), dtype=np.int64)
    if V.ndim != 2 or len(V) == 0:
        raise ValueError("span needs a nonempty list of vectors of equal length")
    return Subspace(spec, V.shape[1], row_reduce(spec, V))
