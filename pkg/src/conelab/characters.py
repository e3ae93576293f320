"""Additive and quadratic characters, Gauss sums, quadratic exponential sums."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .field import FieldSpec, Scalar


def additive_char(t: Scalar) -> complex:
    """e(t) = exp(2 pi i Tr(t) / p)."""
    return complex(t.spec.char_table[t.value])


def quadratic_char(t: Scalar) -> int:
    """eta(t) in {-1, 0, 1}; eta(0) = 0 by convention."""
    return int(t.spec.eta_table[t.value])


@dataclass(frozen=True)
class GaussValue:
    value: complex
    a: Scalar
    closed_form: complex


def gauss_sum(a: Scalar) -> GaussValue:
    """G_a = sum over t != 0 of eta(t) e(a t), evaluated directly."""
    spec = a.spec
    if a.value == 0:
        raise ValueError("Gauss sum needs a != 0")
    t = np.arange(1, spec.q)
    val = complex(np.sum(spec.eta_table[t] * spec.char_table[spec.mul[a.value, t]]))
    closed = quadratic_char(a) * gauss_closed_form(spec)
    return GaussValue(val, a, closed)


def _gauss_parts(spec: FieldSpec) -> tuple[int, int]:
    """G_1 = sign * i**ipow * sqrt(q); returns (sign, ipow)."""
    sign = -1 if (spec.ell - 1) % 2 else 1
    ipow = 0 if spec.p % 4 == 1 else spec.ell % 4
    return sign, ipow


def gauss_closed_form(spec: FieldSpec) -> complex:
    sign, ipow = _gauss_parts(spec)
    return sign * (1j) ** ipow * np.sqrt(spec.q)


def gauss_power(spec: FieldSpec, m: int) -> complex:
    """G_1**m computed from the closed form with exact sign bookkeeping.

    For even ``m`` the result is an exact integer (stored as a complex with
    zero imaginary part); for odd ``m`` it is an exact unit times q**(m/2).
    """
    if m < 0:
        raise ValueError("negative powers are not needed")
    sign, ipow = _gauss_parts(spec)
    unit = [1, 1j, -1, -1j][(ipow * m) % 4] * (sign**m)
    if m % 2 == 0:
        mag = spec.q ** (m // 2)
    else:
        mag = spec.q ** (m // 2) * np.sqrt(spec.q)
    return complex(unit) * mag


def gauss_power_sign(spec: FieldSpec, n: int) -> complex:
    """G_1**(n-2); equals -q**((n-2)/2) when q = 3 mod 4 and n = 0 mod 4."""
    return gauss_power(spec, n - 2)


def quad_exp_sum(s: Scalar, beta, brute: bool = False) -> complex:
    """sum over alpha in F^k of e(s alpha.alpha + beta.alpha).

    Closed form eta(s)^k G_1^k e(||beta|| / (-4s)); ``brute=True`` sums all
    q**k terms instead.
    """
    spec = s.spec
    if s.value == 0:
        raise ValueError("s must be nonzero")
    beta = np.asarray(beta, dtype=np.int64)
    k = len(beta)
    if k < 1:
        raise ValueError("k must be >= 1")
    if brute:
        total = 0j
        for alpha in itertools.product(range(spec.q), repeat=k):
            a = np.array(alpha)
            arg = spec.add[spec.mul[s.value, spec.norm(a)], spec.dot(beta, a)]
            total += spec.char_table[arg]
        return complex(total)
    four = spec.code(4)
    denom = spec.neg[spec.mul[four, s.value]]
    arg = spec.mul[spec.norm(beta), spec.inv[denom]]
    eta_s = quadratic_char(s)
    return complex(eta_s**k * gauss_power(spec, k) * spec.char_table[arg])


def char_sum(a: Scalar) -> complex:
    """sum over t in F of e(a t)."""
    spec = a.spec
    return complex(np.sum(spec.char_table[spec.mul[a.value, np.arange(spec.q)]]))


def square_sum(a: Scalar) -> complex:
    """sum over s in F of e(a s^2)."""
    spec = a.spec
    return complex(np.sum(spec.char_table[spec.mul[a.value, spec.sq]]))


def eta_sum(a: Scalar) -> int:
    """sum over t != 0 of eta(a t)."""
    spec = a.spec
    return int(np.sum(spec.eta_table[spec.mul[a.value, np.arange(1, spec.q)]]))
