"""Null systems, maximal isotropic subspaces, the subspace Omega in the cone,
and zero-incidence point/sphere families."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .cone import cone_equation
from .field import DEFAULT_BUDGET, FieldSpec, Subspace, enumerate_points, rank, span


@dataclass(frozen=True, eq=False)
class NullSystem:
    """Mutually orthogonal, nonzero, linearly independent null vectors in F^m."""

    spec: FieldSpec
    m: int
    vectors: np.ndarray

    @property
    def k(self) -> int:
        return len(self.vectors)

    def verify(self) -> bool:
        V = self.vectors
        if len(V) == 0:
            return True
        if not np.all(np.any(V, axis=1)):
            return False
        if np.any(self.spec.dot_matrix(V, V)):
            return False
        return rank(self.spec, V) == len(V)


def null_vectors(spec: FieldSpec, m: int, budget: int | None = DEFAULT_BUDGET) -> np.ndarray:
    """All nonzero x in F^m with ||x|| = 0, in canonical order."""
    X = enumerate_points(spec, m, budget)
    return X[1:][spec.norm(X[1:]) == 0]


def find_null_system(spec: FieldSpec, m: int, k: int,
                     budget: int | None = DEFAULT_BUDGET) -> NullSystem | None:
    """Depth-first search for k mutually orthogonal null vectors; None if none exist.

    Candidates are visited in canonical order, so the result is deterministic.
    """
    if m < 1 or k < 1:
        raise ValueError("need m >= 1 and k >= 1")
    if 2 * k > m:
        return None  # a totally isotropic subspace has dimension <= m/2
    cands = null_vectors(spec, m, budget)
    if len(cands) == 0:
        return None

    def dfs(chosen: list[int], pool: np.ndarray, echelon: np.ndarray) -> list[int] | None:
        if len(chosen) == k:
            return chosen
        for pos, ci in enumerate(pool):
            v = cands[ci]
            ech = np.vstack([echelon, v[None, :]])
            if rank(spec, ech) < len(chosen) + 1:
                continue
            rest = pool[pos + 1:]
            if len(rest):
                rest = rest[spec.dot(cands[rest], v[None, :]) == 0]
            if len(rest) < k - len(chosen) - 1:
                continue
            found = dfs(chosen + [int(ci)], rest, ech)
            if found is not None:
                return found
        return None

    found = dfs([], np.arange(len(cands)), np.zeros((0, m), dtype=np.int64))
    if found is None:
        return None
    system = NullSystem(spec, m, cands[found])
    assert system.verify()
    return system


def isotropic_dimension(spec: FieldSpec, m: int) -> int:
    """Dimension of a maximal subspace inside {||x|| = 0} in F^m."""
    if m % 2:
        return (m - 1) // 2
    half = m // 2
    eta_m1 = 1 if spec.minus_one_is_square else -1
    return half if eta_m1**half == 1 else half - 1


def max_isotropic_subspace(spec: FieldSpec, m: int, budget: int | None = DEFAULT_BUDGET) -> Subspace:
    dim = isotropic_dimension(spec, m)
    if dim == 0:
        return Subspace(spec, m, np.zeros((0, m), dtype=np.int64))
    system = find_null_system(spec, m, dim, budget)
    if system is None:
        raise RuntimeError(f"no isotropic subspace of dimension {dim} found in F^{m}")
    return span(spec, system.vectors)


def max_isotropic_dimension_search(spec: FieldSpec, m: int, budget: int | None = DEFAULT_BUDGET) -> int:
    """Largest k with a null system of size k, by exhaustive search."""
    k = 0
    while find_null_system(spec, m, k + 1, budget) is not None:
        k += 1
    return k


def omega_subspace(spec: FieldSpec, n: int, budget: int | None = DEFAULT_BUDGET) -> Subspace:
    """Omega = H x F x {0} inside C_n, H maximal isotropic in F^{n-2}."""
    if n < 3:
        raise ValueError("the cone needs n >= 3")
    H = max_isotropic_subspace(spec, n - 2, budget)
    rows = [np.concatenate([h, [0, 0]]) for h in H.basis]
    rows.append(np.array([0] * (n - 2) + [1, 0]))
    omega = span(spec, rows)
    pts = omega.points(budget)
    if not np.all(cone_equation(spec, pts)):
        raise AssertionError("Omega left the cone")
    return omega


# -- zero-incidence families -------------------------------------------------

@dataclass(frozen=True, eq=False)
class SharpInstance:
    spec: FieldSpec
    d: int
    k: int
    case: str
    P: np.ndarray
    centers: np.ndarray
    radii: np.ndarray
    expected: dict = dc_field(default_factory=dict)

    @property
    def q(self) -> int:
        return self.spec.q

    @property
    def num_spheres(self) -> int:
        return len(self.radii)

    def incidences(self) -> int:
        """Direct count of pairs (x, s) with ||x - a|| = r."""
        spec = self.spec
        total = 0
        for a, r in zip(self.centers, self.radii):
            total += int(np.count_nonzero(spec.norm(spec.vec_sub(self.P, a[None, :])) == r))
        return total


def sharpness_case(spec: FieldSpec, d: int) -> str:
    q3 = spec.q % 4 == 3
    if d % 2 == 0:
        return "1" if (d % 4 == 2 and q3) else "2"
    if not q3:
        return "3a"
    return "3b" if d % 4 == 1 else "3c"


def complement_dim(case: str, k: int) -> int:
    """Dimension of the block carrying the concentric spheres U."""
    return {"1": 4 * k - 2, "2": 4 * k, "3a": 2 * k + 1, "3b": 4 * k + 1, "3c": 4 * k - 1}[case]


def sharp_family(spec: FieldSpec, d: int, k: int = 1, case: str | None = None,
                 budget: int | None = DEFAULT_BUDGET) -> SharpInstance:
    """Points P and spheres S in F^d with I(P, S) = 0 and |P||S| ~ q^{d+1}.

    F^d splits as a null block (spanned by mutually orthogonal null vectors,
    giving B) and a complementary block of dimension ``complement_dim``
    carrying U, the points on (q+1)/2 concentric spheres about 0.  P = B + U
    and S are the spheres centered in B with the remaining radii.
    """
    auto = sharpness_case(spec, d)
    case = case or auto
    if case != auto:
        raise ValueError(f"(d={d}, q={spec.q}) belongs to case {auto}, not {case}")
    if k < 1:
        raise ValueError("k must be >= 1")
    u = complement_dim(case, k)
    b = d - u
    if u < 1 or b < 0 or b % 2:
        raise ValueError(f"k={k} does not fit d={d} in case {case}")
    q = spec.q
    if b:
        system = find_null_system(spec, b, b // 2, budget)
        if system is None:
            raise ValueError(f"no {b // 2} mutually orthogonal null vectors in F^{b}")
        B = span(spec, system.vectors).points(budget)
    else:
        B = np.zeros((1, 0), dtype=np.int64)

    u_radii = np.arange(1, (q + 1) // 2 + 1)  # first (q+1)/2 nonzero codes
    R = np.setdiff1d(np.arange(q), u_radii)
    Y = enumerate_points(spec, u, budget)
    U = Y[np.isin(spec.norm(Y), u_radii)]

    P =np.concatenate([np.repeat(B, len(U), axis=0), np.tile(U, (len(B), 1))], axis=1)
    centers = np.concatenate([np.repeat(B, len(R), axis=0),
                              np.zeros((len(B) * len(R), u), dtype=np.int64)], axis=1)
    radii = np.tile(R, len(B))
    expected = {
        "num_spheres": q ** (b // 2) * (q - 1) // 2,
        "num_points": q ** (b // 2) * len(U),
        "u_dim": u,
        "null_dim": b,
    }
    return SharpInstance(spec, d, k, case, P, centers, radii, expected)
