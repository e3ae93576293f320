"""Weighted point-sphere incidences and their lift to the cone C_{d+2}.

A sphere S_d(a, r) = {x : ||x - a|| = r} lifts to the punctured line
t(-2a, 1, ||a|| - r), t != 0, and a point x to lambda(x, ||x||, 1); the dot
product of the two is t lambda (||x - a|| - r).  The incidence deviation is
then controlled by the cone energy
    E = sum over x in C_{d+2} of |(w' 1_{S'})^(x)|^2,
which equals q^{d+2} sum_{m, m'} w'(m) conj(w'(m')) C^check(m - m').

The explicit constant used for the incidence bound is traced as follows.
From the exact identity,
    |I_w - |P| sum w / q| <= |P'|^{1/2} E^{1/2} / (q (q - 1))
                           = |P|^{1/2} E^{1/2} / (q sqrt(q - 1)).
In each parity case and inside its |S| threshold the regime bound gives
E <= kappa * 2 q^{d+2} sum |w|^2, where kappa = 1 except in case 1 with
signed or complex weights: there the negative middle term is only signed
for w >= 0, so w is split into its nonnegative parts (kappa = 2 for real,
4 for complex w).  Hence
    |I_w - |P| sum w / q| <= sqrt(2 kappa q / (q - 1)) q^{(d-1)/2} |P|^{1/2} ||w||_2
and with q >= 3 the constant is C = sqrt(3 kappa): sqrt(3) < 2 for
nonnegative weights and every case-2/3 weight, 2 sqrt(3) for complex
weights in case 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .cone import cone_enumerate, cone_ift_closed, cone_ift_table, dual_cone_mask
from .field import DEFAULT_BUDGET, BudgetExceeded, FieldSpec, make_field, point_index
from .spectral import GridFn, fourier

PAIR_BUDGET = 25_000_000


@dataclass(frozen=True, eq=False)
class WeightedFamily:
    """Spheres (center, radius) with one complex weight each."""

    spec: FieldSpec
    centers: np.ndarray
    radii: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=np.int64)
        c = c.reshape(len(self.radii), c.shape[-1] if c.ndim == 2 else -1)
        r = np.asarray(self.radii, dtype=np.int64)
        w = np.asarray(self.weights, dtype=complex)
        if len(w) != len(r):
            raise ValueError("one weight per sphere")
        keys = np.concatenate([c, r[:, None]], axis=1)
        if len(np.unique(keys, axis=0)) != len(keys):
            raise ValueError("duplicate sphere (a, r)")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "weights", w)

    @property
    def d(self) -> int:
        return self.centers.shape[1]

    def __len__(self):
        return len(self.radii)

    @classmethod
    def unit(cls, spec, centers, radii):
        return cls(spec, centers, radii, np.ones(len(radii)))


@dataclass(frozen=True, eq=False)
class LiftedFamily:
    spec: FieldSpec
    points: np.ndarray   # ((q-1)|S|, d+2), ordered sphere-major
    weights: np.ndarray
    orbit: np.ndarray    # sphere index of each lifted point


@dataclass(frozen=True, eq=False)
class LiftedPoints:
    spec: FieldSpec
    points: np.ndarray


def incidence_weighted(spec: FieldSpec, P, family: WeightedFamily) -> complex:
    """I_w(P, S) = sum over incident pairs of w(s)."""
    P = np.asarray(P, dtype=np.int64).reshape(-1, family.d) if len(P) else np.zeros((0, family.d), np.int64)
    if len(P) and P.shape[1] != family.d:
        raise ValueError("dimension mismatch between points and spheres")
    if len(P) == 0 or len(family) == 0:
        return 0j
    total = 0j
    step = max(1, PAIR_BUDGET // max(1, len(P) * family.d))
    for s in range(0, len(family), step):
        a = family.centers[s:s + step]
        diff = spec.vec_sub(P[None, :, :], a[:, None, :])
        hit = spec.norm(diff) == family.radii[s:s + step, None]
        total += complex(hit.sum(axis=1) @ family.weights[s:s + step])
    return total


def incidence_count(spec: FieldSpec, P, centers, radii) -> int:
    fam = WeightedFamily.unit(spec, centers, radii)
    return int(round(incidence_weighted(spec, P, fam).real))


def lift(family: WeightedFamily) -> LiftedFamily:
    spec = family.spec
    if family.d < 1:
        raise ValueError("need d >= 1")
    a, r = family.centers, family.radii
    two = spec.code(2)
    base = np.concatenate([
        spec.neg[spec.mul[two, a]],
        np.ones((len(r), 1), dtype=np.int64),
        spec.vec_sub(spec.norm(a), r)[:, None],
    ], axis=1)
    t = np.arange(1, spec.q)
    pts = spec.mul[t[None, :, None], base[:, None, :]].reshape(-1, family.d + 2)
    orbit = np.repeat(np.arange(len(r)), spec.q - 1)
    return LiftedFamily(spec, pts, family.weights[orbit], orbit)


def lift_points(spec: FieldSpec, P) -> LiftedPoints:
    P = np.asarray(P, dtype=np.int64)
    base = np.concatenate([P, spec.norm(P)[:, None], np.ones((len(P), 1), dtype=np.int64)], axis=1)
    lam = np.arange(1, spec.q)
    pts = spec.mul[lam[None, :, None], base[:, None, :]].reshape(-1, P.shape[1] + 2)
    return LiftedPoints(spec, pts)


def pair_kernel(spec: FieldSpec, points) -> np.ndarray:
    """C^check(m - m') for all pairs of lifted points (closed form)."""
    M = np.asarray(points, dtype=np.int64)
    if len(M) ** 2 > PAIR_BUDGET:
        raise BudgetExceeded(f"{len(M)}^2 pairs exceeds pair budget {PAIR_BUDGET}")
    diff = spec.vec_sub(M[:, None, :], M[None, :, :])
    return cone_ift_closed(spec, diff)


def cone_energy(lifted: LiftedFamily, mode: str = "closed",
                budget: int | None = DEFAULT_BUDGET) -> float:
    """sum over x in C_{d+2} of |(w' 1_{S'})^(x)|^2."""
    spec = lifted.spec
    n = lifted.points.shape[1]
    w = lifted.weights
    if len(w) == 0 or not np.any(w):
        return 0.0
    if mode == "closed":
        K = pair_kernel(spec, lifted.points)
        val = spec.q**n * np.real(np.conj(w) @ K @ w)
        return float(val)
    if mode != "brute":
        raise ValueError(f"unknown mode {mode!r}")
    if budget is not None and spec.q**n > budget:
        raise BudgetExceeded(f"grid of {spec.q ** n} points exceeds budget {budget}")
    grid = np.zeros(spec.q**n, dtype=complex)
    np.add.at(grid, point_index(spec, lifted.points), w)
    hat = fourier(GridFn(spec, n, grid), budget=budget).values
    cone = cone_enumerate(spec, n, budget)
    return float(np.sum(np.abs(hat[cone.indices]) ** 2))


# -- checks ----------------------------------------------------------------

def incidence_identity_check(spec: FieldSpec, P, family: WeightedFamily, energy: float | None = None,
                tol: float = 1e-8) -> dict:
    """Exact lifted-sum identity for I_w plus its Cauchy-Schwarz consequence."""
    q = spec.q
    P = np.asarray(P, dtype=np.int64).reshape(-1, family.d)
    I = incidence_weighted(spec, P, family)
    main = len(P) / q * complex(np.sum(family.weights))
    lifted = lift(family)
    Pp = lift_points(spec, P).points
    if len(Pp) and len(lifted.points):
        phases = spec.char_table[spec.dot_matrix(Pp, lifted.points)]
        osc = complex(np.sum(phases @ lifted.weights)) / (q * (q - 1))
    else:
        osc = 0j
    residual = abs(I - (main + osc))
    scale = max(1.0, abs(I), abs(main))
    if energy is None:
        energy = cone_energy(lifted) if len(family) else 0.0
    dev = abs(I - main)
    cs_bound = math.sqrt(len(P)) * math.sqrt(max(energy, 0.0)) / (q * math.sqrt(q - 1))
    c_factor = math.sqrt(q / (q - 1))
    loose = c_factor * q**-1.5 * math.sqrt(len(P)) * math.sqrt(max(energy, 0.0))
    return {
        "incidence": [I.real, I.imag],
        "main_term": [main.real, main.imag],
        "oscillatory_term": [osc.real, osc.imag],
        "identity_residual": residual,
        "identity_ok": bool(residual <= tol * scale),
        "deviation": dev,
        "energy": energy,
        "cs_bound": cs_bound,
        "cs_bound_q_three_halves": loose,
        "cs_ok": bool(dev <= cs_bound * (1 + 1e-9) + 1e-9),
    }


def parity_case(spec: FieldSpec, d: int) -> int:
    if d % 2:
        if d < 3:
            raise ValueError("odd case needs d >= 3")
        return 3
    return 1 if (d % 4 == 2 and spec.q % 4 == 3) else 2


def size_threshold(spec: FieldSpec, d: int) -> float:
    case = parity_case(spec, d)
    q = spec.q
    return {1: q ** (d / 2), 2: q ** ((d - 2) / 2), 3: q ** ((d - 1) / 2)}[case]


def regime_bound(spec: FieldSpec, d: int, num_spheres: int) -> float:
    """Coefficient B with E <= B * sum |w|^2 for nonnegative w (case proofs)."""
    q = spec.q
    case = parity_case(spec, d)
    mid = {1: q ** ((d + 4) / 2), 2: q ** ((d + 6) / 2), 3: q ** ((d + 5) / 2)}[case]
    return min(q ** (d + 2) + mid * num_spheres, float(q ** (d + 3)))


def weight_kind(w) -> str:
    w = np.asarray(w, dtype=complex)
    if np.all(w.imag == 0):
        return "nonnegative" if np.all(w.real >= 0) else "real"
    return "complex"


def kappa(case: int, kind: str) -> int:
    if case != 1:
        return 1
    return {"nonnegative": 1, "real": 2, "complex": 4}[kind]


def incidence_constant(case: int, kind: str) -> float:
    return math.sqrt(3 * kappa(case, kind))


def split_weights(w) -> list[np.ndarray]:
    """w = (a+ - a-) + i (b+ - b-), the four nonnegative parts."""
    w = np.asarray(w, dtype=complex)
    re, im = w.real, w.imag
    return [np.maximum(re, 0), np.maximum(-re, 0), np.maximum(im, 0), np.maximum(-im, 0)]


def energy_decomposition(spec: FieldSpec, lifted: LiftedFamily) -> dict:
    """The three-term split of the energy for even d (cases 1 and 2).

    diag = q^{d+1} sum |w'|^2, on = sum over m - m' in C^* of w' conj(w'),
    off = the same over m - m' not in C^*; the energy equals
    diag + q^{d+2} (dual_value * on + off_value * off) with the closed-form
    kernel values.
    """
    n = lifted.points.shape[1]
    d = n - 2
    if d % 2:
        raise ValueError("the signed decomposition needs even d")
    q = spec.q
    w = lifted.weights
    M = lifted.points
    diff = spec.vec_sub(M[:, None, :], M[None, :, :])
    on = dual_cone_mask(spec, diff)
    outer = np.outer(w, np.conj(w))
    s_on = complex(outer[on].sum())
    s_off = complex(outer[~on].sum())
    table = cone_ift_table(spec, n)
    diag = q ** (d + 1) * float(np.sum(np.abs(w) ** 2))
    middle = q**n * float(table.dual) * s_on
    last = q**n * float(table.off) * s_off
    return {"diag": diag, "middle": middle, "last": last, "sum_on": s_on, "sum_off": s_off,
            "total": diag + middle.real + last.real}


def goodsize_check(spec: FieldSpec, family: WeightedFamily, tol: float = 1e-8) -> dict:
    """Energy versus the regime bound, with the signed decomposition for even d."""
    d = family.d
    case = parity_case(spec, d)
    q = spec.q
    lifted = lift(family)
    E = cone_energy(lifted)
    w2 = float(np.sum(np.abs(family.weights) ** 2))
    kind = weight_kind(family.weights)
    B = regime_bound(spec, d, len(family))
    bound = kappa(case, kind) * B * w2
    out = {"case": case, "energy": E, "weight_kind": kind, "sum_w2": w2,
           "regime_bound": bound, "bound_ok": bool(E <= bound * (1 + 1e-9) + 1e-9),
           "plancherel_cap": float(q ** (d + 3)) * w2,
           "plancherel_ok": bool(E <= q ** (d + 3) * w2 * (1 + 1e-9) + 1e-9)}
    if d % 2 == 0 and len(family):
        dec = energy_decomposition(spec, lifted)
        residual = abs(dec["total"] - E)
        out.update({
            "diag": dec["diag"],
            "middle": dec["middle"].real,
            "last": dec["last"].real,
            "decomposition_residual": residual,
            "decomposition_ok": bool(residual <= tol * max(1.0, abs(E), dec["diag"])),
        })
        if kind == "nonnegative":
            # case 1: middle term <= 0; case 2: last term <= 0
            signed = dec["middle"].real if case == 1 else dec["last"].real
            out["sign_ok"] = bool(signed <= tol * max(1.0, dec["diag"]))
            # dropping the signed term leaves a single sum bounded by (sum w')^2
            coeff = q ** (d / 2) if case == 1 else (q - 1) * q ** (d / 2)
            direct = dec["diag"] + coeff * float(np.sum(lifted.weights.real)) ** 2
            out["intermediate_bound"] = float(direct)
            out["intermediate_ok"] = bool(E <= direct * (1 + 1e-9) + 1e-9)
    if d % 2 == 1 and len(family):
        w = lifted.weights
        inter = q ** (d + 1) * float(np.sum(np.abs(w) ** 2)) + q ** ((d + 1) / 2) * float(np.sum(np.abs(w))) ** 2
        final = (q ** (d + 2) + q ** ((d + 5) / 2) * len(family)) * w2
        out.update({"intermediate_bound": inter, "intermediate_ok": bool(E <= inter * (1 + 1e-9) + 1e-9),
                    "final_bound": final, "final_ok": bool(E <= final * (1 + 1e-9) + 1e-9)})
    return out


def incidence_bound_check(spec: FieldSpec, P, family: WeightedFamily) -> dict:
    """|I_w - |P| sum w / q| against C q^{(d-1)/2} |P|^{1/2} ||w||_2."""
    d = family.d
    case = parity_case(spec, d)
    P = np.asarray(P, dtype=np.int64).reshape(-1, d)
    q = spec.q
    I = incidence_weighted(spec, P, family)
    main = len(P) / q * complex(np.sum(family.weights))
    dev = abs(I - main)
    kind = weight_kind(family.weights) if len(family) else "nonnegative"
    C = incidence_constant(case, kind)
    w2 = float(np.sum(np.abs(family.weights) ** 2))
    rhs = C * q ** ((d - 1) / 2) * math.sqrt(len(P)) * math.sqrt(w2)
    in_regime = len(family) <= size_threshold(spec, d)
    return {"case": case, "weight_kind": kind, "constant": C, "lhs": dev, "rhs": rhs,
            "ratio": dev / rhs if rhs else 0.0, "in_regime": bool(in_regime),
            "passed": bool(dev <= rhs * (1 + 1e-9) + 1e-9)}


def distance_set(spec: FieldSpec, E) -> set[int]:
    """{||x - y|| : x, y in E} as element codes."""
    E = np.asarray(E, dtype=np.int64)
    if len(E) == 0:
        return set()
    diff = spec.vec_sub(E[:, None, :], E[None, :, :])
    return set(np.unique(spec.norm(diff)).tolist())


# -- instance files ----------------------------------------------------------

def instance_to_json(spec: FieldSpec, P, family: WeightedFamily) -> dict:
    return {
        "d": family.d if len(family) else int(np.asarray(P).shape[1]),
        "q": spec.q,
        "p": spec.p,
        "ell": spec.ell,
        "modulus": list(spec.modulus),
        "points": np.asarray(P, dtype=np.int64).tolist(),
        "spheres": [{"center": c.tolist(), "radius": int(r)}
                    for c, r in zip(family.centers, family.radii)],
        "weights": [[float(w.real), float(w.imag)] for w in family.weights],
    }


def instance_from_json(data: dict | str):
    if isinstance(data, str):
        data = json.loads(data)
    spec = make_field(data["p"], data.get("ell", 1), data.get("modulus") or None)
    d = int(data["d"])
    P = np.asarray(data["points"], dtype=np.int64).reshape(-1, d)
    spheres = data["spheres"]
    centers = np.asarray([s["center"] for s in spheres], dtype=np.int64).reshape(-1, d)
    radii = np.asarray([s["radius"] for s in spheres], dtype=np.int64)
    raw = data.get("weights")
    weights = (np.ones(len(radii), dtype=complex) if raw is None
               else np.asarray([complex(a, b) for a, b in raw], dtype=complex))
    return spec, P, WeightedFamily(spec, centers, radii, weights)
