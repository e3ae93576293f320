"""Empirical extension estimates on the cone and the test families behind them.

The extension operator is E f = (f dsigma)^check with dsigma the normalized
counting measure on C_n; its adjoint (counting measure on F^n, L^2(dsigma) on
the cone) is g -> g_hat restricted to C_n.  R*(p -> r) is estimated from
below as a maximum of ||E f||_{L^r} / ||f||_{L^p(dsigma)} over finite families.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cone import ConeVariety, cone_enumerate, cone_ift_table, dual_cone_mask
from .constructions import omega_subspace
from .field import DEFAULT_BUDGET, FieldSpec, enumerate_points, make_field, point_index
from .spectral import GridFn, _as_exponent, extension, fourier, inverse_fourier, lp_surface_norm, lr_counting_norm

FAMILIES = ("singleton", "random-set", "random-complex", "omega", "gamma-adjacent", "ascent")
BOUNDED_SLOPE = 0.1
GROWING_SLOPE = 0.25
ASCENT_STEPS = 40


def thread_count() -> int:
    raw = os.environ.get("CONELAB_THREADS")
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


@dataclass(frozen=True, eq=False)
class TestFunction:
    """A function on the cone points (in the cone's canonical order)."""

    __test__ = False  # keep pytest from collecting this class

    kind: str
    values: np.ndarray
    descriptor: str = ""
    seed: int | None = None


@dataclass
class RatioReport:
    n: int
    p: str
    r: str
    seed: int
    trials: int
    qs: list
    per_q: list = dc_field(default_factory=list)
    slope: float = float("nan")
    family_slopes: dict = dc_field(default_factory=dict)
    classification: str = "inconclusive"

    @property
    def max_ratio(self) -> float:
        return max((row["max_ratio"] for row in self.per_q), default=0.0)

    def as_dict(self) -> dict:
        return {
            "kind": "restriction-sweep",
            "n": self.n, "p": self.p, "r": self.r, "seed": self.seed, "trials": self.trials,
            "qs": list(self.qs), "per_q": self.per_q, "max_ratio": self.max_ratio,
            "slope": self.slope, "family_slopes": self.family_slopes,
            "classification": self.classification,
        }


# -- ratios ----------------------------------------------------------------

def extension_ratio(cone: ConeVariety, f, p, r, budget: int | None = DEFAULT_BUDGET) -> float:
    """||(f dsigma)^check||_{L^r(dx)} / ||f||_{L^p(dsigma)}."""
    vals = f.values if isinstance(f, TestFunction) else np.asarray(f, dtype=complex)
    p, r = _as_exponent(p), _as_exponent(r)
    if p < 1 or r < 1:
        raise ValueError("exponents must be >= 1")
    denom = lp_surface_norm(vals, p)
    if denom == 0:
        raise ValueError("f vanishes identically")
    ext = extension(cone.measure(), vals, budget=budget)
    return lr_counting_norm(ext, r) / denom


def singleton_ratio_closed(q: int, n: int, size: int, p, r) -> float:
    """Every delta function gives |E delta| = 1/N on all q^n points."""
    p, r = _as_exponent(p), _as_exponent(r)
    num = 1.0 / size if r == math.inf else q ** (n / float(r)) / size
    den = 1.0 if p == math.inf else size ** (-1.0 / float(p))
    return num / den


def adjoint(cone: ConeVariety, g: np.ndarray) -> np.ndarray:
    """g_hat on the cone points; the adjoint of E for counting / L^2(dsigma)."""
    grid = GridFn(cone.spec, cone.n, g)
    return fourier(grid, budget=None).values[cone.indices]


def ascent(cone: ConeVariety, f0: np.ndarray, r, steps: int = ASCENT_STEPS) -> np.ndarray:
    """Power iteration f <- E*(|E f|^{r-2} E f) for the (2 -> r) ratio."""
    rf = float(_as_exponent(r))
    f = np.asarray(f0, dtype=complex)
    measure = cone.measure()
    for _ in range(steps):
        u = extension(measure, f, budget=None).values
        mag = np.abs(u)
        top = mag.max()
        if top == 0:
            break
        g = (mag / top) ** (rf - 2) * u
        nxt = adjoint(cone, g)
        norm = np.linalg.norm(nxt)
        if norm == 0:
            break
        f = nxt / norm
    return f


# -- structured test sets ----------------------------------------------------

def omega_indicator(cone: ConeVariety) -> np.ndarray:
    omega = omega_subspace(cone.spec, cone.n)
    pts = omega.points()
    return np.isin(cone.indices, point_index(cone.spec, pts)).astype(complex)


def gamma_testset(spec: FieldSpec, n: int) -> np.ndarray:
    """{x in F^{n-1} x D : x_{n-1} = (x_1^2 + ... + x_{n-2}^2) / (4 x_n)}, D the nonzero squares."""
    if n < 3:
        raise ValueError("need n >= 3")
    Y = enumerate_points(spec, n - 2, budget=None)
    D = np.flatnonzero(spec.is_sq[1:]) + 1
    four = spec.code(4)
    yy = np.repeat(Y, len(D), axis=0)
    s = np.tile(D, len(Y))
    last = spec.mul[spec.norm(yy), spec.inv[spec.mul[four, s]]]
    return np.concatenate([yy, last[:, None], s[:, None]], axis=1)


def gamma_indicator_grid(spec: FieldSpec, n: int) -> GridFn:
    return GridFn.indicator(spec, n, point_index(spec, gamma_testset(spec, n)))


def gamma_testset_ft_check(spec: FieldSpec, n: int, tol: float = 1e-8,
                           budget: int | None = DEFAULT_BUDGET) -> dict:
    """|Gamma_hat(xi)| = q^{(n-2)/2} (q - 1) / 2 at every cone point with xi_{n-1} != 0."""
    cone = cone_enumerate(spec, n, budget)
    hat = fourier(gamma_indicator_grid(spec, n), budget=budget).values[cone.indices]
    sel = cone.points[:, n - 2] != 0
    target = spec.q ** ((n - 2) / 2) * (spec.q - 1) / 2
    err = np.abs(np.abs(hat[sel]) - target)
    return {
        "q": spec.q, "n": n, "gamma_size": len(gamma_testset(spec, n)),
        "points_checked": int(sel.sum()), "target": target,
        "max_error": float(err.max(initial=0.0)), "passed": bool(err.max(initial=0.0) <= tol),
        "value_at_origin": float(abs(hat[~np.any(cone.points, axis=1)][0])),
    }


def gamma_adjacent(cone: ConeVariety) -> np.ndarray:
    """conj(Gamma_hat) on the cone: the extension-side partner of the Gamma test set."""
    hat = fourier(gamma_indicator_grid(cone.spec, cone.n), budget=None).values
    return np.conj(hat[cone.indices])


# -- sweeps -------------------------------------------------------------------

def _dyadic_sizes(N: int) -> list[int]:
    return [2**j for j in range(int(math.log2(N)) + 1)]


def _family_tasks(families, trials: int, N: int):
    tasks = []
    for fam in families:
        if fam in ("random-set", "random-complex"):
            tasks += [(fam, t) for t in range(trials)]
        elif fam == "ascent":
            tasks += [(fam, t) for t in range(4)]
        else:
            tasks.append((fam, 0))
    return tasks


def _run_task(cone: ConeVariety, fam: str, t: int, p, r, seq: np.random.SeedSequence,
              cache: dict) -> tuple[float, str]:
    N = cone.size
    rng = np.random.default_rng(seq)
    if fam == "singleton":
        f = np.zeros(N, dtype=complex)
        f[0] = 1
        return extension_ratio(cone, f, p, r, budget=None), "delta at 0"
    if fam == "random-set":
        sizes = _dyadic_sizes(N)
        size = sizes[t % len(sizes)]
        f = np.zeros(N, dtype=complex)
        f[rng.choice(N, size=size, replace=False)] = 1
        return extension_ratio(cone, f, p, r, budget=None), f"random set of size {size}"
    if fam == "random-complex":
        f = rng.normal(size=N) + 1j * rng.normal(size=N)
        return extension_ratio(cone, f, p, r, budget=None), "gaussian complex"
    if fam == "omega":
        return extension_ratio(cone, cache["omega"], p, r, budget=None), "Omega indicator"
    if fam == "gamma-adjacent":
        return extension_ratio(cone, cache["gamma"], p, r, budget=None), "conj Gamma_hat on cone"
    if fam == "ascent":
        starts = [cache["omega"], np.ones(N, dtype=complex), cache["gamma"],
                  rng.normal(size=N) + 1j * rng.normal(size=N)]
        names = ["Omega", "constant", "Gamma", "random"]
        f = ascent(cone, starts[t % 4], r)
        return extension_ratio(cone, f, p, r, budget=None), f"ascent from {names[t % 4]}"
    raise ValueError(f"unknown family {fam!r}")


def fit_slope(qs, values) -> float:
    """Least-squares slope of log(value) against log(q)."""
    if len(qs) < 2:
        return float("nan")
    x = np.log(np.asarray(qs, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def classify(slope: float) -> str:
    if slope < BOUNDED_SLOPE:
        return "bounded"
    if slope > GROWING_SLOPE:
        return "growing"
    return "inconclusive"


def sweep_restriction(qs, n: int, p, r, families=FAMILIES, trials: int = 200, seed: int = 0,
                      budget: int | None = DEFAULT_BUDGET, threads: int | None = None) -> RatioReport:
    """Per-q maxima of the extension ratio over the requested families."""
    families = list(families)
    if not families:
        raise ValueError("empty family list")
    for fam in families:
        if fam not in FAMILIES:
            raise ValueError(f"unknown family {fam!r}")
    if "ascent" in families and _as_exponent(p) != 2:
        raise ValueError("the ascent family is defined for p = 2")
    threads = threads or thread_count()
    root = np.random.SeedSequence(seed)
    report = RatioReport(n=n, p=str(_as_exponent(p)), r=str(_as_exponent(r)),
                         seed=seed, trials=trials, qs=list(qs))
    for qi, q in enumerate(qs):
        spec = make_field(q)
        cone = cone_enumerate(spec, n, budget)
        cache = {}
        if "omega" in families or "ascent" in families:
            cache["omega"] = omega_indicator(cone)
        if "gamma-adjacent" in families or "ascent" in families:
            cache["gamma"] = gamma_adjacent(cone)
        tasks = _family_tasks(families, trials, cone.size)
        seqs = np.random.SeedSequence(root.generate_state(1)[0] + qi).spawn(len(tasks))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda a: _run_task(cone, a[0][0], a[0][1], p, r, a[1], cache),
                                    zip(tasks, seqs)))
        fam_max: dict[str, float] = {}
        best, best_desc = -1.0, ""
        for (fam, _), (ratio, desc) in zip(tasks, results):
            if ratio > fam_max.get(fam, -1.0):
                fam_max[fam] = ratio
            if ratio > best:
                best, best_desc = ratio, f"{fam}: {desc}"
        report.per_q.append({"q": q, "cone_size": cone.size, "max_ratio": best,
                             "argmax": best_desc, "families": fam_max})
    report.slope = fit_slope(qs, [row["max_ratio"] for row in report.per_q])
    report.family_slopes = {fam: fit_slope(qs, [row["families"][fam] for row in report.per_q])
                            for fam in families}
    report.classification = classify(report.slope)
    return report


# -- necessary conditions ---------------------------------------------------------

def necessary_r(p, n: int, k: int) -> Fraction | float:
    """Least r allowed by a k-dimensional subspace inside a variety of size ~ q^{n-1}."""
    p = _as_exponent(p)
    if k >= n - 1:
        raise ValueError("need k < n - 1")
    if p == 1:
        return math.inf
    if p == math.inf:
        return Fraction(n - k, n - 1 - k)
    return p * (n - k) / ((p - 1) * (n - 1 - k))


def omega_dimension(spec: FieldSpec, n: int) -> int:
    from .constructions import isotropic_dimension
    return isotropic_dimension(spec, n - 2) + 1


def corner_points(n: int, minus_one_square: bool) -> list[tuple[Fraction, Fraction]]:
    """Vertices of the region of (1/p, 1/r) left open by the necessary conditions."""
    top = Fraction(n - 2, 2 * n - 2)
    if n % 2:
        x = Fraction(n * n - 3 * n + 4, 2 * n * n - 4 * n + 2)
    elif n % 4 == 2 or minus_one_square:
        x = top
    else:
        x = Fraction(n * n - 2 * n + 4, 2 * n * n - 2 * n)
    return [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)), (x, top), (Fraction(0), top)]


def gamma_necessary_r(n: int) -> Fraction:
    return Fraction(2 * n - 2, n - 2)


def omega_growth_exponent(n: int, k: int, p, r) -> float:
    """Predicted exponent of q in the Omega-indicator ratio, |Omega| = q^k."""
    p, r = float(_as_exponent(p)), float(_as_exponent(r))
    inv_r = 0.0 if math.isinf(r) else 1 / r
    inv_p = 0.0 if math.isinf(p) else 1 / p
    return (k - n + 1) * (1 - inv_p) + (n - k) * inv_r


def omega_witness(qs, n: int, p, r) -> dict:
    """Measured Omega-indicator ratios, their fitted slope and the predicted exponent."""
    ratios, ks = [], []
    for q in qs:
        spec = make_field(q)
        cone = cone_enumerate(spec, n)
        ratios.append(extension_ratio(cone, omega_indicator(cone), p, r, budget=None))
        ks.append(omega_dimension(spec, n))
    slope = fit_slope(qs, ratios)
    return {"qs": list(qs), "ratios": ratios, "omega_dims": ks, "slope": slope,
            "predicted": [omega_growth_exponent(n, k, p, r) for k in ks],
            "classification": classify(slope)}


# -- L^2 estimate for characteristic functions ---------------------------------------

@dataclass(frozen=True)
class L2CharRecord:
    size: int
    M: Fraction
    M1: Fraction
    M2: Fraction
    M3: Fraction
    bound: Fraction
    regime: str
    pairs_on: int
    pairs_off: int

    @property
    def passed(self) -> bool:
        return self.M <= self.bound and self.M2 <= 0 and 0 <= self.M3 <= self.bound - self.size

    def as_dict(self) -> dict:
        return {"size": self.size, "M": float(self.M), "M1": float(self.M1), "M2": float(self.M2),
                "M3": float(self.M3), "bound": float(self.bound), "regime": self.regime,
                "passed": self.passed}


def difference_counts(spec: FieldSpec, n: int, G, method: str = "fourier") -> tuple[int, int]:
    """(#{(x, y) in G^2 : x - y in C^*}, #{the rest}), diagonal included."""
    G = np.asarray(G, dtype=np.int64).reshape(-1, n)
    total = len(G) ** 2
    if method == "pairs":
        on = 0
        for start in range(0, len(G), 512):
            diff = spec.vec_sub(G[start:start + 512, None, :], G[None, :, :])
            on += int(dual_cone_mask(spec, diff).sum())
        return on, total - on
    grid = GridFn.indicator(spec, n, point_index(spec, G))
    hat = fourier(grid, budget=None).values
    auto = inverse_fourier(GridFn(spec, n, np.abs(hat) ** 2), budget=None).values.real
    counts = np.rint(auto).astype(np.int64)
    on = int(counts[_dual_mask(spec, n)].sum())
    return on, total - on


@lru_cache(maxsize=16)
def _dual_mask(spec: FieldSpec, n: int) -> np.ndarray:
    return dual_cone_mask(spec, enumerate_points(spec, n, budget=None))


def l2_regime(q: int, n: int, size: int) -> str:
    if size < q ** (n / 2):
        return "small"
    if size < q ** ((n + 2) / 2):
        return "medium"
    return "large"


def l2_char_estimate(spec: FieldSpec, n: int, G, method: str = "fourier") -> L2CharRecord:
    """M = q^{-n+1} sum_{xi in C_n} |G_hat(xi)|^2 split as |G| + M2 + M3 exactly."""
    q = spec.q
    if q % 4 != 3 or n % 4 != 0:
        raise ValueError("needs q = 3 mod 4 and n = 0 mod 4")
    G = np.unique(np.asarray(G, dtype=np.int64).reshape(-1, n), axis=0)
    size = len(G)
    if size == 0:
        raise ValueError("G is empty")
    on, off = difference_counts(spec, n, G, method)
    t = cone_ift_table(spec, n)
    # the diagonal sits at the origin, whose value is 1/q + dual
    M1 = Fraction(size)
    M2 = q * t.dual * on
    M3 = q * t.off * off
    bound = size + Fraction(size * size, q ** (n // 2))
    return L2CharRecord(size, M1 + M2 + M3, M1, M2, M3, bound, l2_regime(q, n, size), on, off)


def l2_char_direct(spec: FieldSpec, n: int, G) -> float:
    """M evaluated from the transform, for cross-checking the exact split."""
    G = np.unique(np.asarray(G, dtype=np.int64).reshape(-1, n), axis=0)
    cone = cone_enumerate(spec, n, budget=None)
    hat = fourier(GridFn.indicator(spec, n, point_index(spec, G)), budget=None).values
    return float(np.sum(np.abs(hat[cone.indices]) ** 2)) / spec.q ** (n - 1)


# -- dyadic decomposition ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DyadicDecomposition:
    spec: FieldSpec
    n: int
    levels: dict          # i -> array of grid indices with 2^{-i-1} < g <= 2^{-i}
    cutoff: int
    values: np.ndarray

    def reconstruction(self, include_tail: bool = True) -> np.ndarray:
        out = np.zeros_like(self.values)
        for i, idx in self.levels.items():
            if include_tail or i <= self.cutoff:
                out[idx] = 2.0 ** -i
        return out

    def head(self) -> np.ndarray:
        return self.reconstruction(include_tail=False)

    def tail(self) -> np.ndarray:
        """g restricted to the levels beyond the cutoff."""
        out = np.zeros_like(self.values)
        for i, idx in self.levels.items():
            if i > self.cutoff:
                out[idx] = self.values[idx]
        return out


def dyadic_decompose(g: GridFn, L: int | None = None, check_cutoff: bool = True) -> DyadicDecomposition:
    vals = np.asarray(g.values)
    if np.any(np.abs(vals.imag) > 0):
        raise ValueError("g must be real")
    vals = vals.real
    if np.any(vals < 0) or np.any(vals > 1):
        raise ValueError("g must take values in [0, 1]")
    min_cut = math.ceil(g.dim * math.log2(g.spec.q))
    if L is None:
        L = min_cut
    elif check_cutoff and L < min_cut:
        raise ValueError(f"cutoff L must be >= n log2 q = {min_cut}")
    pos = np.flatnonzero(vals > 0)
    level = np.floor(-np.log2(vals[pos])).astype(np.int64)
    # floating log2 can misplace exact powers of two; fix by the defining inequality
    v = vals[pos]
    level = np.where(v > 2.0 ** -level, level - 1, level)
    level = np.where(v <= 2.0 ** (-level - 1), level + 1, level)
    levels = {int(i): pos[level == i] for i in np.unique(level)}
    return DyadicDecomposition(g.spec, g.dim, levels, L, vals)


def _sigma_l2(cone: ConeVariety, values: np.ndarray) -> float:
    hat = fourier(GridFn(cone.spec, cone.n, values), budget=None).values[cone.indices]
    return float(np.sqrt(np.mean(np.abs(hat) ** 2)))


def dyadic_report(dec: DyadicDecomposition) -> dict:
    """The normalization, level-size, tail and three-class Minkowski checks."""
    spec, n = dec.spec, dec.n
    q = spec.q
    s = (2 * n + 4) / (n + 4)
    vals = dec.values
    mass = float(np.sum(vals**s))
    scale = mass ** (1 / s) if mass > 0 else 1.0
    dyadic_valued = bool(np.all([np.all(vals[idx] == 2.0 ** -i) for i, idx in dec.levels.items()]))
    norm_sum = sum(2.0 ** (-s * i) * len(idx) for i, idx in dec.levels.items())
    pos = vals > 0
    recon = dec.reconstruction()
    cone = cone_enumerate(spec, n, budget=None)
    classes = {"U1": 0.0, "U2": 0.0, "U3": 0.0}
    for i, idx in dec.levels.items():
        if i > dec.cutoff:
            continue
        size_cap = 2.0 ** (s * i)
        key = "U1" if size_cap <= q ** (n / 2) else ("U2" if size_cap <= q ** ((n + 2) / 2) else "U3")
        ind = np.zeros(q**n)
        ind[idx] = 1.0
        classes[key] += 2.0 ** -i * _sigma_l2(cone, ind)
    head_norm = _sigma_l2(cone, dec.head())
    tail = dec.tail()
    tail_norm = _sigma_l2(cone, tail)
    tail_crude = q**n * 2.0 ** (-dec.cutoff - 1)
    g_norm = _sigma_l2(cone, vals)
    total = classes["U1"] + classes["U2"] + classes["U3"]
    return {
        "levels": {str(i): int(len(idx)) for i, idx in sorted(dec.levels.items())},
        "cutoff": dec.cutoff,
        "power_mass": mass,
        "normalized": abs(mass - 1) < 1e-9,
        "normalization_scale": scale,
        "dyadic_valued": dyadic_valued,
        "normalization_sum": norm_sum,
        "normalization_bound": 1.0 if dyadic_valued else 2.0**s * mass,
        "level_sizes_ok": bool(all(len(idx) <= 2.0 ** (s * (i + (0 if dyadic_valued else 1))) * mass + 1e-9
                                   for i, idx in dec.levels.items())),
        "reconstruction_ok": bool(np.all(vals[pos] <= recon[pos]) and np.all(recon[pos] < 2 * vals[pos])),
        "tail_norm": tail_norm,
        "tail_crude_bound": tail_crude,
        "tail_ok": bool(tail_norm <= tail_crude + 1e-12),
        "U1": classes["U1"], "U2": classes["U2"], "U3": classes["U3"],
        "head_norm": head_norm,
        "minkowski_ok": bool(head_norm <= total * (1 + 1e-9) + 1e-12),
        "g_norm": g_norm,
        "g_dominated": bool(g_norm <= (total + tail_norm) * (1 + 1e-9) + 1e-12),
    }
