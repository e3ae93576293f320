"""Command-line driver: ``conelab verify <suite>``, ``conelab sweep``, ``conelab export-plot``.

Exit status: 0 all hard checks pass, 1 a check failed, 2 bad configuration,
3 a grid exceeded the budget (a partial report is still written).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import characters, cone, constructions, incidence, restriction
from .field import DEFAULT_BUDGET, BudgetExceeded, Scalar, enumerate_points, first_irreducible, make_field
from .report import Report, export_plot_data

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3
SUITES = ("gauss", "cone-ift", "restriction-sweep", "l2-char", "necessary", "incidence", "sharp", "all")
GAUSS_DEFAULTS = [(3, 1), (5, 1), (7, 1), (11, 1), (3, 2), (3, 3), (5, 2)]


class ConfigError(ValueError):
    pass


# -- config --------------------------------------------------------------------

def parse_rational(text) -> Fraction | float:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    s = str(text).strip()
    if s.lower() in ("inf", "infinity", "oo"):
        return math.inf
    try:
        val = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not an exact rational: {text!r}") from exc
    if val < 1:
        raise ConfigError(f"exponent must be >= 1, got {text!r}")
    return val


def parse_int_list(text) -> list[int]:
    if isinstance(text, list):
        return [int(x) for x in text]
    try:
        return [int(x) for x in str(text).replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}") from exc


def read_config(path) -> dict:
    """JSON object, or ``key = value`` lines with ``#`` comments."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad JSON config: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be an object")
        return data
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def merge_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    """Flags given on the command line override config-file values, which override defaults."""
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "config")}
    if getattr(args, "config", None):
        file_cfg = read_config(args.config)
        for key, value in file_cfg.items():
            if key not in cfg:
                raise ConfigError(f"unknown config key {key!r}")
            sub_parser = parser.subparsers_by_name[args.command]
            if getattr(args, key) is None or getattr(args, key) == sub_parser.get_default(key):
                cfg[key] = value
    return cfg


def _field(cfg):
    if not cfg.get("p"):
        raise ConfigError("--p (field characteristic) is required")
    modulus = cfg.get("modulus")
    if isinstance(modulus, str):
        modulus = parse_int_list(modulus)
    try:
        return make_field(int(cfg["p"]), int(cfg.get("ell") or 1), modulus or None)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _budget(cfg) -> int:
    b = int(cfg.get("budget") or DEFAULT_BUDGET)
    if b <= 0:
        raise ConfigError("budget must be positive")
    return b


# -- suites ------------------------------------------------------------------------

def suite_gauss(rep: Report, cfg):
    fields = [(int(cfg["p"]), int(cfg.get("ell") or 1))] if cfg.get("p") else GAUSS_DEFAULTS
    for p, ell in fields:
        if cfg.get("p"):
            spec = _field({**cfg, "p": p, "ell": ell})
        else:
            spec = make_field(p, ell, first_irreducible(p, ell) if ell > 1 else None)
        g = characters.gauss_sum(Scalar(spec, 1))
        err = abs(g.value - g.closed_form)
        rep.check(f"gauss_sum(1) F_{spec.q}", err, 1e-9 * spec.q**0.5, err <= 1e-9 * spec.q**0.5)
        rep.data[f"G1_F{spec.q}"] = [g.value.real, g.value.imag]


def suite_cone_ift(rep: Report, cfg):
    spec = _field(cfg)
    n = int(cfg.get("n") or 4)
    budget = _budget(cfg)
    c = cone.cone_enumerate(spec, n, budget)
    X = enumerate_points(spec, n, budget)
    brute = cone.cone_ift_brute(c, X)
    closed = cone.cone_ift_closed(spec, X)
    err = float(np.max(np.abs(brute - closed)))
    rep.check(f"cone_ift brute = closed on F_{spec.q}^{n}", err, 1e-9, err <= 1e-9)
    size = cone.cone_size_closed(spec, n)
    rep.check(f"|C_{n}| over F_{spec.q}", c.size, size, c.size == size)
    t = cone.cone_ift_table(spec, n)
    rep.data.update({"points": len(X), "cone_size": c.size,
                     "values": {"origin": t.origin, "dual": t.dual, "off": t.off}})


def _sweep_args(cfg):
    qs = parse_int_list(cfg.get("q") or "3,7,11")
    fams = cfg.get("families") or ",".join(restriction.FAMILIES)
    fams = fams if isinstance(fams, list) else [f for f in str(fams).split(",") if f]
    return dict(qs=qs, n=int(cfg.get("n") or 4), p=parse_rational(cfg.get("exp_p") or cfg.get("lp") or 2),
                r=parse_rational(cfg.get("r") or 3), families=fams,
                trials=int(cfg.get("trials") or 200), seed=int(cfg.get("seed") or 0))


def _run_sweep(rep: Report, args, budget):
    try:
        sweep = restriction.sweep_restriction(args["qs"], args["n"], args["p"], args["r"],
                                              families=args["families"], trials=args["trials"],
                                              seed=args["seed"], budget=budget)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return sweep


def _expected_class(qs, n: int, p, r) -> str:
    """Bounded at or above every necessary threshold, growing strictly below one."""
    thresholds = [restriction.gamma_necessary_r(n)]
    if p != 1:
        k = max(restriction.omega_dimension(make_field(q), n) for q in qs)
        thresholds.append(restriction.necessary_r(p, n, k))
    return "bounded" if r >= max(thresholds) else "growing"


def suite_restriction(rep: Report, cfg):
    args = _sweep_args(cfg)
    sweep = _run_sweep(rep, args, _budget(cfg))
    expected = _expected_class(args["qs"], args["n"], args["p"], args["r"])
    rep.data["sweep"] = sweep.as_dict()
    if expected == "bounded":
        rep.check("sweep slope < 0.1", sweep.slope, restriction.BOUNDED_SLOPE,
                  sweep.slope < restriction.BOUNDED_SLOPE)
    else:
        rep.check("sweep slope > 0.25", sweep.slope, restriction.GROWING_SLOPE,
                  sweep.slope > restriction.GROWING_SLOPE)
    rep.constants["empirical_max_ratio"] = sweep.max_ratio


def suite_l2(rep: Report, cfg):
    spec = _field(cfg)
    n = int(cfg.get("n") or 4)
    trials = int(cfg.get("trials") or 100)
    rng = np.random.default_rng(int(cfg.get("seed") or 0))
    X = enumerate_points(spec, n, _budget(cfg))
    worst, m2_ok, total = 0.0, True, 0
    try:
        for j in range(int(math.log2(len(X))) + 1):
            for _ in range(trials):
                G = X[rng.choice(len(X), 2**j, replace=False)]
                rec = restriction.l2_char_estimate(spec, n, G)
                worst = max(worst, float(rec.M / rec.bound))
                m2_ok &= rec.M2 <= 0
                total += 1
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rep.check("max M / (|G| + q^{-n/2}|G|^2)", worst, 1.0, worst <= 1.0)
    rep.check("M2 <= 0 exactly", 0.0, 0.0, m2_ok)
    rep.data["subsets"] = total


def suite_necessary(rep: Report, cfg):
    n = int(cfg.get("n") or 4)
    qs = parse_int_list(cfg.get("q") or "3,7,11,19")
    p = parse_rational(cfg.get("exp_p") or 2)
    for q in qs:
        res = restriction.gamma_testset_ft_check(make_field(q), n, budget=_budget(cfg))
        rep.check(f"|Gamma_hat| constant on cone, q={q}", res["max_error"], 1e-8, res["passed"])
    k = restriction.omega_dimension(make_field(qs[0]), n)
    corner = restriction.necessary_r(p, n, k)
    at_corner = restriction.omega_witness(qs, n, p, corner)
    rep.check(f"Omega ratio bounded at r = {corner}", at_corner["slope"], restriction.BOUNDED_SLOPE,
              at_corner["slope"] < restriction.BOUNDED_SLOPE)
    inside = corner * Fraction(5, 6) if corner != math.inf else Fraction(2)
    below = restriction.omega_witness(qs, n, p, inside)
    rep.check(f"Omega ratio grows at r = {inside}", below["slope"], 0.0, below["slope"] > 0, hard=False,
              note="empirical growth exponent; predicted " + f"{below['predicted'][0]:.4f}")
    rep.data.update({"omega_at_corner": at_corner, "omega_inside_forbidden": below,
                     "corner_points": [[str(a), str(b)] for a, b in restriction.corner_points(n, qs[0] % 4 == 1)]})


def _random_instance(spec, d, rng, max_spheres, points=30, kind="complex"):
    X = enumerate_points(spec, d, budget=None)
    m = int(rng.integers(1, max(2, max_spheres) + 1))
    keys = set()
    while len(keys) < m:
        c = tuple(int(v) for v in X[rng.integers(len(X))])
        keys.add(c + (int(rng.integers(spec.q)),))
    keys = np.array(sorted(keys))
    if kind == "nonnegative":
        w = rng.random(m)
    elif kind == "real":
        w = rng.normal(size=m)
    else:
        w = rng.normal(size=m) + 1j * rng.normal(size=m)
    P = X[rng.choice(len(X), size=min(points, len(X)), replace=False)]
    return P, incidence.WeightedFamily(spec, keys[:, :-1], keys[:, -1], w)


def suite_incidence(rep: Report, cfg):
    spec = _field(cfg)
    d = int(cfg.get("d") or 2)
    trials = int(cfg.get("trials") or 100)
    rng = np.random.default_rng(int(cfg.get("seed") or 0))
    cap = int(incidence.size_threshold(spec, d))
    worst_res, worst_ratio, ok_dec = 0.0, 0.0, True
    for t in range(trials):
        kind = ("nonnegative", "real", "complex")[t % 3]
        P, fam = _random_instance(spec, d, rng, max(1, cap), kind=kind)
        ident = incidence.incidence_identity_check(spec, P, fam)
        worst_res = max(worst_res, ident["identity_residual"])
        bound = incidence.incidence_bound_check(spec, P, fam)
        worst_ratio = max(worst_ratio, bound["ratio"])
        g = incidence.goodsize_check(spec, fam)
        ok_dec &= all(v for k, v in g.items() if k.endswith("_ok"))
    rep.check("lifted identity residual", worst_res, 1e-8, worst_res < 1e-8)
    rep.check("incidence bound ratio", worst_ratio, 1.0, worst_ratio <= 1.0)
    rep.check("energy decomposition and bounds", 0.0, 0.0, ok_dec)
    rep.constants["incidence_C"] = {k: incidence.incidence_constant(incidence.parity_case(spec, d), k)
                                    for k in ("nonnegative", "real", "complex")}


def suite_sharp(rep: Report, cfg):
    spec = _field(cfg)
    d = int(cfg.get("d") or 6)
    k = int(cfg.get("k") or 1)
    try:
        inst = constructions.sharp_family(spec, d, k, budget=_budget(cfg))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    I = inst.incidences()
    rep.check("I(P, S) = 0", I, 0, I == 0)
    rep.check("|S| matches construction", inst.num_spheres, inst.expected["num_spheres"],
              inst.num_spheres == inst.expected["num_spheres"])
    rep.check("|P| matches construction", len(inst.P), inst.expected["num_points"],
              len(inst.P) == inst.expected["num_points"])
    rep.data.update({"num_points": len(inst.P), "num_spheres": inst.num_spheres, "case": inst.case,
                     "product_over_q^(d+1)": len(inst.P) * inst.num_spheres / spec.q ** (d + 1)})
    if cfg.get("out_instance"):
        fam = incidence.WeightedFamily.unit(spec, inst.centers, inst.radii)
        Path(cfg["out_instance"]).write_text(json.dumps(incidence.instance_to_json(spec, inst.P, fam)))


SUITE_FUNCS = {"gauss": suite_gauss, "cone-ift": suite_cone_ift, "restriction-sweep": suite_restriction,
               "l2-char": suite_l2, "necessary": suite_necessary, "incidence": suite_incidence,
               "sharp": suite_sharp}

ALL_DEFAULTS = {
    "gauss": {},
    "cone-ift": {"p": 3, "n": 4},
    "restriction-sweep": {"q": "3,7,11", "n": 4, "r": "3", "trials": 20},
    "l2-char": {"p": 7, "n": 4, "trials": 10},
    "necessary": {"q": "3,7,11", "n": 4},
    "incidence": {"p": 3, "d": 2, "trials": 30},
    "sharp": {"p": 3, "d": 6, "k": 1},
}


def run(cfg: dict) -> Report:
    suite = cfg["suite"]
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}")
    rep = Report(command=f"verify {suite}", config=cfg)
    names = list(SUITE_FUNCS) if suite == "all" else [suite]
    for name in names:
        sub = cfg
        if suite == "all":
            sub = {**ALL_DEFAULTS[name], "seed": cfg.get("seed"), "budget": cfg.get("budget")}
        t0 = time.perf_counter()
        before = len(rep.checks)
        try:
            SUITE_FUNCS[name](rep, sub)
        finally:
            rep.elapsed[f"{name}_seconds"] = time.perf_counter() - t0
        for c in rep.checks[before:]:
            c.name = f"{name}: {c.name}" if suite == "all" else c.name
    return rep


# -- argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="conelab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--p", type=int, help="field characteristic")
    v.add_argument("--ell", type=int, default=1)
    v.add_argument("--modulus", help="comma-separated coefficients, constant term first")
    v.add_argument("--n", type=int)
    v.add_argument("--d", type=int)
    v.add_argument("--k", type=int)
    v.add_argument("--q", help="comma-separated field sizes (sweeps)")
    v.add_argument("--exp-p", dest="exp_p", help="Lebesgue exponent p on the cone (sweeps)")
    v.add_argument("--r", help="Lebesgue exponent r on F^n, e.g. 5/2")
    v.add_argument("--families")
    v.add_argument("--trials", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    v.add_argument("--out", help="report path (default stdout)")
    v.add_argument("--out-instance", dest="out_instance", help="write the sharp instance as JSON")
    v.add_argument("--config", help="JSON or key = value file mirroring the flags")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="restriction sweep over several q")
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--p", default="2", help="Lebesgue exponent on the cone, exact rational")
    s.add_argument("--r", default="3", help="Lebesgue exponent on F^n, exact rational")
    s.add_argument("--q", default="3,7,11")
    s.add_argument("--families", default=",".join(restriction.FAMILIES))
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--out")
    s.add_argument("--csv", help="also write (q, ratio) rows here")
    s.add_argument("--config")
    s.set_defaults(func=cmd_sweep)

    e = sub.add_parser("export-plot", help="CSV of (q, max ratio) from a sweep report")
    e.add_argument("report")
    e.add_argument("out")
    e.set_defaults(func=cmd_export)
    ap.subparsers_by_name = {"verify": v, "sweep": s, "export-plot": e}
    return ap


def _emit(rep: Report, path) -> None:
    text = rep.to_json()
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _finish(rep: Report, cfg, run_fn) -> int:
    try:
        run_fn()
    except BudgetExceeded as exc:
        rep.flags.append(f"budget exceeded: {exc}")
        _emit(rep, cfg.get("out"))
        return EXIT_BUDGET
    _emit(rep, cfg.get("out"))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_verify(args, parser) -> int:
    cfg = merge_config(args, parser)
    rep = Report(command=f"verify {cfg['suite']}", config=cfg)

    def go():
        out = run(cfg)
        rep.checks, rep.data, rep.constants, rep.elapsed = out.checks, out.data, out.constants, out.elapsed
        rep.flags += out.flags
    return _finish(rep, cfg, go)


def cmd_sweep(args, parser) -> int:
    cfg = merge_config(args, parser)
    rep = Report(command="sweep", config=cfg)

    def go():
        sweep_cfg = {**cfg, "exp_p": cfg["p"]}
        sweep = _run_sweep(rep, _sweep_args(sweep_cfg), _budget(cfg))
        rep.data = sweep.as_dict()
        rep.constants["empirical_max_ratio"] = sweep.max_ratio
        rep.check("classification", sweep.slope, restriction.BOUNDED_SLOPE, True, hard=False,
                  note=sweep.classification)
        if cfg.get("csv"):
            export_plot_data(rep.as_dict(), cfg["csv"])
    return _finish(rep, cfg, go)


def cmd_export(args, parser) -> int:
    try:
        payload = json.loads(Path(args.report).read_text())
        rows = export_plot_data(payload, args.out)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"wrote {rows} rows to {args.out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args, parser)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
