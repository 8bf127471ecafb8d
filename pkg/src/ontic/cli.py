"""Command-line front end.

    ontic verify  --theory ks2 --sweeps 200 --n 200000 --seed 7
    ontic overlap --theory net --d 3 --N 3 --pairs 50 --seed 7
    ontic nogo    --check ui-family --d 3..8 --seed 7
    ontic demo    --seed 7

Every run writes a JSON report (schema 1) plus CSV tables and PNG figures to
``--out``.  Reports carry the resolved configuration and a SHA-256 digest of
everything except the timestamp.  Exit status: 0 pass, 1 failed check,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from ontic import models, nogo
from ontic.qstate import (
    DimensionError,
    OrthoBasis,
    ProjState,
    basis_containing,
    fidelity,
    fs_distance,
    haar_basis,
    haar_state,
    orthogonal_state,
)
from ontic.rng import child_seed, stream
from ontic.theory import born_sweep, check_nontrivial_pair, normalization_sweep

SCHEMA = 1
THEORIES = ("ontic", "ks2", "pair", "convex", "net", "broken-uniform")
CHECKS = ("ui-family", "nullifying-basis", "deficiency", "radius", "cantor", "evasion", "orthogonal", "ball")

COMMON = {"workers": 1, "out": "reports", "plots": True}
DEFAULTS = {
    "verify": {
        "theory": "ontic",
        "d": None,
        "n": 200_000,
        "sweeps": 200,
        "lambdas": 10_000,
        "z_max": 4.0,
        "max_fail_frac": 0.01,
        "states": "haar",
        "levels": 2,
        "reach": models.DEFAULT_REACH,
        "max_pairs": models.MAX_NET_PAIRS,
    },
    "overlap": {
        "theory": "pair",
        "d": None,
        "pairs": 50,
        "levels": 3,
        "reach": models.DEFAULT_REACH,
        "max_pairs": models.MAX_NET_PAIRS,
    },
    "nogo": {
        "check": "all",
        "d": None,
        "n": 1_000_000,
        "draws": 100_000,
        "triples": 100,
        "depth": None,
        "xs": 100,
        "grid": 20,
    },
    "demo": {"d": None, "n": 200_000},
}


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# configuration


def parse_dims(text) -> list[int]:
    """``"3"``, ``"3..8"`` or ``"2,4,6"``."""
    if text is None:
        return []
    if isinstance(text, int):
        return [text]
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            dims = list(range(int(lo), int(hi) + 1))
        else:
            dims = [int(t) for t in text.split(",")]
    except ValueError:
        raise ConfigError(f"cannot parse dimension list {text!r}") from None
    if not dims or min(dims) < 2 or max(dims) > 16:
        raise ConfigError(f"dimensions must lie in 2..16, got {text!r}")
    return dims


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="RNG seed (required)")
    common.add_argument("--config", help="JSON file with the same keys as the flags")
    common.add_argument("--out", help="output directory (default: reports)")
    common.add_argument("--workers", type=int, help="threads for Monte Carlo chunks")
    common.add_argument("--d", help="dimension, range a..b or list a,b,c")
    common.add_argument("--n", type=int, help="Monte Carlo sample count")
    common.add_argument("--no-plots", dest="plots", action="store_false", default=None, help="skip PNG figures")

    parser = argparse.ArgumentParser(prog="ontic", description="Build and verify ontological models of quantum states.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="Born rule and normalization suites")
    v.add_argument("--theory", choices=THEORIES)
    v.add_argument("--sweeps", type=int)
    v.add_argument("--lambdas", type=int, help="random (M, lambda) pairs for the normalization check")
    v.add_argument("--z-max", dest="z_max", type=float)
    v.add_argument("--states", choices=("haar", "covered"), help="draw psi from Haar or from the covered set")
    v.add_argument("--N", dest="levels", type=int, help="net truncation level")
    v.add_argument("--reach", type=float)

    o = sub.add_parser("overlap", parents=[common], help="overlap masses and maximal nontriviality")
    o.add_argument("--theory", choices=THEORIES)
    o.add_argument("--pairs", type=int)
    o.add_argument("--N", dest="levels", type=int)
    o.add_argument("--reach", type=float)

    g = sub.add_parser("nogo", parents=[common], help="certificates for the no-go objects")
    g.add_argument("--check", choices=CHECKS + ("all",))
    g.add_argument("--depth", type=int, help="fat Cantor depth")
    g.add_argument("--draws", type=int, help="samples per orthogonal-support pair")
    g.add_argument("--triples", type=int, help="random triples for the nullifying basis")
    g.add_argument("--xs", type=int, help="random x values for the evasion check")
    g.add_argument("--grid", type=int, help="dyadic delta levels for the evasion check")

    sub.add_parser("demo", parents=[common], help="small tour writing plot data and figures")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    cmd = args.command
    cfg = dict(COMMON)
    cfg.update(DEFAULTS[cmd])
    if args.config:
        try:
            with open(args.config) as fh:
                from_file = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(from_file, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(from_file) - set(cfg) - {"seed", "a", "b", "coefficients"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(from_file)
    for key, val in vars(args).items():
        if key in ("command", "config") or val is None:
            continue
        cfg[key] = val
    if cfg.get("seed") is None:
        raise ConfigError("--seed is required (no default seed is taken from the clock)")
    if not isinstance(cfg["seed"], int) or not 0 <= cfg["seed"] < 2**64:
        raise ConfigError("seed must be a 64-bit non-negative integer")
    for key in ("n", "sweeps", "lambdas", "pairs", "workers", "levels", "draws", "triples", "xs", "grid"):
        if key in cfg and cfg[key] is not None and (not isinstance(cfg[key], int) or cfg[key] < 1):
            raise ConfigError(f"{key} must be a positive integer")
    if cfg.get("theory") is not None and cfg["theory"] not in THEORIES:
        raise ConfigError(f"unknown theory {cfg['theory']!r}")
    cfg["command"] = cmd
    return cfg


# --------------------------------------------------------------------------
# output


def _default(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def report_digest(body: dict) -> str:
    body = {k: v for k, v in body.items() if k not in ("timestamp", "digest")}
    blob = json.dumps(body, sort_keys=True, separators=(",", ":"), default=_default)
    return hashlib.sha256(blob.encode()).hexdigest()


def write_report(out: Path, stem: str, cfg: dict, result: dict, passed: bool) -> Path:
    config = {k: v for k, v in cfg.items() if k not in ("out", "plots")}
    body = {
        "schema": SCHEMA,
        "command": cfg["command"],
        "config": config,
        "seed": cfg["seed"],
        "result": result,
        "pass": bool(passed),
    }
    body["digest"] = report_digest(body)
    body["timestamp"] = datetime.now(timezone.utc).isoformat()
    path = out / f"{stem}.json"
    path.write_text(json.dumps(body, sort_keys=True, indent=2, default=_default) + "\n")
    return path


def write_csv(path: Path, rows: list[dict]) -> Path:
    if not rows:
        path.write_text("")
        return path
    fields = list(rows[0])
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return path


def _plot(cfg, fn, *args, **kw):
    if not cfg["plots"]:
        return None
    from ontic import plotting

    return getattr(plotting, fn)(*args, **kw)


# --------------------------------------------------------------------------
# theories


def _single_dim(cfg, fallback: int) -> int:
    dims = parse_dims(cfg.get("d"))
    if len(dims) > 1:
        raise ConfigError("this command takes a single dimension")
    return dims[0] if dims else fallback


def _pair_states(rng, d):
    while True:
        a, b = haar_state(d, rng), haar_state(d, rng)
        if fidelity(a, b) > 1e-3:
            return a, b


def make_theory(cfg: dict) -> models.Theory:
    name, seed = cfg["theory"], cfg["seed"]
    if name == "ks2":
        if _single_dim(cfg, 2) != 2:
            raise ConfigError("the Kochen-Specker model lives in d = 2")
        return models.ks2d()
    d = _single_dim(cfg, 3)
    if name == "ontic":
        return models.psi_ontic(d)
    if name == "broken-uniform":
        return models.broken_uniform(d)
    reach = cfg.get("reach", models.DEFAULT_REACH)
    if name == "pair":
        if "a" in cfg and "b" in cfg:
            a, b = ProjState.from_json(cfg["a"]), ProjState.from_json(cfg["b"])
        else:
            a, b = _pair_states(stream(seed, 100), d)
        return models.PairTheory(a, b, reach)
    if name == "convex":
        rng = stream(seed, 101)
        coeffs = cfg.get("coefficients", [0.5, 0.5])
        parts = [(c, models.PairTheory(*_pair_states(rng, d), reach)) for c in coeffs]
        return models.convex_combine(parts)
    if name == "net":
        return models.net_theory(d, cfg["levels"], child_seed(stream(seed, 102)), reach, cfg["max_pairs"])
    raise ConfigError(f"unknown theory {name!r}")


# --------------------------------------------------------------------------
# commands


def cmd_verify(cfg: dict, out: Path) -> bool:
    t = make_theory(cfg)
    seed = cfg["seed"]
    source = None
    if cfg["states"] == "covered":
        source = lambda rng: t.sample_covered_pair(rng)[0]
    sweep = born_sweep(
        t, cfg["sweeps"], cfg["n"], seed, cfg["z_max"], cfg["max_fail_frac"], workers=cfg["workers"], psi_source=source
    )
    norm = normalization_sweep(t, cfg["lambdas"], seed)
    passed = sweep.passed and norm.passed
    result = {"theory": t.manifest(), "born": sweep.to_json(), "normalization": norm.to_json()}
    stem = f"verify_{t.name}"
    write_report(out, stem, cfg, result, passed)
    write_csv(out / f"{stem}.csv", sweep.csv_rows())
    zs = [o.z for r in sweep.reports for o in r.outcomes]
    _plot(cfg, "born_z", zs, cfg["z_max"], out / f"{stem}_z.png", title=t.name)
    print(
        f"born: {sweep.failures}/{sweep.checks} checks beyond |z|={cfg['z_max']} "
        f"({sweep.fail_frac:.4%}, limit {cfg['max_fail_frac']:.2%}) -> {'PASS' if sweep.passed else 'FAIL'}"
    )
    print(f"normalization: {norm.exceptions} exceptions in {norm.points} points -> {'PASS' if norm.passed else 'FAIL'}")
    return passed


def _orthogonal_source(t, rng):
    psi = t.sample_covered_pair(rng)[0]
    return psi, orthogonal_state(psi, rng)


def cmd_overlap(cfg: dict, out: Path) -> bool:
    t = make_theory(cfg)
    rng = stream(cfg["seed"], 3)
    covers = getattr(t, "covers", None)
    rows = []

    def row(kind, i, psi, phi):
        ov = check_nontrivial_pair(t, psi, phi)
        rows.append(
            {
                "kind": kind,
                "index": i,
                "inner": fidelity(psi, phi),
                "fs_distance": fs_distance(psi, phi),
                "overlap": ov,
                "covered": None if covers is None else bool(covers(psi, phi)),
            }
        )

    if isinstance(t, models.PairTheory):
        row("anchor", 0, t.a, t.b)
    for i in range(cfg["pairs"]):
        row("covered", i, *t.sample_covered_pair(rng))
    for i in range(cfg["pairs"]):
        row("orthogonal", i, *_orthogonal_source(t, rng))
    cov = [r["overlap"] for r in rows if r["kind"] != "orthogonal"]
    orth = [r["overlap"] for r in rows if r["kind"] == "orthogonal"]
    passed = min(cov) > 0.0 and max(orth) == 0.0
    result = {
        "theory": t.manifest(),
        "min_covered_overlap": min(cov),
        "max_orthogonal_overlap": max(orth),
        "pairs": rows,
    }
    if isinstance(t, models.PairTheory):
        result["epsilon"] = t.epsilon
    stem = f"overlap_{t.name}"
    write_report(out, stem, cfg, result, passed)
    write_csv(out / f"{stem}.csv", rows)
    _plot(cfg, "overlaps", rows, out / f"{stem}.png")
    print(f"min covered overlap {min(cov):.6g}; max orthogonal overlap {max(orth):.3g} -> {'PASS' if passed else 'FAIL'}")
    return passed


def _cert(check, d, params, seed, result, tolerances, passed) -> dict:
    return {
        "check": check,
        "d": d,
        "params": params,
        "seed": seed,
        "result": result,
        "tolerances": tolerances,
        "pass": bool(passed),
    }


def nogo_ui_family(cfg, out):
    certs = []
    for d in parse_dims(cfg.get("d")) or list(range(3, 9)):
        if d < 3:
            raise ConfigError("the u_i family needs d >= 3")
        try:
            fam = nogo.build_ui_family(OrthoBasis.standard(d))
            res, ok = fam.to_json(), True
        except AssertionError as exc:
            res, ok = {"error": str(exc)}, False
        certs.append(_cert("ui-family", d, {}, None, res, {"overlap": 1e-12, "rank_rel": 1e-8}, ok))
    return certs


def valid_triples(d: int, count: int, rng):
    """Haar triples satisfying the nullifying-basis preconditions, with rejection count."""
    out, rejected = [], 0
    while len(out) < count:
        trip = [haar_state(d, rng) for _ in range(3)]
        try:
            nb = nogo.build_nullifying_basis(*trip)
        except (nogo.DiscriminantError, nogo.CoplanarError):
            rejected += 1
            continue
        out.append((trip, nb))
    return out, rejected


def discriminant_violation():
    """Triple with ``|a| = 3, b = 1, c = 0``, whose quadratic has no real root."""
    e = np.eye(3)
    psi1 = ProjState.from_vector(e[0])
    psi2 = ProjState.from_vector(3 * e[0] + e[1])
    psi3 = ProjState.from_vector(e[0] + e[2])
    return psi1, psi2, psi3


def nogo_nullifying(cfg, out):
    rng = stream(cfg["seed"], 4)
    certs = []
    dims = parse_dims(cfg.get("d")) or [3, 4, 5, 6]
    per = max(1, math.ceil(cfg["triples"] / len(dims)))
    for d in dims:
        if d < 3:
            raise ConfigError("the nullifying basis needs d >= 3")
        trips, rejected = valid_triples(d, per, rng)
        res = [max(nb.residuals(t)) for t, nb in trips]
        gram = [nb.gram_defect() for _, nb in trips]
        ok = max(res) <= 1e-10 and max(gram) <= 1e-10
        certs.append(
            _cert(
                "nullifying-basis",
                d,
                {"triples": per},
                cfg["seed"],
                {"max_residual": max(res), "max_gram_defect": max(gram), "rejected": rejected},
                {"residual": 1e-10, "gram": 1e-10},
                ok,
            )
        )
    try:
        nogo.build_nullifying_basis(*discriminant_violation())
        res, ok = {"raised": False}, False
    except nogo.DiscriminantError as exc:
        res, ok = {"raised": True, "discriminant": exc.discriminant, "max_overlap": exc.max_overlap}, True
    certs.append(_cert("nullifying-basis/discriminant", 3, {"a": 3, "b": 1, "c": 0}, None, res, {}, ok))
    return certs


def nogo_deficiency(cfg, out):
    certs, rows = [], []
    for d in parse_dims(cfg.get("d")) or [2, 3, 4, 5, 6]:
        basis = OrthoBasis.standard(d)
        est = nogo.deficiency_fraction(basis, cfg["n"], stream(cfg["seed"], 5, d))
        oracle = nogo.deficiency_oracle(d)
        alpha = np.ones(d) / math.sqrt(d)
        alpha_in = bool(nogo.in_deficiency_region(basis, alpha)[0])
        if d == 2:
            ok = est.estimate <= 1e-4
        else:
            ok = est.estimate > 0 and abs(est.estimate - oracle) <= 3 * est.se and alpha_in
        res = dict(est.to_json(), oracle=oracle, alpha_in_region=alpha_in)
        certs.append(_cert("deficiency", d, {"n": cfg["n"]}, cfg["seed"], res, {"sigma": 3, "d2_max": 1e-4}, ok))
        rows.append({"d": d, "estimate": est.estimate, "lo": est.lo, "hi": est.hi, "oracle": oracle})
    write_csv(out / "deficiency.csv", rows)
    _plot(cfg, "deficiency", rows, out / "deficiency.png")
    return certs


def nogo_radius(cfg, out):
    rng = stream(cfg["seed"], 6)
    certs = []
    psi = haar_state(3, rng)
    r = nogo.estimate_radius(models.psi_ontic(3), psi)
    certs.append(_cert("radius", 3, {"theory": "ontic"}, cfg["seed"], {"radius": r}, {"exact": 0.0}, r == 0.0))
    r = nogo.estimate_radius(models.ks2d(), haar_state(2, rng))
    certs.append(_cert("radius", 2, {"theory": "ks2"}, cfg["seed"], {"radius": r}, {"abs": 1e-6}, abs(r - 0.5) <= 1e-6))
    a, b = _pair_states(rng, 3)
    t = models.PairTheory(a, b)
    r, target = nogo.estimate_radius(t, a), fs_distance(a, b)
    certs.append(
        _cert("radius", 3, {"theory": "pair"}, cfg["seed"], {"radius": r, "fs_ab": target}, {"exact": 0.0}, r == target)
    )
    return certs


def nogo_cantor(cfg, out):
    depth = cfg["depth"] if cfg["depth"] is not None else 8
    if not 0 <= depth <= 30:
        raise ConfigError("depth must lie in 0..30")
    b = nogo.fat_cantor(depth)
    oracle = nogo.fat_cantor_measure(depth)
    res = {"depth": depth, "measure": b.measure, "measure_float": float(b.measure), "oracle": oracle, "intervals": len(b)}
    ok = b.measure == oracle
    if depth <= 12:
        res["interval_list"] = b.to_rows()
    if depth <= nogo.MATERIALIZE_LIMIT:
        rows = [{"lo": lo, "hi": hi} for lo, hi in b.to_rows()]
        write_csv(out / f"cantor_depth{depth}.csv", rows)
        _plot(cfg, "cantor", b.to_rows(), out / f"cantor_depth{depth}.png")
    measures = [{"depth": k, "measure": float(nogo.fat_cantor(k).measure)} for k in range(0, max(depth, 1) + 1)]
    write_csv(out / "cantor_measures.csv", measures)
    _plot(cfg, "cantor_measures", measures, out / "cantor_measures.png")
    return [_cert("cantor", None, {"depth": depth}, None, res, {"exact": 0}, ok)]


def nogo_evasion(cfg, out):
    depth = cfg["depth"] if cfg["depth"] is not None else 20
    rng = stream(cfg["seed"], 7)
    xs = rng.random(cfg["xs"])
    rep = nogo.evasion_demo(nogo.fat_cantor(depth), xs, grid=cfg["grid"], rng=child_seed(rng))
    res = rep.to_json()
    return [_cert("evasion", None, {"depth": depth, "xs": cfg["xs"], "grid": cfg["grid"]}, cfg["seed"], res, {"exact": 0}, rep.passed)]


def _suite_theories(seed: int) -> list:
    rng = stream(seed, 8)
    p1 = models.PairTheory(*_pair_states(rng, 3))
    p2 = models.PairTheory(*_pair_states(rng, 3))
    return [
        models.psi_ontic(3),
        models.ks2d(),
        p1,
        models.convex_combine([(0.5, p1), (0.5, p2)]),
        models.net_theory(3, 2, child_seed(rng)),
    ]


def nogo_orthogonal(cfg, out):
    certs = []
    for k, t in enumerate(_suite_theories(cfg["seed"])):
        rng = stream(cfg["seed"], 9, k)
        counts = []
        for _ in range(5):
            phi = t.sample_covered_pair(rng)[0]
            psi = orthogonal_state(phi, rng)
            basis = basis_containing(psi, rng)
            counts.append(nogo.orthogonal_support_check(t, phi, psi, basis, cfg["draws"], rng))
        certs.append(
            _cert("orthogonal", t.d, {"theory": t.name, "draws": cfg["draws"]}, cfg["seed"], {"violations": counts}, {"count": 0}, sum(counts) == 0)
        )
    return certs


def nogo_ball(cfg, out):
    certs = []
    for k, t in enumerate(_suite_theories(cfg["seed"])):
        rng = stream(cfg["seed"], 10, k)
        alpha = t.a if isinstance(t, models.PairTheory) else haar_state(t.d, rng)
        basis = haar_basis(t.d, rng)
        for eps in (0.3, 0.02):
            rep = nogo.ball_response_check(t, basis, alpha, eps, 20_000, rng)
            total = sum(rep.masses)
            ok = rep.masses[rep.j] > 0 and abs(total - rep.volume) <= 1e-9 * rep.volume
            certs.append(_cert("ball", t.d, {"theory": t.name, "eps": eps}, cfg["seed"], rep.to_json(), {"rel": 1e-9}, ok))
    return certs


NOGO = {
    "ui-family": nogo_ui_family,
    "nullifying-basis": nogo_nullifying,
    "deficiency": nogo_deficiency,
    "radius": nogo_radius,
    "cantor": nogo_cantor,
    "evasion": nogo_evasion,
    "orthogonal": nogo_orthogonal,
    "ball": nogo_ball,
}


def cmd_nogo(cfg: dict, out: Path) -> bool:
    checks = CHECKS if cfg["check"] == "all" else (cfg["check"],)
    certs = []
    for name in checks:
        certs += NOGO[name](cfg, out)
    passed = all(c["pass"] for c in certs)
    write_report(out, f"nogo_{cfg['check']}", cfg, {"certificates": certs}, passed)
    for c in certs:
        print(f"{c['check']:<32} d={c['d']!s:<5} {'PASS' if c['pass'] else 'FAIL'}")
    return passed


def cmd_demo(cfg: dict, out: Path) -> bool:
    xs = np.linspace(0.0, 1.0, 201)
    profile = [
        {"fs_distance": float(r), "density": float(models.ks_profile(math.cos(math.pi * r / 2) ** 2))} for r in xs
    ]
    write_csv(out / "ks_profile.csv", profile)
    _plot(cfg, "ks_profile", profile, out / "ks_profile.png")
    sub = dict(cfg, d="2..6", n=cfg["n"])
    certs = nogo_deficiency(sub, out)
    certs += nogo_cantor(dict(cfg, depth=6), out)
    t = models.PairTheory(*_pair_states(stream(cfg["seed"], 11), 3))
    ov = t.overlap(t.a, t.b)
    sweep = born_sweep(t, 5, 20_000, cfg["seed"], psi_source=lambda r: t.a)
    result = {
        "ks_profile_points": len(profile),
        "deficiency": [c["result"] for c in certs if c["check"] == "deficiency"],
        "cantor": [c["result"] for c in certs if c["check"] == "cantor"],
        "pair": {"manifest": t.manifest(), "overlap_ab": ov, "epsilon": t.epsilon, "born_fail_frac": sweep.fail_frac},
    }
    passed = all(c["pass"] for c in certs) and sweep.passed and ov > 0
    write_report(out, "demo", cfg, result, passed)
    print(f"demo written to {out} -> {'PASS' if passed else 'FAIL'}")
    return passed


COMMANDS = {"verify": cmd_verify, "overlap": cmd_overlap, "nogo": cmd_nogo, "demo": cmd_demo}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        passed = COMMANDS[cfg["command"]](cfg, out)
    except (ConfigError, DimensionError, models.BudgetError) as exc:
        parser.print_usage(sys.stderr)
        print(f"ontic: error: {exc}", file=sys.stderr)
        return 2
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
