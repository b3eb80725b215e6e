"""Batch driver: config in, JSON report out.

Exit status is 0 on success, 2 for invalid input and 3 for numerical
degeneracy.  Reports are deterministic for a fixed config and seed.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from importlib import resources

import numpy as np

from . import __version__
from .cartan import BasePoint, fundamental_cartan, make_datum
from .catalog import build_case, standard_cartan_menu
from .domains import domain_report
from .errors import InvalidArgument, LevilabError
from .leviform import cone_verdict, inertia, levi_matrix
from .liecore import Involution, LieAlgebra, make_setup
from .orbit import orbit_profile
from .tolerances import DEFAULT_TOL
from .verify import adjoint_crosscheck, extrinsic_levi_inertia, formula_equivalence, make_probe
from .weights import extended_decomposition, is_irreducible, levi_basis, positive_system

__all__ = ["run", "render", "main", "normalize_config", "load_schema", "ALL_OPS"]

ALL_OPS = ("weights", "orbit", "levi", "cone", "domains", "verify")
DIGITS = 12


# -- config ------------------------------------------------------------------------

def _seed_default():
    env = os.environ.get("LEVILAB_SEED")
    if env is None:
        return 42
    try:
        return int(env)
    except ValueError:
        raise InvalidArgument(f"LEVILAB_SEED={env!r} is not an integer", invariant="seed integer") from None


def normalize_config(config):
    """Fill defaults and check types; raises InvalidArgument."""
    if not isinstance(config, dict):
        raise InvalidArgument("config must be a JSON object", invariant="config object")
    known = {"case", "cartan", "eta", "ops", "tol_overrides", "seed", "output"}
    extra = set(config) - known
    if extra:
        raise InvalidArgument(f"unknown config keys {sorted(extra)}", invariant="config keys")
    if "case" not in config:
        raise InvalidArgument("config needs a case", invariant="case present")
    cfg = dict(config)
    ops = cfg.get("ops", list(ALL_OPS))
    if isinstance(ops, str):
        ops = [o.strip() for o in ops.split(",") if o.strip()]
    if ops == ["all"]:
        ops = list(ALL_OPS)
    if not ops or any(o not in ALL_OPS for o in ops):
        raise InvalidArgument(f"ops must be a nonempty subset of {ALL_OPS}", invariant="ops nonempty subset")
    cfg["ops"] = [o for o in ALL_OPS if o in ops]
    cfg.setdefault("cartan", "fundamental")
    seed = cfg.get("seed")
    cfg["seed"] = _seed_default() if seed is None else seed
    if not isinstance(cfg["seed"], int) or isinstance(cfg["seed"], bool):
        raise InvalidArgument("seed must be an integer", invariant="seed integer")
    tol = cfg.get("tol_overrides") or {}
    if not isinstance(tol, dict):
        raise InvalidArgument("tol_overrides must be an object", invariant="tol_overrides map")
    cfg["tol_overrides"] = {k: float(v) for k, v in sorted(tol.items())}
    eta = cfg.get("eta")
    if eta is not None:
        if not isinstance(eta, (list, tuple)) or not all(isinstance(x, (int, float)) for x in eta):
            raise InvalidArgument("eta must be a list of numbers", invariant="eta real list")
        cfg["eta"] = [float(x) for x in eta]
    return cfg


def _complex_rows(data):
    return np.array([[complex(*z) if isinstance(z, (list, tuple)) else complex(z) for z in row]
                     for row in data], dtype=complex)


def _setup_from(case, tol):
    if isinstance(case, str):
        return build_case(case, tol)
    if not isinstance(case, dict) or not {"algebra", "theta", "sigma1", "sigma2"} <= set(case):
        raise InvalidArgument("inline case needs algebra, theta, sigma1, sigma2", invariant="inline case")
    alg = LieAlgebra.from_dict(case["algebra"])
    invs = [Involution.from_dict(case[k]) for k in ("theta", "sigma1", "sigma2")]
    return make_setup(alg, *invs, name=case.get("name", "inline"), tol=tol)


def _datum_from(setup, spec, seed, tol):
    if spec == "fundamental":
        return standard_cartan_menu(setup, seed, tol)[0]
    if isinstance(spec, int) and not isinstance(spec, bool):
        menu = standard_cartan_menu(setup, seed, tol)
        if not 0 <= spec < len(menu):
            raise InvalidArgument(f"menu index {spec} out of range (menu has {len(menu)})",
                                  invariant="cartan menu index")
        return menu[spec]
    if spec == "compact":
        menu = [d for d in standard_cartan_menu(setup, seed, tol) if d.is_compact]
        if not menu:
            raise InvalidArgument("no compact Cartan datum in the menu", invariant="compact datum exists")
        return menu[0]
    if isinstance(spec, dict) and "c_basis" in spec:
        nu = _complex_rows([spec["nu"]])[0] if spec.get("nu") is not None else None
        c0 = fundamental_cartan(setup, seed, tol).dim
        return make_datum(setup, nu, _complex_rows(spec["c_basis"]), label="inline", tol=tol, seed=seed,
                          c0_dim=c0)
    raise InvalidArgument(f"bad cartan spec {spec!r}", invariant="cartan spec")


# -- serialization -------------------------------------------------------------------

def _num(x):
    x = float(x)
    if not math.isfinite(x):
        return None
    r = float(f"{x:.{DIGITS}g}")
    return 0.0 if r == 0 else r


def _cplx(z):
    z = complex(z)
    return [_num(z.real), _num(z.imag)]


def _vec(v):
    v = np.asarray(v)
    if np.iscomplexobj(v):
        return [_cplx(z) for z in v]
    return [_num(z) for z in v]


def _weight_rows(system):
    rows = []
    for w in system.weights:
        rows.append({
            "index": w.index,
            "lambda": [_cplx(z) for z in w.lam],
            "a": _cplx(w.a),
            "reality": w.reality,
            "dim": w.dim,
            "positive": bool(system.positive is not None and w.index in system.positive),
            "normalization_sign": system.signs.get(w.index),
        })
    return rows


def _block_rows(report, system):
    out = []
    for b in report.blocks:
        m = b.matrix
        row = {
            "case_tag": b.case_tag,
            "weights": sorted({i for i, _ in b.index_set}),
            "size": b.size,
            "hermitian_residual": _num(b.hermitian_residual()),
            "inertia_per_coordinate": [list(inertia(m[:, :, k], DEFAULT_TOL.inertia)[0])
                                       for k in range(m.shape[2])],
        }
        if report.scalar_unit is not None:
            s = m[:, :, 0] / report.scalar_unit[0]
            row["inertia"] = list(inertia(s, DEFAULT_TOL.inertia)[0])
        out.append(row)
    return out


# -- pipeline ------------------------------------------------------------------------

def run(config):
    """Run the configured pipeline and return the report as a dict."""
    cfg = normalize_config(config)
    tol = DEFAULT_TOL.override(**cfg["tol_overrides"])
    seed = cfg["seed"]
    ops = set(cfg["ops"])
    stage = {"module": "catalog", "op": "build_case"}
    with warnings.catch_warnings(record=True) as wlist:
        warnings.simplefilter("always")
        try:
            report = _run(cfg, tol, seed, ops, stage)
        except LevilabError as exc:
            # name the stage when the raising code did not
            exc.module = exc.module or stage["module"]
            exc.op = exc.op or stage["op"]
            raise
        caught = [f"{w.category.__name__}: {w.message}" for w in wlist]
    report["warnings"] = sorted(set(caught))
    return report


def _run(cfg, tol, seed, ops, stage):
    setup = _setup_from(cfg["case"], tol)
    stage.update(module="cartan", op="make_datum")
    datum = _datum_from(setup, cfg["cartan"], seed, tol)
    stage.update(module="weights", op="extended_decomposition")
    system = extended_decomposition(setup, datum, tol)
    system = levi_basis(positive_system(system, seed=seed, tol=tol), tol)
    res = setup.residuals()
    rep = {
        "levilab_version": __version__,
        "status": "ok",
        "config": {
            "case": cfg["case"] if isinstance(cfg["case"], str) else cfg["case"].get("name", "inline"),
            "cartan": cfg["cartan"] if not isinstance(cfg["cartan"], dict) else "inline",
            "eta": cfg.get("eta"),
            "ops": cfg["ops"],
            "seed": seed,
            "tol_overrides": cfg["tol_overrides"],
        },
        "setup": {
            "name": setup.name,
            "dim_complex": setup.dim,
            "dims": {k: len(getattr(setup, k)) for k in ("g1", "k1", "p1", "g2", "k2", "p2")},
            "max_residual": _num(max(res.values())),
        },
        "cartan": {
            "label": datum.label,
            "dim": datum.dim,
            "dim_t": datum.dim_t,
            "is_compact": datum.is_compact,
            "nu": _vec(datum.nu),
            "c_basis": [_vec(x) for x in datum.c_basis],
        },
    }
    if "weights" in ops:
        rep["weights"] = _weight_rows(system)
        rep["irreducible"] = bool(is_irreducible(system, tol))

    need_base = ops & {"orbit", "levi", "cone", "domains", "verify"}
    if not need_base:
        return rep
    eta = cfg.get("eta")
    if eta is None:
        eta = [0.0] * datum.dim
    stage.update(module="cartan", op="BasePoint")
    base = BasePoint(datum, eta)
    stage.update(module="orbit", op="orbit_profile")
    prof = orbit_profile(system, base, tol)
    stage.update(module="leviform", op="levi_matrix")
    if "orbit" in ops:
        rep["orbit"] = {
            "lambda_tilde": list(prof.lambda_tilde_z),
            "codim": prof.codim,
            "strongly_regular": prof.strongly_regular,
            "complex_tangent_dim": prof.complex_tangent_dim,
            "min_gap": _num(prof.min_gap),
            "near_critical": prof.near_critical,
            "fixed_space_angle": _num(prof.fixed_space_angle),
        }
    levi = None
    if ops & {"levi", "cone", "domains"} and prof.strongly_regular:
        levi = levi_matrix(system, base, tol, prof)
    if "levi" in ops:
        if levi is None:
            rep["levi"] = {"available": False, "reason": "base point is not strongly regular"}
        else:
            rep["levi"] = {
                "available": True,
                "blocks": _block_rows(levi, system),
                "block_deviation": _num(levi.block_deviation),
                "cross_block_residual": _num(levi.cross_block_residual),
                "inertia": list(levi.inertia) if levi.inertia is not None else None,
                "eigenvalues": _vec(levi.eigenvalues) if levi.eigenvalues is not None else None,
            }
    if "cone" in ops:
        if levi is None:
            rep["cone"] = {"available": False, "reason": "base point is not strongly regular"}
        else:
            stage.update(module="leviform", op="cone_verdict")
            cv = cone_verdict(system, base, tol, prof, levi)
            c = cv.cone
            rep["cone"] = {
                "available": True,
                "generators": [_vec(g) for g in c.generators],
                "tags": list(c.tags),
                "rank": c.rank,
                "full": c.full,
                "pointed": c.pointed,
                "farkas_certificate": _vec(c.certificate) if c.certificate is not None else None,
                "case": cv.cone_case,
                "prediction_agrees": cv.prediction_agrees,
                "stein_obstruction": cv.stein_obstruction,
                "notes": cv.notes,
            }
    if "domains" in ops:
        stage.update(module="domains", op="domain_report")
        dr = domain_report(system, base, levi, seed, tol)
        r1 = dr.rank1
        rep["domains"] = {
            "hermitian_type": dr.hermitian_type,
            "rank1": None if r1 is None else {
                "signature": [r1["n_plus"], r1["n_minus"], r1["n_zero"]],
                "q": r1["q"],
                "q_formula": r1["q_formula"],
                "q_formula_positive": r1["q_formula_positive"],
                "branch": r1["branch"],
                "agrees": r1["agrees"],
            },
            "cmax_defined": dr.cmax_defined,
            "eta_in_cmax": dr.eta_in_cmax,
            "eta_in_cmax_interior": dr.eta_in_cmax_interior,
            "q_complete": dr.q_complete,
            "q_complete_variant": dr.q_complete_variant,
            "q_discrepancy": dr.q_discrepancy,
            "compactness_flags": {str(k): v for k, v in sorted(dr.compactness_flags.items())},
            "notes": dr.notes,
        }
    if "verify" in ops:
        stage.update(module="verify", op="verify")
        rep["verify"] = _verify(setup, system, base, prof, levi, seed, tol)
    return rep


def _verify(setup, system, base, prof, levi, seed, tol):
    adj = adjoint_crosscheck(system)
    out = {
        "adjoint_max_residual": _num(adj["max"]),
        "adjoint_passed": adj["passed"],
    }
    dev, cross = formula_equivalence(system, trials=20, seed=seed, tol=tol)
    out["formula_deviation"] = _num(dev)
    out["formula_cross_block"] = _num(cross)
    ext = {"available": False, "reason": None}
    if levi is None or levi.inertia is None or prof.codim != 1:
        ext["reason"] = "extrinsic oracle needs a strongly regular hypersurface point"
    else:
        try:
            probe = make_probe(setup, system, base, seed=seed)
            iner, ev = extrinsic_levi_inertia(probe)
            ext = {
                "available": True,
                "inertia": list(iner),
                "eigenvalues": _vec(ev),
                "invariance_residual": _num(probe.invariance),
                "agrees": sorted(iner[:2]) == sorted(levi.inertia[:2]) and iner[2] == levi.inertia[2],
            }
        except InvalidArgument as exc:
            ext["reason"] = str(exc)
    out["extrinsic"] = ext
    return out


def load_schema(name):
    """The shipped JSON schema ``name`` ('config' or 'report')."""
    text = resources.files("levilab").joinpath("schemas", f"{name}.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def render(report):
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- entry point -----------------------------------------------------------------------

def _parser():
    p = argparse.ArgumentParser(prog="levilab", description="Levi forms of closed double-coset orbits.")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--case", help="catalog case, e.g. sl2:s11-theta:k=1")
    p.add_argument("--cartan", help="'fundamental', 'compact' or a menu index")
    p.add_argument("--eta", help="comma separated coordinates of eta")
    p.add_argument("--ops", help=f"comma separated subset of {','.join(ALL_OPS)} or 'all'")
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", action="append", default=[], metavar="KEY=VAL")
    p.add_argument("--verify", action="store_true", help="add the verify stage")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--quiet", action="store_true", help="no report on stdout")
    return p


def _config_from_args(args):
    cfg = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidArgument(f"cannot read config: {exc}", invariant="config readable") from None
    if args.case:
        cfg["case"] = args.case
    if args.cartan is not None:
        cfg["cartan"] = int(args.cartan) if args.cartan.lstrip("-").isdigit() else args.cartan
    if args.eta is not None:
        try:
            cfg["eta"] = [float(x) for x in args.eta.split(",") if x.strip()]
        except ValueError:
            raise InvalidArgument(f"cannot parse eta {args.eta!r}", invariant="eta real list") from None
    if args.ops is not None:
        cfg["ops"] = args.ops
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.tol:
        tol = dict(cfg.get("tol_overrides") or {})
        for item in args.tol:
            key, sep, val = item.partition("=")
            if not sep:
                raise InvalidArgument(f"--tol expects KEY=VAL, got {item!r}", invariant="tol_overrides map")
            try:
                tol[key] = float(val)
            except ValueError:
                raise InvalidArgument(f"bad tolerance value {val!r}", invariant="tol_overrides map") from None
        cfg["tol_overrides"] = tol
    if args.verify:
        ops = cfg.get("ops", list(ALL_OPS))
        if isinstance(ops, str):
            ops = ops.split(",")
        if "verify" not in ops and ops != ["all"]:
            cfg["ops"] = list(ops) + ["verify"]
    return cfg


def main(argv=None):
    args = _parser().parse_args(argv)
    out_path = args.out
    try:
        cfg = _config_from_args(args)
        out_path = out_path or cfg.pop("output", None)
        report = run(cfg)
        code = 0
    except LevilabError as exc:
        report = {"status": "error", "error": exc.to_dict(), "levilab_version": __version__}
        code = exc.exit_code
    text = render(report)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif not args.quiet:
        sys.stdout.write(text)
    if code:
        err = report["error"]
        sys.stderr.write(f"levilab: {err['module']}.{err['op']}: {err['message']} [{err['invariant']}]\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
