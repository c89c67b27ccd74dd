"""Configuration-driven runner: build ambient + surface, verify, report.

One process handles one JSON config.  The report is a single JSON object
{config echo, per-check results, wall_times}; field dumps go to CSV on
request.  Exit status: 0 when every requested check passed its tolerance
(and any `expect` block matched), 2 on a tolerance/expectation failure,
1 on configuration or ambient errors (including conformal-chart-only
identities requested on non-conformal surfaces).

With threads = 1 the report is byte-identical across runs; wall-clock
timings are only emitted for threads > 1 because they would break that
guarantee.
"""

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import ambient, immersion, verify, warp

__all__ = ["ConfigError", "load_config", "validate_config", "run", "main"]

DEFAULT_TOLERANCES = {"umbilic_tol": 1e-5, "rad_floor": 1e-12, "p_norm": 4.0}
IDENTITY_TOL = {f"I{k}": 1e-5 for k in range(1, 10)}
IDENTITY_TOL["I10"] = 1e-9
CHECK_NAMES = set(verify.IDENTITY_IDS) | {"et_test", "classify", "zero_index"}
CSV_COLUMNS = ["chart_id", "i", "j", "z_re", "z_im", "X1", "X2", "X3",
               "alpha", "H", "K", "nu", "kappa1", "kappa2", "P_re", "P_im"]


class ConfigError(ValueError):
    pass


def _check_keys(d, allowed, required, ctx):
    if not isinstance(d, dict):
        raise ConfigError(f"{ctx} must be an object")
    unknown = set(d) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {ctx}")
    missing = set(required) - set(d)
    if missing:
        raise ConfigError(f"missing key(s) {sorted(missing)} in {ctx}")


def _number(d, key, ctx, cond=None, msg=""):
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{ctx}.{key} must be a number")
    v = float(v)
    if cond is not None and not cond(v):
        raise ConfigError(f"{ctx}.{key} {msg} (got {v})")
    return v


def _vec3(d, key, ctx):
    v = d[key]
    if not isinstance(v, (list, tuple)) or len(v) != 3 \
            or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v):
        raise ConfigError(f"{ctx}.{key} must be a list of 3 numbers")
    return [float(x) for x in v]


def validate_config(raw) -> dict:
    """Strict validation; unknown keys are errors.  Returns the filled config."""
    _check_keys(raw, ["manifold", "surface", "checks", "tolerances", "output",
                      "expect", "threads"],
                ["manifold", "surface", "checks", "output"], "config")

    man = raw["manifold"]
    _check_keys(man, ["type", "c", "m", "q"], ["type"], "manifold")
    mtype = man["type"]
    if mtype == "space_form":
        _check_keys(man, ["type", "c"], ["type", "c"], "manifold(space_form)")
        manifold = {"type": "space_form", "c": _number(man, "c", "manifold")}
    elif mtype == "dss":
        _check_keys(man, ["type", "m", "c"], ["type", "m"], "manifold(dss)")
        m = _number(man, "m", "manifold", lambda v: v > 0, "must be positive")
        c = _number(man, "c", "manifold") if "c" in man else 0.0
        if c > 0.0 and c * m * m >= 4.0 / 27.0:
            raise ConfigError("manifold(dss): c*m^2 must be below 4/27")
        manifold = {"type": "dss", "m": m, "c": c}
    elif mtype == "rn":
        _check_keys(man, ["type", "m", "q"], ["type", "m", "q"], "manifold(rn)")
        m = _number(man, "m", "manifold")
        q = _number(man, "q", "manifold")
        if not (m > 2.0 * q > 0.0):
            raise ConfigError("manifold(rn): parameters must satisfy m > 2q > 0")
        manifold = {"type": "rn", "m": m, "q": q}
    else:
        raise ConfigError(f"unknown manifold type {mtype!r}")

    sur = raw["surface"]
    _check_keys(sur, ["type", "params", "grid_n"], ["type", "params", "grid_n"], "surface")
    stype = sur["type"]
    par = sur["params"]
    if stype == "slice":
        _check_keys(par, ["t0"], ["t0"], "surface.params(slice)")
        params = {"t0": _number(par, "t0", "surface.params")}
    elif stype == "euclidean_sphere":
        _check_keys(par, ["center", "R"], ["center", "R"], "surface.params(euclidean_sphere)")
        params = {"center": _vec3(par, "center", "surface.params"),
                  "R": _number(par, "R", "surface.params", lambda v: v > 0, "must be positive")}
    elif stype in ("graph", "perturbed_slice"):
        _check_keys(par, ["t0", "eps", "mode"], ["t0", "eps", "mode"],
                    f"surface.params({stype})")
        l, m_ = immersion._parse_mode(par["mode"])
        params = {"t0": _number(par, "t0", "surface.params"),
                  "eps": _number(par, "eps", "surface.params"),
                  "mode": f"Y{l}{m_}"}
    elif stype == "ellipsoid":
        _check_keys(par, ["semiaxes"], ["semiaxes"], "surface.params(ellipsoid)")
        semi = _vec3(par, "semiaxes", "surface.params")
        if any(s <= 0 for s in semi):
            raise ConfigError("surface.params.semiaxes must be positive")
        params = {"semiaxes": semi}
    else:
        raise ConfigError(f"unknown surface type {stype!r}")
    grid_n = sur["grid_n"]
    if isinstance(grid_n, bool) or not isinstance(grid_n, int) or not 32 <= grid_n <= 2048:
        raise ConfigError(f"surface.grid_n must be an integer in [32, 2048], got {grid_n}")
    surface = {"type": stype, "params": params, "grid_n": grid_n}

    checks = raw["checks"]
    if not isinstance(checks, list) or not checks:
        raise ConfigError("checks must be a non-empty list")
    for c in checks:
        if c not in CHECK_NAMES:
            raise ConfigError(f"unknown check {c!r}; known: {sorted(CHECK_NAMES)}")
    checks = list(checks)

    tol = dict(DEFAULT_TOLERANCES)
    if "tolerances" in raw:
        _check_keys(raw["tolerances"], list(DEFAULT_TOLERANCES), [], "tolerances")
        for k in raw["tolerances"]:
            tol[k] = _number(raw["tolerances"], k, "tolerances",
                             lambda v: v > 0, "must be positive")

    out = raw["output"]
    _check_keys(out, ["report_path", "csv_path", "convergence_pair"],
                ["report_path"], "output")
    if not isinstance(out["report_path"], str):
        raise ConfigError("output.report_path must be a string")
    output = {"report_path": out["report_path"],
              "csv_path": out.get("csv_path"),
              "convergence_pair": bool(out.get("convergence_pair", False))}
    if output["csv_path"] is not None and not isinstance(output["csv_path"], str):
        raise ConfigError("output.csv_path must be a string")
    if output["convergence_pair"] and grid_n > 1024:
        raise ConfigError("convergence_pair doubles grid_n; grid_n must be <= 1024")

    cfg = {"manifold": manifold, "surface": surface, "checks": checks,
           "tolerances": tol, "output": output}

    if "expect" in raw:
        _check_keys(raw["expect"], ["umbilic", "cmc", "slice"], [], "expect")
        exp = {}
        for k, v in raw["expect"].items():
            if not isinstance(v, bool):
                raise ConfigError(f"expect.{k} must be a boolean")
            exp[k] = v
        if exp and "classify" not in checks:
            raise ConfigError("expect block requires 'classify' in checks")
        cfg["expect"] = exp

    if "threads" in raw:
        th = raw["threads"]
        if isinstance(th, bool) or not isinstance(th, int) or th < 1:
            raise ConfigError("threads must be a positive integer")
        cfg["threads"] = th
    return cfg


def load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return validate_config(raw)


# ---------------------------------------------------------------------------

def _build_model(man):
    if man["type"] == "space_form":
        return warp.make_space_form(man["c"])
    if man["type"] == "dss":
        return warp.make_dss(man["m"], man["c"])
    return warp.make_rn(man["m"], man["q"])


def _default_t_ref(model):
    if model.kind == "sphere":
        return 0.5 * math.pi / math.sqrt(model.params["c"])
    if model.kind in ("euclidean", "hyperbolic"):
        return 1.0
    return 0.5 * (model.t_min + model.t_max)


def _build_factor(model):
    t_ref = _default_t_ref(model)
    r_anchor = float(np.asarray(model.eval(t_ref)[0]))
    return ambient.radial_from_warp(model, r_anchor, t_ref=t_ref)


def _build_spec(surface):
    stype = surface["type"]
    par = surface["params"]
    if stype == "slice":
        return immersion.SurfaceSpec.slice_at(par["t0"])
    if stype == "euclidean_sphere":
        return immersion.SurfaceSpec.euclidean_sphere(par["center"], par["R"])
    if stype == "perturbed_slice":
        return immersion.SurfaceSpec.perturbed_slice(par["t0"], par["eps"], par["mode"])
    if stype == "graph":
        l, m = immersion._parse_mode(par["mode"])
        t0, eps = par["t0"], par["eps"]

        def fn(omega):
            return t0 + eps * immersion.real_sph_harm(l, m, omega)

        return immersion.SurfaceSpec.graph(fn)
    return immersion.SurfaceSpec.ellipsoid(par["semiaxes"])


def _fmt(x):
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return "nan"
    return repr(float(x))


def _dump_csv(path, shape_f):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for name in shape_f.charts:
            cf = shape_f.chart(name)
            n = cf.z.shape[0]
            p_re = cf.P.real if cf.P is not None else None
            p_im = cf.P.imag if cf.P is not None else None
            for i in range(n):
                for j in range(n):
                    row = [name, str(i), str(j),
                           _fmt(cf.z[i, j].real), _fmt(cf.z[i, j].imag),
                           _fmt(cf.X[i, j, 0]), _fmt(cf.X[i, j, 1]), _fmt(cf.X[i, j, 2]),
                           _fmt(cf.alpha[i, j]), _fmt(cf.H[i, j]), _fmt(cf.K[i, j]),
                           _fmt(cf.nu[i, j]), _fmt(cf.kappa1[i, j]), _fmt(cf.kappa2[i, j]),
                           _fmt(p_re[i, j] if p_re is not None else None),
                           _fmt(p_im[i, j] if p_im is not None else None)]
                    fh.write(",".join(row) + "\n")


def _order(base, fine):
    if base < 1e-12 and fine < 1e-12:
        return None
    if fine <= 0.0:
        return None
    return math.log2(base / fine)


def run(config: dict, threads: int = None, csv_path: str = None) -> int:
    """Execute one validated config; writes report (+ optional CSV), returns exit code."""
    cfg = validate_config(config)
    if threads is None:
        threads = cfg.get("threads", 1)
    if csv_path is None:
        csv_path = cfg["output"]["csv_path"]

    model = _build_model(cfg["manifold"])
    factor = _build_factor(model)
    spec = _build_spec(cfg["surface"])
    n = cfg["surface"]["grid_n"]
    tols = cfg["tolerances"]

    timings = {}
    t0 = time.perf_counter()
    grid = immersion.build_surface(spec, factor, n)
    shape = immersion.shape_field(grid, factor, threads=threads)
    timings["build"] = time.perf_counter() - t0

    pair = cfg["output"]["convergence_pair"]
    grid2 = shape2 = None
    if pair and any(c in verify.IDENTITY_IDS and c != "I10" for c in cfg["checks"]):
        t0 = time.perf_counter()
        grid2 = immersion.build_surface(spec, factor, 2 * n)
        shape2 = immersion.shape_field(grid2, factor, threads=threads)
        timings["build_pair"] = time.perf_counter() - t0

    results = {}
    all_passed = True
    verdict = None
    for check in cfg["checks"]:
        t0 = time.perf_counter()
        if check in verify.IDENTITY_IDS:
            rep = verify.evaluate_identity(
                grid if check != "I10" else None, factor, model, check,
                shape=shape, threads=threads)
            if pair and check != "I10":
                rep2 = verify.evaluate_identity(grid2, factor, model, check,
                                                shape=shape2, threads=threads)
                rep.convergence_order = _order(rep.max_residual, rep2.max_residual)
            tol = IDENTITY_TOL[check]
            passed = rep.max_residual < tol
            results[check] = {"report": rep.to_json(), "tolerance": tol, "passed": passed}
        elif check == "et_test":
            rep = verify.et_test(grid, factor, model, shape=shape, p=tols["p_norm"],
                                 rad_floor=tols["rad_floor"],
                                 umbilic_tol=tols["umbilic_tol"], threads=threads)
            passed = True
            results[check] = {"report": rep.to_json(), "passed": True}
        elif check == "classify":
            verdict = verify.classify(grid, factor, model, tol=tols["umbilic_tol"],
                                      shape=shape, threads=threads)
            passed = True
            exp = cfg.get("expect", {})
            mism = {k: getattr(verdict, k) for k in exp if getattr(verdict, k) != exp[k]}
            if mism:
                passed = False
            results[check] = {"report": verdict.to_json(), "passed": passed,
                              "expect_mismatch": sorted(mism) if mism else []}
        else:  # zero_index
            rep = verify.hopf_zero_indices(grid, factor, shape=shape, threads=threads)
            results[check] = {"report": rep.to_json(), "passed": True}
            passed = True
        timings[check] = time.perf_counter() - t0
        all_passed = all_passed and passed

    if csv_path:
        _dump_csv(csv_path, shape)

    report = {
        "config": cfg,
        "results": results,
        "wall_times": None if threads == 1 else {k: round(v, 6) for k, v in timings.items()},
    }
    with open(cfg["output"]["report_path"], "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0 if all_passed else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="warphopf",
                                     description="verify surface geometry in warped ambients")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute one JSON config")
    p_run.add_argument("config", help="path to the JSON run configuration")
    p_run.add_argument("--threads", type=int, default=None)
    p_run.add_argument("--csv", default=None, help="override the CSV dump path")
    args = parser.parse_args(argv)

    threads = args.threads
    if threads is None:
        env = os.environ.get("WARPHOPF_THREADS")
        if env is not None:
            try:
                threads = int(env)
            except ValueError:
                print(f"warphopf: invalid WARPHOPF_THREADS={env!r}", file=sys.stderr)
                return 1
    try:
        cfg = load_config(args.config)
        code = run(cfg, threads=threads, csv_path=args.csv)
    except (ConfigError, verify.UnsupportedChartError) as exc:
        print(f"warphopf: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"warphopf: {exc}", file=sys.stderr)
        return 1
    return code


if __name__ == "__main__":
    sys.exit(main())
