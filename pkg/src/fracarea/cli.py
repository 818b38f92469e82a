"""Command line front end.

Every command reads its settings from three layers, later ones winning:
a flat ``key=value`` file (``--config``), a JSON object (``--override``)
and explicit ``--key value`` flags. The seed is required. Outputs are CSV
or JSON; each starts with provenance (package version, command and the
resolved settings) and carries no timestamp, so identical settings give
byte-identical files.

Exit status is 0 on success, 2 when a computed verdict contradicts the
expectation attached to the run, and 1 on errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from dataclasses import replace
from importlib import metadata

import numpy as np

from . import area, flow, probes, shapes
from .curvature import QuadratureSpec, fmc_estimate, fmc_polar_2d
from .errors import ConfigError, FracAreaError
from .geometry import Params, build_polyline, build_polylines, sphere_measure
from .sides import normal_at

EXIT_OK, EXIT_ERROR, EXIT_VERIFY = 0, 1, 2

# name -> (kind, default, help); kinds: float, int, str, floats, point, bool
COMMON = {
    "s": ("float", 0.5, "fractional order in (0, 1)"),
    "cN": ("float", 1.0, "normalising constant of the kernel"),
    "n": ("int", 200_000, "Monte Carlo samples"),
    "seed": ("int", None, "random seed (required)"),
    "r_near": ("float", None, "excision radius (default: automatic)"),
    "R_far": ("float", None, "far cutoff (default: infinite)"),
}

OPTIONS = {
    "curvature": {
        "shape": ("str", "flat2d", "flat2d, flat3d, cone2d, cone3d, circle, dented2d, barrier"),
        "d": ("float", 1.0, "cone slope"),
        "z": ("point", None, "evaluation point"),
        "normal": ("point", None, "normal at z (default: surface normal)"),
        "radius": ("float", 1.0, "disk or circle radius"),
        "n_facets": ("int", 400, "facets of the circle"),
        "eps": ("float", 1e-3, "barrier well depth"),
        "bump": ("bool", False, "add the side bump to the barrier"),
        "expect": ("str", "auto", "auto, zero, positive, negative or none"),
    },
    "area": {
        "shape": ("str", "circle", "circle or segment"),
        "radius": ("float", 1.0, "circle radius or half length of the segment"),
        "n_facets": ("int", 400, "facets of the circle"),
        "omega_radius": ("float", 3.0, "radius of the ball Omega"),
        "oracle": ("bool", True, "also run the classical P_s oracle (circle only)"),
    },
    "cone-scan": {
        "d": ("floats", [0.5, 1.0, 2.0], "cone slopes"),
        "points": ("int", 5, "regular points per cone"),
    },
    "barrier-scan": {
        "eps": ("floats", [1e-2, 1e-3, 1e-4, 1e-5], "well depths"),
        "N": ("int", 2, "ambient dimension"),
        "orientation": ("int", -1, "sign of the normal relative to +e_N"),
    },
    "probe": {
        "shape": ("str", "flat2d", "flat2d, cone2d, dented2d, dented3d, neck, two-sheets"),
        "d": ("float", 1.0, "cone slope, neck height or sheet separation"),
        "probe": ("str", "plane", "plane or ball"),
        "axis": ("point", None, "slide direction (default: last axis for planes, first for balls)"),
        "direction": ("int", 1, "+1 from below, -1 from above (planes)"),
        "radius": ("float", 0.2, "ball radius"),
        "height": ("float", 0.0, "ball height along the last axis"),
        "expect": ("str", "none", "critical, violates or none"),
    },
    "flow": {
        "d": ("floats", [10.0], "separation(s); several values run a regime scan"),
        "init": ("str", "wall-chords", "flat-sheets, wall-chords, wall-chord or cone"),
        "h": ("float", 0.05, "remesh spacing"),
        "dt_safety": ("float", 0.1, "time step factor"),
        "max_steps": ("int", 4000, "step limit"),
        "stop_tol": ("float", 0.005, "sup |H| threshold"),
        "log_every": ("int", 10, "trace interval"),
        "audit_points": ("int", 10, "Monte Carlo audit points on the final curve"),
    },
    "limit-scan": {
        "shape": ("str", "segment", "segment or circle"),
        "s_values": ("floats", [0.5, 0.7, 0.9], "increasing orders"),
        "n_facets": ("int", 400, "facets of the circle"),
        "omega_radius": ("float", 3.0, "radius of the ball Omega"),
        "kappa": ("float", None, "limit constant (default: analytic)"),
    },
}


def _parse_value(kind, raw, where):
    """Convert a raw setting (text from a file or flag, or a JSON value)."""
    if raw is None:
        return None
    try:
        if isinstance(raw, str):
            text = raw.strip()
            if kind in ("float", "int") and text.lower() == "none":
                return None
            if kind == "float":
                return float(text)
            if kind == "int":
                return int(text)
            if kind in ("floats", "point"):
                return [float(x) for x in text.split(",") if x.strip()]
            if kind == "bool":
                if text.lower() in ("1", "true", "yes", "on"):
                    return True
                if text.lower() in ("0", "false", "no", "off"):
                    return False
                raise ValueError(text)
            return text
        if kind in ("floats", "point"):
            return [float(x) for x in (raw if isinstance(raw, list) else [raw])]
        if kind == "int":
            if isinstance(raw, bool) or float(raw) != int(raw):
                raise ValueError(raw)
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            return bool(raw)
        return str(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: cannot read {raw!r} as {kind}") from None


def read_kv(path):
    """Parse a flat ``key=value`` file; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    for i, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{i}: expected key=value, got {line!r}")
        k, v = (x.strip() for x in line.split("=", 1))
        if not k:
            raise ConfigError(f"{path}:{i}: empty key")
        out[k] = (v, f"{path}:{i}")
    return out


def resolve(command, config_path=None, override_path=None, flags=None):
    """Merge defaults, config file, JSON override and flags into one dict."""
    schema = {**COMMON, **OPTIONS[command]}
    cfg = {k: v[1] for k, v in schema.items()}
    layers = []
    if config_path:
        layers.append(read_kv(config_path))
    if override_path:
        try:
            with open(override_path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"{override_path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{override_path}:{exc.lineno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{override_path}: expected a JSON object")
        layers.append({k: (v, f"{override_path}:{k}") for k, v in data.items()})
    if flags:
        layers.append({k: (v, f"--{k}") for k, v in flags.items() if v is not None})
    for layer in layers:
        for k, (v, where) in layer.items():
            if k not in schema:
                raise ConfigError(f"{where}: unknown field {k!r} for {command}")
            cfg[k] = _parse_value(schema[k][0], v, where)
    if cfg["seed"] is None:
        raise ConfigError("seed: a seed is required (--seed, config file or override)")
    if not 0.0 < cfg["s"] < 1.0:
        raise ConfigError(f"s: must lie in (0, 1), got {cfg['s']}")
    return cfg


def _spec(cfg):
    R = cfg["R_far"]
    return QuadratureSpec(r_near=cfg["r_near"], R_far=math.inf if R is None else R,
                          n_samples=cfg["n"], seed=cfg["seed"])


def _params(cfg, N, s=None):
    return Params(N, cfg["s"] if s is None else s, float(cfg["cN"]))


def provenance(command, cfg):
    """Settings block printed at the top of every output."""
    try:
        version = metadata.version("fracarea")
    except metadata.PackageNotFoundError:
        version = "unknown"
    return {
        "package": f"fracarea {version}",
        "command": command,
        "sphere_measure_convention": "omega_{N-1} = surface measure of the unit sphere in R^N "
                                     f"(N=2: {sphere_measure(2)!r}, N=3: {sphere_measure(3)!r})",
        "settings": {k: cfg[k] for k in sorted(cfg)},
    }


def _json_dump(obj):
    return json.dumps(obj, indent=2, sort_keys=False, default=_json_default) + "\n"


def _json_default(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    raise TypeError(type(x).__name__)


def _csv_text(prov, rows, columns):
    buf = io.StringIO()
    for line in json.dumps(prov, sort_keys=False, default=_json_default).splitlines():
        buf.write(f"# {line}\n")
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\r\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for k, v in r.items()})
    return buf.getvalue()


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ------------------------------------------------------------------ shapes

def _circle(radius, n):
    t = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    return build_polyline(np.c_[radius * np.cos(t), radius * np.sin(t)], closed=True)


def _curvature_shape(cfg, params2, params3):
    shape = cfg["shape"]
    if shape == "flat2d":
        return shapes.make_flat_disk(cfg["radius"], N=2), 2, "zero"
    if shape == "flat3d":
        return shapes.make_flat_disk(cfg["radius"], N=3), 3, "zero"
    if shape == "cone2d":
        return shapes.make_cone_2d(cfg["d"]), 2, "zero" if cfg["d"] == 1.0 else "none"
    if shape == "cone3d":
        return shapes.make_cone_nd(), 3, "positive"
    if shape == "circle":
        return _circle(cfg["radius"], cfg["n_facets"]), 2, "none"
    if shape == "dented2d":
        return shapes.make_dented_disk(N=2), 2, "none"
    if shape == "barrier":
        M = shapes.make_barrier(shapes.BarrierSpec(cfg["eps"]), params2, with_bump=cfg["bump"])
        return M, 2, "none"
    raise ConfigError(f"shape: unknown shape {shape!r}")


def _check(expect, est):
    if expect == "zero":
        return est.contains(0.0)
    if expect == "positive":
        return est.value > est.halfwidth
    if expect == "negative":
        return est.value < -est.halfwidth
    return True


# ------------------------------------------------------------------ commands

def cmd_curvature(cfg, out):
    p2, p3 = _params(cfg, 2), _params(cfg, 3)
    M, N, auto = _curvature_shape(cfg, p2, p3)
    if cfg["z"] is None:
        raise ConfigError("z: an evaluation point is required")
    z = np.asarray(cfg["z"], dtype=float)
    if z.shape != (N,):
        raise ConfigError(f"z: expected {N} coordinates, got {len(z)}")
    nu = normal_at(M, z) if cfg["normal"] is None else np.asarray(cfg["normal"], dtype=float)
    params = p2 if N == 2 else p3
    est = fmc_estimate(M, z, nu, params, _spec(cfg))
    expect = auto if cfg["expect"] == "auto" else cfg["expect"]
    if expect not in ("zero", "positive", "negative", "none"):
        raise ConfigError(f"expect: unknown value {expect!r}")
    ok = _check(expect, est)
    result = {"estimate": est.to_dict(), "interval": list(est.interval), "normal": nu.tolist(),
              "expect": expect, "verified": ok}
    if N == 2 and cfg["R_far"] is None:
        result["polar_oracle"] = fmc_polar_2d(M, z, nu, params).value
    _emit(_json_dump({"provenance": provenance("curvature", cfg), "result": result}), out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_area(cfg, out):
    params = _params(cfg, 2)
    omega = area.Domain.ball(np.zeros(2), cfg["omega_radius"])
    r = cfg["radius"]
    if cfg["shape"] == "circle":
        M = _circle(r, cfg["n_facets"])
    elif cfg["shape"] == "segment":
        M = build_polyline([(-r, 0.0), (r, 0.0)])
    else:
        raise ConfigError(f"shape: unknown shape {cfg['shape']!r}")
    spec = _spec(cfg)
    est = area.per_s_estimate(M, omega, params, spec)
    result = {"per_s": est.to_dict(), "interval": list(est.interval)}
    ok = True
    if cfg["oracle"] and cfg["shape"] == "circle":
        # Per_s counts ordered pairs, P_s unordered ones
        orc = area.classical_ps_oracle(area.Region.ball(np.zeros(2), r), omega, params, spec)
        f = 2.0 * params.cN
        scaled = replace(orc, value=orc.value * f, std_error=orc.std_error * f, trunc_bound=orc.trunc_bound * f)
        ok = est.overlaps(scaled)
        result.update({"classical_ps": orc.to_dict(), "classical_scaled": scaled.to_dict(), "overlap": ok})
    _emit(_json_dump({"provenance": provenance("area", cfg), "result": result}), out)
    return EXIT_OK if ok else EXIT_VERIFY


def cone_points(d, k):
    """``k`` regular points spread over the four branches of the planar cone."""
    t = np.linspace(0.2, 0.8, k)
    signs = [(-1, 1), (1, 1), (1, -1), (-1, -1)]
    return [np.array([sx * ti, sy * d * ti]) for ti, (sx, sy) in zip(t, signs * k)]


def cmd_cone_scan(cfg, out):
    params = _params(cfg, 2)
    rows, ok = [], True
    for i, d in enumerate(cfg["d"]):
        M = shapes.make_cone_2d(d)
        ests = []
        for j, z in enumerate(cone_points(d, cfg["points"])):
            spec = replace(_spec(cfg), seed=cfg["seed"] + 1000 * i + j)
            nu = normal_at(M, z)
            e = fmc_estimate(M, z, nu, params, spec)
            ests.append(e)
            rows.append({"d": d, "point": j, "x1": z[0], "x2": z[1], "value": e.value, "std_error": e.std_error,
                         "trunc_bound": e.trunc_bound, "halfwidth": e.halfwidth, "sign": e.sign(),
                         "polar_oracle": fmc_polar_2d(M, z, nu, params).value})
        signs = {e.sign() for e in ests}
        if d == 1.0:
            ok &= all(e.contains(0.0) for e in ests)
        else:
            ok &= len(signs) == 1 and 0 not in signs
    cols = ["d", "point", "x1", "x2", "value", "std_error", "trunc_bound", "halfwidth", "sign", "polar_oracle"]
    _emit(_csv_text(provenance("cone-scan", cfg), rows, cols), out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_barrier_scan(cfg, out):
    N = cfg["N"]
    params = _params(cfg, N)
    nu = cfg["orientation"] * np.eye(N)[-1]
    rows, ok = [], True
    for i, eps in enumerate(cfg["eps"]):
        bs = shapes.BarrierSpec(eps)
        c = shapes.barrier_constants(bs, params)
        bound = c["c_bound"] * c["phi"] ** params.s * params.cN
        row = {"eps": eps, "phi": c["phi"], "bound": bound}
        for tag, bump in (("plain", False), ("bump", True)):
            M = shapes.make_barrier(bs, params, with_bump=bump)
            z = shapes.barrier_apex(M)
            spec = replace(_spec(cfg), seed=cfg["seed"] + 2 * i + bump)
            e = fmc_estimate(M, z, nu, params, spec)
            row.update({f"{tag}_value": e.value, f"{tag}_std_error": e.std_error, f"{tag}_trunc_bound": e.trunc_bound})
            if bump:
                row["bump_negative"] = bool(e.value < -e.halfwidth)
            else:
                row["plain_within_bound"] = bool(abs(e.value) <= 1.05 * bound)
                ok &= row["plain_within_bound"]
        rows.append(row)
    # largest eps from which every smaller tested eps has a significantly negative bump value
    thr = None
    for r in sorted(rows, key=lambda r: r["eps"]):
        if not r["bump_negative"]:
            break
        thr = r["eps"]
    for r in rows:
        r["negative_threshold"] = thr
    cols = ["eps", "phi", "bound", "plain_value", "plain_std_error", "plain_trunc_bound", "plain_within_bound",
            "bump_value", "bump_std_error", "bump_trunc_bound", "bump_negative", "negative_threshold"]
    _emit(_csv_text(provenance("barrier-scan", cfg), rows, cols), out)
    return EXIT_OK if ok else EXIT_VERIFY


def _probe_shape(cfg):
    shape, d = cfg["shape"], cfg["d"]
    if shape == "flat2d":
        return shapes.make_flat_disk(1.0, n_facets=20, N=2)
    if shape == "cone2d":
        return shapes.make_cone_2d(d)
    if shape == "dented2d":
        return shapes.make_dented_disk(N=2)
    if shape == "dented3d":
        return shapes.make_dented_disk(N=3)
    if shape == "neck":
        return shapes.make_neck_arcs(d)
    if shape == "two-sheets":
        chains = [np.c_[np.linspace(-1, 1, 21), np.zeros(21)], np.c_[np.linspace(1, -1, 21), np.full(21, -d)]]
        return build_polylines(chains)
    raise ConfigError(f"shape: unknown shape {shape!r}")


def cmd_probe(cfg, out):
    M = _probe_shape(cfg)
    N = M.N
    params = _params(cfg, N)
    spec = _spec(cfg)
    if cfg["probe"] == "plane":
        axis = np.eye(N)[-1] if cfg["axis"] is None else np.asarray(cfg["axis"])
        rep = probes.slide_hyperplane(M, axis, cfg["direction"], params, spec)
    elif cfg["probe"] == "ball":
        axis = None if cfg["axis"] is None else np.asarray(cfg["axis"])
        rep = probes.slide_ball(M, cfg["radius"], cfg["height"], params, spec, axis=axis)
    else:
        raise ConfigError(f"probe: unknown probe {cfg['probe']!r}")
    expect = cfg["expect"]
    if expect == "critical":
        ok = rep.verdict != probes.Verdict.VIOLATES
    elif expect == "violates":
        ok = rep.verdict == probes.Verdict.VIOLATES
    elif expect == "none":
        ok = True
    else:
        raise ConfigError(f"expect: unknown value {expect!r}")
    _emit(_json_dump({"provenance": provenance("probe", cfg), "result": rep.to_dict(), "verified": ok}), out)
    return EXIT_OK if ok else EXIT_VERIFY


def _flow_config(cfg, d):
    return flow.FlowConfig(d=d, dt_safety=cfg["dt_safety"], h_target=cfg["h"], max_steps=cfg["max_steps"],
                           stop_tol=cfg["stop_tol"], seed=cfg["seed"], log_every=cfg["log_every"])


def cmd_flow(cfg, out):
    params = _params(cfg, 2)
    ds = cfg["d"]
    if len(ds) > 1:
        rows, (lo, hi) = flow.regime_scan(ds, params, kind=cfg["init"], h=cfg["h"], dt_safety=cfg["dt_safety"],
                                          max_steps=cfg["max_steps"], stop_tol=cfg["stop_tol"], seed=cfg["seed"],
                                          log_every=cfg["log_every"])
        for r in rows:
            r["d_low"], r["d_high"] = lo, hi
        cols = ["d", "verdict", "steps", "signature", "regime", "min_component_gap", "min_wall_gap", "d_low", "d_high"]
        _emit(_csv_text(provenance("flow", cfg), rows, cols), out)
        return EXIT_OK
    d = ds[0]
    res = flow.flow_run(flow.initial_state(cfg["init"], d, cfg["h"]), _flow_config(cfg, d), params)
    rep = flow.connectivity_report(res.final)
    audit, audit_ok = flow.audit_state(res.final, params, cfg["audit_points"], _spec(cfg))
    summary = {
        "verdict": res.verdict,
        "topology": "Disconnected" if rep["n_components"] > 1 else "Connected",
        "n_components": rep["n_components"],
        "boundary_attachment": {str(k): v for k, v in rep["boundary_attachment"].items()},
        "min_component_gap": rep["min_pair_distance"],
        "min_wall_gap": res.rows[-1]["min_wall_gap"],
        "steps": res.final.step_count,
        "transitions": [list(t) for t in res.transitions],
        "audit_passed": audit_ok,
        "audit": [{"point": p.tolist(), **e.to_dict()} for p, e in audit],
    }
    prov = provenance("flow", cfg)
    if out is None:
        _emit(_json_dump({"provenance": prov, "result": summary}), None)
    else:
        os.makedirs(out, exist_ok=True)
        _emit(_csv_text(prov, res.rows, flow.TRACE_COLUMNS), os.path.join(out, "trace.csv"))
        final_rows = [{"chain": i, "x1": p[0], "x2": p[1]} for i, c in enumerate(res.final.chains) for p in c]
        _emit(_csv_text(prov, final_rows, ["chain", "x1", "x2"]), os.path.join(out, "final_curve.csv"))
        _emit(_json_dump({"provenance": prov, "result": summary}), os.path.join(out, "summary.json"))
    return EXIT_OK if audit_ok else EXIT_VERIFY


def cmd_limit_scan(cfg, out):
    omega = area.Domain.ball(np.zeros(2), cfg["omega_radius"])
    if cfg["shape"] == "segment":
        M, target = build_polyline([(-1.0, 0.0), (1.0, 0.0)]), 2.0
    elif cfg["shape"] == "circle":
        M, target = _circle(1.0, cfg["n_facets"]), 2.0 * math.pi
    else:
        raise ConfigError(f"shape: unknown shape {cfg['shape']!r}")
    plist = [_params(cfg, 2, s) for s in cfg["s_values"]]
    res = area.area_limit_scan(M, omega, plist, _spec(cfg))
    kappa = area.area_constant(plist[0]) if cfg["kappa"] is None else cfg["kappa"]
    rows = [dict(r) for r in res.rows]
    for r in rows:
        r.update({"limit": res.limit, "limit_std": res.limit_std, "kappa": kappa,
                  "measure_estimate": None if res.limit is None else res.limit / kappa, "measure_target": target})
    cols = ["s", "estimate", "std_error", "trunc_bound", "n_eval", "seed", "scaled", "scaled_std",
            "limit", "limit_std", "kappa", "measure_estimate", "measure_target"]
    _emit(_csv_text(provenance("limit-scan", cfg), rows, cols), out)
    return EXIT_OK


COMMANDS = {
    "curvature": cmd_curvature,
    "area": cmd_area,
    "cone-scan": cmd_cone_scan,
    "barrier-scan": cmd_barrier_scan,
    "probe": cmd_probe,
    "flow": cmd_flow,
    "limit-scan": cmd_limit_scan,
}


def set_threads(n):
    """Pool size for compiled kernels; results do not depend on it."""
    if n is None:
        env = os.environ.get("FRACMC_THREADS")
        if not env:
            return None
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"FRACMC_THREADS: expected an integer, got {env!r}") from None
    if n < 1:
        raise ConfigError(f"threads: must be positive, got {n}")
    import numba

    n = min(n, numba.config.NUMBA_NUM_THREADS)
    numba.set_num_threads(n)
    return n


def build_parser():
    parser = argparse.ArgumentParser(prog="fracarea", description="Fractional area and curvature experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key=value settings file")
        p.add_argument("--override", help="JSON object overriding the settings file")
        p.add_argument("--out", help="output file (directory for a single flow run)")
        p.add_argument("--threads", type=int, help="pool size (fallback: FRACMC_THREADS)")
        for key, (kind, _default, hlp) in {**COMMON, **OPTIONS[name]}.items():
            flag = "--" + key.replace("_", "-")
            p.add_argument(flag, dest=f"opt_{key}", default=None, help=hlp)
    return parser


def _join_negative(argv):
    """Attach values such as ``-0.5,0.5`` to their flag so argparse does not read them as options."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a.startswith("--") and "=" not in a and i + 1 < len(argv) and re.match(r"^-[\d.]", argv[i + 1]):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(_join_negative(list(sys.argv[1:] if argv is None else argv)))
    flags = {k[4:]: v for k, v in vars(args).items() if k.startswith("opt_")}
    try:
        cfg = resolve(args.command, args.config, args.override, flags)
        set_threads(args.threads)
        return COMMANDS[args.command](cfg, args.out)
    except (FracAreaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
