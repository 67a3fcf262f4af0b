"""Command-line front end.

Subcommands: deficit, transport, sharpness-theta, sharpness-ellipsoid,
constant, lemmas, wedge. Every run writes a CSV table, a JSON mirror, and a
run_meta.json (tool version, seed, config hash) into --out-dir; outputs are
byte-identical for identical configs. Exit codes: 0 success, 1 validation
error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import deficits as df
from . import families as fm
from . import regions as rg
from . import transport as tp
from .cones import ConeError, optimal_recentring, sector_body
from .serialize import (SchemaError, cone_from_json, dump_json, format_float,
                        region_from_json, rows_to_csv)
from .svgplot import loglog_scatter

DEFAULT_SEED = rg.DEFAULT_SEED

CONFIG_KEYS = {
    "command", "cone", "region", "seed", "samples", "out_dir", "resolution",
    "thetas", "hs", "trials", "ys", "count", "out", "distance", "directions",
    "radii", "tolerances",
}
SAMPLE_KEYS = {"interior", "boundary", "transport"}


class ValidationError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    cone: dict | None = None
    region: dict | None = None
    seed: int = DEFAULT_SEED
    samples: dict = field(default_factory=dict)
    out_dir: str = "results"
    resolution: int = 4096
    thetas: list = None
    hs: list = None
    trials: int = 100
    ys: list = None
    count: int = 2000
    out: str | None = None
    distance: float | None = None
    directions: int = 64
    radii: int = 64
    tolerances: dict = field(default_factory=dict)

    def to_json(self):
        doc = {"command": self.command, "seed": self.seed,
               "out_dir": self.out_dir, "resolution": self.resolution,
               "trials": self.trials, "count": self.count,
               "directions": self.directions, "radii": self.radii}
        for key in ("cone", "region", "thetas", "hs", "ys", "out", "distance"):
            val = getattr(self, key)
            if val is not None:
                doc[key] = val
        if self.samples:
            doc["samples"] = self.samples
        if self.tolerances:
            doc["tolerances"] = self.tolerances
        return doc


def parse_config(text):
    """Validated RunConfig from a JSON document; collects every validation
    error instead of stopping at the first."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(doc, dict):
        raise ValidationError("config must be a JSON object")
    errors = []
    unknown = sorted(set(doc) - CONFIG_KEYS)
    for key in unknown:
        errors.append(f"unknown key {key!r}")
    command = doc.get("command")
    if command is None:
        errors.append("missing required key 'command'")
    elif command not in COMMANDS:
        errors.append(f"unknown command {command!r}")
    samples = doc.get("samples", {})
    if not isinstance(samples, dict):
        errors.append("'samples' must be an object")
        samples = {}
    else:
        for key in sorted(set(samples) - SAMPLE_KEYS):
            errors.append(f"unknown key {key!r} in samples")
    seed = doc.get("seed", DEFAULT_SEED)
    if not isinstance(seed, int) or seed < 0 or seed >= 2 ** 64:
        errors.append("'seed' must be an unsigned 64-bit integer")
        seed = DEFAULT_SEED
    cone_doc = doc.get("cone")
    region_doc = doc.get("region")
    for name, val in (("cone", cone_doc), ("region", region_doc)):
        if isinstance(val, str) and not Path(val).exists():
            errors.append(f"{name} file does not exist: {val}")
    if errors:
        raise ValidationError("; ".join(errors))
    return RunConfig(
        command=command, cone=cone_doc, region=region_doc, seed=seed,
        samples=samples, out_dir=doc.get("out_dir", "results"),
        resolution=int(doc.get("resolution", 4096)),
        thetas=doc.get("thetas"), hs=doc.get("hs"), trials=int(doc.get("trials", 100)),
        ys=doc.get("ys"), count=int(doc.get("count", 2000)), out=doc.get("out"),
        distance=doc.get("distance"), directions=int(doc.get("directions", 64)),
        radii=int(doc.get("radii", 64)), tolerances=doc.get("tolerances", {}))


def _load_doc(spec):
    if isinstance(spec, str):
        return json.loads(Path(spec).read_text())
    return spec


def _resolve_cone(config):
    if config.cone is None:
        raise ValidationError("this command needs a cone")
    return cone_from_json(_load_doc(config.cone))


def _resolve_region(config, cone):
    if config.region is None:
        raise ValidationError("this command needs a region")
    return region_from_json(_load_doc(config.region), cone)


def _write(out_dir, name, text):
    path = Path(out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def _emit_meta(config):
    canon = json.dumps(config.to_json(), sort_keys=True)
    digest = hashlib.sha256(canon.encode()).hexdigest()
    meta = {"tool": "coneiso", "version": __version__, "seed": config.seed,
            "config_sha256": digest, "command": config.command}
    _write(config.out_dir, "run_meta.json", dump_json(meta))


def emit_results(config, rows, columns, name, json_payload=None, svg=None):
    """CSV with fixed column order, a JSON mirror, and an optional SVG plot."""
    _write(config.out_dir, f"{name}.csv", rows_to_csv(rows, columns))
    payload = json_payload if json_payload is not None else {"rows": rows}
    _write(config.out_dir, f"{name}.json", dump_json(payload))
    if svg is not None:
        _write(config.out_dir, f"{name}.svg", svg)
    _emit_meta(config)


FAMILY_COLUMNS = ("parameter", "relative_deficit", "anisotropic_deficit",
                  "asymmetry", "constrained_asymmetry", "stability_ratio")


def _family_outputs(config, fam, name, xlabel="relative deficit"):
    rows = [r.to_dict() for r in fam.rows]
    cols = list(FAMILY_COLUMNS)
    for row in rows:
        for key in row:
            if key not in cols:
                cols.append(key)
    payload = {"rows": rows, "metadata": fam.metadata}
    svg = None
    if fam.fit is not None:
        payload["fit"] = fam.fit.to_dict()
        pts = [(r.relative_deficit, r.asymmetry) for r in fam.rows
               if r.relative_deficit > 0 and r.asymmetry > 0]
        if pts:
            xs, ys = zip(*pts)
            lx = [math.log10(x) for x in xs]
            ly = [math.log10(y) for y in ys]
            slope = fam.fit.slope
            intercept = (sum(ly) - slope * sum(lx)) / len(lx)
            svg = loglog_scatter(xs, ys, slope=slope, intercept=intercept,
                                 xlabel=xlabel, ylabel="asymmetry",
                                 title=fam.name)
    emit_results(config, rows, cols, name, json_payload=payload, svg=svg)


# ---------------------------------------------------------------------------
# commands


def cmd_deficit(config):
    cone = _resolve_cone(config)
    region = _resolve_region(config, cone)
    report = df.deficit_report(region, cone, resolution=config.resolution)
    row = report.to_dict()
    row["best_translation"] = " ".join(format_float(v)
                                       for v in row["best_translation"])
    emit_results(config, [row], df.DeficitReport.CSV_COLUMNS, "deficit",
                 json_payload=report.to_dict())
    return 0


def cmd_transport(config):
    cone = _resolve_cone(config)
    region = _resolve_region(config, cone)
    K = sector_body(cone)
    x0 = optimal_recentring(K)
    K0 = sector_body(cone, center=x0)
    plan = tp.solve_transport(region, K0, config.count, seed=config.seed)
    chain = tp.gromov_chain_report(region, cone, plan)
    plan_doc = {
        "mode": plan.mode, "count": plan.count, "seed": plan.seed,
        "cost": plan.cost, "duality_gap": plan.duality_gap,
        "scale": plan.scale,
        "displacement_mean": plan.displacement_mean.tolist(),
        "displacement_variance": plan.displacement_variance,
        "recentring": x0.tolist(),
        "source_points": plan.source_points.tolist(),
        "target_points": plan.target_points.tolist(),
        "assignment": plan.assignment.tolist(),
    }
    out_path = config.out or str(Path(config.out_dir) / "plan.json")
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    Path(out_path).write_text(dump_json(plan_doc))
    row = chain.to_dict()
    emit_results(config, [row], list(row.keys()), "transport",
                 json_payload={"chain": row, "plan_file": out_path})
    return 0


def cmd_sharpness_theta(config):
    thetas = config.thetas or [math.pi / 3, math.pi / 2, 2 * math.pi / 3, 2.8, 3.1]
    fam = fm.theta_cone_family(thetas, distance=config.distance,
                               resolution=config.resolution, seed=config.seed)
    _family_outputs(config, fam, "sharpness_theta")
    return 0


def cmd_sharpness_ellipsoid(config):
    hs = config.hs or list(range(2, 65))
    fam = fm.ellipsoid_family(hs, resolution=config.resolution, seed=config.seed)
    _family_outputs(config, fam, "sharpness_ellipsoid")
    return 0


def cmd_constant(config):
    cone = _resolve_cone(config)
    estimate, result = fm.constant_estimator(cone, config.trials, seed=config.seed,
                                             resolution=config.resolution)
    rows = [r.to_dict() for r in result.rows]
    payload = {"estimate": estimate, "rows": rows, "metadata": result.metadata}
    emit_results(config, rows, FAMILY_COLUMNS, "constant", json_payload=payload)
    return 0


def cmd_lemmas(config):
    if config.region is not None and config.cone is not None:
        cone = _resolve_cone(config)
        A = _resolve_region(config, cone)
    else:
        from .cones import full_space
        A = rg.unit_square_region(full_space(2))
    dirs = [np.array([math.cos(a), math.sin(a)])
            for a in 2 * math.pi * np.arange(8) / 8]
    ts = [0.1 * i for i in range(1, 11)]
    scan = fm.shift_difference_ratio_scan(A, dirs, ts)
    c, C, table = fm.shift_difference_lower_bound(A, config.directions,
                                                  config.radii)
    ratio_rows = scan["rows"]
    _write(config.out_dir, "lemmas_ratio.csv",
           rows_to_csv(ratio_rows, ("dx", "dy", "t", "f", "ratio")))
    lower_rows = table["rows"]
    _write(config.out_dir, "lemmas_lower.csv",
           rows_to_csv(lower_rows, ("angle", "t", "f")))
    payload = {"ratio_sup": scan["sup"],
               "directional_perimeters": scan["directional_perimeters"],
               "lower_c": c, "lower_C": C, "s": table["s"],
               "violations": table["violations"]}
    emit_results(config, [{"c": c, "C": C, "sup_ratio": scan["sup"],
                           "violations": len(table["violations"])}],
                 ("c", "C", "sup_ratio", "violations"), "lemmas",
                 json_payload=payload)
    return 0


def cmd_wedge(config):
    cone = _resolve_cone(config)
    if config.ys is None:
        raise ValidationError("wedge needs 'ys': a list of translation vectors")
    ys = [np.asarray(y, dtype=float) for y in config.ys]
    boundary = config.samples.get("boundary", 100_000)
    report = fm.wedge_identity_check(cone, ys, samples=boundary, seed=config.seed)
    rows = []
    for r in report["reports"]:
        rows.append({"y": " ".join(format_float(v) for v in r["y"]),
                     "identity": r["identity"], "witnesses": r["witnesses"],
                     "mismatch_measure": r["mismatch_measure"]})
    emit_results(config, rows, ("y", "identity", "witnesses", "mismatch_measure"),
                 "wedge", json_payload=report)
    return 0


COMMANDS = {
    "deficit": cmd_deficit,
    "transport": cmd_transport,
    "sharpness-theta": cmd_sharpness_theta,
    "sharpness-ellipsoid": cmd_sharpness_ellipsoid,
    "constant": cmd_constant,
    "lemmas": cmd_lemmas,
    "wedge": cmd_wedge,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _build_parser():
    p = _Parser(prog="coneiso", description=__doc__)
    sub = p.add_subparsers(dest="command")
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config document")
        sp.add_argument("--cone", help="cone JSON file")
        sp.add_argument("--region", help="region JSON file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out-dir")
        sp.add_argument("--samples", type=int, help="boundary/MC sample count")
        sp.add_argument("--resolution", type=int)
        sp.add_argument("--count", type=int)
        sp.add_argument("--out")
        sp.add_argument("--trials", type=int)
        sp.add_argument("--thetas", help="comma-separated opening angles")
        sp.add_argument("--hs", help="comma-separated family indices")
        sp.add_argument("--ys", help="semicolon-separated translation vectors")
        sp.add_argument("--distance", type=float)
    return p


def _merge_cli(config_doc, args):
    doc = dict(config_doc)
    doc["command"] = args.command
    if args.cone:
        doc["cone"] = args.cone
    if args.region:
        doc["region"] = args.region
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.out_dir:
        doc["out_dir"] = args.out_dir
    if args.samples is not None:
        doc.setdefault("samples", {})
        doc["samples"] = dict(doc["samples"], boundary=args.samples)
    if args.resolution is not None:
        doc["resolution"] = args.resolution
    if args.count is not None:
        doc["count"] = args.count
    if args.out:
        doc["out"] = args.out
    if args.trials is not None:
        doc["trials"] = args.trials
    if args.thetas:
        doc["thetas"] = [float(t) for t in args.thetas.split(",")]
    if args.hs:
        doc["hs"] = [int(h) for h in args.hs.split(",")]
    if args.ys:
        doc["ys"] = [[float(v) for v in group.split(",")]
                     for group in args.ys.split(";")]
    if args.distance is not None:
        doc["distance"] = args.distance
    return doc


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise ValidationError("missing command")
        config_doc = {}
        if args.config:
            path = Path(args.config)
            if not path.exists():
                raise ValidationError(f"config file does not exist: {args.config}")
            config_doc = json.loads(path.read_text())
            if not isinstance(config_doc, dict):
                raise ValidationError("config must be a JSON object")
        merged = _merge_cli(config_doc, args)
        config = parse_config(json.dumps(merged))
    except (ValidationError, SchemaError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return COMMANDS[config.command](config)
    except (ValidationError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (df.DeficitError, tp.TransportError, rg.RegionError, ConeError,
            fm.FamilyError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
