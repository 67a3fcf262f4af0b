"""JSON interchange for cones, regions, and result tables.

Field names are fixed by docs/formats.md; unknown keys are rejected so that
configs stay portable across versions.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import regions as rg
from .cones import ConvexCone, circular_cone, full_space
from .regions import Region


class SchemaError(ValueError):
    pass


def _check_keys(doc, allowed, where):
    unknown = set(doc) - set(allowed)
    if unknown:
        raise SchemaError(f"unknown key {sorted(unknown)[0]!r} in {where}")


# ---------------------------------------------------------------------------
# cones


def cone_to_json(cone):
    if cone.kind == "circular":
        return {"kind": "circular", "dim": cone.dim,
                "axis": [float(v) for v in cone.axis],
                "half_angle": float(cone.half_angle)}
    return {"kind": "polyhedral", "dim": cone.dim,
            "normals": [[float(v) for v in row] for row in cone.normals]}


def cone_from_json(doc):
    if not isinstance(doc, dict):
        raise SchemaError("cone document must be an object")
    kind = doc.get("kind", "polyhedral")
    if kind == "circular":
        _check_keys(doc, {"kind", "dim", "axis", "half_angle"}, "cone")
        return circular_cone(float(doc["half_angle"]), dim=int(doc["dim"]),
                             axis=np.asarray(doc["axis"], dtype=float))
    if kind == "polyhedral":
        _check_keys(doc, {"kind", "dim", "normals"}, "cone")
        dim = int(doc["dim"])
        normals = np.asarray(doc.get("normals", []), dtype=float).reshape(-1, dim)
        if normals.shape[0] == 0:
            return full_space(dim)
        return ConvexCone(dim=dim, normals=normals)
    raise SchemaError(f"unknown cone kind {kind!r}")


# ---------------------------------------------------------------------------
# regions


def region_to_json(region):
    if region.kind == "polytope":
        return {"kind": "polytope",
                "halfspace_normals": _mat(region.A),
                "halfspace_offsets": _vec(region.b)}
    if region.kind == "spherical_sector":
        doc = {"kind": "spherical_sector",
               "center": _vec(region.center),
               "radius": float(region.radius),
               "halfspace_normals": _mat(region.A),
               "halfspace_offsets": _vec(region.b)}
        if region.circ is not None:
            cc, apex = region.circ
            doc["circular_constraint"] = {"axis": _vec(cc.axis),
                                          "half_angle": float(cc.half_angle),
                                          "apex": _vec(apex)}
        return doc
    if region.kind == "ellipsoid_sector":
        return {"kind": "ellipsoid_sector",
                "center": _vec(region.center),
                "semi_axes": _vec(region.semi_axes),
                "halfspace_normals": _mat(region.A),
                "halfspace_offsets": _vec(region.b)}
    if region.kind == "boolean_combination":
        return {"kind": "boolean_combination", "op": region.op,
                "children": [region_to_json(c) for c in region.children]}
    if region.kind == "affine_image":
        return {"kind": "affine_image", "matrix": _mat(region.matrix),
                "shift": _vec(region.shift), "base": region_to_json(region.base)}
    raise SchemaError(f"unknown region kind {region.kind!r}")


def region_from_json(doc, cone):
    if not isinstance(doc, dict):
        raise SchemaError("region document must be an object")
    kind = doc.get("kind")
    n = cone.dim
    if kind == "polytope":
        _check_keys(doc, {"kind", "halfspace_normals", "halfspace_offsets"}, "region")
        return rg.polytope_region(cone, np.asarray(doc["halfspace_normals"], float),
                                  np.asarray(doc["halfspace_offsets"], float))
    if kind == "spherical_sector":
        _check_keys(doc, {"kind", "center", "radius", "halfspace_normals",
                          "halfspace_offsets", "circular_constraint"}, "region")
        A = np.asarray(doc.get("halfspace_normals", []), float).reshape(-1, n)
        b = np.asarray(doc.get("halfspace_offsets", []), float)
        circ = None
        if "circular_constraint" in doc:
            cdoc = doc["circular_constraint"]
            _check_keys(cdoc, {"axis", "half_angle", "apex"}, "circular_constraint")
            cc = circular_cone(float(cdoc["half_angle"]), dim=n,
                               axis=np.asarray(cdoc["axis"], float))
            circ = (cc, np.asarray(cdoc["apex"], float))
        region = Region(kind="spherical_sector", cone=cone,
                        center=np.asarray(doc["center"], float),
                        radius=float(doc["radius"]), A=A, b=b, circ=circ)
        return rg._validate_in_cone(region)
    if kind == "sector":
        _check_keys(doc, {"kind", "radius", "center"}, "region")
        center = np.asarray(doc.get("center", np.zeros(n)), float)
        return rg.sector_region(cone, float(doc.get("radius", 1.0)), center=center)
    if kind == "half_ball":
        _check_keys(doc, {"kind", "center", "radius", "inward_normal"}, "region")
        return rg.half_ball_region(cone, np.asarray(doc["center"], float),
                                   float(doc["radius"]),
                                   np.asarray(doc["inward_normal"], float))
    if kind == "ellipsoid_sector":
        _check_keys(doc, {"kind", "center", "semi_axes", "halfspace_normals",
                          "halfspace_offsets"}, "region")
        A = np.asarray(doc.get("halfspace_normals", []), float).reshape(-1, n)
        b = np.asarray(doc.get("halfspace_offsets", []), float)
        return rg.ellipsoid_sector_region(
            cone, np.asarray(doc["semi_axes"], float),
            center=np.asarray(doc.get("center", np.zeros(n)), float),
            halfspaces=(A, b) if len(A) else None)
    if kind == "boolean_combination":
        _check_keys(doc, {"kind", "op", "children"}, "region")
        children = [region_from_json(c, cone) for c in doc["children"]]
        return rg.boolean_region(doc["op"], *children)
    if kind == "affine_image":
        _check_keys(doc, {"kind", "matrix", "shift", "base"}, "region")
        base = region_from_json(doc["base"], cone)
        return rg.affine_image_region(base, np.asarray(doc["matrix"], float),
                                      np.asarray(doc.get("shift", np.zeros(n)), float))
    raise SchemaError(f"unknown region kind {kind!r}")


def _vec(v):
    return [float(x) for x in np.asarray(v).ravel()]


def _mat(M):
    if M is None:
        return []
    return [[float(x) for x in row] for row in np.asarray(M)]


# ---------------------------------------------------------------------------
# tables


def format_float(x):
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return f"{x:.12g}"
    return str(x)


def rows_to_csv(rows, columns):
    """Deterministic CSV text: fixed column order, 12-significant-digit
    floats, newline-terminated."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(format_float(row.get(c, "")) for c in columns))
    return "\n".join(lines) + "\n"


def dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")
