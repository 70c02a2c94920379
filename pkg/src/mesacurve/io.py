"""JSON curve documents: parsing with located diagnostics, and canonical serialization."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import jsonschema

from .cohomology import INF, Geometry, parse_coord
from .errors import DocumentSyntaxError, IntegrityViolation, MesaCurveError, SchemaViolation
from .graph import DualGraph, Edge, Vertex
from .linalg import format_fraction
from .monoid import MonoidElement
from .pl import PLFunction

FORMAT_VERSION = 1
RATIONAL = r"^-?[0-9]+(/[1-9][0-9]*)?$"
COORD = r"^(inf|-?[0-9]+(/[1-9][0-9]*)?)$"


def _schema(rank: int) -> dict:
    vec = {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": rank, "maxItems": rank}
    ident = {"type": "string", "minLength": 1}
    coord = {"type": "string", "pattern": COORD}
    return {
        "type": "object",
        "required": ["format_version", "monoid_rank", "vertices", "edges"],
        "additionalProperties": False,
        "properties": {
            "format_version": {"const": FORMAT_VERSION},
            "monoid_rank": {"type": "integer", "minimum": 0},
            "vertices": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "object",
                    "required": ["id"],
                    "additionalProperties": False,
                    "properties": {
                        "id": ident,
                        "genus": {"type": "integer", "minimum": 0},
                        "markings": {
                            "type": "array",
                            "items": {"type": "object", "required": ["id"], "additionalProperties": False,
                                      "properties": {"id": ident}},
                        },
                    },
                },
            },
            "edges": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["id", "ends", "delta"],
                    "additionalProperties": False,
                    "properties": {
                        "id": ident,
                        "ends": {"type": "array", "items": ident, "minItems": 2, "maxItems": 2},
                        "delta": vec,
                    },
                },
            },
            "pl": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "vertex_values": {"type": "object", "additionalProperties": vec},
                    "marking_slopes": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
                },
            },
            "geometry": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "vertices": {
                        "type": "object",
                        "additionalProperties": {
                            "type": "object",
                            "required": ["coords"],
                            "additionalProperties": False,
                            "properties": {
                                "model": {"const": "P1"},
                                "coords": {
                                    "type": "object",
                                    "additionalProperties": {
                                        "oneOf": [coord, {"type": "array", "items": coord, "minItems": 2, "maxItems": 2}]
                                    },
                                },
                            },
                        },
                    },
                    "edges": {
                        "type": "object",
                        "additionalProperties": {
                            "type": "object",
                            "required": ["alpha"],
                            "additionalProperties": False,
                            "properties": {"alpha": {"type": "string", "pattern": RATIONAL}},
                        },
                    },
                },
            },
            "options": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "truncation": {"type": "integer", "minimum": 1},
                    "mode": {"enum": ["guaranteed", "generic"]},
                },
            },
        },
    }


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


@dataclass
class CurveDocument:
    rank: int
    graph: DualGraph
    pl: PLFunction
    geometry: Geometry | None = None
    options: dict = field(default_factory=dict)

    @property
    def mode(self) -> str:
        return self.options.get("mode", "guaranteed")

    @property
    def truncation(self) -> int:
        return self.options.get("truncation", 6)

    def to_dict(self) -> dict:
        doc: dict[str, Any] = {
            "format_version": FORMAT_VERSION,
            "monoid_rank": self.rank,
            "vertices": [
                {"id": v.id, "genus": v.genus, "markings": [{"id": h} for h in v.markings]} for v in self.graph.vertices
            ],
            "edges": [{"id": e.id, "ends": list(e.ends), "delta": list(e.delta.coords)} for e in self.graph.edges],
            "pl": {
                "vertex_values": {v: list(x.coords) for v, x in sorted(self.pl.vertex_values.items())
                                  if not x.is_zero()},
                "marking_slopes": {h: n for h, n in sorted(self.pl.marking_slopes.items()) if n},
            },
        }
        if self.geometry is not None:
            verts = {}
            for v, pts in sorted(self.geometry.coords.items()):
                coords = {}
                for k, c in pts.items():
                    coords[k] = [_fmt_coord(x) for x in c] if isinstance(c, (list, tuple)) else _fmt_coord(c)
                verts[v] = {"model": "P1", "coords": coords}
            doc["geometry"] = {
                "vertices": verts,
                "edges": {e: {"alpha": format_fraction(a)} for e, a in sorted(self.geometry.alpha.items())},
            }
        if self.options:
            doc["options"] = dict(self.options)
        return doc


def _fmt_coord(c) -> str:
    c = parse_coord(c)
    return "inf" if c is INF else format_fraction(c)


def parse(data: bytes | str) -> CurveDocument:
    """Parse and fully validate a document; the first problem found is raised with its JSON path."""
    try:
        raw = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DocumentSyntaxError(str(exc)) from exc
    return from_dict(raw)


def from_dict(raw: Any) -> CurveDocument:
    if not isinstance(raw, dict):
        raise SchemaViolation("document must be a JSON object")
    rank = raw.get("monoid_rank")
    if not isinstance(rank, int) or isinstance(rank, bool) or rank < 0:
        raise SchemaViolation("monoid_rank must be a nonnegative integer", "$.monoid_rank")
    validator = jsonschema.Draft202012Validator(_schema(rank))
    errors = sorted(validator.iter_errors(raw), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = errors[0]
        parts = list(err.absolute_path)
        msg = err.message
        if len(parts) >= 2 and parts[0] in ("vertices", "edges") and isinstance(parts[1], int):
            item = raw[parts[0]][parts[1]]
            if isinstance(item, dict) and "id" in item:
                msg = f"{parts[0][:-1]} {item['id']!r}: {msg}"
        raise SchemaViolation(msg, _path(parts))
    _check_integrity(raw)
    try:
        vertices = tuple(
            Vertex(v["id"], v.get("genus", 0), tuple(h["id"] for h in v.get("markings", []))) for v in raw["vertices"]
        )
        edges = tuple(Edge(e["id"], tuple(e["ends"]), MonoidElement(tuple(e["delta"]))) for e in raw["edges"])
        graph = DualGraph(vertices, edges, rank)
        pl_raw = raw.get("pl", {})
        pl = PLFunction(
            {v: MonoidElement(tuple(x)) for v, x in pl_raw.get("vertex_values", {}).items()},
            pl_raw.get("marking_slopes", {}),
            rank,
        )
        geometry = None
        if "geometry" in raw:
            geo = raw["geometry"]
            coords = {
                v: {k: (tuple(c) if isinstance(c, list) else c) for k, c in d["coords"].items()}
                for v, d in geo.get("vertices", {}).items()
            }
            alpha = {e: Fraction(d["alpha"]) for e, d in geo.get("edges", {}).items()}
            geometry = Geometry(coords, alpha)
    except MesaCurveError as exc:
        raise IntegrityViolation(str(exc)) from exc
    return CurveDocument(rank, graph, pl, geometry, dict(raw.get("options", {})))


def _check_integrity(raw: dict) -> None:
    seen: dict[str, str] = {}

    def claim(ident, what, path):
        if ident in seen:
            raise IntegrityViolation(f"duplicate id {ident!r} (already used by a {seen[ident]})", path)
        seen[ident] = what

    for i, v in enumerate(raw["vertices"]):
        claim(v["id"], "vertex", f"$.vertices[{i}].id")
    vertex_ids = {v["id"] for v in raw["vertices"]}
    markings = {}
    for i, v in enumerate(raw["vertices"]):
        for j, h in enumerate(v.get("markings", [])):
            claim(h["id"], "marking", f"$.vertices[{i}].markings[{j}].id")
            markings[h["id"]] = v["id"]
    edges = {}
    for i, e in enumerate(raw["edges"]):
        claim(e["id"], "edge", f"$.edges[{i}].id")
        for j, w in enumerate(e["ends"]):
            if w not in vertex_ids:
                raise IntegrityViolation(f"edge {e['id']!r} ends at unknown vertex {w!r}", f"$.edges[{i}].ends[{j}]")
        edges[e["id"]] = e
    pl = raw.get("pl", {})
    for v in pl.get("vertex_values", {}):
        if v not in vertex_ids:
            raise IntegrityViolation(f"value given for unknown vertex {v!r}", f"$.pl.vertex_values.{v}")
    for h in pl.get("marking_slopes", {}):
        if h not in markings:
            raise IntegrityViolation(f"slope given for unknown marking {h!r}", f"$.pl.marking_slopes.{h}")
    geo = raw.get("geometry", {})
    for v, d in geo.get("vertices", {}).items():
        base = f"$.geometry.vertices.{v}"
        if v not in vertex_ids:
            raise IntegrityViolation(f"geometry for unknown vertex {v!r}", base)
        for k, c in d["coords"].items():
            path = f"{base}.coords.{k}"
            if k in markings:
                if markings[k] != v or isinstance(c, list):
                    raise IntegrityViolation(f"marking {k!r} is not a single point of {v!r}", path)
            elif k in edges:
                e = edges[k]
                if v not in e["ends"]:
                    raise IntegrityViolation(f"edge {k!r} does not meet {v!r}", path)
                is_loop = e["ends"][0] == e["ends"][1]
                if is_loop != isinstance(c, list):
                    want = "a pair of coordinates" if is_loop else "one coordinate"
                    raise IntegrityViolation(f"edge {k!r} needs {want} on {v!r}", path)
                if is_loop and c[0] == c[1]:
                    raise IntegrityViolation(f"loop {k!r} needs two distinct points", path)
        flat = []
        for c in d["coords"].values():
            flat.extend(c if isinstance(c, list) else [c])
        keyed = [repr(parse_coord(c)) for c in flat]
        if len(set(keyed)) != len(keyed):
            raise IntegrityViolation(f"coordinates on {v!r} are not distinct", f"{base}.coords")
    for e, d in geo.get("edges", {}).items():
        path = f"$.geometry.edges.{e}"
        if e not in edges:
            raise IntegrityViolation(f"gluing unit for unknown edge {e!r}", path)
        if Fraction(d["alpha"]) == 0:
            raise IntegrityViolation(f"gluing unit on {e!r} is zero", path + ".alpha")


def serialize(doc: CurveDocument) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc.to_dict(), sort_keys=True, indent=2) + "\n"


def load(path: str) -> CurveDocument:
    if path == "-":
        import sys

        return parse(sys.stdin.read())
    with open(path, "rb") as fh:
        return parse(fh.read())
