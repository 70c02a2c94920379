"""Contracting mesa supports to singular points, and the local rings that appear."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg as la
from .cohomology import Geometry, VSubspace, boundary_value_space
from .errors import GeometryError, InvariantBreach, TruncationError
from .graph import DualGraph, Edge, Vertex, genus
from .pl import Mesa, MesaDecomposition


def genus_of_singularity(delta: int, m: int) -> int:
    if delta < 0 or m < 1:
        raise ValueError(f"need delta >= 0 and m >= 1, got delta={delta}, m={m}")
    g = delta - m + 1
    if g < 0:
        raise ValueError(f"delta={delta} with {m} branches gives negative genus")
    return g


@dataclass(frozen=True)
class SingularityDescriptor:
    vertex: str
    support: tuple[str, ...]
    g: int
    m: int
    delta: int
    branches: tuple[tuple[str, str], ...]  # (outside component, edge id)
    V: VSubspace | None = None
    elliptic_gorenstein: str = "unknown"

    @property
    def constants(self):
        return self.V.constants if self.V is not None else None

    def to_dict(self) -> dict:
        out = {
            "vertex": self.vertex,
            "support": list(self.support),
            "genus": self.g,
            "branches": self.m,
            "delta": self.delta,
            "attachments": [{"component": c, "edge": e} for c, e in self.branches],
            "elliptic_gorenstein": self.elliptic_gorenstein,
        }
        if self.V is not None:
            out["V_basis"] = [[la.format_fraction(x) for x in r] for r in self.V.basis]
            out["V_annihilator"] = [[la.format_fraction(x) for x in r] for r in self.V.annihilator]
            if self.constants is not None:
                out["constants"] = [la.format_fraction(x) for x in self.constants]
        return out


def classify_gorenstein(V: VSubspace | SingularityDescriptor) -> str:
    """'yes' iff V is a hyperplane whose defining functional has every coordinate nonzero."""
    if isinstance(V, SingularityDescriptor):
        if V.g != 1:
            raise ValueError(f"Gorenstein test applies to genus 1 only, got genus {V.g}")
        if V.V is None:
            raise GeometryError("no boundary-value space: geometry was not supplied")
        V = V.V
    if V.codim != 1:
        return "no"
    return "yes" if all(x != 0 for x in V.annihilator[0]) else "no"


def singular_vertex_name(support) -> str:
    return "tau:" + "+".join(sorted(support))


def _geometry_for(geometry, i: int, mesa: Mesa) -> Geometry | None:
    if geometry is None:
        return None
    if isinstance(geometry, Geometry):
        return geometry if all(v in geometry.coords for v in mesa.support) else None
    return geometry.get(i)


def contract_fiber(g: DualGraph, decomposition: MesaDecomposition,
                   geometry: Geometry | Mapping[int, Geometry] | None = None):
    """Collapse each support to one vertex; return (contracted graph, descriptors).

    ``geometry`` is either one Geometry (used for every mesa it fully
    realizes) or a mapping from mesa index to Geometry.
    """
    descriptors = []
    vmap = {}
    for i, mesa in enumerate(decomposition.mesas):
        name = singular_vertex_name(mesa.support)
        for v in mesa.support:
            vmap[v] = name
        boundary = g.boundary_edges(mesa.support)
        branches = tuple((e.other(e.ends[0] if e.ends[0] in mesa.support else e.ends[1]), e.id) for e in boundary)
        gi = genus(g, mesa.support)
        m = len(boundary)
        delta = gi + m - 1
        geo = _geometry_for(geometry, i, mesa)
        V = boundary_value_space(g, mesa, geo) if geo is not None else None
        eg = "unknown"
        if gi == 1 and V is not None:
            eg = classify_gorenstein(V)
        descriptors.append(SingularityDescriptor(name, tuple(sorted(mesa.support)), gi, m, delta, branches, V, eg))

    vertices = []
    seen = set()
    for v in g.vertices:
        if v.id not in vmap:
            vertices.append(v)
            continue
        name = vmap[v.id]
        if name in seen:
            continue
        seen.add(name)
        group = [u for u in g.vertices if vmap.get(u.id) == name]
        marks = tuple(h for u in group for h in u.markings)
        vertices.append(Vertex(name, 0, marks))
    edges = []
    for e in g.edges:
        a, b = (vmap.get(x, x) for x in e.ends)
        if e.ends[0] in vmap and e.ends[1] in vmap and a == b:
            continue
        edges.append(Edge(e.id, (a, b), e.delta))
    new = DualGraph(tuple(vertices), tuple(edges), g.rank)
    before = genus(g)
    after = genus(new) + sum(d.g for d in descriptors)
    if before != after:
        raise InvariantBreach(f"contraction changed the genus from {before} to {after}")
    for d in descriptors:
        if d.g != genus_of_singularity(d.delta, d.m):
            raise InvariantBreach(f"descriptor at {d.vertex} violates g = delta - m + 1")
    return new, descriptors


# --- ring presentation ------------------------------------------------------------------


def _fmt_term(coef: Fraction, sym: str) -> str:
    if coef == 1:
        return sym
    if coef == -1:
        return "-" + sym
    return f"{la.format_fraction(coef)}·{sym}"


def format_relation(functional: Sequence[Fraction], symbol=lambda i: f"f_{i + 1}'(0)") -> str:
    """Render sum c_i a_i = 0 solved for its last nonzero coordinate."""
    nz = [i for i, c in enumerate(functional) if c != 0]
    if not nz:
        return "0 = 0"
    last = nz[-1]
    rest = nz[:-1]
    if not rest:
        return f"{symbol(last)} = 0"
    lhs = ""
    for i in rest:
        coef = -functional[i] / functional[last]
        term = _fmt_term(coef, symbol(i))
        if not lhs:
            lhs = term
        elif term.startswith("-"):
            lhs += " - " + term[1:]
        else:
            lhs += " + " + term
    return f"{lhs} = {symbol(last)}"


def classify_singularity(g: int, m: int, V: VSubspace | None) -> str:
    if g == 0:
        if m == 1:
            return "a smooth point"
        if m == 2:
            return "a node"
        return f"a rational {m}-fold point"
    if V is not None and V.dim == 0 and m == g:
        return "a cusp" if g == 1 else f"{g} cusps glued transversally"
    if g == 1 and V is not None:
        if classify_gorenstein(V) == "yes":
            return {1: "a cusp", 2: "a tacnode"}.get(m, f"an elliptic {m}-fold point")
        if m == 2:
            return "a cusp glued transversally to a smooth rational curve"
    return f"a genus {g} singularity with {m} branches"


@dataclass(frozen=True)
class RingPresentation:
    """Functions f on the branches with local parameters x_i, subject to the listed conditions."""

    symbols: tuple[str, ...]
    value_conditions: tuple[str, ...]
    jet_conditions: tuple[tuple[Fraction, ...], ...]
    V: VSubspace
    g: int
    description: str = ""

    @property
    def m(self) -> int:
        return len(self.symbols)

    def relations(self) -> list[str]:
        return [format_relation(row) for row in self.jet_conditions]

    def text(self) -> str:
        lines = [f"branches: {', '.join(f'x_{i + 1} at {s}' for i, s in enumerate(self.symbols))}"]
        lines += [f"  {c}" for c in self.value_conditions]
        lines += [f"  {r}" for r in self.relations()]
        lines.append(f"singularity: {self.description}")
        return "\n".join(lines)


def ring_presentation(g: DualGraph, mesa: Mesa, geometry: Geometry | None) -> RingPresentation:
    if geometry is None:
        raise GeometryError("ring presentation needs explicit geometry for the support")
    V = boundary_value_space(g, mesa, geometry)
    m = V.ambient
    values = ()
    if m > 1:
        values = (" = ".join(f"f_{i + 1}(0)" for i in range(m)),)
    gi = genus(g, mesa.support)
    if V.codim != gi:
        raise InvariantBreach(f"jet conditions have codimension {V.codim}, genus is {gi}")
    return RingPresentation(V.boundary_edges, values, V.annihilator, V, gi, classify_singularity(gi, m, V))


# --- truncated ring model ----------------------------------------------------------------


@dataclass(frozen=True)
class BbarElement:
    """(f, c): f_i is a polynomial in x_i with zero constant term, stored as coefficients of x_i^1..x_i^N."""

    f: tuple[tuple[Fraction, ...], ...]
    c: Fraction

    def linear(self) -> tuple[Fraction, ...]:
        return tuple(p[0] if p else Fraction(0) for p in self.f)

    def __add__(self, other: BbarElement) -> BbarElement:
        f = tuple(tuple(a + b for a, b in zip(p, q)) for p, q in zip(self.f, other.f))
        return BbarElement(f, self.c + other.c)


@dataclass(frozen=True)
class BbarRing:
    V: VSubspace
    truncation: int = 6

    @property
    def m(self) -> int:
        return self.V.ambient

    def element(self, f: Sequence[Sequence], c=0) -> BbarElement:
        n = self.truncation
        polys = []
        for p in f:
            p = [Fraction(x) for x in p]
            if len(p) > n and any(p[n:]):
                raise TruncationError(f"degree {len(p)} exceeds the truncation bound {n}")
            polys.append(tuple((p + [Fraction(0)] * n)[:n]))
        if len(polys) != self.m:
            raise ValueError(f"expected {self.m} branches, got {len(polys)}")
        el = BbarElement(tuple(polys), Fraction(c))
        if not self.contains(el):
            raise ValueError("first derivatives do not lie in V")
        return el

    def contains(self, u: BbarElement) -> bool:
        return self.V.contains(u.linear())

    def one(self) -> BbarElement:
        return BbarElement(tuple((Fraction(0),) * self.truncation for _ in range(self.m)), Fraction(1))

    def zero(self) -> BbarElement:
        return BbarElement(tuple((Fraction(0),) * self.truncation for _ in range(self.m)), Fraction(0))

    def multiply(self, u: BbarElement, v: BbarElement) -> BbarElement:
        return bbar_multiply(u, v, self)


def bbar_multiply(u: BbarElement, v: BbarElement, ring: BbarRing) -> BbarElement:
    """(f, c)(f', c') = (ff' + fc' + f'c, cc'), truncated at x^N."""
    n = ring.truncation
    out = []
    for p, q in zip(u.f, v.f):
        prod = [Fraction(0)] * (2 * n + 1)  # index = degree
        for i, a in enumerate(p, start=1):
            if a:
                for j, b in enumerate(q, start=1):
                    if b:
                        prod[i + j] += a * b
        for i in range(1, n + 1):
            prod[i] += p[i - 1] * v.c + q[i - 1] * u.c
        if any(prod[n + 1:]):
            raise TruncationError(f"product has terms beyond degree {n}")
        out.append(tuple(prod[1:n + 1]))
    w = BbarElement(tuple(out), u.c * v.c)
    if not ring.contains(w):
        raise InvariantBreach("product left the ring")
    return w
