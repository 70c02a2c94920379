"""Dual graphs of nodal log curves.

Vertices are components (with geometric genus and marked half-edges),
edges are nodes carrying their smoothing parameter in N^r.  Loops and
multiple edges are allowed.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import GraphError
from .monoid import MonoidElement


@dataclass(frozen=True)
class Vertex:
    id: str
    genus: int = 0
    markings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.genus < 0:
            raise GraphError(f"vertex {self.id} has negative genus")


@dataclass(frozen=True)
class Edge:
    id: str
    ends: tuple[str, str]
    delta: MonoidElement

    @property
    def is_loop(self) -> bool:
        return self.ends[0] == self.ends[1]

    def other(self, v: str) -> str:
        a, b = self.ends
        if v == a:
            return b
        if v == b:
            return a
        raise GraphError(f"vertex {v} is not an end of edge {self.id}")


@dataclass(frozen=True)
class Path:
    """Alternating sequence v0 e1 v1 ... ek vk with distinct vertices."""

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        if self.vertices and len(self.edges) != len(self.vertices) - 1:
            raise GraphError("path needs one fewer edge than vertices")
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("path vertices must be distinct")
        for i, e in enumerate(self.edges):
            if set(e.ends) != {self.vertices[i], self.vertices[i + 1]}:
                raise GraphError(f"edge {e.id} does not join consecutive path vertices")

    @classmethod
    def empty(cls) -> Path:
        return cls(())

    def __len__(self):
        return len(self.edges)


@dataclass(frozen=True)
class DualGraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    rank: int = field(default=0)
    require_connected: bool = field(default=True, compare=False)

    def __post_init__(self):
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids):
            raise GraphError("duplicate vertex id")
        eids = [e.id for e in self.edges]
        if len(set(eids)) != len(eids):
            raise GraphError("duplicate edge id")
        halves = [h for v in self.vertices for h in v.markings]
        if len(set(halves)) != len(halves) or set(halves) & set(eids):
            raise GraphError("half-edge ids must be unique")
        known = set(ids)
        for e in self.edges:
            if e.ends[0] not in known or e.ends[1] not in known:
                raise GraphError(f"edge {e.id} has an unknown endpoint")
            if e.delta.rank != self.rank:
                raise GraphError(f"edge {e.id} delta has rank {e.delta.rank}, expected {self.rank}")
        if self.require_connected and self.vertices and not self.is_connected(ids):
            raise GraphError("dual graph is not connected")

    @classmethod
    def build(cls, vertices: Iterable, edges: Iterable, rank: int | None = None, **kw) -> DualGraph:
        """Convenience constructor.

        ``vertices`` items are Vertex objects, ids, or ``(id, genus)`` / ``(id, genus, markings)``
        tuples; ``edges`` items are Edge objects or ``(id, v, w, delta)`` tuples where delta is a
        sequence of ints.
        """
        vs = []
        for v in vertices:
            if isinstance(v, Vertex):
                vs.append(v)
            elif isinstance(v, str):
                vs.append(Vertex(v))
            else:
                vs.append(Vertex(v[0], *v[1:2], tuple(v[2]) if len(v) > 2 else ()))
        es = []
        for e in edges:
            if isinstance(e, Edge):
                es.append(e)
            else:
                eid, a, b, d = e
                es.append(Edge(eid, (a, b), MonoidElement(tuple(d))))
        if rank is None:
            rank = es[0].delta.rank if es else 0
        return cls(tuple(vs), tuple(es), rank, **kw)

    # --- lookup -----------------------------------------------------------------

    @property
    def vertex_ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.vertices)

    def vertex(self, vid: str) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise GraphError(f"unknown vertex {vid}")

    def edge(self, eid: str) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise GraphError(f"unknown edge {eid}")

    def incident(self, vid: str) -> list[Edge]:
        return [e for e in self.edges if vid in e.ends]

    def induced_edges(self, subset: Iterable[str]) -> list[Edge]:
        s = set(subset)
        return [e for e in self.edges if e.ends[0] in s and e.ends[1] in s]

    def boundary_edges(self, subset: Iterable[str]) -> list[Edge]:
        """Edges with exactly one end in ``subset``, sorted by id."""
        s = set(subset)
        return sorted((e for e in self.edges if (e.ends[0] in s) != (e.ends[1] in s)), key=lambda e: e.id)

    def marking_owner(self, hid: str) -> str:
        for v in self.vertices:
            if hid in v.markings:
                return v.id
        raise GraphError(f"unknown half-edge {hid}")

    @property
    def markings(self) -> list[str]:
        return [h for v in self.vertices for h in v.markings]

    # --- topology -------------------------------------------------------------------

    def components(self, subset: Iterable[str]) -> list[frozenset[str]]:
        """Connected components of the induced subgraph, in order of first vertex appearance."""
        order = [v for v in self.vertex_ids if v in set(subset)]
        s = set(order)
        adj = {v: set() for v in order}
        for e in self.induced_edges(s):
            adj[e.ends[0]].add(e.ends[1])
            adj[e.ends[1]].add(e.ends[0])
        seen, out = set(), []
        for v in order:
            if v in seen:
                continue
            comp, queue = {v}, deque([v])
            while queue:
                for w in adj[queue.popleft()]:
                    if w not in comp:
                        comp.add(w)
                        queue.append(w)
            seen |= comp
            out.append(frozenset(comp))
        return out

    def is_connected(self, subset: Iterable[str]) -> bool:
        return len(self.components(subset)) <= 1

    def betti(self, subset: Iterable[str]) -> int:
        s = set(subset)
        return len(self.induced_edges(s)) - len(s) + len(self.components(s))

    def to_dot(self, name: str = "G") -> str:
        lines = [f"graph {name} {{"]
        for v in self.vertices:
            lines.append(f'  "{v.id}" [label="{v.id}\\ng={v.genus}"];')
        for e in self.edges:
            lines.append(f'  "{e.ends[0]}" -- "{e.ends[1]}" [label="{e.id}: {list(e.delta.coords)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def genus(g: DualGraph, subset: Iterable[str] | None = None, require_connected: bool = True) -> int:
    """Arithmetic genus b1 + sum of vertex genera of the induced subgraph.

    With ``require_connected=False`` a disconnected subset is accepted and
    the per-component genera are summed.
    """
    s = set(g.vertex_ids if subset is None else subset)
    unknown = s - set(g.vertex_ids)
    if unknown:
        raise GraphError(f"unknown vertices {sorted(unknown)}")
    if require_connected and not g.is_connected(s):
        raise GraphError("vertex subset does not induce a connected subgraph")
    return g.betti(s) + sum(g.vertex(v).genus for v in s)


def _degree_in(g: DualGraph, v: str, s: set[str]) -> int:
    return sum((2 if e.is_loop else 1) for e in g.incident(v) if e.other(v) in s)


def core(g: DualGraph, subset: Iterable[str]) -> frozenset[str]:
    """Minimal connected subcurve of the same genus: prune rational leaves until none are left."""
    s = set(subset)
    if not g.is_connected(s):
        raise GraphError("core requires a connected subset")
    if genus(g, s) == 0:
        raise GraphError("core is undefined for a genus-0 subcurve")
    changed = True
    while changed:
        changed = False
        for v in sorted(s):
            if g.vertex(v).genus == 0 and _degree_in(g, v, s) <= 1:
                s.discard(v)
                changed = True
                break
    return frozenset(s)


def unique_path_from_top(g: DualGraph, E: Iterable[str], F: Iterable[str], v: str) -> Path:
    """The path from the top F to v inside E that leaves F immediately and never returns."""
    return paths_from_top(g, E, F)[v]


def paths_from_top(g: DualGraph, E: Iterable[str], F: Iterable[str]) -> dict[str, Path]:
    """All paths of :func:`unique_path_from_top` at once, keyed by vertex of E."""
    E, F = set(E), set(F)
    if not F:
        raise GraphError("top must be nonempty")
    if not F <= E:
        raise GraphError("top must be contained in the support")
    if not g.is_connected(E) or not g.is_connected(F):
        raise GraphError("support and top must both be connected")
    outer = [e for e in g.induced_edges(E) if not (e.ends[0] in F and e.ends[1] in F)]
    # E / F is a tree iff it is connected with |edges| = |vertices| - 1.
    if len(outer) != len(E - F):
        raise GraphError("the support with its top contracted is not a tree")
    parent: dict[str, tuple[str, Edge]] = {}
    seen = set(F)
    queue = deque(sorted(F))
    while queue:
        u = queue.popleft()
        for e in sorted(g.incident(u), key=lambda e: e.id):
            if e.is_loop or e not in outer:
                continue
            w = e.other(u)
            if w in seen or w not in E:
                continue
            seen.add(w)
            parent[w] = (u, e)
            queue.append(w)
    paths = {}
    for v in E:
        if v in F:
            paths[v] = Path((v,))
            continue
        verts, edges = [v], []
        while verts[-1] not in F:
            u, e = parent[verts[-1]]
            edges.append(e)
            verts.append(u)
        paths[v] = Path(tuple(reversed(verts)), tuple(reversed(edges)))
    return paths


def path_length(p: Path, rank: int | None = None) -> MonoidElement:
    if not p.edges:
        if rank is None:
            raise GraphError("rank needed for the length of an edgeless path")
        return MonoidElement.zero(rank)
    total = p.edges[0].delta
    for e in p.edges[1:]:
        total = total + e.delta
    return total


def contract_edges(g: DualGraph, Z: Iterable[str]) -> tuple[DualGraph, dict[str, str]]:
    """Contract the edges in Z.

    Each merged class is named by its smallest vertex id; its genus is the
    sum of the merged genera plus b1 of the contracted edges inside it.
    Returns the new graph and the vertex surjection.
    """
    Z = set(Z)
    unknown = Z - {e.id for e in g.edges}
    if unknown:
        raise GraphError(f"unknown edges {sorted(unknown)}")
    root = {v: v for v in g.vertex_ids}

    def find(v):
        while root[v] != v:
            root[v] = root[root[v]]
            v = root[v]
        return v

    for e in g.edges:
        if e.id in Z:
            a, b = find(e.ends[0]), find(e.ends[1])
            if a != b:
                root[max(a, b)] = min(a, b)
    classes: dict[str, list[str]] = {}
    for v in g.vertex_ids:
        classes.setdefault(find(v), []).append(v)
    vmap = {v: min(classes[find(v)]) for v in g.vertex_ids}
    contracted_count = {rep: 0 for rep in classes}
    for e in g.edges:
        if e.id in Z:
            contracted_count[find(e.ends[0])] += 1
    new_vertices = []
    for v in g.vertices:
        rep = find(v.id)
        if vmap[v.id] != v.id:
            continue
        members = classes[rep]
        b1 = contracted_count[rep] - len(members) + 1
        new_vertices.append(
            Vertex(
                v.id,
                sum(g.vertex(m).genus for m in members) + b1,
                tuple(h for m in members for h in g.vertex(m).markings),
            )
        )
    new_edges = tuple(
        Edge(e.id, (vmap[e.ends[0]], vmap[e.ends[1]]), e.delta) for e in g.edges if e.id not in Z
    )
    return DualGraph(tuple(new_vertices), new_edges, g.rank, g.require_connected), vmap


def relabel(g: DualGraph, vmap: Mapping[str, str], emap: Mapping[str, str] | None = None) -> DualGraph:
    """Rename vertices (and optionally edges); used for isomorphism-invariance checks."""
    emap = emap or {}
    vs = tuple(Vertex(vmap[v.id], v.genus, v.markings) for v in g.vertices)
    es = tuple(Edge(emap.get(e.id, e.id), (vmap[e.ends[0]], vmap[e.ends[1]]), e.delta) for e in g.edges)
    return DualGraph(vs, es, g.rank, g.require_connected)
