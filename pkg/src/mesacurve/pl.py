"""Piecewise-linear functions on dual graphs and their mesa decompositions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import GraphError, MesaError, PLViolation
from .graph import DualGraph, core, genus, path_length, paths_from_top
from .monoid import MonoidElement, integer_multiple_of, leq


@dataclass(frozen=True)
class PLFunction:
    """Vertex values in N^r plus integer slopes on marked half-edges.

    Vertices missing from ``vertex_values`` are zero; missing slopes are zero.
    """

    vertex_values: Mapping[str, MonoidElement]
    marking_slopes: Mapping[str, int] = field(default_factory=dict)
    rank: int = 0

    def __post_init__(self):
        object.__setattr__(self, "vertex_values", dict(self.vertex_values))
        object.__setattr__(self, "marking_slopes", {h: int(n) for h, n in self.marking_slopes.items()})
        for v, x in self.vertex_values.items():
            if x.rank != self.rank:
                raise PLViolation(f"value at {v} has rank {x.rank}, expected {self.rank}")

    @classmethod
    def zero(cls, rank: int) -> PLFunction:
        return cls({}, {}, rank)

    @classmethod
    def from_lists(cls, values: Mapping[str, Iterable[int]], slopes: Mapping[str, int] | None = None,
                   rank: int | None = None) -> PLFunction:
        vals = {v: MonoidElement(tuple(x)) for v, x in values.items()}
        if rank is None:
            rank = next(iter(vals.values())).rank if vals else 0
        return cls(vals, dict(slopes or {}), rank)

    def value(self, v: str) -> MonoidElement:
        return self.vertex_values.get(v) or MonoidElement.zero(self.rank)

    def slope(self, h: str) -> int:
        return self.marking_slopes.get(h, 0)

    def support(self, g: DualGraph) -> list[str]:
        return [v for v in g.vertex_ids if not self.value(v).is_zero()]

    def __add__(self, other: PLFunction) -> PLFunction:
        keys = set(self.vertex_values) | set(other.vertex_values)
        slopes = {h: self.slope(h) + other.slope(h) for h in set(self.marking_slopes) | set(other.marking_slopes)}
        return PLFunction({v: self.value(v) + other.value(v) for v in keys}, slopes, self.rank)

    def scale(self, m: int) -> PLFunction:
        return PLFunction({v: x.scale(m) for v, x in self.vertex_values.items()},
                          {h: m * n for h, n in self.marking_slopes.items()}, self.rank)

    def normalized(self, g: DualGraph) -> PLFunction:
        """Drop zero entries so that equal functions compare equal."""
        vals = {v: self.value(v) for v in g.vertex_ids if not self.value(v).is_zero()}
        slopes = {h: n for h, n in self.marking_slopes.items() if n}
        return PLFunction(vals, slopes, self.rank)


def pl_violations(g: DualGraph, pl: PLFunction) -> list[str]:
    """Edges across which the value difference is not an integer multiple of the edge length."""
    bad = []
    for e in g.edges:
        d = pl.value(e.ends[0]) - pl.value(e.ends[1])
        if integer_multiple_of(d, e.delta) is None:
            bad.append(e.id)
    return bad


def validate_pl(g: DualGraph, pl: PLFunction) -> None:
    if pl.rank != g.rank:
        raise PLViolation(f"PL function has rank {pl.rank}, graph has rank {g.rank}")
    unknown = set(pl.vertex_values) - set(g.vertex_ids)
    unknown |= set(pl.marking_slopes) - set(g.markings)
    if unknown:
        raise PLViolation(f"PL function refers to unknown ids {sorted(unknown)}")
    bad = pl_violations(g, pl)
    if bad:
        raise PLViolation(f"value difference is not a multiple of delta across edges {bad}", bad)


@dataclass(frozen=True)
class Mesa:
    support: frozenset[str]
    top: frozenset[str]
    radius: MonoidElement
    pl: PLFunction
    distance: Mapping[str, MonoidElement] = field(default_factory=dict, compare=False)

    @property
    def rank(self) -> int:
        return self.radius.rank

    def boundary_edges(self, g: DualGraph):
        return g.boundary_edges(self.support)


def mesa_from(g: DualGraph, E: Iterable[str], F: Iterable[str]) -> Mesa:
    """Build the mesa with support E and top F, checking the two shape conditions."""
    E, F = frozenset(E), frozenset(F)
    if not E:
        raise MesaError(MesaError.NOT_CONNECTED, "support is empty")
    if not F <= E:
        raise MesaError(MesaError.NOT_CONNECTED, "top is not contained in the support")
    if not g.is_connected(E) or not F or not g.is_connected(F):
        raise MesaError(MesaError.NOT_CONNECTED, "support and top must be connected")
    if genus(g, F) != genus(g, E):
        code = MesaError.NOT_A_TREE
        raise MesaError(code, f"top has genus {genus(g, F)} but support has genus {genus(g, E)}")
    try:
        paths = paths_from_top(g, E, F)
    except GraphError as exc:
        raise MesaError(MesaError.NOT_A_TREE, str(exc)) from exc
    lam = {v: path_length(paths[v], g.rank) for v in E}
    boundary = g.boundary_edges(E)
    if not boundary:
        raise MesaError(MesaError.NO_OUTSIDE, "support has no adjacent component; radius undefined")
    lengths = {}
    for e in boundary:
        v = e.ends[0] if e.ends[0] in E else e.ends[1]
        lengths[e.id] = lam[v] + e.delta
    distinct = set(lengths.values())
    if len(distinct) != 1:
        raise MesaError(MesaError.UNEQUAL_LENGTHS,
                        "paths from the top to the boundary have different lengths",
                        lengths={k: v.coords for k, v in lengths.items()})
    rho = MonoidElement(distinct.pop().coords)
    # Every vertex of E - F must lie on some top-to-outside path.
    on_path = set()
    for e in boundary:
        v = e.ends[0] if e.ends[0] in E else e.ends[1]
        on_path.update(paths[v].vertices)
    dead = sorted(E - F - on_path)
    if dead:
        raise MesaError(MesaError.DEAD_END, f"components {dead} do not lead out of the support", vertices=dead)
    values = {}
    for v in E:
        diff = rho - lam[v]
        if not diff.is_nonnegative() or diff.is_zero():
            raise MesaError(MesaError.DEGENERATE, f"mesa value at {v} is {diff.coords}; it must be nonzero",
                            vertex=v)
        values[v] = MonoidElement(diff.coords)
    return Mesa(E, F, rho, PLFunction(values, {}, g.rank), lam)


def support_top_radius(g: DualGraph, pl: PLFunction) -> list[tuple[frozenset[str], frozenset[str], MonoidElement]]:
    """Recover (support, top, radius) for each connected component of the support."""
    out = []
    for comp in g.components(pl.support(g)):
        vals = {v: pl.value(v) for v in comp}
        maxima = [v for v in comp if all(leq(vals[w], vals[v]) for w in comp)]
        if not maxima:
            raise MesaError(MesaError.NO_UNIQUE_MAX, f"values on {sorted(comp)} have no maximum",
                            component=sorted(comp))
        rho = vals[maxima[0]]
        top = frozenset(v for v in comp if vals[v] == rho)
        out.append((comp, top, rho))
    return out


@dataclass
class MesaDecomposition:
    mesas: list[Mesa]
    verdicts: dict[int, str] = field(default_factory=dict)

    def __len__(self):
        return len(self.mesas)

    @property
    def k(self) -> int:
        return len(self.mesas)

    def total(self, rank: int) -> PLFunction:
        acc = PLFunction.zero(rank)
        for m in self.mesas:
            acc = acc + m.pl
        return acc

    def all_acyclic(self) -> bool:
        return all(self.verdicts.get(i) == "yes" for i in range(len(self.mesas)))


def decompose(g: DualGraph, pl: PLFunction, mode: str | None = "guaranteed") -> MesaDecomposition:
    """Split ``pl`` into mesas with disjoint supports.

    ``mode`` selects the acyclicity engine used for the verdicts; ``None``
    skips them.
    """
    validate_pl(g, pl)
    sloped = sorted(h for h, n in pl.marking_slopes.items() if n)
    if sloped:
        raise MesaError(MesaError.NONZERO_SLOPE, f"marked points {sloped} carry nonzero slope", markings=sloped)
    mesas = []
    for E, F, rho in support_top_radius(g, pl):
        m = mesa_from(g, E, F)
        if m.radius != rho or any(m.pl.value(v) != pl.value(v) for v in E):
            raise MesaError(MesaError.SHAPE_MISMATCH,
                            f"values on {sorted(E)} differ from the mesa with this support and top",
                            support=sorted(E), expected={v: m.pl.value(v).coords for v in sorted(E)})
        mesas.append(m)
    dec = MesaDecomposition(mesas)
    if mode is not None:
        from .cohomology import generic_acyclicity

        dec.verdicts = {i: generic_acyclicity(g, m, mode) for i, m in enumerate(mesas)}
    return dec


def is_small(g: DualGraph, m: Mesa) -> bool:
    if genus(g, m.support) == 0:
        raise MesaError(MesaError.ZERO_GENUS, "smallness is undefined for a genus-0 support")
    return m.top == core(g, m.support)

