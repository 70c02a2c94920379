"""Multidegrees of the line bundles attached to PL sections."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InvariantBreach, PLViolation
from .graph import DualGraph
from .monoid import integer_multiple_of
from .pl import Mesa, PLFunction, validate_pl


@dataclass(frozen=True)
class Multidegree:
    degrees: dict[str, int]
    loop_flags: tuple[str, ...] = ()

    @property
    def total(self) -> int:
        return sum(self.degrees.values())

    def __getitem__(self, v: str) -> int:
        return self.degrees[v]


@dataclass(frozen=True)
class RestrictionShape:
    """Divisor of the restricted bundle on one component: (special point id, multiplicity)."""

    component: str
    divisor: tuple[tuple[str, int], ...]

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.divisor)


def outgoing_slope(g: DualGraph, pl: PLFunction, v: str, p: str) -> int:
    """Slope of ``pl`` leaving ``v`` through the edge or half-edge ``p``.

    Loops have equal values at both ends, so their slope is 0.
    """
    if p in g.vertex(v).markings:
        return pl.slope(p)
    e = g.edge(p)
    w = e.other(v)
    m = integer_multiple_of(pl.value(w) - pl.value(v), e.delta)
    if m is None:
        raise PLViolation(f"edge {p} violates the PL condition", [p])
    return m


def _slope_table(g: DualGraph, pl: PLFunction, sign: int):
    table = {}
    for e in g.edges:
        a, b = e.ends
        m = integer_multiple_of(pl.value(b) - pl.value(a), e.delta)
        if m is None:
            raise PLViolation(f"edge {e.id} violates the PL condition", [e.id])
        table[e.id] = sign * m
    return table


def multidegree(g: DualGraph, pl: PLFunction, sign: int = 1) -> Multidegree:
    """Per-vertex degree of O(sign * pl): the sum of outgoing slopes."""
    validate_pl(g, pl)
    slopes = _slope_table(g, pl, sign)
    deg = {v.id: sign * sum(pl.slope(h) for h in v.markings) for v in g.vertices}
    loops = []
    for e in g.edges:
        a, b = e.ends
        if a == b:
            loops.append(e.id)
            continue
        deg[a] += slopes[e.id]
        deg[b] -= slopes[e.id]
    return Multidegree(deg, tuple(loops))


def mesa_divisors(g: DualGraph, m: Mesa) -> dict[str, dict[str, int]]:
    """Divisor of O(-mesa) on each component of the support, keyed by edge id.

    Points leading away from the top get +1, the point heading toward it -1.
    """
    out: dict[str, dict[str, int]] = {v: {} for v in m.support}
    for e in g.edges:
        a, b = e.ends
        if a == b:
            continue
        # outgoing slope of -pl at a toward b is (pl(a) - pl(b)) / delta
        s = integer_multiple_of(m.pl.value(a) - m.pl.value(b), e.delta)
        if s is None:
            raise InvariantBreach(f"mesa violates the PL condition on {e.id}")
        if s == 0:
            continue
        if a in m.support:
            out[a][e.id] = s
        if b in m.support:
            out[b][e.id] = -s
    return out


def mesa_restriction_shapes(g: DualGraph, m: Mesa) -> list[RestrictionShape]:
    divisors = mesa_divisors(g, m)
    md = multidegree(g, m.pl, sign=-1)
    shapes = []
    for v in sorted(m.support):
        div = divisors[v]
        shape = RestrictionShape(v, tuple(sorted(div.items())))
        if shape.degree != md[v]:
            raise InvariantBreach(f"restriction shape on {v} has degree {shape.degree}, multidegree says {md[v]}")
        mults = sorted(div.values())
        if v in m.top:
            if any(x != 1 for x in mults):
                raise InvariantBreach(f"top component {v} has a non-simple point: {div}")
        elif mults.count(-1) != 1 or any(x not in (1, -1) for x in mults):
            raise InvariantBreach(f"component {v} of support minus top is not of the form p0+...+pn-q: {div}")
        shapes.append(shape)
    return shapes
