"""Families over N^r: face strata, specialization, and fiberwise mesa checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .cohomology import Geometry, boundary_value_space
from .errors import FamilyError, GraphError, InvariantBreach, MesaCurveError, NotAcyclicError
from .graph import DualGraph, Edge, contract_edges, genus
from .monoid import Face, MonoidElement, all_faces, face_quotient, maps_to_unit, remap_face
from .pl import MesaDecomposition, PLFunction, decompose

DEFAULT_RANK_BOUND = 12


@dataclass(frozen=True)
class LogFamily:
    graph: DualGraph
    pl: PLFunction
    # Geometry for particular strata, keyed by face; used for exact acyclicity checks.
    stratum_geometry: Mapping[Face, Geometry] = field(default_factory=dict)

    def __post_init__(self):
        zero = [e.id for e in self.graph.edges if e.delta.is_zero()]
        if zero:
            raise GraphError(f"edges {zero} have zero smoothing parameter; they are not nodes of any fiber")

    @property
    def rank(self) -> int:
        return self.graph.rank


@dataclass
class Stratum:
    face: Face
    graph: DualGraph
    pl: PLFunction
    vmap: dict[str, str]
    decomposition: MesaDecomposition | None = None
    error: str | None = None
    verdict: str = "pass"  # pass | fail | indeterminate
    notes: list[str] = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.decomposition.k if self.decomposition else 0

    @property
    def radii(self) -> list[MonoidElement]:
        return [m.radius for m in self.decomposition.mesas] if self.decomposition else []

    def as_family(self) -> LogFamily:
        return LogFamily(self.graph, self.pl)


def specialize(fam: LogFamily, S: Face, mode: str | None = "guaranteed") -> Stratum:
    """The fiber over the stratum where the generators in S become units."""
    g = fam.graph
    S.check(g.rank)
    Z = [e.id for e in g.edges if maps_to_unit(e.delta, S)]
    merged, vmap = contract_edges(g, Z)
    rank = g.rank - len(S)
    edges = tuple(Edge(e.id, e.ends, face_quotient(e.delta, S)) for e in merged.edges)
    graph = DualGraph(merged.vertices, edges, rank)
    values = {}
    for v in g.vertex_ids:
        x = face_quotient(fam.pl.value(v), S)
        rep = vmap[v]
        if rep in values and values[rep] != x:
            raise InvariantBreach(f"vertices merged into {rep} receive different values on face {S.label()}")
        values[rep] = x
    pl = PLFunction({v: x for v, x in values.items() if not x.is_zero()}, dict(fam.pl.marking_slopes), rank)
    st = Stratum(S, graph, pl, vmap)
    try:
        st.decomposition = decompose(graph, pl, mode)
    except MesaCurveError as exc:
        st.error = str(exc)
        st.verdict = "fail"
        return st
    if mode is not None:
        verdicts = st.decomposition.verdicts
        if any(v == "no" for v in verdicts.values()):
            st.verdict = "fail"
        elif any(v != "yes" for v in verdicts.values()):
            st.verdict = "indeterminate"
    geo = fam.stratum_geometry.get(S)
    if geo is not None:
        _exact_check(st, geo)
    return st


def _exact_check(st: Stratum, geo: Geometry) -> None:
    """Replace combinatorial verdicts by exact ones for every mesa the geometry realizes."""
    dec = st.decomposition
    for i, m in enumerate(dec.mesas):
        if not all(v in geo.coords for v in m.support):
            continue
        try:
            V = boundary_value_space(st.graph, m, geo)
        except NotAcyclicError as exc:
            dec.verdicts[i] = "no"
            st.notes.append(f"mesa {i}: exact check failed: {exc}")
            continue
        dec.verdicts[i] = "yes" if V.h1 == 0 else "no"
        st.notes.append(f"mesa {i}: exact h1 = {V.h1}")
    vals = dec.verdicts.values()
    st.verdict = "fail" if any(v == "no" for v in vals) else ("pass" if all(v == "yes" for v in vals) else "indeterminate")


@dataclass
class FamilyReport:
    strata: list[Stratum]

    @property
    def passed(self) -> bool:
        return all(s.verdict == "pass" for s in self.strata)

    @property
    def status(self) -> str:
        if any(s.verdict == "fail" for s in self.strata):
            return "fail"
        return "pass" if self.passed else "indeterminate"

    def stratum(self, face: Face) -> Stratum:
        return next(s for s in self.strata if s.face == face)


def enumerate_strata(fam: LogFamily, mode: str | None = "guaranteed",
                     bound: int = DEFAULT_RANK_BOUND) -> list[Stratum]:
    if fam.rank > bound:
        raise FamilyError(f"rank {fam.rank} exceeds the stratum bound {bound} ({2 ** fam.rank} strata)")
    return [specialize(fam, S, mode) for S in all_faces(fam.rank)]


def validate_mesa_family(fam: LogFamily, mode: str = "guaranteed", bound: int = DEFAULT_RANK_BOUND) -> FamilyReport:
    return FamilyReport(enumerate_strata(fam, mode, bound))


def is_simple(fam: LogFamily | FamilyReport) -> bool:
    report = fam if isinstance(fam, FamilyReport) else validate_mesa_family(fam)
    return all(s.k <= 1 for s in report.strata)


def check_radius_coherence(rho: MonoidElement, strata: Iterable[Stratum]) -> dict[Face, MonoidElement]:
    """Check that projecting the generic radius gives each stratum's radius (0 where the mesa is gone)."""
    out = {}
    for st in strata:
        if st.k > 1:
            raise FamilyError(f"stratum {st.face.label()} has {st.k} mesas; the family is not simple")
        local = st.radii[0] if st.k else MonoidElement.zero(st.graph.rank)
        expected = face_quotient(rho, st.face)
        if expected != local:
            raise FamilyError(
                f"radius on stratum {st.face.label()} is {local.coords}, but the generic radius projects to {expected.coords}"
            )
        out[st.face] = local
    return out


def global_radius(fam: LogFamily, strata: list[Stratum] | None = None) -> dict[Face, MonoidElement]:
    strata = strata if strata is not None else enumerate_strata(fam, None)
    generic = next(s for s in strata if not s.face.killed)
    if generic.decomposition is None:
        raise FamilyError(f"generic stratum is not a mesa: {generic.error}")
    rho = generic.radii[0] if generic.k == 1 else MonoidElement.zero(fam.rank)
    return check_radius_coherence(rho, strata)


def compose_check(fam: LogFamily, S: Face, T: Face) -> bool:
    """specialize(specialize(fam, S), T) == specialize(fam, S | T), with T given in original indexing."""
    first = specialize(fam, S, None)
    twice = specialize(first.as_family(), remap_face(T, S, fam.rank), None)
    once = specialize(fam, S.union(T), None)
    return twice.graph == once.graph and twice.pl.normalized(twice.graph) == once.pl.normalized(once.graph)


def genus_profile(strata: Iterable[Stratum]) -> dict[Face, int]:
    return {s.face: genus(s.graph) for s in strata}


def _same_fiber(a: Stratum, b: Stratum) -> bool:
    return a.graph == b.graph and a.pl.normalized(a.graph) == b.pl.normalized(b.graph)


def functoriality_violations(fam: LogFamily, strata: list[Stratum] | None = None) -> list[tuple[Face, Face]]:
    """Pairs (S, T), T disjoint from S, where specializing by S then T differs from specializing by S | T.

    ``strata`` (one per face, any mode) are reused for the one-step fibers.
    """
    strata = strata if strata is not None else enumerate_strata(fam, None)
    by_face = {s.face: s for s in strata}
    bad = []
    for S, first in by_face.items():
        sub = first.as_family()
        rest = [i for i in range(fam.rank) if i not in S.killed]
        for T in all_faces(len(rest)):
            original = Face(frozenset(rest[i] for i in T.killed))
            if not _same_fiber(specialize(sub, T, None), by_face[S.union(original)]):
                bad.append((S, original))
    return bad
