"""Command-line interface: ``mesacurve <command> DOCUMENT [options]``.

Exit codes: 0 all checks pass, 1 a check failed or was inconclusive,
2 bad input, 3 internal invariant breach.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Any

from . import __version__
from .cohomology import ExplicitCurve, boundary_value_space, cech_h, mesa_bundle
from .contraction import BbarRing, contract_fiber, ring_presentation
from .errors import DocumentError, GeometryError, InvariantBreach, MesaCurveError, NotAcyclicError
from .family import LogFamily, check_radius_coherence, enumerate_strata, functoriality_violations, specialize
from .graph import genus
from .io import CurveDocument, load
from .linebundle import mesa_restriction_shapes, multidegree
from .monoid import Face, MonoidElement
from .pl import decompose, is_small, pl_violations

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_BREACH = 0, 1, 2, 3
COMMANDS = ("validate", "mesa", "degrees", "cohomology", "contract", "strata")
# two-step specialization is checked over 3^r face pairs
FUNCTORIAL_RANK_BOUND = 6


@dataclass
class Check:
    name: str
    status: str  # pass | fail | indeterminate | info
    statement: str
    detail: Any = None


@dataclass
class Report:
    command: str
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    tables: dict[str, list[list[str]]] = field(default_factory=dict)
    text_blocks: list[str] = field(default_factory=list)
    files: list[str] = field(default_factory=list)

    def add(self, name, status, statement, detail=None):
        self.checks.append(Check(name, status, statement, detail))

    @property
    def passed(self) -> bool:
        return all(c.status in ("pass", "info") for c in self.checks)

    @property
    def exit_code(self) -> int:
        return EXIT_PASS if self.passed else EXIT_FAIL

    def to_json(self) -> str:
        out = {
            "command": self.command,
            "status": "pass" if self.passed else "fail",
            "checks": [
                {"name": c.name, "status": c.status, "statement": c.statement, **({"detail": c.detail} if c.detail is not None else {})}
                for c in self.checks
            ],
            "data": self.data,
            "files": self.files,
        }
        return json.dumps(out, indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"# {self.command}: {'pass' if self.passed else 'fail'}", "check\tstatus\tstatement"]
        lines += [f"{c.name}\t{c.status}\t{c.statement}" for c in self.checks]
        for title, rows in self.tables.items():
            lines.append("")
            lines.append(f"# {title}")
            lines += ["\t".join(map(str, r)) for r in rows]
        for block in self.text_blocks:
            lines.append("")
            lines.append(block)
        if self.files:
            lines.append("")
            lines += [f"# wrote {f}" for f in self.files]
        return "\n".join(lines)


def _mesa_row(g, m):
    return {
        "support": sorted(m.support),
        "top": sorted(m.top),
        "radius": list(m.radius.coords),
        "genus": genus(g, m.support),
        "boundary": [e.id for e in g.boundary_edges(m.support)],
    }


def cmd_validate(doc: CurveDocument, args, rep: Report):
    g, pl = doc.graph, doc.pl
    rep.add("graph", "pass", "the dual graph is connected and its ids are consistent")
    bad = pl_violations(g, pl)
    if bad:
        rep.add("pl", "fail", "value differences across edges must be integer multiples of the edge length", bad)
    else:
        rep.add("pl", "pass", "value differences across every edge are integer multiples of the edge length")
    rep.data.update(genus=genus(g), rank=doc.rank, vertices=len(g.vertices), edges=len(g.edges))
    rep.tables["summary"] = [["genus", genus(g)], ["rank", doc.rank]]


def cmd_mesa(doc, args, rep):
    g = doc.graph
    dec = decompose(g, doc.pl, args.mode)
    rep.add("shape", "pass", f"the PL function is a sum of {dec.k} mesa{'' if dec.k == 1 else 's'} with disjoint supports")
    rows = [["mesa", "support", "top", "radius", "genus", "small", "acyclic"]]
    mesas = []
    for i, m in enumerate(dec.mesas):
        info = _mesa_row(g, m)
        info["small"] = is_small(g, m) if info["genus"] > 0 else None
        info["acyclic"] = dec.verdicts[i]
        mesas.append(info)
        verdict = dec.verdicts[i]
        status = {"yes": "pass", "no": "fail"}.get(verdict, "indeterminate")
        rep.add(f"acyclic[{i}]", status, f"mesa {i}: H^1 of O(-mesa) on its support vanishes ({args.mode} test says {verdict})")
        rows.append([i, ",".join(info["support"]), ",".join(info["top"]), info["radius"], info["genus"],
                     info["small"], verdict])
    rep.data["mesas"] = mesas
    rep.tables["mesas"] = rows
    return dec


def cmd_degrees(doc, args, rep):
    g, pl = doc.graph, doc.pl
    plus = multidegree(g, pl, 1)
    minus = multidegree(g, pl, -1)
    rows = [["vertex", "deg O(f)", "deg O(-f)"]]
    rows += [[v, plus[v], minus[v]] for v in g.vertex_ids]
    rep.tables["multidegree"] = rows
    rep.data["multidegree"] = {v: plus[v] for v in g.vertex_ids}
    ok = plus.total + minus.total == 0
    rep.add("degrees", "pass" if ok else "fail", "degrees of O(f) and O(-f) are opposite")
    if plus.loop_flags:
        rep.add("loops", "info", f"loop edges {', '.join(plus.loop_flags)} are counted with slope 0")
        rep.data["loop_edges"] = list(plus.loop_flags)
    try:
        dec = decompose(g, pl, None)
    except MesaCurveError:
        return
    for i, m in enumerate(dec.mesas):
        shapes = mesa_restriction_shapes(g, m)
        rep.add(f"restriction[{i}]", "pass",
                f"mesa {i}: O(-mesa) is O(p1+...+pn) on the top and O(p0+...+pn-q) on the other components")
        rep.data.setdefault("restrictions", {})[i] = {s.component: dict(s.divisor) for s in shapes}


def cmd_cohomology(doc, args, rep):
    g = doc.graph
    dec = decompose(g, doc.pl, args.mode)
    rows = [["mesa", "verdict", "h0", "h1", "codim V", "genus"]]
    for i, m in enumerate(dec.mesas):
        verdict = dec.verdicts[i]
        h0 = h1 = codim = "-"
        realized = doc.geometry is not None and all(v in doc.geometry.coords for v in m.support)
        if args.exact and not realized:
            raise GeometryError(f"mesa {i} is not realized by the document geometry")
        if realized:
            curve = ExplicitCurve.from_graph(g, doc.geometry, sorted(m.support))
            h0, h1 = cech_h(curve, mesa_bundle(g, m))
            rep.add(f"exact[{i}]", "pass" if h1 == 0 else "fail",
                    f"mesa {i}: exact computation gives h1 = {h1} for O(-mesa) on the support")
            try:
                V = boundary_value_space(g, m, doc.geometry)
                codim = V.codim
                rep.add(f"codim[{i}]", "pass", f"mesa {i}: attainable boundary values have codimension equal to the genus")
            except NotAcyclicError as exc:
                rep.add(f"codim[{i}]", "fail", f"mesa {i}: {exc}")
            if verdict == "yes" and h1 != 0:
                raise InvariantBreach(f"combinatorial test claims acyclicity of mesa {i} but exact h1 = {h1}")
        else:
            status = {"yes": "pass", "no": "fail"}.get(verdict, "indeterminate")
            rep.add(f"acyclic[{i}]", status, f"mesa {i}: {args.mode} combinatorial test says {verdict}")
        rows.append([i, verdict, h0, h1, codim, genus(g, m.support)])
    rep.tables["cohomology"] = rows
    rep.data["cohomology"] = [dict(zip(rows[0], r)) for r in rows[1:]]


def cmd_contract(doc, args, rep):
    g = doc.graph
    dec = decompose(g, doc.pl, args.mode)
    new, descs = contract_fiber(g, dec, doc.geometry)
    rep.add("genus", "pass", "arithmetic genus is preserved once singularity genera are counted")
    rep.add("delta", "pass", "every singularity satisfies genus = delta - branches + 1")
    rep.data["descriptors"] = [d.to_dict() for d in descs]
    rep.data["contracted"] = {"vertices": list(new.vertex_ids), "edges": [e.id for e in new.edges]}
    rows = [["vertex", "genus", "branches", "delta", "gorenstein"]]
    for i, (m, d) in enumerate(zip(dec.mesas, descs)):
        rows.append([d.vertex, d.g, d.m, d.delta, d.elliptic_gorenstein])
        if d.V is not None:
            pres = ring_presentation(g, m, doc.geometry)
            rep.text_blocks.append(f"# ring at {d.vertex}\n{pres.text()}")
            rep.data["descriptors"][i]["presentation"] = pres.relations()
            rep.data["descriptors"][i]["description"] = pres.description
            ring = BbarRing(d.V, args.truncation)
            gens = [ring.element([[x] for x in row]) for row in d.V.basis] or [ring.one()]
            closed = all(ring.contains(ring.multiply(u, v)) for u in gens for v in gens)
            rep.add(f"ring[{i}]", "pass" if closed else "fail",
                    f"products of first-order generators at {d.vertex} satisfy the jet conditions (degree <= {args.truncation})")
    rep.tables["singularities"] = rows
    if args.plot:
        from .plotting import plot_graph

        rep.files.append(plot_graph(new, None, args.plot, "contracted fiber"))
    return dec


def cmd_strata(doc, args, rep):
    fam = LogFamily(doc.graph, doc.pl, {Face(): doc.geometry} if doc.geometry is not None else {})
    if args.face is not None:
        S = Face.parse(args.face)
        S.check(fam.rank)
        strata = [specialize(fam, S, args.mode)]
    else:
        strata = enumerate_strata(fam, args.mode)
    rows = [["face", "k", "radii", "verdict"]]
    for st in strata:
        status = st.verdict
        msg = f"stratum {st.face.label()}: the fiber is a sum of acyclic mesas with disjoint supports"
        if st.error:
            msg += f" ({st.error})"
        rep.add(f"stratum{st.face.label()}", status, msg)
        rows.append([st.face.label(), st.k, ";".join(str(list(r.coords)) for r in st.radii) or "-", st.verdict])
    rep.tables["strata"] = rows
    rep.data["strata"] = [
        {"face": s.face.label(), "k": s.k, "radii": [list(r.coords) for r in s.radii], "verdict": s.verdict,
         **({"error": s.error} if s.error else {}), **({"notes": s.notes} if s.notes else {})}
        for s in strata
    ]
    if args.face is None:
        simple = all(s.k <= 1 for s in strata)
        rep.data["simple"] = simple
        rep.add("simple", "info", f"the family {'is' if simple else 'is not'} simple (at most one mesa on every stratum)")
        generic = strata[0]
        if simple and generic.decomposition is not None:
            rho = generic.radii[0] if generic.k else None
            try:
                check_radius_coherence(rho or MonoidElement.zero(fam.rank), [s for s in strata if s.decomposition])
                rep.add("radius", "pass", "the generic radius projects to the radius of every stratum")
            except MesaCurveError as exc:
                rep.add("radius", "fail", str(exc))
        if fam.rank <= FUNCTORIAL_RANK_BOUND:
            bad = functoriality_violations(fam, strata)
            detail = "specializing in two steps agrees with specializing once"
            if bad:
                detail += "; fails for " + ", ".join(f"{S.label()} then {T.label()}" for S, T in bad[:3])
            rep.add("functorial", "fail" if bad else "pass", detail)
    if args.plot:
        from .plotting import plot_graph

        root, ext = os.path.splitext(args.plot)
        for st in strata:
            suffix = "" if len(strata) == 1 else "_" + ("".join(str(i + 1) for i in sorted(st.face.killed)) or "0")
            supports = [m.support for m in st.decomposition.mesas] if st.decomposition else []
            tops = [m.top for m in st.decomposition.mesas] if st.decomposition else []
            rep.files.append(plot_graph(st.graph, st.pl, f"{root}{suffix}{ext or '.png'}",
                                        f"stratum {st.face.label()}", supports, tops))


HANDLERS = {
    "validate": cmd_validate,
    "mesa": cmd_mesa,
    "degrees": cmd_degrees,
    "cohomology": cmd_cohomology,
    "contract": cmd_contract,
    "strata": cmd_strata,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mesacurve", description="Mesa decompositions and contractions of log curves.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("document", help="JSON curve document, or - for stdin")
    p.add_argument("--mode", choices=("guaranteed", "generic"), default=None)
    p.add_argument("--truncation", type=int, default=None)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--face", default=None, help="1-based generator list such as 1,3 (strata only)")
    p.add_argument("--exact", action="store_true", help="require explicit geometry for every mesa (cohomology)")
    p.add_argument("--dot", metavar="PATH", help="write the dual graph in DOT format")
    p.add_argument("--plot", metavar="PATH", help="render a figure of the (contracted or specialized) graph")
    return p


def run(command: str, doc: CurveDocument, args) -> Report:
    args.mode = args.mode or doc.mode
    args.truncation = args.truncation or doc.truncation
    rep = Report(command)
    HANDLERS[command](doc, args, rep)
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(doc.graph.to_dot())
        rep.files.append(args.dot)
    if args.plot and command not in ("contract", "strata"):
        from .plotting import plot_graph

        try:
            dec = decompose(doc.graph, doc.pl, None)
            supports, tops = [m.support for m in dec.mesas], [m.top for m in dec.mesas]
        except MesaCurveError:
            supports, tops = [], []
        rep.files.append(plot_graph(doc.graph, doc.pl, args.plot, command, supports, tops))
    return rep


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.face is not None and args.command != "strata":
        print("input error: --face applies to the strata command only", file=sys.stderr)
        return EXIT_INPUT
    try:
        doc = load(args.document)
    except (DocumentError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        rep = run(args.command, doc, args)
    except InvariantBreach as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return EXIT_BREACH
    except GeometryError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MesaCurveError as exc:
        # the document is well formed but fails a mathematical check
        rep = Report(args.command)
        rep.add("input", "fail", str(exc))
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(rep.to_json() if args.format == "json" else rep.to_text())
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
