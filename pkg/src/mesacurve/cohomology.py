"""Exact section spaces and cohomology of line bundles on nodal curves with rational components.

A component is a projective line over Q with named points (coordinates in
Q or infinity).  A section of O(D) on a component is stored as the
coefficient vector of a numerator polynomial P over the fixed monic
denominator prod (x - p)^n_p taken over the finite points with n_p > 0.

Evaluation at a point p of multiplicity n in D multiplies by (x - p)^n and
evaluates at p; at infinity the chart is u = 1/x.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

from . import linalg as la
from .errors import GeometryError, NotAcyclicError
from .graph import DualGraph, genus
from .linebundle import mesa_divisors
from .pl import Mesa


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def parse_coord(value) -> Fraction | _Infinity:
    if value is INF:
        return INF
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "oo"):
            return INF
        return Fraction(value.strip())
    if isinstance(value, float):
        raise GeometryError("coordinates must be exact; pass rationals as strings")
    return Fraction(value)


def format_coord(c) -> str:
    return "inf" if c is INF else la.format_fraction(c)


# --- single component -----------------------------------------------------------------


@dataclass(frozen=True)
class ComponentSections:
    """Basis of L(D) = {f : div f + D >= 0} on one projective line."""

    points: Mapping[str, object]
    divisor: Mapping[str, int]
    basis: tuple[tuple[Fraction, ...], ...]
    length: int  # numerator coefficient count

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def denominator_degree(self) -> int:
        return sum(n for p, n in self.divisor.items() if n > 0 and self.points[p] is not INF)

    def mult(self, name: str) -> int:
        return self.divisor.get(name, 0)

    def ev_functional(self, name: str) -> list[Fraction]:
        """Linear functional on numerator coefficients giving ev at the named point."""
        p = self.points[name]
        n = self.mult(name)
        size = self.length
        if p is INF:
            out = [Fraction(0)] * size
            k = self.denominator_degree + n
            if 0 <= k < size:
                out[k] = Fraction(1)
            return out
        others = Fraction(1)
        for q, m in self.divisor.items():
            cq = self.points[q]
            if q != name and m > 0 and cq is not INF:
                others *= (p - cq) ** m
        if n > 0:
            # (x-p)^n f = P / (other denominator factors)
            return [p ** i / others for i in range(size)]
        k = -n
        # f has a zero of order k: value of f/(x-p)^k at p is P^(k)(p)/k! over the denominator
        return [Fraction(comb(i, k)) * p ** (i - k) / others if i >= k else Fraction(0) for i in range(size)]

    def evaluate(self, coeffs: Sequence[Fraction], name: str) -> Fraction:
        """ev at ``name`` of the section with basis coordinates ``coeffs``."""
        num = self.numerator(coeffs)
        return sum((a * b for a, b in zip(self.ev_functional(name), num)), Fraction(0))

    def numerator(self, coeffs: Sequence[Fraction]) -> list[Fraction]:
        num = [Fraction(0)] * self.length
        for c, b in zip(coeffs, self.basis):
            if c:
                for i, x in enumerate(b):
                    num[i] += c * x
        return num

    def as_function(self, coeffs: Sequence[Fraction]):
        """The section as a plain rational function of the affine coordinate."""
        num = self.numerator(coeffs)
        poles = [(self.points[p], n) for p, n in self.divisor.items() if n > 0 and self.points[p] is not INF]

        def f(x: Fraction) -> Fraction:
            den = Fraction(1)
            for q, n in poles:
                den *= (x - q) ** n
            return sum((a * x ** i for i, a in enumerate(num)), Fraction(0)) / den

        return f


def riemann_section_space(points: Mapping[str, object], divisor: Mapping[str, int]) -> ComponentSections:
    """Basis of L(D) on P^1; its dimension is max(0, deg D + 1)."""
    points = {k: parse_coord(v) for k, v in points.items()}
    unknown = set(divisor) - set(points)
    if unknown:
        raise GeometryError(f"divisor refers to undeclared points {sorted(unknown)}")
    coords = [c for c in points.values()]
    if len(set(map(repr, coords))) != len(coords):
        raise GeometryError("points on a component must be distinct")
    divisor = {p: int(n) for p, n in divisor.items() if n}
    den = sum(n for p, n in divisor.items() if n > 0 and points[p] is not INF)
    n_inf = next((n for p, n in divisor.items() if points[p] is INF), 0)
    top = den + n_inf
    if top < 0:
        return ComponentSections(points, divisor, (), 0)
    length = top + 1
    conditions = []
    for p, n in divisor.items():
        c = points[p]
        if n >= 0 or c is INF:
            continue
        for j in range(-n):
            conditions.append([Fraction(comb(i, j)) * c ** (i - j) if i >= j else Fraction(0) for i in range(length)])
    basis = la.nullspace(conditions, length) if conditions else la.identity(length)
    return ComponentSections(points, divisor, tuple(tuple(b) for b in basis), length)


def evaluate_section(space: ComponentSections, coeffs: Sequence[Fraction], point: str) -> Fraction:
    return space.evaluate(coeffs, point)


# --- curves and bundles ---------------------------------------------------------------


@dataclass(frozen=True)
class Node:
    id: str
    first: tuple[str, str]  # (component, point name); the side scaled by alpha
    second: tuple[str, str]
    alpha: Fraction = Fraction(1)


@dataclass(frozen=True)
class ExplicitCurve:
    """Rational components with named points, glued at nodes.

    The node rule is ``value at first == alpha * value at second`` where
    ``first`` is the end on the component with the smaller id (the first
    listed end for loops).
    """

    components: Mapping[str, Mapping[str, object]]
    nodes: tuple[Node, ...]

    def __post_init__(self):
        comps = {v: {k: parse_coord(c) for k, c in pts.items()} for v, pts in self.components.items()}
        object.__setattr__(self, "components", comps)
        for v, pts in comps.items():
            if len(set(map(repr, pts.values()))) != len(pts):
                raise GeometryError(f"points on component {v} are not distinct")
        for n in self.nodes:
            if n.alpha == 0:
                raise GeometryError(f"gluing unit on {n.id} is zero")
            for v, p in (n.first, n.second):
                if v not in comps or p not in comps[v]:
                    raise GeometryError(f"node {n.id} refers to undeclared point {p} on {v}")

    @property
    def genus(self) -> int:
        return len(self.nodes) - len(self.components) + _count_components(self)

    def with_points(self, v: str, extra: Mapping[str, object]) -> ExplicitCurve:
        comps = {k: dict(p) for k, p in self.components.items()}
        comps[v].update({k: parse_coord(c) for k, c in extra.items()})
        return ExplicitCurve(comps, self.nodes)

    def with_alpha(self, node_id: str, alpha) -> ExplicitCurve:
        nodes = tuple(Node(n.id, n.first, n.second, Fraction(alpha)) if n.id == node_id else n for n in self.nodes)
        return ExplicitCurve(self.components, nodes)

    @classmethod
    def from_graph(cls, g: DualGraph, geometry: Geometry, vertices: Iterable[str] | None = None) -> ExplicitCurve:
        """Realize the induced subgraph on ``vertices`` (default: all) from document geometry."""
        vs = list(g.vertex_ids if vertices is None else vertices)
        comps = {}
        for v in vs:
            if g.vertex(v).genus != 0:
                raise GeometryError(f"component {v} has genus {g.vertex(v).genus}; only rational components are realizable")
            if v not in geometry.coords:
                raise GeometryError(f"geometry does not realize component {v}")
            pts = {}
            for name, c in geometry.coords[v].items():
                if isinstance(c, (list, tuple)):
                    pts[f"{name}:0"], pts[f"{name}:1"] = c
                else:
                    pts[name] = c
            for e in g.incident(v):
                needed = [f"{e.id}:0", f"{e.id}:1"] if e.is_loop else [e.id]
                missing = [p for p in needed if p not in pts]
                if missing:
                    raise GeometryError(f"component {v} has no coordinate for {missing[0]}")
            comps[v] = pts
        nodes = []
        inside = set(vs)
        for e in g.induced_edges(inside):
            alpha = geometry.alpha.get(e.id, Fraction(1))
            if e.is_loop:
                v = e.ends[0]
                nodes.append(Node(e.id, (v, f"{e.id}:0"), (v, f"{e.id}:1"), alpha))
            else:
                a, b = sorted(e.ends)
                nodes.append(Node(e.id, (a, e.id), (b, e.id), alpha))
        return cls(comps, tuple(nodes))


def _count_components(curve: ExplicitCurve) -> int:
    parent = {v: v for v in curve.components}

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    for n in curve.nodes:
        a, b = find(n.first[0]), find(n.second[0])
        if a != b:
            parent[a] = b
    return len({find(v) for v in parent})


@dataclass(frozen=True)
class Geometry:
    """Document-level geometry: coordinates per vertex and gluing units per edge."""

    coords: Mapping[str, Mapping[str, object]] = field(default_factory=dict)
    alpha: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        for e, a in self.alpha.items():
            if Fraction(a) == 0:
                raise GeometryError(f"gluing unit on {e} must be nonzero")
        object.__setattr__(self, "alpha", {e: Fraction(a) for e, a in self.alpha.items()})


@dataclass(frozen=True)
class LineBundleData:
    divisors: Mapping[str, Mapping[str, int]] = field(default_factory=dict)

    def divisor(self, v: str) -> Mapping[str, int]:
        return self.divisors.get(v, {})

    def degree(self, v: str) -> int:
        return sum(self.divisor(v).values())


@dataclass(frozen=True)
class SectionSpace:
    """Global sections: rows of ``matrix`` are basis sections in the concatenated component bases."""

    curve: ExplicitCurve
    bundle: LineBundleData
    spaces: Mapping[str, ComponentSections]
    offsets: Mapping[str, int]
    matrix: tuple[tuple[Fraction, ...], ...]
    width: int

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def component_coeffs(self, row: Sequence[Fraction], v: str) -> list[Fraction]:
        o = self.offsets[v]
        return list(row[o:o + self.spaces[v].dim])

    def values_at(self, v: str, point: str) -> list[Fraction]:
        """ev at the point of every basis section."""
        return [self.spaces[v].evaluate(self.component_coeffs(row, v), point) for row in self.matrix]


def _component_spaces(curve: ExplicitCurve, bundle: LineBundleData):
    spaces, offsets, width = {}, {}, 0
    for v in sorted(curve.components):
        sp = riemann_section_space(curve.components[v], bundle.divisor(v))
        spaces[v], offsets[v] = sp, width
        width += sp.dim
    return spaces, offsets, width


def _basis_ev(space: ComponentSections, point: str) -> list[Fraction]:
    """ev at a point of each basis element of a component space."""
    f = space.ev_functional(point)
    return [sum((a * b for a, b in zip(f, bvec)), Fraction(0)) for bvec in space.basis]


def matching_matrix(curve: ExplicitCurve, spaces, offsets, width) -> la.Matrix:
    rows = []
    for n in curve.nodes:
        row = [Fraction(0)] * width
        (u, pu), (w, pw) = n.first, n.second
        for j, x in enumerate(_basis_ev(spaces[u], pu)):
            row[offsets[u] + j] += x
        for j, x in enumerate(_basis_ev(spaces[w], pw)):
            row[offsets[w] + j] -= n.alpha * x
        rows.append(row)
    return rows


def global_sections(curve: ExplicitCurve, bundle: LineBundleData) -> SectionSpace:
    spaces, offsets, width = _component_spaces(curve, bundle)
    m = matching_matrix(curve, spaces, offsets, width)
    kernel = la.nullspace(m, width) if m else la.identity(width)
    return SectionSpace(curve, bundle, spaces, offsets, tuple(tuple(r) for r in kernel), width)


def euler_characteristic(curve: ExplicitCurve, bundle: LineBundleData) -> int:
    return sum(bundle.degree(v) + 1 for v in curve.components) - len(curve.nodes)


def cech_h(curve: ExplicitCurve, bundle: LineBundleData) -> tuple[int, int]:
    """(h0, h1), with h1 read off the normalization sequence as h0 - chi."""
    h0 = global_sections(curve, bundle).dim
    h1 = h0 - euler_characteristic(curve, bundle)
    if h1 < 0:
        raise GeometryError("negative h1: a component carries a divisor below -1 that the sequence cannot see")
    return h0, h1


# --- connecting homomorphism ----------------------------------------------------------


@dataclass(frozen=True)
class ConnectingMap:
    """Matrix of k^n -> H^1(O) in the basis ``h1_basis`` of the cokernel of the constant matching map."""

    matrix: tuple[tuple[Fraction, ...], ...]
    single_point_columns: tuple[tuple[Fraction, ...], ...]
    h1_basis: tuple[tuple[Fraction, ...], ...]
    evaluation_image: tuple[tuple[Fraction, ...], ...]

    def column(self, i: int) -> tuple[Fraction, ...]:
        return tuple(row[i] for row in self.matrix)


def _h1_projector(curve: ExplicitCurve) -> la.Matrix:
    """Rows spanning the annihilator of the image of constants under node matching."""
    comps = sorted(curve.components)
    idx = {v: i for i, v in enumerate(comps)}
    m0 = []
    for n in curve.nodes:
        row = [Fraction(0)] * len(comps)
        row[idx[n.first[0]]] += 1
        row[idx[n.second[0]]] -= n.alpha
        m0.append(row)
    if not m0:
        return []
    return la.rref(la.left_nullspace(m0, len(m0)), len(m0))[0]


def _node_mismatch(curve: ExplicitCurve, lift: Mapping[str, tuple[ComponentSections, list[Fraction]]]) -> list[Fraction]:
    out = []
    for n in curve.nodes:
        (u, pu), (w, pw) = n.first, n.second
        su, cu = lift[u]
        sw, cw = lift[w]
        out.append(su.evaluate(cu, pu) - n.alpha * sw.evaluate(cw, pw))
    return out


def connecting_values(curve: ExplicitCurve, points: Sequence[tuple[str, str]]) -> ConnectingMap:
    """The connecting map of 0 -> O -> O(p1+...+pn) -> sum k(p_i) -> 0.

    The n-point map is computed from one lift per component of O(sum p_i);
    the single-point maps use O(p_i) alone, so the two routes agree only if
    the map really is the sum of its one-point pieces.
    """
    if len(set(points)) != len(points):
        raise GeometryError("points must be distinct")
    node_points = {pt for n in curve.nodes for pt in (n.first, n.second)}
    for pt in points:
        if pt in node_points:
            raise GeometryError(f"{pt} is a node, not a smooth point")
    proj = _h1_projector(curve)
    by_comp: dict[str, list[int]] = {}
    for i, (v, _) in enumerate(points):
        by_comp.setdefault(v, []).append(i)

    def lift_all(target: Sequence[Fraction]):
        lift = {}
        for v in curve.components:
            div = {points[i][1]: 1 for i in by_comp.get(v, [])}
            sp = riemann_section_space(curve.components[v], div)
            if div:
                rows = [_basis_ev(sp, points[i][1]) for i in by_comp[v]]
                coeffs = la.solve(rows, [target[i] for i in by_comp[v]], sp.dim)
                if coeffs is None:
                    raise GeometryError(f"cannot prescribe values on component {v}")
            else:
                coeffs = [Fraction(0)] * sp.dim
            lift[v] = (sp, coeffs)
        return lift

    n = len(points)
    cols = []
    for i in range(n):
        e = [Fraction(int(j == i)) for j in range(n)]
        cols.append(la.matvec(proj, _node_mismatch(curve, lift_all(e))) if proj else [])
    matrix = tuple(tuple(cols[i][r] for i in range(n)) for r in range(len(proj)))

    singles = []
    for i, (v, name) in enumerate(points):
        lift = {}
        for u in curve.components:
            sp = riemann_section_space(curve.components[u], {name: 1} if u == v else {})
            if u == v:
                coeffs = la.solve([_basis_ev(sp, name)], [Fraction(1)], sp.dim)
            else:
                coeffs = [Fraction(0)] * sp.dim
            lift[u] = (sp, coeffs)
        singles.append(tuple(la.matvec(proj, _node_mismatch(curve, lift))) if proj else ())

    divisors = {}
    for v, name in points:
        divisors.setdefault(v, {})[name] = 1
    sections = global_sections(curve, LineBundleData(divisors))
    ev = [[sections.values_at(v, name)[k] for v, name in points] for k in range(sections.dim)]
    image = la.row_space(ev, n) if ev else []
    return ConnectingMap(matrix, tuple(singles), tuple(tuple(r) for r in proj), tuple(tuple(r) for r in image))


# --- boundary values of mesas ---------------------------------------------------------


@dataclass(frozen=True)
class VSubspace:
    """Attainable boundary values, in branch coordinates, with basis and annihilator in RREF."""

    ambient: int
    basis: tuple[tuple[Fraction, ...], ...]
    annihilator: tuple[tuple[Fraction, ...], ...]
    boundary_edges: tuple[str, ...] = ()
    h0: int = 0
    h1: int = 0
    kernel_dim: int = 0

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def codim(self) -> int:
        return self.ambient - self.dim

    def contains(self, vec: Sequence[Fraction]) -> bool:
        return all(sum((a * Fraction(b) for a, b in zip(row, vec)), Fraction(0)) == 0 for row in self.annihilator)

    @property
    def constants(self) -> tuple[Fraction, ...] | None:
        """The defining functional when V is a hyperplane, normalized with leading coefficient 1."""
        return self.annihilator[0] if self.codim == 1 else None


def make_vsubspace(vectors: Sequence[Sequence[Fraction]], ambient: int, **kw) -> VSubspace:
    basis = la.row_space(vectors, ambient) if vectors else []
    ann = la.rref(la.nullspace(basis, ambient), ambient)[0] if basis else la.identity(ambient)
    return VSubspace(ambient, tuple(tuple(r) for r in basis), tuple(tuple(r) for r in ann), **kw)


def _check_top_monodromy(g: DualGraph, mesa: Mesa, geometry: Geometry) -> None:
    """O(-mesa) is trivial on the top, so the gluing units there must admit a nowhere-zero constant section."""
    scale = {}
    for start in sorted(mesa.top):
        if start in scale:
            continue
        scale[start] = Fraction(1)
        stack = [start]
        while stack:
            u = stack.pop()
            for e in g.incident(u):
                if not (e.ends[0] in mesa.top and e.ends[1] in mesa.top):
                    continue
                alpha = geometry.alpha.get(e.id, Fraction(1))
                a, b = sorted(e.ends)
                # constant c_a on a, c_b on b with c_a = alpha * c_b
                if e.is_loop:
                    if alpha != 1:
                        raise GeometryError(f"gluing unit {alpha} on loop {e.id} in the top twists O(-mesa)")
                    continue
                w = e.other(u)
                want = scale[u] / alpha if u == a else scale[u] * alpha
                if w in scale:
                    if scale[w] != want:
                        raise GeometryError(f"gluing units around a cycle of the top through {e.id} do not multiply to 1")
                else:
                    scale[w] = want
                    stack.append(w)


def mesa_bundle(g: DualGraph, mesa: Mesa) -> LineBundleData:
    return LineBundleData({v: dict(d) for v, d in mesa_divisors(g, mesa).items()})


def boundary_value_space(g: DualGraph, mesa: Mesa, geometry: Geometry, check: bool = True) -> VSubspace:
    """Values at the boundary points attained by sections of O_E(-mesa), in branch coordinates.

    A value sigma(q) on the support side corresponds to the branch value a
    through the edge's gluing unit: sigma = alpha * a when the support
    vertex has the smaller id, a = alpha * sigma otherwise.
    """
    E = set(mesa.support)
    curve = ExplicitCurve.from_graph(g, geometry, sorted(E))
    _check_top_monodromy(g, mesa, geometry)
    bundle = mesa_bundle(g, mesa)
    sections = global_sections(curve, bundle)
    boundary = g.boundary_edges(E)
    cols = []
    for e in boundary:
        v = e.ends[0] if e.ends[0] in E else e.ends[1]
        w = e.other(v)
        alpha = geometry.alpha.get(e.id, Fraction(1))
        vals = sections.values_at(v, e.id)
        cols.append([x / alpha for x in vals] if v < w else [alpha * x for x in vals])
    m = len(boundary)
    rows = [[cols[j][k] for j in range(m)] for k in range(sections.dim)]
    h0 = sections.dim
    h1 = h0 - euler_characteristic(curve, bundle)
    V = make_vsubspace(rows, m, boundary_edges=tuple(e.id for e in boundary), h0=h0, h1=h1)
    V = VSubspace(V.ambient, V.basis, V.annihilator, V.boundary_edges, h0, h1, h0 - V.dim)
    if check:
        expected = genus(g, E)
        if V.codim != expected or V.kernel_dim != 1:
            raise NotAcyclicError(
                f"boundary values have codimension {V.codim} (expected {expected}) and solution fibers of "
                f"dimension {V.kernel_dim} (expected 1); h1 = {h1}"
            )
    return V


# --- combinatorial acyclicity --------------------------------------------------------


def generic_acyclicity(g: DualGraph, mesa: Mesa, mode: str = "guaranteed") -> str:
    """Decide H^1(E, O_E(-mesa)) = 0 from the multidegree alone: 'yes', 'no' or 'indeterminate'.

    ``guaranteed`` answers yes/no only when the answer holds for every
    realization (any gluing, any points); ``generic`` uses general-line-bundle
    dimensions h1 = max(0, gamma - 1 - d) per component. A restriction that is
    effective (only boundary points, as on the top) is never a general bundle
    of its degree: there h1 >= gamma - d, and generic mode uses that value.
    """
    if mode not in ("guaranteed", "generic"):
        raise ValueError(f"unknown mode {mode!r}")
    generic = mode == "generic"
    E = set(mesa.support)
    div = mesa_divisors(g, mesa)
    deg = {v: sum(div[v].values()) for v in E}
    gam = {v: g.vertex(v).genus for v in E}
    effective = {v for v in E if all(n >= 0 for n in div[v].values())}
    edges = list(g.induced_edges(E))
    alive = set(E)

    def ends(v):
        return sum((2 if e.is_loop else 1) for e in edges if v in e.ends)

    def h1_zero(v):
        d, c = deg[v], gam[v]
        if c == 0:
            return d >= -1
        if generic:
            return d >= (c if v in effective else c - 1)
        return d > 2 * c - 2

    def free(v):
        d, c, s = deg[v], gam[v], ends(v)
        if c == 0:
            return d >= s - 1
        return d >= c + s - 1 if generic else d > 2 * c - 2 + s

    # Peel leaves whose sections can take any value at their one node.
    peeled = True
    while peeled:
        peeled = False
        for v in sorted(alive):
            if len(alive) > 1 and ends(v) == 1 and h1_zero(v) and free(v):
                alive.discard(v)
                edges = [e for e in edges if v not in e.ends]
                peeled = True
                break

    # Definite obstructions: H^1 surjects onto each component's H^1, and h1 >= -chi.
    # In generic mode an effective restriction also counts: it has a section, so h1 >= gamma - d.
    for v in alive:
        if deg[v] < gam[v] - 1 or (generic and v in effective and deg[v] < gam[v]):
            return "no"
    total = sum(deg[v] for v in alive)
    gen = len(edges) - len(alive) + 1 + sum(gam[v] for v in alive)
    if total < gen - 1:
        return "no"

    if len(alive) == 1 and not edges:
        (v,) = alive
        return "yes" if h1_zero(v) else ("no" if generic else "indeterminate")

    is_ring = all(gam[v] == 0 and ends(v) == 2 for v in alive)
    if is_ring:
        if total > 0 and all(deg[v] >= 0 for v in alive):
            return "yes"

    if all(h1_zero(v) for v in alive) and all(free(e.ends[0]) or free(e.ends[1]) for e in edges):
        return "yes"
    return "indeterminate"
