import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import (
    cusp_chain,
    non_gorenstein,
    oracle_boundary_dims,
    random_instance,
    random_points,
    random_unit,
    realize,
    tacnode_geometry,
    tacnode_graph,
)
from mesacurve import linalg as la
from mesacurve.cohomology import (
    INF,
    ExplicitCurve,
    Geometry,
    LineBundleData,
    Node,
    boundary_value_space,
    cech_h,
    connecting_values,
    evaluate_section,
    generic_acyclicity,
    global_sections,
    mesa_bundle,
    riemann_section_space,
)
from mesacurve.errors import GeometryError, NotAcyclicError
from mesacurve.graph import DualGraph, genus
from mesacurve.linebundle import mesa_divisors
from mesacurve.pl import decompose, mesa_from

P1 = ExplicitCurve({"P": {"a": 0, "b": 1, "c": INF}}, ())


def two_gon_curve(extra_a=None, extra_b=None, alpha=(1, 1)):
    a = {"n1": 0, "n2": INF, **(extra_a or {})}
    b = {"n1": 0, "n2": INF, **(extra_b or {})}
    nodes = (Node("n1", ("A", "n1"), ("B", "n1"), Fr(alpha[0])), Node("n2", ("A", "n2"), ("B", "n2"), Fr(alpha[1])))
    return ExplicitCurve({"A": a, "B": b}, nodes)


# --- single components -----------------------------------------------------------------


def test_trivial_divisor():
    sp = riemann_section_space({"a": 0}, {})
    assert sp.dim == 1
    assert evaluate_section(sp, [Fr(1)], "a") == 1


def test_two_points_minus_infinity_against_partial_fractions():
    sp = riemann_section_space({"p0": 0, "p1": 1, "q": "inf"}, {"p0": 1, "p1": 1, "q": -1})
    assert sp.dim == 2
    # every element is a/x + b/(x-1); recover a, b from residues and compare elsewhere
    for coeffs in ([Fr(1), Fr(0)], [Fr(0), Fr(1)], [Fr(2), Fr(-3)]):
        f = sp.as_function(coeffs)
        a = evaluate_section(sp, coeffs, "p0")
        b = evaluate_section(sp, coeffs, "p1")
        for x in (Fr(5), Fr(-2, 3), Fr(7, 4)):
            assert f(x) == a / x + b / (x - 1)


def test_negative_degree_has_no_sections():
    assert riemann_section_space({"a": 0, "b": 1}, {"a": -1}).dim == 0
    assert riemann_section_space({"a": 0, "b": 1}, {"a": 1, "b": -3}).dim == 0


def test_pole_normalization():
    sp = riemann_section_space({"o": 0, "i": "inf"}, {"o": 1})
    # 1/x has numerator 1 over denominator x; in the basis find that element
    coeffs = la.solve([list(b) for b in zip(*sp.basis)], [Fr(1), Fr(0)], sp.dim)
    assert sp.as_function(coeffs)(Fr(3)) == Fr(1, 3)
    assert evaluate_section(sp, coeffs, "o") == 1
    assert evaluate_section(sp, coeffs, "i") == 0


def test_value_matrix_invertible():
    sp = riemann_section_space({"p0": 0, "p1": 1, "q": "inf"}, {"p0": 1, "p1": 1, "q": -1})
    m = [[evaluate_section(sp, b, p) for p in ("p0", "p1")] for b in la.identity(2)]
    assert la.determinant(m) != 0


def test_evaluation_at_infinity_uses_reciprocal_chart():
    sp = riemann_section_space({"o": 0, "i": "inf"}, {"i": 2})
    # f = 3 + x - 5x^2; in u = 1/x, u^2 f -> -5 at u = 0
    f = [Fr(3), Fr(1), Fr(-5)]
    coeffs = la.solve([list(b) for b in zip(*sp.basis)], f, sp.dim)
    assert evaluate_section(sp, coeffs, "i") == -5
    assert evaluate_section(sp, coeffs, "o") == 3


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_riemann_roch_on_p1(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    pts = random_points(rng, n)
    names = [f"p{i}" for i in range(n)]
    div = {p: rng.randint(-3, 3) for p in names}
    sp = riemann_section_space(dict(zip(names, pts)), div)
    assert sp.dim == max(0, sum(div.values()) + 1)
    # every basis element really lies in L(D): check pole/zero orders by evaluation
    for b in sp.basis:
        f = sp.as_function(b)
        for name, p in zip(names, pts):
            if p is INF or div[name] >= 0:
                continue
            assert f(p) == 0


def test_duplicate_points_rejected():
    with pytest.raises(GeometryError):
        riemann_section_space({"a": 1, "b": 1}, {})
    with pytest.raises(GeometryError):
        ExplicitCurve({"A": {"x": 0, "y": "0"}}, ())


def test_zero_gluing_unit_rejected():
    with pytest.raises(GeometryError):
        two_gon_curve(alpha=(0, 1))
    with pytest.raises(GeometryError):
        Geometry({}, {"e": 0})


# --- global sections ---------------------------------------------------------------------


def test_global_sections_examples():
    assert global_sections(P1, LineBundleData()).dim == 1
    assert global_sections(two_gon_curve(), LineBundleData()).dim == 1
    curve = two_gon_curve({"p1": 1}, {"p2": 1})
    bundle = LineBundleData({"A": {"p1": 1}, "B": {"p2": 1}})
    assert global_sections(curve, bundle).dim == 2
    assert cech_h(curve, bundle) == (2, 0)


def test_cech_examples():
    assert cech_h(two_gon_curve(), LineBundleData()) == (1, 1)
    assert cech_h(P1, LineBundleData()) == (1, 0)


def test_loop_is_matched_against_itself():
    nodal_cubic = ExplicitCurve({"C": {"l:0": 0, "l:1": INF}}, (Node("l", ("C", "l:0"), ("C", "l:1")),))
    assert nodal_cubic.genus == 1
    assert cech_h(nodal_cubic, LineBundleData()) == (1, 1)
    twisted = nodal_cubic.with_alpha("l", 2)
    assert cech_h(twisted, LineBundleData()) == (0, 0)


def test_small_genus_one_mesa_has_m_sections():
    g = tacnode_graph()
    m = mesa_from(g, {"A", "B"}, {"A", "B"})
    curve = ExplicitCurve.from_graph(g, tacnode_geometry(), ["A", "B"])
    assert cech_h(curve, mesa_bundle(g, m)) == (2, 0)


def test_non_rational_component_rejected():
    g = DualGraph.build([("E", 1), ("R", 0)], [("e", "E", "R", [1])])
    with pytest.raises(GeometryError):
        ExplicitCurve.from_graph(g, Geometry({"E": {"e": 0}}), ["E"])
    with pytest.raises(GeometryError):
        ExplicitCurve.from_graph(g, Geometry({}), ["R"])


# --- connecting map ------------------------------------------------------------------------


def test_connecting_map_on_genus_zero_is_zero():
    cm = connecting_values(P1, [("P", "a"), ("P", "b")])
    assert cm.matrix == () and cm.h1_basis == ()


def test_connecting_map_on_two_gon():
    one = connecting_values(two_gon_curve({"p": 1}), [("A", "p")])
    assert len(one.matrix) == 1 and one.matrix[0][0] != 0
    two = connecting_values(two_gon_curve({"p": 1}, {"r": 1}), [("A", "p"), ("B", "r")])
    c1, c2 = two.matrix[0]
    assert c1 != 0 and c2 != 0
    assert two.single_point_columns == ((c1,), (c2,))


def test_connecting_map_rejects_nodes():
    with pytest.raises(GeometryError):
        connecting_values(two_gon_curve(), [("A", "n1")])


# --- boundary values --------------------------------------------------------------------------


def test_tacnode_boundary_values():
    g = tacnode_graph()
    m = mesa_from(g, {"A", "B"}, {"A", "B"})
    V = boundary_value_space(g, m, tacnode_geometry())
    assert V.codim == 1 and all(c != 0 for c in V.constants)
    assert V.h0 == 2 and V.h1 == 0 and V.kernel_dim == 1


def test_non_gorenstein_boundary_values():
    g, m, geo = non_gorenstein()
    V = boundary_value_space(g, m, geo)
    assert V.annihilator == ((Fr(1), Fr(0)),)
    assert V.basis == ((Fr(0), Fr(1)),)


def test_genus_two_chain():
    g, m, geo = cusp_chain(2)
    V = boundary_value_space(g, m, geo)
    assert V.codim == 2 == genus(g, m.support)
    dimV, h0, h1 = oracle_boundary_dims(g, m.support, mesa_divisors(g, m), geo)
    assert (dimV, h0, h1) == (V.dim, V.h0, V.h1)


def test_twisted_top_is_rejected():
    g = tacnode_graph()
    m = mesa_from(g, {"A", "B"}, {"A", "B"})
    geo = Geometry(tacnode_geometry().coords, {"n1": Fr(2)})
    with pytest.raises(GeometryError):
        boundary_value_space(g, m, geo)


def test_failed_acyclicity_raises():
    # genus-2 top with a single boundary point: h1 = 1
    g = DualGraph.build([("A", 0), ("B", 0), ("z", 0)],
                        [("x", "A", "B", [1]), ("y", "A", "B", [1]), ("w", "A", "B", [1]), ("q", "A", "z", [1])])
    m = mesa_from(g, {"A", "B"}, {"A", "B"})
    geo = Geometry({"A": {"x": 0, "y": 1, "w": "inf", "q": 2}, "B": {"x": 0, "y": 1, "w": "inf"}})
    with pytest.raises(NotAcyclicError):
        boundary_value_space(g, m, geo)
    V = boundary_value_space(g, m, geo, check=False)
    assert V.h1 == 1
    # the degree-1 bundle here is effective, which the multidegree alone cannot see
    assert generic_acyclicity(g, m) != "yes"


# --- combinatorial acyclicity ----------------------------------------------------------------


def test_generic_acyclicity_examples():
    g = tacnode_graph()
    assert generic_acyclicity(g, mesa_from(g, {"A", "B"}, {"A", "B"})) == "yes"
    g2 = DualGraph.build([("X", 2), ("z", 0)], [("q", "X", "z", [1])])
    m2 = mesa_from(g2, {"X"}, {"X"})
    assert generic_acyclicity(g2, m2, "guaranteed") == "indeterminate"
    # one boundary point on a genus-2 curve: O(q) always has h1 = 1
    assert generic_acyclicity(g2, m2, "generic") == "no"
    g3 = DualGraph.build([("E", 1), ("r1", 0), ("r2", 0)], [("a", "E", "r1", [1]), ("b", "E", "r2", [1])])
    assert generic_acyclicity(g3, mesa_from(g3, {"E"}, {"E"})) == "yes"
    with pytest.raises(ValueError):
        generic_acyclicity(g3, mesa_from(g3, {"E"}, {"E"}), "sometimes")


def test_generic_acyclicity_definite_no():
    # genus-3 smooth top with one boundary point: every degree-1 bundle has h1 >= 1
    g = DualGraph.build([("X", 3), ("z", 0)], [("q", "X", "z", [1])])
    m = mesa_from(g, {"X"}, {"X"})
    assert generic_acyclicity(g, m, "guaranteed") == "no"
    assert generic_acyclicity(g, m, "generic") == "no"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_small_genus_one_mesas_are_acyclic(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, small_ring=True)
    g = inst.graph
    m = decompose(g, inst.pl).mesas[0]
    assert generic_acyclicity(g, m) == "yes"
    geo = realize(rng, g, sorted(m.support), trivial_on=m.top)
    V = boundary_value_space(g, m, geo)
    assert V.h1 == 0 and V.h0 == V.ambient and V.codim == 1
    assert all(c != 0 for c in V.constants)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 3))
def test_exact_engine_matches_oracle(seed, gen):
    rng = random.Random(seed)
    inst = random_instance(rng, genus=gen, max_tails=4)
    g = inst.graph
    m = decompose(g, inst.pl).mesas[0]
    geo = realize(rng, g, sorted(m.support), trivial_on=m.top)
    V = boundary_value_space(g, m, geo, check=False)
    dimV, h0, h1 = oracle_boundary_dims(g, m.support, mesa_divisors(g, m), geo)
    assert (V.dim, V.h0, V.h1) == (dimV, h0, h1)
    if h1 == 0:
        assert V.codim == genus(g, m.support) and V.kernel_dim == 1
    for mode in ("guaranteed", "generic"):
        if generic_acyclicity(g, m, mode) == "yes":
            assert h1 == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_euler_characteristic_additivity(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, genus=rng.randint(0, 3), max_tails=3)
    g = inst.graph
    m = decompose(g, inst.pl, None).mesas[0]
    geo = realize(rng, g, sorted(m.support))
    curve = ExplicitCurve.from_graph(g, geo, sorted(m.support))
    div = {v: {p: rng.randint(-1, 2) for p in pts} for v, pts in curve.components.items()}
    bundle = LineBundleData(div)
    h0, h1 = cech_h(curve, bundle)
    assert h0 - h1 == sum(sum(d.values()) + 1 for d in div.values()) - len(curve.nodes)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_rescaling_a_gluing_unit_acts_diagonally(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, small_ring=rng.random() < 0.5, genus=rng.randint(0, 2), max_tails=3)
    g = inst.graph
    m = decompose(g, inst.pl).mesas[0]
    geo = realize(rng, g, sorted(m.support), trivial_on=m.top)
    try:
        V = boundary_value_space(g, m, geo)
    except NotAcyclicError:
        return
    j = rng.randrange(V.ambient)
    e = g.edge(V.boundary_edges[j])
    a = random_unit(rng)
    alpha = dict(geo.alpha)
    alpha[e.id] = alpha.get(e.id, Fr(1)) * a
    W = boundary_value_space(g, m, Geometry(geo.coords, alpha))
    inside = e.ends[0] if e.ends[0] in m.support else e.ends[1]
    factor = 1 / a if inside < e.other(inside) else a
    scaled = [[x * (factor if i == j else 1) for i, x in enumerate(row)] for row in V.basis]
    assert la.row_space(scaled, V.ambient) == [list(r) for r in W.basis]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_connecting_map_is_columnwise(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, small_ring=True, max_tails=2)
    g = inst.graph
    m = decompose(g, inst.pl).mesas[0]
    geo = realize(rng, g, sorted(m.support), trivial_on=m.support)
    curve = ExplicitCurve.from_graph(g, geo, sorted(m.support))
    n = rng.randint(1, 4)
    points = []
    for i in range(n):
        v = rng.choice(sorted(curve.components))
        used = {repr(c) for c in curve.components[v].values()}
        p = next(x for x in random_points(rng, 12, allow_inf=False) if repr(x) not in used)
        curve = curve.with_points(v, {f"s{i}": p})
        points.append((v, f"s{i}"))
    cm = connecting_values(curve, points)
    assert len(cm.matrix) == 1  # H^1(O) of a genus-1 curve is a line
    for i in range(n):
        assert cm.column(i) == cm.single_point_columns[i]
    # exactness: the image of evaluation is the kernel of the connecting map
    kernel = la.nullspace([list(r) for r in cm.matrix], n) if cm.matrix else la.identity(n)
    assert la.row_space(kernel, n) == [list(r) for r in cm.evaluation_image]
