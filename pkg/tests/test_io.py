import copy
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import random_instance, realize
from conftest import SAMPLES
from mesacurve.errors import DocumentSyntaxError, IntegrityViolation, SchemaViolation
from mesacurve.io import CurveDocument, load, parse, serialize
from mesacurve.pl import decompose

MINIMAL = {"format_version": 1, "monoid_rank": 0, "vertices": [{"id": "v"}], "edges": []}


def doc(**changes):
    d = copy.deepcopy(MINIMAL)
    d.update(changes)
    return json.dumps(d)


def test_minimal_document():
    parsed = parse(doc())
    assert parsed.rank == 0 and [v.id for v in parsed.graph.vertices] == ["v"]
    assert parsed.geometry is None and parsed.mode == "guaranteed" and parsed.truncation == 6


def test_wrong_delta_length_names_the_edge():
    text = doc(monoid_rank=2, vertices=[{"id": "a"}, {"id": "b"}],
               edges=[{"id": "ok", "ends": ["a", "b"], "delta": [1, 0]},
                      {"id": "short", "ends": ["a", "b"], "delta": [1]}])
    with pytest.raises(SchemaViolation) as exc:
        parse(text)
    assert "short" in str(exc.value)
    assert exc.value.path == "$.edges[1].delta"


def test_duplicate_vertex_id():
    with pytest.raises(IntegrityViolation) as exc:
        parse(doc(vertices=[{"id": "v"}, {"id": "v"}]))
    assert exc.value.path == "$.vertices[1].id"


def test_error_classes_are_distinct():
    with pytest.raises(DocumentSyntaxError):
        parse("{not json")
    with pytest.raises(SchemaViolation):
        parse(doc(vertices=[]))
    with pytest.raises(SchemaViolation):
        parse(doc(extra=1))
    with pytest.raises(IntegrityViolation):
        parse(doc(edges=[{"id": "e", "ends": ["v", "w"], "delta": []}]))
    assert not issubclass(SchemaViolation, IntegrityViolation)
    assert not issubclass(IntegrityViolation, SchemaViolation)


def test_integrity_of_geometry():
    base = json.loads(doc(monoid_rank=1, vertices=[{"id": "a"}, {"id": "b"}],
                          edges=[{"id": "e", "ends": ["a", "b"], "delta": [1]},
                                 {"id": "l", "ends": ["a", "a"], "delta": [1]}]))
    bad = [
        {"vertices": {"a": {"coords": {"e": "0", "l": ["0", "1"]}}}},  # repeated point
        {"vertices": {"a": {"coords": {"l": "0"}}}},  # loop needs a pair
        {"vertices": {"b": {"coords": {"l": ["0", "1"]}}}},  # loop does not meet b
        {"vertices": {"c": {"coords": {}}}},
        {"edges": {"e": {"alpha": "0"}}},
        {"edges": {"x": {"alpha": "1"}}},
    ]
    for geometry in bad:
        with pytest.raises(IntegrityViolation):
            parse(json.dumps(dict(base, geometry=geometry)))
    with pytest.raises(SchemaViolation):
        parse(json.dumps(dict(base, geometry={"edges": {"e": {"alpha": "1/0"}}})))
    ok = parse(json.dumps(dict(base, geometry={"vertices": {"a": {"coords": {"e": "inf", "l": ["0", "-1/2"]}}},
                                               "edges": {"e": {"alpha": "3/4"}}})))
    assert str(ok.geometry.alpha["e"]) == "3/4"


def test_unknown_references():
    with pytest.raises(IntegrityViolation):
        parse(doc(pl={"vertex_values": {"w": []}}))
    with pytest.raises(IntegrityViolation):
        parse(doc(pl={"marking_slopes": {"h": 1}}))
    marked = [{"id": "v", "markings": [{"id": "h"}]}]
    assert parse(doc(vertices=marked, pl={"marking_slopes": {"h": 2}})).pl.slope("h") == 2
    with pytest.raises(SchemaViolation):
        parse(doc(vertices=marked, pl={"marking_slopes": {"h": -1}}))


@pytest.mark.parametrize("name", sorted(p.name for p in SAMPLES.glob("*.json")))
def test_samples_are_canonical(name):
    path = SAMPLES / name
    d = load(str(path))
    assert serialize(d) == path.read_text()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_round_trip(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, rank=rng.randint(1, 3), mesas=rng.randint(1, 2), vertex_genus=True, max_tails=3)
    g = inst.graph
    geo = None
    if rng.random() < 0.5:
        m = decompose(g, inst.pl, None).mesas[0]
        geo = realize(rng, g, sorted(v for v in m.support if g.vertex(v).genus == 0))
    options = rng.choice([{}, {"mode": "generic"}, {"truncation": 4, "mode": "guaranteed"}])
    d = CurveDocument(g.rank, g, inst.pl, geo, options)
    text = serialize(d)
    again = parse(text)
    assert serialize(again) == text
    assert again.graph == g and again.options == options
    assert again.pl.normalized(g) == inst.pl.normalized(g)
