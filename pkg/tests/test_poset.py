import json

import pytest

from cdfan.poset import (TOP, InvalidPoset, NoOrientation, SchemaError, UnsupportedSize, barycentric,
                         build_named, crosspoly_fan, cube_fan, from_json, incidence_orientation, ingest,
                         is_eulerian_mobius, maximal_flags, polygon_fan, serialize, simplex_fan, to_json,
                         validate)


@pytest.mark.parametrize("family,size,counts", [
    ("polygon", 4, [1, 4, 4]),
    ("simplex", 3, [1, 4, 6, 4]),
    ("cube", 3, [1, 8, 12, 6]),
    ("crosspoly", 3, [1, 6, 12, 8]),
    ("simplex", 1, [1, 2]),
])
def test_face_counts(family, size, counts):
    assert build_named(family, size).face_counts() == counts


def test_dim_cap_and_unknown_family():
    with pytest.raises(UnsupportedSize):
        build_named("cube", 7)
    with pytest.raises(Exception):
        build_named("dodecahedron", 3)


def test_boolean_rank3_passes_every_check():
    # the triangle fan completes to the boolean lattice of rank 3
    rep = validate(simplex_fan(2))
    assert rep.ok, rep.failures()


def test_missing_ridge_breaks_diamond():
    p = cube_fan(3)
    rep = validate(p.without(p.by_rank[2][0]))
    assert not rep.checks["diamond"][0]


@pytest.mark.parametrize("m", [3, 5, 8])
def test_polygon_eulerian(m):
    p = polygon_fan(m)
    assert validate(p).checks["eulerian"][0]
    assert is_eulerian_mobius(p)


def test_barycentric_counts():
    one = barycentric(simplex_fan(1))
    assert [len(x) for x in one.chains] == [0, 1, 1]
    sq = barycentric(polygon_fan(4))
    assert sum(1 for x in sq.chains if len(x) == 1) == 8
    assert sum(1 for x in sq.chains if len(x) == 2) == 8
    assert len(barycentric(simplex_fan(3)).maximal) == 24


def test_maximal_flags_below_a_cone():
    p = cube_fan(3)
    square = p.by_rank[3][0]
    assert len(maximal_flags(p, square)) == 8


def test_orientation_on_single_diamond():
    p = simplex_fan(1)
    o = incidence_orientation(p)
    r1, r2 = p.by_rank[1]
    z = p.zero
    assert o.sign[TOP, r1] * o.sign[r1, z] == -o.sign[TOP, r2] * o.sign[r2, z]


@pytest.mark.parametrize("p", [polygon_fan(4), cube_fan(3), crosspoly_fan(3)])
def test_orientation_cancels_on_intervals(p):
    assert incidence_orientation(p).violations() == []


def test_orientation_rejects_broken_diamond():
    p = cube_fan(3)
    with pytest.raises((NoOrientation, InvalidPoset)):
        incidence_orientation(p.without(p.by_rank[2][0]))


def test_serialize_round_trip(tmp_path):
    p = cube_fan(3)
    path = tmp_path / "cube3.json"
    serialize(p, path)
    q = ingest(path)
    assert q == p
    assert serialize(q) == serialize(p)


def _doc(**changes):
    doc = to_json(polygon_fan(3))
    doc.update(changes)
    return doc


def test_rank_gap_rejected():
    doc = _doc()
    doc["elements"] = [e for e in doc["elements"] if e["rank"] != 1]
    doc["covers"] = []
    with pytest.raises(SchemaError):
        from_json(doc)


def test_duplicate_ids_rejected():
    doc = _doc()
    doc["elements"].append(dict(doc["elements"][1]))
    with pytest.raises(SchemaError):
        from_json(doc)


def test_cover_skipping_a_rank_rejected():
    doc = _doc()
    doc["covers"].append([doc["elements"][0]["id"], doc["elements"][-1]["id"]])
    with pytest.raises(SchemaError):
        from_json(doc)


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{ not json")
    with pytest.raises(Exception) as info:
        ingest(path)
    assert "ParseError" in type(info.value).__name__
    path.write_text(json.dumps([1, 2]))
    with pytest.raises(SchemaError):
        ingest(path)
