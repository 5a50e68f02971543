from fractions import Fraction

import pytest

from planarpatterns.enumeration import MarkingTerm
from planarpatterns.generate import brute_force_maps
from planarpatterns.intersections import (IntersectionError, enumerate_intersection_types,
                                          intersection_degree, intersection_degree_bound,
                                          overcount_check, scan_intersections)
from planarpatterns.maps import builtin_pattern
from planarpatterns.verify import koala_rows


@pytest.fixture(scope="module")
def koala():
    return enumerate_intersection_types(builtin_pattern("koala"))


def _type_by_row(cat, row):
    for ty, r in zip(cat.types, koala_rows(cat)):
        if r == row:
            return ty
    raise AssertionError(f"no type with row {row}")


def test_koala_type_count(koala):
    assert len(koala.types) == 16
    assert (koala.l0, koala.d0, koala.r0) == (4, 2, 2)


def test_koala_face_classes(koala):
    # t is onto the classes, t(0) is the simple 4-gon, classes are distinct
    assert set(koala.t.values()) == {fc.index for fc in koala.face_classes}
    assert len(koala.face_classes) == 13
    first = koala.face_class(koala.t[0])
    assert first.shape.as_vector()[:1] == (4,) and first.shape.valency == 4
    assert len({fc.key for fc in koala.face_classes}) == 13


def test_koala_overcount_factors(koala):
    three_rotations = _type_by_row(koala, ((6,), 3, 1, 4))
    assert koala.overcount_factor(three_rotations.index) == 3
    half = _type_by_row(koala, ((2, 2), 1, 2, 3))
    assert koala.overcount_factor(half.index) == Fraction(1, 2)
    assert koala.deleted_edges(half.index) == 3
    plain = _type_by_row(koala, ((4,), 1, 1, 4))
    assert koala.overcount_factor(plain.index) == 1


def test_koala_marking_terms(koala):
    terms = koala.marking_terms()
    assert len(terms) == 13
    assert MarkingTerm(koala.t[0] - 1, 1, 0, 4) in terms          # z/u^2 P_3
    shapes = {(t.c, t.e, t.h, t.s) for t in terms}
    assert (3, 0, 3, (0, 0, 1)) in shapes                       # 3z/u P_2 S_3
    assert (4, 0, 4, (0, 1)) in shapes                          # 4z/u^2 P_3 S_2


def test_type_invariants(koala):
    for ty in koala.types:
        m = ty.map
        occ_darts = set().union(*ty.occurrences)
        # every edge lies in one of the two occurrences and they share a face
        pat = builtin_pattern("koala")
        assert m.validate()["E"] <= 2 * pat.map.edge_count
        assert ty.post_deletion.validate()
        assert ty.shape.valency == len(ty.post_deletion.face_walk(ty.deletion_dart))
        assert occ_darts


def test_non_self_intersecting_patterns():
    assert enumerate_intersection_types(builtin_pattern("double-glued-triangles")).types == []
    assert enumerate_intersection_types(builtin_pattern("triple-glued-pentagons")).types == []
    cat = enumerate_intersection_types(builtin_pattern("double-glued-triangles"))
    assert cat.marking_terms() == [MarkingTerm(0, 1, 0, 2)]


def test_double_triangle_catalog_is_witnessed():
    pat = builtin_pattern("double-triangle")
    cat = enumerate_intersection_types(pat)
    assert cat.types
    seen = set()
    for n in range(1, 8):
        scan = scan_intersections(cat, n)
        assert not scan.unknown, "a witnessed intersection is missing from the catalog"
        seen |= set(scan.pair_counts)
    small = {ty.index for ty in cat.types if ty.edge_count <= 7}
    assert small <= seen


def test_overcount_identity_small():
    cat = enumerate_intersection_types(builtin_pattern("double-triangle"))
    rows = overcount_check(cat, 7)
    assert rows and all(r["ok"] for r in rows)


def test_intersection_degree_bound():
    pat = builtin_pattern("double-triangle")
    bound = intersection_degree_bound(pat)
    for n in range(1, 7):
        for m in brute_force_maps(n):
            assert intersection_degree(m, pat) <= bound


def test_catalog_json(koala):
    d = koala.to_dict()
    assert len(d["types"]) == 16
    t = d["types"][0]
    assert {"i", "r", "d", "c", "shape", "t", "map"} <= set(t)
    assert t["map"].startswith("darts=")


def test_rejects_non_simple_boundary():
    from planarpatterns.maps import MapError, RootedMap, Pattern
    with pytest.raises((MapError, IntersectionError)):
        enumerate_intersection_types(Pattern(RootedMap((0, 1), (1, 0), 0)))
