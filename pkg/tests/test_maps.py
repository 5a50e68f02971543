import pytest

from planarpatterns.generate import brute_force_maps
from planarpatterns.maps import (MapError, Pattern, RootedMap, boundary_shape, builtin_pattern,
                                 count_occurrences, find_occurrences, load_pattern, parse_map_text,
                                 polygon, polygon_pattern)


def loop():
    return RootedMap((1, 0), (1, 0), 0)


def bridge():
    return RootedMap((0, 1), (1, 0), 0)


def double_edge():
    # two vertices joined by two parallel edges: darts 0,2 at one end, 1,3 at the other
    return RootedMap((2, 3, 0, 1), (1, 0, 3, 2), 0)


def test_validate_loop_and_bridge():
    assert loop().validate() == {"V": 1, "E": 1, "F": 2}
    assert bridge().validate() == {"V": 2, "E": 1, "F": 1}


def test_validate_rejects_bad_maps():
    with pytest.raises(MapError):
        RootedMap((0, 1), (0, 1), 0).validate()          # alpha has fixed points
    with pytest.raises(MapError):
        RootedMap((1, 0, 3, 2), (1, 0, 3, 2), 0).validate()   # two components
    with pytest.raises(MapError):
        RootedMap((2, 3, 1, 0), (1, 0, 3, 2), 0).validate()   # torus embedding


def test_validate_every_small_map():
    for n in range(5):
        for m in brute_force_maps(n):
            V, E, F = m.counts
            assert V - E + F == 2


def test_canonical_form_idempotent_and_root_symmetric():
    for m in brute_force_maps(3):
        again = RootedMap.from_text(m.relabelled().to_text())
        assert again.canonical_form() == m.canonical_form()
    lp = loop()
    assert lp.canonical_form(0) == lp.canonical_form(1)


def test_canonical_forms_distinct_at_two_edges():
    forms = {m.canonical_form() for m in brute_force_maps(2)}
    assert len(forms) == 9


def test_canonical_form_is_complete_up_to_six_edges():
    from planarpatterns.enumeration import tutte_count
    for n in range(7):
        assert len({m.canonical_form() for m in brute_force_maps(n)}) == tutte_count(n)


def test_boundary_shape_examples():
    sq = polygon(4)
    sh = boundary_shape(sq, sq.alpha[sq.root])
    assert (sh.h, sh.e, tuple(sh.s), sh.valency) == (4, 0, (), 4)
    lp = loop()
    sh = boundary_shape(lp, 0)
    assert (sh.h, sh.e) == (1, 0)


def test_boundary_shape_valency_identity():
    for n in range(1, 6):
        for m in brute_force_maps(n):
            for f in m.faces():
                assert boundary_shape(m, f[0]).valency == len(f)


def test_occurrences_examples():
    two_gon = polygon_pattern(2)
    assert count_occurrences(polygon(2), two_gon) == 1
    assert count_occurrences(loop(), two_gon) == 0
    assert count_occurrences(double_edge(), two_gon) == 1


def test_pattern_in_itself():
    for name in ("koala", "double-glued-triangles", "triple-glued-pentagons", "double-triangle"):
        p = builtin_pattern(name)
        assert count_occurrences(p.map, p) == 1


def test_occurrences_invariant_under_root_face_rerooting():
    pat = polygon_pattern(2)
    for m in brute_force_maps(5):
        base = count_occurrences(m, pat)
        for r in m.rotation_roots():
            assert count_occurrences(m.rerooted(r), pat) == base


def test_occurrences_deduplicated_by_image():
    m = next(iter(brute_force_maps(3)))
    occs = find_occurrences(m, polygon_pattern(1), respect_root=False)
    assert len({o.interior for o in occs}) == len(occs)


def test_rotations_examples():
    koala = builtin_pattern("koala")
    assert koala.r0 == 2
    assert polygon(2).rotations()[0] == 1
    assert builtin_pattern("triple-glued-pentagons").r0 == 2
    assert builtin_pattern("double-glued-triangles").r0 == 1


def test_fixture_parameters():
    assert (lambda p: (p.l0, p.d0))(builtin_pattern("koala")) == (4, 2)
    assert (lambda p: (p.l0, p.d0))(builtin_pattern("double-glued-triangles")) == (2, 2)
    assert (lambda p: (p.l0, p.d0))(builtin_pattern("triple-glued-pentagons")) == (4, 3)


def test_map_text_roundtrip():
    for m in brute_force_maps(3):
        text = m.to_text()
        assert text.splitlines()[0] == f"darts={m.dart_count} root={m.root}"
        assert RootedMap.from_text(text) == m


def test_pattern_text_roundtrip():
    p = builtin_pattern("koala")
    q = Pattern.from_text(p.to_text())
    assert q.map.canonical_form() == p.map.canonical_form()


def test_malformed_files():
    with pytest.raises(MapError):
        parse_map_text("darts=3 root=0\n0 1 2\n1 0 2\n")
    with pytest.raises(MapError):
        parse_map_text("nonsense")
    # a bridge cannot be a pattern: its only face is not a simple cycle
    with pytest.raises(MapError):
        Pattern(bridge())


def test_load_pattern_names(tmp_path):
    assert load_pattern("simple-3-gon").l0 == 3
    path = tmp_path / "p.map"
    path.write_text(builtin_pattern("koala").to_text())
    assert load_pattern(str(path)).l0 == 4
    with pytest.raises(MapError):
        builtin_pattern("nope")
