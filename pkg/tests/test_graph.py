import pytest

from sttkit import kernel as k
from sttkit.corpus import load_corpus
from sttkit.errors import DanglingEndpoint, DuplicateName, UnknownTheory
from sttkit.graph import (
    TheoryGraph,
    available_items,
    compose_path,
    paths,
    validate,
)
from sttkit.morphism import Morphism, translate_expr
from sttkit.theory import Theory


def corpus():
    if not hasattr(corpus, "_bundle"):
        corpus._bundle = load_corpus()
    return corpus._bundle


def extended_graph() -> TheoryGraph:
    """Corpus graph with the two COF transport morphisms attached."""
    b = corpus()
    g = b.graph
    g = g.add_morphism(b.morphisms["phi-mon-cof-plus"])
    g = g.add_morphism(b.morphisms["phi-mon-cof-star"])
    return g


def test_corpus_graph_counts():
    g = corpus().graph
    assert len(g.theories) == 12
    assert len(g.morphisms) == 18


def test_add_theory_duplicate():
    g = corpus().graph
    with pytest.raises(DuplicateName):
        g.add_theory(Theory("MON"))


def test_add_morphism_dangling_endpoint():
    g = corpus().graph
    bad = Morphism("loose", "MON", "NOWHERE", kind="inclusion")
    with pytest.raises(DanglingEndpoint):
        g.add_morphism(bad)


def test_self_loops_are_permitted():
    g = corpus().graph
    assert g.morphisms["phi-mon-id"].source == g.morphisms["phi-mon-id"].target == "MON"
    assert g.morphisms["phi-mon-op"].source == "MON"


def test_paths_include_the_two_step_route():
    g = corpus().graph
    found = paths(g, "MON", "COM-MON-over-COF", 3)
    assert ("mon-in-com-mon", "com-mon-in-com-mon-over-cof") in found
    assert ("mon-in-mon-over-cof", "mon-over-cof-in-com-mon-over-cof") in found
    assert found == sorted(found)


def test_paths_empty_path_when_endpoints_match():
    g = corpus().graph
    assert () in paths(g, "COM-MON", "COM-MON", 1)


def test_paths_to_fun_comp_are_empty():
    g = corpus().graph
    assert paths(g, "MON", "FUN-COMP", 4) == []


def test_paths_unknown_theory():
    g = corpus().graph
    with pytest.raises(UnknownTheory):
        paths(g, "MON", "NOWHERE", 2)


def test_self_loop_paths_are_bounded():
    g = corpus().graph
    loops = paths(g, "MON", "MON", 2)
    assert () in loops
    assert ("phi-mon-id", "phi-mon-op") in loops
    assert all(len(p) <= 2 for p in loops)


def test_available_items_includes_transported_instance():
    g = extended_graph()
    items = available_items(g, "COF", 1)
    idu = [a for a in items if a.name == "id-elt-is-unique"]
    assert len(idu) == 2  # one per parallel morphism, translations differ
    paths_seen = {a.path for a in idu}
    assert paths_seen == {("phi-mon-cof-plus",), ("phi-mon-cof-star",)}


def test_available_items_longer_paths_add_opposite_instances():
    # routing through the opposite-monoid self-loop yields alpha-distinct
    # (redex-wrapped) instances, each with its own provenance
    g = extended_graph()
    idu = [a for a in available_items(g, "COF", 2)
           if a.name == "id-elt-is-unique"]
    assert len(idu) == 4
    assert {a.path for a in idu} >= {("phi-mon-op", "phi-mon-cof-plus"),
                                     ("phi-mon-op", "phi-mon-cof-star")}


def test_available_items_isolated_theory():
    g = corpus().graph
    items = available_items(g, "ONE-BT", 3)
    assert all(a.source == "ONE-BT" for a in items) and items == []


def test_available_items_own_items_have_empty_path():
    g = corpus().graph
    items = available_items(g, "MON", 1)
    own = [a for a in items if a.source == "MON" and a.path == ()]
    assert {a.name for a in own} == {"id-elt-is-unique"}


def test_available_items_canonical_path_is_shortest():
    g = extended_graph()
    items = available_items(g, "COM-MON-over-COF", 3)
    mine = [a for a in items if a.source == "MON" and a.name == "id-elt-is-unique"]
    # both two-step routes translate identically, so one canonical entry
    assert len(mine) == 1
    assert mine[0].path == ("mon-in-com-mon", "com-mon-in-com-mon-over-cof")


def test_availability_is_monotone():
    b = corpus()
    g = b.graph
    before = {(a.source, a.name, k.alpha_key(a.translated))
              for a in available_items(g, "COF", 2)}
    g2 = g.add_morphism(b.morphisms["phi-mon-cof-plus"])
    after = {(a.source, a.name, k.alpha_key(a.translated))
             for a in available_items(g2, "COF", 2)}
    assert before <= after


def test_path_composition_agrees_with_sequential_translation():
    g = extended_graph()
    for frm in ("MON", "COM-MON", "MON-ACT"):
        src = g.theory(frm)
        sentences = list(src.axioms.values())
        sentences += [t.statement for t in src.theorems.values()]
        for to in ("COF", "COM-MON-ACT-over-COF", "MON"):
            for path in paths(g, frm, to, 2):
                if not path:
                    continue
                m = compose_path(g, frm, path)
                tgt = g.theory(to)
                for s in sentences:
                    cur, cur_t = s, src
                    for mid in path:
                        edge = g.morphisms[mid]
                        nxt = g.theory(edge.target)
                        cur = translate_expr(edge, cur, cur_t, nxt)
                        cur_t = nxt
                    direct = translate_expr(m, s, src, tgt)
                    assert k.alpha_equal(cur, direct), (path, s)


def test_validate_clean_corpus():
    report = validate(corpus().graph)
    assert report.open_count() == 0
    assert report.error_count() == 0
    asserted = sum(m.asserted for m in report.morphisms)
    assert asserted == 13  # the documented beta-eta obligations


def test_validate_reports_open_obligations():
    b = corpus()
    g = b.graph
    from sttkit.morphism import Open
    phi = b.morphisms["phi-mon-op"]
    undone = Morphism("phi-undone", phi.source, phi.target, phi.type_map,
                      phi.const_map, phi.kind, {})
    g2 = g.add_morphism(undone)
    report = validate(g2)
    entry = [m for m in report.morphisms if m.id == "phi-undone"][0]
    assert set(entry.open) == {"assoc", "left-id", "right-id"}
    assert not report.is_clean()


def test_validate_empty_graph():
    report = validate(TheoryGraph())
    assert report.is_clean()
    assert report.theories == [] and report.morphisms == []


def test_graph_operations_are_pure():
    b = corpus()
    g = b.graph
    n_theories, n_morphisms = len(g.theories), len(g.morphisms)
    g.add_morphism(b.morphisms["phi-mon-cof-plus"])
    paths(g, "MON", "COF", 2) if "COF" in g.theories else None
    available_items(g, "MON", 2)
    assert len(g.theories) == n_theories
    assert len(g.morphisms) == n_morphisms
