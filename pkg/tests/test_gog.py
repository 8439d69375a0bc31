"""Graph-of-groups assembly, fundamental presentations, witnesses."""

import pytest

from pgog import models
from pgog import presentations as P
from pgog.gog import (EdgeData, Graph, GraphOfGroups, Specialisation,
                      SpanningTree, VertexData, bracket_subgraph,
                      check_reduced, fp_naming, fundamental_presentation,
                      spanning_tree, verify_properness_witness,
                      verify_specialisation)
from pgog.registry import free_product_line, improper_heisenberg_chain
from pgog.words import Word, commutator, gen


def ea_vertex(p, names):
    return VertexData(models.ElementaryAbelian(p, names),
                      P.elementary_abelian_presentation(p, names))


def ea_edge(p, names):
    return EdgeData(models.ElementaryAbelian(p, names),
                    P.elementary_abelian_presentation(p, names))


def small_path_gog(p=2):
    """Bottom vertex (elementary abelian) joined to a two-layer twist vertex
    over their shared rank-(1+p) subgroup."""
    g1_names = ["k1", "h0", "h1", "c"]
    k1_names = ["k1", "h0", "h1"]
    g2 = models.GnModel(p, 2)
    graph = Graph(["A1", "A2"], {"e1": ("A1", "A2")})
    vertex_data = {
        "A1": ea_vertex(p, g1_names),
        "A2": VertexData(g2, P.gn_presentation(p, 2)),
    }
    edge_data = {"e1": ea_edge(p, k1_names)}
    maps0 = {g: vertex_data["A1"].model.generators[g] for g in k1_names}
    maps1 = {g: g2.generators[g] for g in k1_names}
    return GraphOfGroups(graph, vertex_data, edge_data, {"e1": (maps0, maps1)})


# -- graph basics ---------------------------------------------------------------

def test_graph_validation():
    with pytest.raises(ValueError, match="duplicate"):
        Graph(["v", "v"], {})
    with pytest.raises(ValueError, match="unknown vertex"):
        Graph(["v"], {"e": ("v", "w")})
    with pytest.raises(ValueError, match="not connected"):
        Graph(["v", "w"], {})


def test_spanning_tree_shapes():
    path = Graph(["A", "B", "C"], {"e1": ("A", "B"), "e2": ("B", "C")})
    t = spanning_tree(path)
    assert t.root == "A" and t.edge_ids == ("e1", "e2")

    loop = Graph(["A"], {"e": ("A", "A")})
    t = spanning_tree(loop)
    assert t.edge_ids == ()

    triangle = Graph(["A", "B", "C"],
                     {"e1": ("A", "B"), "e2": ("B", "C"), "e3": ("C", "A")})
    t = spanning_tree(triangle)
    assert t.root == "A"
    assert t.edge_ids == ("e1", "e3")   # both ends of A first, BFS order


def test_spanning_tree_is_deterministic():
    g = Graph(["A", "B", "C"],
              {"e1": ("A", "B"), "e2": ("B", "C"), "e3": ("C", "A")})
    assert spanning_tree(g).edge_ids == spanning_tree(g).edge_ids


# -- assembly and certification ----------------------------------------------

def test_free_product_fundamental_presentation():
    gog = free_product_line(2)
    fp = fundamental_presentation(gog)
    assert set(fp.generators) == {"a", "b"}
    assert set(map(repr, fp.relators)) == {"a^2", "b^2"}
    assert P.mod_p_rank(fp, 2) == 2


def test_chain_fp_contains_bracket_relators():
    gog = improper_heisenberg_chain(2, 2)
    fp = fundamental_presentation(gog)
    assert set(fp.generators) == {"a1", "b1", "a2", "b2"}
    texts = set(map(repr, fp.relators))
    # b1 = [a2, b2] and [a1, b1] = a2, as inverse-pair relators
    assert repr(~gen("b1") * commutator(gen("a2"), gen("b2"))) in texts
    assert repr(~commutator(gen("a1"), gen("b1")) * gen("a2")) in texts


def test_name_qualification_only_on_collision():
    gog = small_path_gog()
    qual = fp_naming(gog)
    # k1, h0, h1 exist at both vertices; c, k2, h2, h3 are unique
    assert qual["A1"]["k1"] == "A1.k1" and qual["A2"]["k1"] == "A2.k1"
    assert qual["A1"]["c"] == "c"
    assert qual["A2"]["k2"] == "k2" and qual["A2"]["h3"] == "h3"
    fp = fundamental_presentation(gog)
    assert len(fp.generators) == 4 + 6
    assert P.mod_p_rank(fp, 2) == (4 + 6) - 3 - 1   # 3 identifications + k2 killed


def test_edge_map_must_be_homomorphism():
    p = 2
    heis = models.HeisenbergModP(p)
    graph = Graph(["H", "E"], {"e": ("H", "E")})
    with pytest.raises(ValueError, match="not a homomorphism"):
        GraphOfGroups(
            graph,
            {"H": VertexData(heis, P.heisenberg_presentation(p)),
             "E": ea_vertex(p, ["u", "v"])},
            {"e": ea_edge(p, ["u", "v"])},
            {"e": ({"u": heis.generators["x"], "v": heis.generators["y"]},
                   {"u": gen("u"), "v": gen("v")})})


def test_edge_map_must_be_injective():
    p = 2
    graph = Graph(["L", "R"], {"e": ("L", "R")})
    a = models.ElementaryAbelian(p, ["a"])
    with pytest.raises(ValueError, match="not injective"):
        GraphOfGroups(
            graph,
            {"L": VertexData(a, P.elementary_abelian_presentation(p, ["a"])),
             "R": ea_vertex(p, ["b", "c"])},
            {"e": ea_edge(p, ["u", "v"])},
            {"e": ({"u": a.generators["a"], "v": a.generators["a"]},
                   {"u": gen("b"), "v": gen("c")})})


def test_vertex_presentation_must_certify():
    graph = Graph(["V"], {})
    with pytest.raises(ValueError, match="presentation not satisfied"):
        GraphOfGroups(
            graph,
            {"V": VertexData(models.CyclicModel(2, 2),
                             P.cyclic_presentation(2, 1))},
            {}, {})


def test_check_reduced():
    assert check_reduced(small_path_gog())
    assert check_reduced(improper_heisenberg_chain(2, 3))
    # an edge carrying the whole endpoint group is not reduced
    p = 2
    a = models.ElementaryAbelian(p, ["a"])
    gog = GraphOfGroups(
        Graph(["L", "R"], {"e": ("L", "R")}),
        {"L": VertexData(a, P.elementary_abelian_presentation(p, ["a"])),
         "R": ea_vertex(p, ["b", "c"])},
        {"e": ea_edge(p, ["u"])},
        {"e": ({"u": a.generators["a"]},
               {"u": models.ElementaryAbelian(p, ["b", "c"]).generators["b"]})})
    assert not check_reduced(gog)


def test_loop_brings_a_stable_letter():
    p = 2
    a = models.ElementaryAbelian(p, ["a"])
    gog = GraphOfGroups(
        Graph(["V"], {"loop": ("V", "V")}),
        {"V": VertexData(a, P.elementary_abelian_presentation(p, ["a"]))},
        {"loop": ea_edge(p, ["u"])},
        {"loop": ({"u": a.generators["a"]}, {"u": a.generators["a"]})})
    fp = fundamental_presentation(gog)
    assert "t_loop" in fp.generators
    assert any("t_loop" in r.names() for r in fp.relators)
    # abelianised, a^-1 t a t^-1 dies, so the rank counts both generators
    assert P.mod_p_rank(fp, p) == 2


def test_fp_rank_is_tree_independent():
    g = Graph(["A", "B", "C"],
              {"e1": ("A", "B"), "e2": ("B", "C"), "e3": ("C", "A")})
    gog = GraphOfGroups(
        g,
        {v: ea_vertex(2, [v.lower()]) for v in "ABC"},
        {e: ea_edge(2, []) for e in ("e1", "e2", "e3")},
        {e: ({}, {}) for e in ("e1", "e2", "e3")})
    ranks = set()
    for tree_edges in (("e1", "e2"), ("e2", "e3"), ("e1", "e3")):
        fp = fundamental_presentation(gog, SpanningTree("A", tree_edges))
        ranks.add(P.mod_p_rank(fp, 2))
    assert ranks == {4}   # a, b, c plus one stable letter


# -- specialisations and witnesses --------------------------------------------

def witness_maps(gog, target, c_image):
    maps = {
        "A1": {"k1": target.generators["k1"], "h0": target.generators["h0"],
               "h1": target.generators["h1"], "c": c_image},
        "A2": {g: target.generators[g] for g in gog.vertices["A2"].model.generators},
    }
    return maps


def test_specialisation_and_witness_pass():
    gog = small_path_gog()
    fn = models.FnModel(2, 2)
    spec = Specialisation(gog, fn, witness_maps(gog, fn, fn.generators["k2"]))
    report = verify_specialisation(gog, spec)
    assert report["status"] == "pass", report["violations"]
    witness = verify_properness_witness(gog, spec)
    assert witness.valid
    assert witness.vertex_image_orders == {"A1": 16, "A2": 64}


def test_specialisation_vertex_hom_violation():
    gog = small_path_gog()
    fn = models.FnModel(2, 2)
    maps = witness_maps(gog, fn, fn.generators["k2"])
    maps["A2"] = dict(maps["A2"])
    maps["A2"]["h2"], maps["A2"]["h3"] = maps["A2"]["h3"], maps["A2"]["h2"]
    report = verify_specialisation(gog, Specialisation(gog, fn, maps))
    assert report["status"] == "fail"
    assert any(v["kind"] == "vertex-hom" and v["vertex"] == "A2"
               for v in report["violations"])


def test_specialisation_edge_compatibility_violation():
    gog = small_path_gog()
    fn = models.FnModel(2, 2)
    maps = witness_maps(gog, fn, fn.generators["k2"])
    maps["A1"] = dict(maps["A1"])
    maps["A1"]["h0"] = fn.generators["h1"]
    maps["A1"]["h1"] = fn.generators["h1"]   # still a hom, breaks the edge
    report = verify_specialisation(gog, Specialisation(gog, fn, maps))
    assert report["status"] == "fail"
    kinds = {v["kind"] for v in report["violations"]}
    assert kinds == {"edge-compatibility"}


def test_tree_edge_element_must_be_identity():
    gog = small_path_gog()
    fn = models.FnModel(2, 2)
    spec = Specialisation(gog, fn, witness_maps(gog, fn, fn.generators["k2"]),
                          edge_elements={"e1": fn.generators["h3"]})
    report = verify_specialisation(gog, spec)
    assert any(v["kind"] == "tree-edge" for v in report["violations"])


def test_witness_injectivity_violation_names_vertex():
    gog = small_path_gog()
    fn = models.FnModel(2, 2)
    spec = Specialisation(gog, fn, witness_maps(gog, fn, fn.identity))
    witness = verify_properness_witness(gog, spec)
    assert not witness.valid
    bad = [v for v in witness.report["violations"] if v["kind"] == "injectivity"]
    assert bad and bad[0]["vertex"] == "A1"
    assert bad[0]["image_order"] == 8 and bad[0]["vertex_order"] == 16


def test_specialisation_requires_total_maps():
    gog = small_path_gog()
    fn = models.FnModel(2, 2)
    maps = witness_maps(gog, fn, fn.generators["k2"])
    del maps["A1"]["c"]
    with pytest.raises(ValueError, match="no image"):
        Specialisation(gog, fn, maps)


# -- bracketing -----------------------------------------------------------------

def test_bracket_single_vertex_preserves_rank():
    gog = small_path_gog()
    want = P.mod_p_rank(fundamental_presentation(gog), 2)
    bracketed = bracket_subgraph(gog, ["A2"])
    assert P.mod_p_rank(fundamental_presentation(bracketed), 2) == want
    assert "[A2]" in bracketed.graph.vertices


def test_bracket_whole_graph_single_vertex():
    gog = improper_heisenberg_chain(2, 3)
    whole = bracket_subgraph(gog, ["V1", "V2", "V3"], bracket_id="all")
    assert whole.graph.vertices == ("all",)
    assert whole.graph.edges == {}
    want = P.mod_p_rank(fundamental_presentation(gog), 2)
    assert P.mod_p_rank(fundamental_presentation(whole), 2) == want


def test_bracket_middle_of_chain_preserves_rank():
    gog = improper_heisenberg_chain(2, 3)
    want = P.mod_p_rank(fundamental_presentation(gog), 2)
    for part in (["V1", "V2"], ["V2", "V3"], ["V2"]):
        bracketed = bracket_subgraph(gog, part)
        assert P.mod_p_rank(fundamental_presentation(bracketed), 2) == want


def test_bracket_disconnected_subgraph_rejected():
    gog = improper_heisenberg_chain(2, 3)
    with pytest.raises(ValueError, match="not connected"):
        bracket_subgraph(gog, ["V1", "V3"])
    with pytest.raises(ValueError, match="not in the graph"):
        bracket_subgraph(gog, ["V1", "V9"])
