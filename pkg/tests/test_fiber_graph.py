import json

import networkx as nx
import pytest

from rzlab.errors import PrecisionExhausted, TruncatedTail, UnsupportedModularity
from rzlab.fiber_graph import (
    build_ball,
    closed_tails,
    export,
    graph_stats,
    hyperbolic_core,
    import_json,
    required_precision,
    tails_report,
)
from rzlab.herm_lattice import is_pi_modular, norm_ideal

from conftest import ext_for


def _ext(kind, e, f, vt, r):
    return ext_for(kind, e, f, vt, precision=e * (r + 6))


@pytest.fixture(scope="module")
def rp_q2():
    return build_ball(None, 3, _ext("RP", 1, 1, None, 3))


@pytest.fixture(scope="module")
def rp_e2():
    return build_ball(None, 3, _ext("RP", 2, 1, None, 3))


def _nx(g):
    G = nx.Graph()
    G.add_nodes_from(g.vertices)
    G.add_edges_from(g.edges)
    return G


def _hist(g, kind, hyp):
    adj = g.adjacency()
    out = {}
    for k, v in g.vertices.items():
        if v.kind == kind and v.hyperbolic == hyp and v.expanded:
            out[len(adj[k])] = out.get(len(adj[k]), 0) + 1
    return out


def test_ball_is_a_bipartite_tree(rp_q2, rp_e2):
    for g in (rp_q2, rp_e2):
        G = _nx(g)
        assert nx.is_tree(G)
        lines = {k for k, v in g.vertices.items() if v.kind == "line"}
        assert nx.is_bipartite(G)
        assert all((a in lines) != (b in lines) for a, b in G.edges)


def test_vertices_have_the_right_modularity(rp_q2):
    for k, v in rp_q2.vertices.items():
        L = rp_q2.lattice(k)
        assert is_pi_modular(L, -1 if v.kind == "line" else 0)
        assert norm_ideal(L).ell == v.ell
        assert v.hyperbolic == (v.ell == 1)
    for a, b in rp_q2.edges:
        assert rp_q2.lattice(a).contains_lattice(rp_q2.lattice(b))


def test_rp_q2_degrees(rp_q2):
    assert _hist(rp_q2, "line", True) == {3: 22}
    assert _hist(rp_q2, "line", False) == {3: 21}
    assert _hist(rp_q2, "point", True) == {3: 21}
    assert _hist(rp_q2, "point", False) == {1: 18}
    core = hyperbolic_core(rp_q2)
    adj = core.adjacency()
    assert {len(adj[k]) for k, v in core.vertices.items() if v.kind == "point" and v.expanded} == {2}
    full = rp_q2.adjacency()
    for k, v in rp_q2.vertices.items():
        if v.kind == "point" and v.hyperbolic and v.expanded:
            assert sum(1 for l in full[k] if not rp_q2.vertices[l].hyperbolic) == 1


def test_rp_q2_tails(rp_q2):
    tails = closed_tails(rp_q2)
    assert len(tails) == 9
    assert all((t["lines"], t["points"], t["max_drop"]) == (1, 2, 1) for t in tails)
    assert all(len(t["attachment"]) == 1 for t in tails)


def test_rp_e2_tails_go_one_level_deeper(rp_e2):
    tails = closed_tails(rp_e2)
    assert tails
    for t in tails:
        assert t["max_drop"] == 2
        assert (t["lines"], t["points"]) == (5, 10)
        assert len(t["attachment"]) == 1
    assert _hist(rp_e2, "line", False) == {3: 57}


def test_truncated_tails_raise(rp_e2):
    with pytest.raises(TruncatedTail):
        tails_report(rp_e2)
    assert any(t["truncated"] for t in tails_report(rp_e2, allow_truncated=True))


@pytest.mark.parametrize("e,vt", [(1, 1), (2, 1)])
def test_ru_vt1_has_no_tails(e, vt):
    g = build_ball(None, 3, _ext("RU", e, 1, vt, 3))
    assert all(v.hyperbolic for v in g.vertices.values())
    assert _hist(g, "point", True) == {2: 21}
    assert nx.is_tree(_nx(g))


def test_ru_vt2_has_tails():
    g = build_ball(None, 2, _ext("RU", 2, 1, 2, 2))
    assert any(not v.hyperbolic for v in g.vertices.values())
    assert all(t["lines"] == 1 for t in closed_tails(g))


def test_q4_line_degree():
    g = build_ball(None, 1, _ext("RP", 1, 2, None, 1))
    assert set(_hist(g, "line", True)) | set(_hist(g, "line", False)) == {5}


def test_precision_guard():
    with pytest.raises(PrecisionExhausted):
        build_ball(None, 30, ext_for("RP", 1, 1))
    assert required_precision(ext_for("RP", 2, 1), 3) == 18


def test_unramified_rejected():
    from rzlab.padic_tower import make_ext, make_field

    with pytest.raises(UnsupportedModularity):
        build_ball(None, 1, make_ext(make_field(1, 1), "UNRAM"))


def test_export_round_trip_and_determinism(rp_q2):
    data = export(rp_q2, "json")
    assert import_json(data) == rp_q2
    again = build_ball(None, 3, _ext("RP", 1, 1, None, 3))
    assert export(again, "json") == data
    assert export(again, "dot") == export(rp_q2, "dot")
    obj = json.loads(data)
    assert obj["meta"]["radius"] == 3
    assert len(obj["edges"]) == len(rp_q2.edges)


def test_parallel_build_is_identical():
    ext = _ext("RP", 1, 1, None, 2)
    assert export(build_ball(None, 2, ext, jobs=3), "json") == export(build_ball(None, 2, ext), "json")


def test_dot_format(rp_q2):
    dot = export(rp_q2, "dot").decode()
    assert dot.startswith("graph fiber {") and dot.rstrip().endswith("}")
    assert dot.count(" -- ") == len(rp_q2.edges)
    assert "style=dashed" in dot and "shape=box" in dot


def test_stats(rp_q2):
    st = graph_stats(rp_q2)
    assert (st["lines"], st["points"], st["unexpanded_points"]) == (43, 87, 48)
