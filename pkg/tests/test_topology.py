import time

import pytest

from ssrscreen.model import Branch, Bus, Contingency, Machine, ModelError, NetworkModel
from ssrscreen.topology import (
    CycleGroup, PlainEdge, RadialPath, build_network_subgraph, build_topology_graph, cycle_basis,
    cycle_from_buses, cycles_containing, enumerate_radial_paths, screen, substitute_cycles,
    verify_radiality,
)

from conftest import BB3_LINE, ST1_LINE, ctg, outage_set

REFERENCE_CYCLES = [
    ("ST1", "ST2", "ST3", "ST4", "ST5"),
    ("ST1", "ST5", "ST6", "ST7", "ST2"),
    ("ST1", "ST5", "ST7", "ST2"),
    ("ST1", "BB2", "BB3", "ST9", "ST8"),
    ("ST9", "BB3", "BB4", "BB1"),
]


def net(edges, grid=(), machines=(), kinds=None):
    names = sorted({n for e in edges for n in e[:2]} | set(grid))
    kinds = kinds or {}
    buses = tuple(Bus(n, 100.0, "external-grid" if n in grid else kinds.get(n, "station")) for n in names)
    brs = []
    for e in edges:
        a, b = e[:2]
        ckt = e[2] if len(e) > 2 else "1"
        opts = e[3] if len(e) > 3 else {}
        brs.append(Branch(a, b, ckt, 0.01, 0.1, **opts))
    ms = tuple(machines) + tuple(Machine(g, "infinite-grid", 1000.0, 0.1) for g in grid)
    return NetworkModel("t", 100.0, buses, tuple(brs), (), ms)


def graph_of(model):
    return build_topology_graph(model)


# --- build_topology_graph ----------------------------------------------------

def test_tertiary_stub_removed(before):
    g = graph_of(before)
    assert not g.edges_between("ST6", "ST6T")
    assert "ST6T" not in g.nodes
    assert g.stub_pruned


def test_fixture_graph_buses_and_parallels(before):
    g = graph_of(before)
    for b in [f"ST{i}" for i in range(1, 10)] + [f"BB{i}" for i in range(1, 5)]:
        assert b in g.nodes
    assert len(g.edges_between("ST9", "BB3")) == 2
    assert len(g.edges_between("ST9", "BB1")) == 2


def test_generation_stub_pruned():
    m = net([("A", "B"), ("B", "C")], machines=[Machine("C", "conventional", 100.0, 0.2)])
    g = build_topology_graph(m, keep=("A", "B"))
    assert "C" not in g.nodes and set(g.nodes) == {"A", "B"}


def test_kept_buses_are_retained():
    m = net([("A", "B"), ("B", "C")], machines=[Machine("C", "conventional", 100.0, 0.2)])
    assert "C" in build_topology_graph(m, keep=("A", "C")).nodes


def test_unknown_kept_bus():
    with pytest.raises(ModelError):
        build_topology_graph(net([("A", "B")]), keep=("Z",))


# --- enumerate_radial_paths ---------------------------------------------------

def triangle():
    return graph_of(net([("A", "B"), ("B", "C"), ("A", "C")]))


def test_triangle_paths():
    paths = enumerate_radial_paths(triangle(), "A", "C", 15)
    assert [p.buses for p in paths] == [("A", "B", "C"), ("A", "C")]
    for p in paths:
        assert p.buses[0] == "A" and p.buses[-1] == "C" and p.depth == len(p.buses) - 1


def test_depth_bound():
    assert [p.buses for p in enumerate_radial_paths(triangle(), "A", "C", 1)] == [("A", "C")]


def test_disconnected_gives_empty():
    g = graph_of(net([("A", "B"), ("C", "D")]))
    assert enumerate_radial_paths(g, "A", "D", 15) == []


def test_parallel_circuits_collapse_to_one_path():
    g = graph_of(net([("A", "B", "1"), ("A", "B", "2"), ("B", "C")]))
    paths = enumerate_radial_paths(g, "A", "C", 15)
    assert len(paths) == 1
    assert len(paths[0].hops[0]) == 2


def test_fixture_long_path(before):
    g = graph_of(before).without_edges([BB3_LINE])
    avoid = g.grid_nodes | {"SC3"}
    paths = enumerate_radial_paths(g, "ST3", "BB3", 15, avoid=avoid)
    assert ("ST3", "ST4", "ST5", "ST1", "ST8", "ST9", "BB3") in [p.buses for p in paths]
    assert all(p.depth <= 15 and len(set(p.buses)) == len(p.buses) for p in paths)


# --- build_network_subgraph ---------------------------------------------------

def test_subgraph_saturation():
    g = graph_of(net([("A", "B"), ("B", "C")]))
    sub = build_network_subgraph(g, enumerate_radial_paths(g, "A", "C", 15))
    assert set(sub.nodes) == set(g.nodes) and set(sub.edges) == set(g.edges)


def test_subgraph_fixture(before):
    g = graph_of(before)
    paths = []
    for sink, line in (("ST1", ST1_LINE), ("BB3", BB3_LINE)):
        work = g.without_edges([line])
        avoid = (g.grid_nodes | {line.other(sink)}) - {sink}
        paths += enumerate_radial_paths(work, "ST3", sink, 15, avoid=avoid)
    sub = build_network_subgraph(g, paths)
    expected = {f"ST{i}" for i in range(1, 10)} | {f"BB{i}" for i in range(1, 5)} | {"EG2", "EG3", "SC3"}
    assert set(sub.nodes) == expected


def test_subgraph_locality():
    g = graph_of(net([("A", "B"), ("B", "C"), ("X", "Y")]))
    sub = build_network_subgraph(g, enumerate_radial_paths(g, "A", "B", 15))
    assert "X" not in sub.nodes and "Y" not in sub.nodes


# --- cycle basis and substitution -------------------------------------------

def test_tree_has_no_cycles():
    assert cycle_basis(graph_of(net([("A", "B"), ("B", "C"), ("B", "D")]))) == []


def test_parallel_pair_is_two_edge_cycle():
    basis = cycle_basis(graph_of(net([("A", "B", "1"), ("A", "B", "2")])))
    assert len(basis) == 1 and len(basis[0]) == 2


def test_basis_deterministic(before):
    assert cycle_basis(graph_of(before)) == cycle_basis(graph_of(before))


@pytest.fixture
def reference_basis(before):
    g = graph_of(before)
    return g, [cycle_from_buses(g, c, "1") for c in REFERENCE_CYCLES]


def fixture_path(g, buses):
    return RadialPath(tuple(buses), tuple(g.edges_between(a, b) for a, b in zip(buses, buses[1:])))


def test_st5_st1_in_three_cycles(reference_basis):
    g, basis = reference_basis
    assert cycles_containing(g.edges_between("ST5", "ST1"), basis) == [0, 1, 2]


def test_grouped_substitution(reference_basis):
    g, basis = reference_basis
    path = fixture_path(g, ["ST3", "ST4", "ST5", "ST1", "ST8", "ST9", "BB3"])
    pwc = substitute_cycles(path, basis)
    groups = [[basis.index(c) + 1 for c in el.cycles] for el in pwc.elements]
    assert groups == [[1], [2, 3], [4], [5]]
    assert all(isinstance(el, CycleGroup) for el in pwc.elements)
    assert pwc.collapse() == path
    for el in pwc.elements:
        assert el.edges == frozenset().union(*(c.edges for c in el.cycles))


def test_substitution_without_double_circuit(reference_basis):
    g, basis = reference_basis
    path = fixture_path(g, ["ST3", "ST4", "ST5", "ST1", "BB2", "BB3"])
    pwc = substitute_cycles(path, basis[:3])
    kinds = [[basis.index(c) + 1 for c in el.cycles] if isinstance(el, CycleGroup) else path.buses[el.hop:el.hop + 2]
             for el in pwc.elements]
    assert kinds == [[1], [2, 3], ("ST1", "BB2"), ("BB2", "BB3")]


def test_tree_path_unchanged():
    g = graph_of(net([("A", "B"), ("B", "C")]))
    path = enumerate_radial_paths(g, "A", "C", 15)[0]
    pwc = substitute_cycles(path, cycle_basis(g))
    assert all(isinstance(el, PlainEdge) for el in pwc.elements)
    assert pwc.collapse() == path


# --- verify_radiality -------------------------------------------------------

def test_radial_by_construction():
    m = net([("A", "B", "1", {"xc": 0.05})], grid=("B",))
    assert verify_radiality(m, Contingency("none"), "A", ("A", "B", "1"))


def test_upgraded_ctg1_is_radial(after):
    c = ctg("CTG#1", "ST1-ST8/1", "ST1-ST8/2", "ST5-ST7/1", "ST5-ST6/1")
    assert verify_radiality(after, c, "ST3", ST1_LINE)


def test_meshed_base_case_not_radial(before):
    assert not verify_radiality(before, Contingency("none"), "ST3", ST1_LINE)
    assert not verify_radiality(before, Contingency("none"), "ST3", BB3_LINE)


def test_series_line_outaged_is_error(before):
    with pytest.raises(ModelError, match="outaged"):
        verify_radiality(before, ctg("x", "ST1-BB2/1"), "ST3", ST1_LINE)


# --- screen / contingency_for ------------------------------------------------

def test_already_radial_gives_empty_contingency():
    m = net([("S", "T"), ("T", "F", "1", {"xc": 0.05})], grid=("F",))
    res = screen(m, "S", "T", ("T", "F", "1"))
    assert len(res) == 1 and res[0].contingency.outages == ()


def test_k_zero_on_meshed_fixture(before):
    assert screen(before, "ST3", "ST1", ST1_LINE, k=0) == []


def test_screen_pre_upgrade(before):
    t = time.perf_counter()
    st1 = screen(before, "ST3", "ST1", ST1_LINE)
    bb3 = screen(before, "ST3", "BB3", BB3_LINE)
    assert time.perf_counter() - t < 5.0
    sets = {outage_set(rc.contingency) for rc in st1}
    assert outage_set(ctg("", "ST1-ST8/1", "ST5-ST7/1", "ST5-ST6/1")) in sets
    assert outage_set(ctg("", "ST1-ST8/1", "ST3-ST4/1")) in sets
    assert outage_set(ctg("", "BB1-ST9/1", "BB1-ST9/2", "BB2-EG2/1", "BB3-EG3/1")) in \
        {outage_set(rc.contingency) for rc in bb3}


def test_screen_post_upgrade(after):
    sets = {outage_set(rc.contingency) for rc in screen(after, "ST3", "ST1", ST1_LINE)}
    assert outage_set(ctg("", "ST1-ST8/1", "ST1-ST8/2", "ST5-ST7/1", "ST5-ST6/1")) in sets
    assert outage_set(ctg("", "ST1-ST5/1", "ST1-ST5/2", "ST1-ST8/1", "ST1-ST8/2", "ST3-ST4/1")) in sets


def test_screen_sorted_and_verified(before):
    for sink, line in (("ST1", ST1_LINE), ("BB3", BB3_LINE)):
        res = screen(before, "ST3", sink, line)
        counts = [rc.outage_count for rc in res]
        assert counts == sorted(counts)
        for rc in res:
            assert rc.outage_count == len(rc.contingency.outages) <= 14
            assert verify_radiality(before, rc.contingency, "ST3", line, sink)


def test_screen_deterministic(before):
    a = screen(before, "ST3", "BB3", BB3_LINE)
    b = screen(before, "ST3", "BB3", BB3_LINE)
    assert [rc.to_dict() for rc in a] == [rc.to_dict() for rc in b]


@pytest.mark.parametrize("kw,msg", [
    ({"sink": "ST2"}, "not a terminal"),
    ({"source": "ST1"}, "differ"),
    ({"source": "EG2"}, "grid bus"),
    ({"line": ("ST1", "ST2", "1")}, "not series compensated"),
])
def test_screen_bad_designation(before, kw, msg):
    args = {"source": "ST3", "sink": "ST1", "line": ST1_LINE} | kw
    with pytest.raises(ModelError, match=msg):
        screen(before, args["source"], args["sink"], args["line"])
