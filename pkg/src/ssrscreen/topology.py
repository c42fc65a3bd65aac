"""Topology screening: radial connections from a POI to a series-compensated line.

A *radial condition* is a post-contingency state in which every route from
the source bus to the wider grid crosses the series-compensated line of
interest. The parts of the network the source still uses to reach the sink
form the *corridor*: the union of all simple source-to-sink paths in the
post-contingency graph, i.e. a chain of bridges and meshed blocks (cycle
groups). Outages are taken only from branches incident to corridor buses,
and a contingency is kept only if no single outage can be restored without
losing radiality or changing the corridor. Restorable outages are exactly
the ones that lead into dead-end regions, which is how branches such as the
one feeding a hanging two-bus tail stay in service.

Corridors are produced from the depth-bounded DFS path set by union
closure, so a corridor is any union of enumerated paths. Each one is
described by a representative path with its cycle groups substituted in.
"""

from __future__ import annotations

import itertools
import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Sequence

from ssrscreen.model import (
    BranchKey,
    Contingency,
    ModelError,
    NetworkModel,
    apply_contingency,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_DEPTH = 15
DEFAULT_K = 14

Pair = frozenset  # unordered bus pair


@dataclass(frozen=True)
class TopologyGraph:
    """Undirected multigraph over bus ids; edges are canonical branch keys."""

    nodes: tuple[str, ...]
    edges: tuple[BranchKey, ...]
    stub_pruned: bool = False
    grid_nodes: frozenset[str] = frozenset()
    parent: "TopologyGraph | None" = field(default=None, compare=False, repr=False)

    @cached_property
    def adjacency(self) -> dict[str, list[tuple[str, BranchKey]]]:
        adj: dict[str, list[tuple[str, BranchKey]]] = {n: [] for n in self.nodes}
        for e in self.edges:
            adj[e.from_bus].append((e.to_bus, e))
            adj[e.to_bus].append((e.from_bus, e))
        for lst in adj.values():
            lst.sort()
        return adj

    def neighbors(self, node: str) -> list[str]:
        return sorted({nb for nb, _ in self.adjacency[node]})

    def edges_between(self, a: str, b: str) -> tuple[BranchKey, ...]:
        return tuple(e for nb, e in self.adjacency[a] if nb == b)

    def without_edges(self, removed: Iterable[BranchKey]) -> "TopologyGraph":
        gone = {BranchKey(*e).canonical() for e in removed}
        return replace(self, edges=tuple(e for e in self.edges if e not in gone),
                       parent=self.parent)

    def induced(self, keep: Iterable[str]) -> "TopologyGraph":
        keep = set(keep)
        return replace(
            self,
            nodes=tuple(n for n in self.nodes if n in keep),
            edges=tuple(e for e in self.edges if e.from_bus in keep and e.to_bus in keep),
            grid_nodes=self.grid_nodes & keep,
            parent=self,
        )

    def components(self) -> list[set[str]]:
        seen: set[str] = set()
        comps = []
        for n in self.nodes:
            if n not in seen:
                comp = _reach(self.adjacency, n)
                seen |= comp
                comps.append(comp)
        return comps


def _reach(adj: dict[str, list[tuple[str, BranchKey]]], start: str,
           blocked: frozenset | set = frozenset()) -> set[str]:
    comp = {start}
    stack = [start]
    while stack:
        for nb, e in adj[stack.pop()]:
            if nb not in comp and e not in blocked:
                comp.add(nb)
                stack.append(nb)
    return comp


def grid_buses(model: NetworkModel) -> frozenset[str]:
    """Buses standing for the wider grid: external-grid buses and infinite sources."""
    out = {b.id for b in model.buses if b.kind == "external-grid"}
    out |= {m.bus for m in model.machines if m.kind == "infinite-grid"}
    return frozenset(out)


def build_topology_graph(model: NetworkModel, keep: Iterable[str] = ()) -> TopologyGraph:
    """Multigraph of in-service branches with generation/shunt/tertiary stubs removed.

    Leaf buses whose only attachments are machines or shunts are removed
    repeatedly until none remain, then buses with no branch left are
    dropped. Buses in ``keep`` and grid buses are never removed.
    """
    keep = set(keep)
    for bus in keep:
        if not model.has_bus(bus):
            raise ModelError(f"bus {bus!r} is not in the model")
    grid = grid_buses(model)
    attached = {s.bus for s in model.shunts} | {m.bus for m in model.machines
                                                 if m.kind != "infinite-grid"}
    edges = {br.key.canonical() for br in model.in_service_branches() if br.role != "tertiary-stub"}
    nodes = {b.id for b in model.buses}
    nbrs: dict[str, set[str]] = defaultdict(set)
    for e in edges:
        nbrs[e.from_bus].add(e.to_bus)
        nbrs[e.to_bus].add(e.from_bus)

    def prunable(n: str) -> bool:
        return len(nbrs[n]) == 1 and n in attached and n not in keep and n not in grid

    queue = deque(sorted(n for n in nodes if prunable(n)))
    while queue:
        n = queue.popleft()
        if n not in nodes or not prunable(n):
            continue
        (nb,) = nbrs[n]
        nodes.discard(n)
        edges = {e for e in edges if n not in (e.from_bus, e.to_bus)}
        nbrs[nb].discard(n)
        del nbrs[n]
        if prunable(nb):
            queue.append(nb)
    # buses left with no branch at all (tertiary stubs, isolated terminals)
    nodes = {n for n in nodes if nbrs[n] or n in keep or n in grid}
    return TopologyGraph(nodes=tuple(sorted(nodes)), edges=tuple(sorted(edges)),
                         stub_pruned=True, grid_nodes=grid & nodes)


# --- paths -------------------------------------------------------------------

@dataclass(frozen=True)
class RadialPath:
    """Simple bus-level path; ``hops[i]`` lists every parallel circuit of hop i."""

    buses: tuple[str, ...]
    hops: tuple[tuple[BranchKey, ...], ...]

    @property
    def depth(self) -> int:
        return len(self.hops)

    @property
    def edges(self) -> tuple[BranchKey, ...]:
        return tuple(h[0] for h in self.hops)

    @property
    def source(self) -> str:
        return self.buses[0]

    @property
    def sink(self) -> str:
        return self.buses[-1]

    def pairs(self) -> frozenset[frozenset[str]]:
        return frozenset(Pair(p) for p in zip(self.buses, self.buses[1:]))


def enumerate_radial_paths(graph: TopologyGraph, source: str, sink: str,
                           max_depth: int = DEFAULT_MAX_DEPTH,
                           avoid: Iterable[str] = ()) -> list[RadialPath]:
    """All simple source-to-sink paths of at most ``max_depth`` hops.

    Parallel circuits are collapsed: one path per bus sequence. Buses in
    ``avoid`` are never visited. Output is sorted by bus sequence.
    """
    if source == sink:
        raise ValueError("source and sink must differ")
    for n in (source, sink):
        if n not in graph.adjacency:
            raise ModelError(f"bus {n!r} is not in the topology graph")
    avoid = set(avoid) - {source, sink}
    nbrs = {n: [m for m in graph.neighbors(n) if m not in avoid] for n in graph.nodes}
    found: list[tuple[str, ...]] = []
    path = [source]
    on_path = {source}
    stack = [iter(nbrs[source])]
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            on_path.discard(path.pop())
            continue
        if nxt in on_path:
            continue
        if nxt == sink:
            found.append(tuple(path) + (sink,))
            continue
        if len(path) < max_depth:
            path.append(nxt)
            on_path.add(nxt)
            stack.append(iter(nbrs[nxt]))
    found.sort()
    return [RadialPath(p, tuple(graph.edges_between(a, b) for a, b in zip(p, p[1:])))
            for p in found]


def build_network_subgraph(graph: TopologyGraph, paths: Sequence[RadialPath]) -> TopologyGraph:
    """Induced subgraph on every path bus plus its immediate neighbours."""
    if not paths:
        raise ValueError("paths must not be empty")
    keep: set[str] = set()
    for p in paths:
        for b in p.buses:
            keep.add(b)
            keep.update(graph.neighbors(b))
    return graph.induced(keep)


# --- cycles ------------------------------------------------------------------

@dataclass(frozen=True)
class Cycle:
    buses: tuple[str, ...]          # closing hop back to buses[0] is implied
    edges: frozenset[BranchKey]

    def pairs(self) -> frozenset[frozenset[str]]:
        return frozenset(e.pair for e in self.edges)

    def __len__(self) -> int:
        return len(self.edges)


def cycle_basis(graph: TopologyGraph, multigraph: bool = True) -> list[Cycle]:
    """Fundamental cycle basis from a Paton (stack-ordered) spanning forest.

    Each chord yields one cycle: the chord plus the tree path between its
    ends. With ``multigraph`` every parallel circuit counts as an edge, so a
    double circuit contributes a two-edge cycle; otherwise parallel circuits
    are collapsed to one edge per bus pair first. The basis has
    E - V + C members.
    """
    if not multigraph:
        first = {}
        for e in graph.edges:
            first.setdefault(e.pair, e)
        graph = replace(graph, edges=tuple(sorted(first.values())), parent=graph.parent)
    adj = graph.adjacency
    pred: dict[str, tuple[str, BranchKey] | None] = {}
    depth: dict[str, int] = {}
    tree: set[BranchKey] = set()
    for root in graph.nodes:
        if root in pred:
            continue
        pred[root] = None
        depth[root] = 0
        stack = [root]
        while stack:
            z = stack.pop()
            for nb, e in adj[z]:
                if nb not in pred:
                    pred[nb] = (z, e)
                    depth[nb] = depth[z] + 1
                    tree.add(e)
                    stack.append(nb)
    cycles = []
    for chord in graph.edges:
        if chord in tree:
            continue
        a, b = chord.from_bus, chord.to_bus
        left, right = [a], [b]
        edges = {chord}
        while left[-1] != right[-1]:
            if depth[left[-1]] >= depth[right[-1]]:
                up, e = pred[left[-1]]
                left.append(up)
            else:
                up, e = pred[right[-1]]
                right.append(up)
            edges.add(e)
        buses = tuple(left) + tuple(reversed(right[:-1]))
        cycles.append(Cycle(buses, frozenset(edges)))
    return cycles


def cycle_from_buses(graph: TopologyGraph, buses: Sequence[str], circuit: str | None = None) -> Cycle:
    """Cycle through ``buses`` in order, using the lowest (or the given) circuit per hop."""
    edges = set()
    closed = list(buses) + [buses[0]]
    for a, b in zip(closed, closed[1:]):
        cands = graph.edges_between(a, b)
        if circuit is not None:
            cands = tuple(e for e in cands if e.circuit == circuit) or cands
        if not cands:
            raise ModelError(f"no branch between {a} and {b}")
        edges.add(cands[0])
    return Cycle(tuple(buses), frozenset(edges))


@dataclass(frozen=True)
class CycleGroup:
    """Cycles substituted for a run of path hops; ``span`` are the hop indices."""

    cycles: tuple[Cycle, ...]
    span: tuple[int, ...]

    @property
    def edges(self) -> frozenset[BranchKey]:
        return frozenset().union(*(c.edges for c in self.cycles))

    def pairs(self) -> frozenset[frozenset[str]]:
        return frozenset(e.pair for e in self.edges)


@dataclass(frozen=True)
class PlainEdge:
    hop: int
    circuits: tuple[BranchKey, ...]


@dataclass(frozen=True)
class PathWithCycles:
    """A radial path with cycle groups substituted for the hops they contain.

    ``corridor`` is the set of bus pairs retained in service between source
    and sink. It defaults to the union of the path and its groups.
    """

    path: RadialPath
    elements: tuple[PlainEdge | CycleGroup, ...]
    corridor: frozenset[frozenset[str]] = None

    def __post_init__(self) -> None:
        if self.corridor is None:
            pairs = set(self.path.pairs())
            for el in self.elements:
                if isinstance(el, CycleGroup):
                    pairs |= el.pairs()
            object.__setattr__(self, "corridor", frozenset(pairs))

    def collapse(self) -> RadialPath:
        return self.path

    @property
    def buses(self) -> frozenset[str]:
        return frozenset().union(*self.corridor)

    def describe(self) -> str:
        parts = []
        hops = self.path.buses
        for el in self.elements:
            if isinstance(el, PlainEdge):
                parts.append(f"{hops[el.hop]}-{hops[el.hop + 1]}")
            else:
                parts.append(" U ".join("(" + "-".join(c.buses) + ")" for c in el.cycles))
        return " | ".join(parts)


def cycles_containing(hop_circuits: Iterable[BranchKey], basis: Sequence[Cycle]) -> list[int]:
    hop = {BranchKey(*e).canonical() for e in hop_circuits}
    return [i for i, c in enumerate(basis) if c.edges & hop]


def substitute_cycles(path: RadialPath, basis: Sequence[Cycle]) -> PathWithCycles:
    """Replace each path hop lying on basis cycles by the group of those cycles.

    Walking from source to sink, a hop's containing cycles that have not
    appeared yet open a new group; a hop whose cycles all appeared already
    joins the preceding group, so every cycle is listed once.
    """
    elements: list[PlainEdge | CycleGroup] = []
    emitted: set[int] = set()
    for i, hop in enumerate(path.hops):
        inside = cycles_containing(hop, basis)
        if not inside:
            elements.append(PlainEdge(i, hop))
            continue
        new = [j for j in inside if j not in emitted]
        if new:
            elements.append(CycleGroup(tuple(basis[j] for j in new), (i,)))
            emitted.update(new)
        elif elements and isinstance(elements[-1], CycleGroup):
            last = elements[-1]
            elements[-1] = CycleGroup(last.cycles, last.span + (i,))
        else:
            elements.append(CycleGroup(tuple(basis[j] for j in inside), (i,)))
    return PathWithCycles(path, tuple(elements))


# --- corridors and contingencies -------------------------------------------

def st_path_edges(adj: dict[str, list[tuple[str, BranchKey]]], s: str, t: str,
                  blocked: frozenset | set = frozenset()) -> set[BranchKey]:
    """Edges lying on at least one simple s-t path.

    An edge is on a simple s-t path iff it shares a biconnected component
    with a virtual s-t edge; components come from an iterative Tarjan pass
    keyed on edge identity so parallel circuits are handled.
    """
    virtual = BranchKey("", "", "virtual")
    if s == t or s not in adj or t not in adj:
        return set()

    def incident(v):
        for nb, e in adj[v]:
            if e not in blocked:
                yield nb, e
        if v == s:
            yield t, virtual
        elif v == t:
            yield s, virtual

    disc = {s: 0}
    low = {s: 0}
    timer = 0
    estack: list[BranchKey] = []
    frames = [(s, None, incident(s))]
    while frames:
        v, pe, it = frames[-1]
        descended = False
        for w, e in it:
            if e == pe:
                continue
            if w not in disc:
                timer += 1
                disc[w] = low[w] = timer
                estack.append(e)
                frames.append((w, e, incident(w)))
                descended = True
                break
            if disc[w] < disc[v]:
                estack.append(e)
                low[v] = min(low[v], disc[w])
        if descended:
            continue
        frames.pop()
        if not frames:
            break
        u = frames[-1][0]
        low[u] = min(low[u], low[v])
        if low[v] >= disc[u]:
            comp = []
            while True:
                e = estack.pop()
                comp.append(e)
                if e == pe:
                    break
            if virtual in comp:
                return {e for e in comp if e != virtual}
    return set()


def _corridor_pairs(edges: Iterable[BranchKey]) -> frozenset[frozenset[str]]:
    return frozenset(e.pair for e in edges)


@dataclass(frozen=True)
class RadialState:
    radial: bool
    corridor: frozenset[frozenset[str]]


def radial_state(graph: TopologyGraph, outages: Iterable[BranchKey], source: str, sink: str,
                 series_line: BranchKey) -> RadialState:
    """Radiality and corridor of ``graph`` after removing outages and the series line."""
    far = series_line.other(sink)
    blocked = {BranchKey(*e).canonical() for e in outages} | {series_line.canonical()}
    comp = _reach(graph.adjacency, source, blocked)
    grid = (graph.grid_nodes | {far}) - {sink}
    radial = sink in comp and not (comp & grid)
    corridor = _corridor_pairs(st_path_edges(graph.adjacency, source, sink, blocked))
    return RadialState(radial, corridor)


def contingency_for(path: PathWithCycles, subgraph: TopologyGraph, series_line: BranchKey,
                    k: int | None = None) -> list[Contingency]:
    """Minimal outage sets that leave exactly ``path.corridor`` between source and sink.

    Candidate outages are the branches at corridor buses outside the
    corridor. Regions beyond the corridor that reach the grid (or the far
    end of the series line) are disconnected completely; any other region
    stays attached at one corridor bus, one variant per choice of bus, and
    is cut from the rest. Variants above ``k`` outages are not generated.
    Dead-end analysis uses the full graph behind ``subgraph``.
    """
    full = subgraph.parent or subgraph
    source, sink = path.path.source, path.path.sink
    series = series_line.canonical()
    far = series_line.other(sink)
    corridor = path.corridor
    cbuses = path.buses
    outside = [n for n in full.nodes if n not in cbuses]
    adj = full.adjacency
    grid = (full.grid_nodes | {far}) - {sink}

    forced: set[BranchKey] = set()
    for n in sorted(cbuses):
        for nb, e in adj[n]:
            if e != series and nb in cbuses and e.pair not in corridor:
                forced.add(e)

    region_of: dict[str, int] = {}
    regions: list[set[str]] = []
    outside_set = set(outside)
    for n in outside:
        if n in region_of:
            continue
        comp = {n}
        stack = [n]
        while stack:
            for nb, e in adj[stack.pop()]:
                if nb in outside_set and nb not in comp and e != series:
                    comp.add(nb)
                    stack.append(nb)
        for m in comp:
            region_of[m] = len(regions)
        regions.append(comp)

    choices: list[list[tuple[BranchKey, ...]]] = []
    attach: dict[int, dict[str, list[BranchKey]]] = defaultdict(lambda: defaultdict(list))
    for n in sorted(cbuses):
        for nb, e in adj[n]:
            if e != series and nb in region_of:
                attach[region_of[nb]][n].append(e)
    for r in sorted(attach):
        by_bus = attach[r]
        every = tuple(sorted(e for es in by_bus.values() for e in es))
        if regions[r] & grid:
            forced.update(every)
        elif len(by_bus) > 1:
            opts = []
            for keep_at in sorted(by_bus):
                opts.append(tuple(e for e in every if e not in by_bus[keep_at]))
            opts.sort(key=lambda o: (len(o), o))
            choices.append(opts)

    limit = float("inf") if k is None else k
    base = len(forced)
    if base + sum(len(opts[0]) for opts in choices) > limit:
        return []
    label = f"{source}->{sink}"
    out = []
    seen = set()
    for combo in itertools.product(*choices):
        outages = set(forced)
        for cut in combo:
            outages.update(cut)
        if len(outages) > limit:
            continue
        key = tuple(sorted(outages))
        if key in seen:
            continue
        seen.add(key)
        st = radial_state(full, key, source, sink, series_line)
        if st.radial and st.corridor == corridor:
            out.append(Contingency(label, key))
    out.sort(key=lambda c: (c.outage_count, c.outages))
    return out


def verify_radiality(model: NetworkModel, ctg: Contingency, source: str,
                     series_line: BranchKey | tuple[str, str, str], sink: str | None = None) -> bool:
    """True iff after ``ctg`` all routes from ``source`` to the grid cross ``series_line``.

    With the series line removed, the source's island must hold exactly one
    terminal of the line (``sink`` if given) and no grid bus. Dead-end side
    regions are allowed. Stubs and tertiary branches count as ordinary
    branches here.
    """
    series_line = BranchKey(*series_line)
    line = model.branch(series_line)
    if not line.in_service:
        raise ModelError(f"series line {series_line} is out of service")
    if any(BranchKey(*o).canonical() == series_line.canonical() for o in ctg.outages):
        raise ModelError(f"series line {series_line} is outaged by {ctg.label!r}")
    post = apply_contingency(model, ctg)
    edges = tuple(br.key.canonical() for br in post.in_service_branches())
    graph = TopologyGraph(tuple(b.id for b in post.buses), edges, grid_nodes=grid_buses(post))
    comp = _reach(graph.adjacency, source, {series_line.canonical()})
    ends = {series_line.from_bus, series_line.to_bus}
    inside = comp & ends
    if len(inside) != 1 or (sink is not None and inside != {sink}):
        return False
    return not (comp & (graph.grid_nodes - inside))


@dataclass(frozen=True)
class RadialCondition:
    source: str
    sink: str
    series_line: BranchKey
    path: PathWithCycles
    contingency: Contingency

    @property
    def outage_count(self) -> int:
        return self.contingency.outage_count

    @property
    def corridor(self) -> frozenset[frozenset[str]]:
        return self.path.corridor

    def station_key(self) -> tuple:
        """Identity at station level: sink, corridor bus pairs, outaged bus pairs."""
        return (
            self.sink,
            tuple(sorted(tuple(sorted(p)) for p in self.corridor)),
            tuple(sorted({tuple(sorted(o.pair)) for o in self.contingency.outages})),
        )

    def to_dict(self) -> dict:
        return {
            "label": self.contingency.label,
            "source": self.source,
            "sink": self.sink,
            "series_line": {"from": self.series_line.from_bus, "to": self.series_line.to_bus,
                            "circuit": self.series_line.circuit},
            "outage_count": self.outage_count,
            "path": list(self.path.path.buses),
            "cycles": [[list(c.buses) for c in el.cycles] for el in self.path.elements
                       if isinstance(el, CycleGroup)],
            "corridor": [list(p) for p in self.station_key()[1]],
            "outages": self.contingency.to_dict()["outages"],
        }


def _representative(paths: Sequence[RadialPath], corridor: frozenset) -> RadialPath:
    inside = [p for p in paths if p.pairs() <= corridor]
    return min(inside, key=lambda p: (p.depth, p.buses))


def _corridor_cycles(graph: TopologyGraph, corridor: frozenset) -> list[Cycle]:
    sub = replace(graph, edges=tuple(e for e in graph.edges if e.pair in corridor), parent=None)
    return cycle_basis(sub)


def _describe(rep: RadialPath, graph: TopologyGraph, corridor: frozenset) -> PathWithCycles:
    cycles = _corridor_cycles(graph, corridor)
    pwc = substitute_cycles(rep, cycles)
    used = {c for el in pwc.elements if isinstance(el, CycleGroup) for c in el.cycles}
    left = [c for c in cycles if c not in used]
    elements = list(pwc.elements)
    # cycles of a block that miss the representative path join that block's group
    while left:
        for c in list(left):
            for i, el in enumerate(elements):
                if isinstance(el, CycleGroup) and el.edges & c.edges:
                    elements[i] = CycleGroup(el.cycles + (c,), el.span)
                    left.remove(c)
                    break
            else:
                continue
            break
        else:
            break
    return PathWithCycles(rep, tuple(elements), corridor)


def screen(model: NetworkModel, source: str, sink: str,
           series_line: BranchKey | tuple[str, str, str],
           max_depth: int = DEFAULT_MAX_DEPTH, k: int = DEFAULT_K) -> list[RadialCondition]:
    """Every radial condition with at most ``k`` outages, sorted by outage count."""
    series_line = BranchKey(*series_line)
    line = model.branch(series_line)
    if not line.in_service:
        raise ModelError(f"series line {series_line} is out of service")
    if not line.series_compensated:
        raise ModelError(f"branch {series_line} is not series compensated")
    if sink not in (series_line.from_bus, series_line.to_bus):
        raise ModelError(f"sink {sink!r} is not a terminal of {series_line}")
    if source == sink:
        raise ModelError("source and sink must differ")
    far = series_line.other(sink)
    graph = build_topology_graph(model, keep=(source, sink))
    if source in graph.grid_nodes or source == far:
        raise ModelError(f"source {source!r} is a grid bus or the far end of the series line")
    work = graph.without_edges([series_line])
    avoid = (graph.grid_nodes | {far}) - {sink}
    paths = enumerate_radial_paths(work, source, sink, max_depth, avoid=avoid)
    log.info("%s -> %s: %d radial paths", source, sink, len(paths))
    if not paths:
        return []
    subgraph = build_network_subgraph(graph, paths)

    path_pairs = [p.pairs() for p in paths]
    corridors = set(path_pairs)
    frontier = deque(sorted(corridors, key=lambda c: sorted(map(sorted, c))))
    while frontier:
        c = frontier.popleft()
        for pp in path_pairs:
            u = c | pp
            if u not in corridors:
                corridors.add(u)
                frontier.append(u)
    log.info("%s -> %s: %d corridors", source, sink, len(corridors))

    conditions = []
    for corridor in corridors:
        pwc = _describe(_representative(paths, corridor), subgraph, corridor)
        for ctg in contingency_for(pwc, subgraph, series_line, k):
            conditions.append(RadialCondition(source, sink, series_line, pwc, ctg))
    conditions.sort(key=lambda rc: (rc.outage_count, rc.path.path.buses, rc.station_key()[1],
                                    rc.contingency.outages))
    labelled = []
    for i, rc in enumerate(conditions, 1):
        ctg = Contingency(f"{source}-{sink}-{i:03d}", rc.contingency.outages)
        labelled.append(replace(rc, contingency=ctg))
    return labelled
