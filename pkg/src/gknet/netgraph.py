"""Capacitated acyclic networks with exact integer min-cut queries.

Capacities are nonnegative integers (bits per unit time). Min-cut values are
computed as max-flow with Dinic's algorithm; multi-source queries merge the
sources behind a synthetic super-source whose edges carry a finite sentinel
capacity (1 + total network capacity), which is equivalent to unbounded edges
for max-flow purposes while keeping arithmetic exact.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Mapping

from .errors import BindingError
from .reports import RATE_TOL, FeasibilityReport, build_report, rate_check


@dataclass(frozen=True)
class Edge:
    tail: str
    head: str
    cap: int


@dataclass(frozen=True)
class CutValue:
    source_set: frozenset
    terminal: str
    value: int


@dataclass(frozen=True)
class Network:
    nodes: tuple
    edges: tuple
    sources: dict  # variable name -> source node
    terminals: tuple

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "terminals", tuple(self.terminals))
        object.__setattr__(self, "sources", dict(self.sources))
        object.__setattr__(
            self,
            "edges",
            tuple(e if isinstance(e, Edge) else Edge(*e) for e in self.edges),
        )
        node_set = set(self.nodes)
        if len(node_set) != len(self.nodes):
            raise ValueError("duplicate node names")
        for e in self.edges:
            if e.tail not in node_set or e.head not in node_set:
                raise ValueError(f"edge {e} references an unknown node")
            if not isinstance(e.cap, int) or isinstance(e.cap, bool) or e.cap < 0:
                raise ValueError(f"edge {e} needs a nonnegative integer capacity")
        for var, node in self.sources.items():
            if node not in node_set:
                raise ValueError(f"source {var!r} bound to unknown node {node!r}")
        for t in self.terminals:
            if t not in node_set:
                raise ValueError(f"unknown terminal {t!r}")
        src_nodes = set(self.sources.values())
        if src_nodes & set(self.terminals):
            raise ValueError("source nodes and terminals must be disjoint")
        self.topological_order()  # raises on cycles
        if self.terminals:
            reachable = self._reachable_from(src_nodes)
            missing = [t for t in self.terminals if t not in reachable]
            if missing:
                raise ValueError(f"terminals unreachable from every source: {missing}")

    def _reachable_from(self, start: set) -> set:
        out: dict = {}
        for e in self.edges:
            out.setdefault(e.tail, []).append(e.head)
        seen = set(start)
        queue = deque(start)
        while queue:
            u = queue.popleft()
            for v in out.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen

    def topological_order(self) -> tuple:
        indeg = {v: 0 for v in self.nodes}
        out: dict = {v: [] for v in self.nodes}
        for e in self.edges:
            indeg[e.head] += 1
            out[e.tail].append(e.head)
        queue = deque(v for v in self.nodes if indeg[v] == 0)
        order = []
        while queue:
            u = queue.popleft()
            order.append(u)
            for v in out[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(v)
        if len(order) != len(self.nodes):
            raise ValueError("network graph contains a cycle")
        return tuple(order)

    def total_capacity(self) -> int:
        return sum(e.cap for e in self.edges)


def _dinic(n: int, arcs, s: int, t: int) -> int:
    head = [[] for _ in range(n)]
    to: list[int] = []
    cap: list[int] = []
    for u, v, c in arcs:
        head[u].append(len(to))
        to.append(v)
        cap.append(c)
        head[v].append(len(to))
        to.append(u)
        cap.append(0)

    inf = sum(c for _, _, c in arcs) + 1
    flow = 0
    while True:
        level = [-1] * n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in head[u]:
                v = to[e]
                if cap[e] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        if level[t] < 0:
            return flow
        it = [0] * n

        def dfs(u: int, pushed: int) -> int:
            if u == t:
                return pushed
            while it[u] < len(head[u]):
                e = head[u][it[u]]
                v = to[e]
                if cap[e] > 0 and level[v] == level[u] + 1:
                    d = dfs(v, min(pushed, cap[e]))
                    if d > 0:
                        cap[e] -= d
                        cap[e ^ 1] += d
                        return d
                it[u] += 1
            return 0

        while True:
            pushed = dfs(s, inf)
            if pushed == 0:
                break
            flow += pushed


def min_cut(net: Network, from_nodes, to: str) -> CutValue:
    """Exact max-flow value from a node set to one terminal node."""
    from_set = frozenset([from_nodes] if isinstance(from_nodes, str) else from_nodes)
    if not from_set:
        raise ValueError("empty source set")
    unknown = (from_set | {to}) - set(net.nodes)
    if unknown:
        raise ValueError(f"unknown nodes {sorted(unknown)}")
    if to in from_set:
        raise ValueError("target node cannot be one of the sources")

    index = {v: i for i, v in enumerate(net.nodes)}
    super_src = len(net.nodes)
    sentinel = net.total_capacity() + 1
    arcs = [(index[e.tail], index[e.head], e.cap) for e in net.edges]
    arcs += [(super_src, index[v], sentinel) for v in sorted(from_set)]
    value = _dinic(len(net.nodes) + 1, arcs, super_src, index[to])
    return CutValue(from_set, to, value)


def capacity_function(net: Network, source_sets: Iterable) -> dict:
    """rho_G(S) = min over terminals of the min-cut from S, per requested set."""
    if not net.terminals:
        raise ValueError("network has no terminals")
    out = {}
    for s in source_sets:
        fs = frozenset([s] if isinstance(s, str) else s)
        if not fs:
            raise ValueError("empty source set in request")
        out[fs] = min(min_cut(net, fs, t).value for t in net.terminals)
    return out


def rho(net: Network, source_nodes) -> int:
    """Capacity function of a single node set."""
    fs = frozenset([source_nodes] if isinstance(source_nodes, str) else source_nodes)
    return capacity_function(net, [fs])[fs]


def delayed_network(net: Network, n: int) -> Network:
    """Same topology with every capacity multiplied by n."""
    if not isinstance(n, int) or n < 1:
        raise ValueError("delay factor must be a positive integer")
    return Network(
        net.nodes,
        tuple(Edge(e.tail, e.head, e.cap * n) for e in net.edges),
        net.sources,
        net.terminals,
    )


def expand_with_latent_sources(net: Network, latent) -> Network:
    """Attach virtual source nodes by effectively unbounded edges.

    ``latent`` is a list of (new source name, attach-to node set) pairs. Each
    new node also becomes a bound source under its own name. The sentinel
    capacity (1 + total capacity of the input network) is provably equivalent
    to an infinite edge for every cut query.
    """
    latent = [(name, tuple(attach)) for name, attach in latent]
    if not latent:
        return net
    sentinel = net.total_capacity() + 1
    node_set = set(net.nodes)
    names = [name for name, _ in latent]
    if len(set(names)) != len(names) or node_set & set(names):
        raise ValueError("latent source names must be fresh and distinct")
    edges = list(net.edges)
    for name, attach in latent:
        if not attach:
            raise ValueError(f"latent source {name!r} attaches to no nodes")
        for a in attach:
            if a not in node_set:
                raise ValueError(f"latent source {name!r} attaches to unknown node {a!r}")
            edges.append(Edge(name, a, sentinel))
    sources = dict(net.sources)
    sources.update({name: name for name in names})
    return Network(net.nodes + tuple(names), tuple(edges), sources, net.terminals)


def independent_multicast_feasible(
    net: Network, rates: Mapping, tol: float = RATE_TOL
) -> FeasibilityReport:
    """Subset-sum rate conditions for multicasting independent sources.

    For every nonempty subset S of the rated source nodes, the summed rate
    must not exceed rho_G(S).
    """
    src_nodes = set(net.sources.values())
    for node in rates:
        if node not in src_nodes:
            raise BindingError(f"{node!r} is not a source node of the network")
    keys = sorted(rates)
    checks = []
    for r in range(1, len(keys) + 1):
        for subset in combinations(keys, r):
            lhs = sum(rates[s] for s in subset)
            rhs = rho(net, subset)
            label = f"rate({'+'.join(subset)}) <= rho_G({{{','.join(subset)}}})"
            checks.append(rate_check(label, lhs, rhs, tol))
    return build_report(
        "independent-multicast", checks, witnesses={"rates": {k: float(rates[k]) for k in keys}}
    )


def network_to_dict(net: Network) -> dict:
    return {
        "nodes": list(net.nodes),
        "edges": [{"from": e.tail, "to": e.head, "cap": e.cap} for e in net.edges],
        "sources": dict(net.sources),
        "terminals": list(net.terminals),
    }


def network_from_dict(obj: Mapping) -> Network:
    try:
        nodes = obj["nodes"]
        edges = [Edge(e["from"], e["to"], e["cap"]) for e in obj["edges"]]
        sources = obj["sources"]
        terminals = obj["terminals"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"network object is missing field {exc}") from exc
    return Network(tuple(nodes), tuple(edges), dict(sources), tuple(terminals))


def load_network(path) -> Network:
    return network_from_dict(json.loads(Path(path).read_text()))


def dump_network(net: Network, path) -> None:
    Path(path).write_text(json.dumps(network_to_dict(net), indent=2) + "\n")
