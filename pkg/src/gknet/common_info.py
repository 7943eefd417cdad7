"""Gács-Körner common information of jointly distributed sources.

The common part K of two or more variables is the index of the connected
component of their support graph (one node per symbol, one hyperedge per
positive-probability tuple). Each variable determines K on its own, so K can
be computed separately at every source. This module builds the component
partition, the induced per-variable equivalence classes, the source split
X -> (X', K), and the refinement structure between partitions.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import log2

from .errors import NestingError, NotInSupportError, UnknownVariableError
from .probability import JointPmf


@dataclass(frozen=True)
class SupportGraph:
    """Multipartite support representation of a joint pmf.

    Part node labels are (variable, symbol) pairs restricted to symbols of
    positive marginal mass; every hyperedge touches exactly one node per part.
    """

    variables: tuple
    parts: dict
    hyperedges: tuple


@dataclass(frozen=True)
class Component:
    members: dict  # variable -> symbols in alphabet order
    weight: float


@dataclass(frozen=True)
class ComponentPartition:
    """Maximal connected-component decomposition of a support graph.

    Components are ordered by the alphabet rank of the smallest member symbol
    of the first variable, so indices are stable across runs.
    """

    variables: tuple
    alphabets: dict
    components: tuple
    weights: tuple
    class_of: dict  # variable -> {symbol: component index}
    support: frozenset


@dataclass(frozen=True)
class SourceDecomposition:
    """Bijection symbol <-> (component index, within-component index).

    ``conditionals[i][j]`` is p(symbol | K = i) for the j-th member of
    component i in alphabet order.
    """

    variable: str
    forward: dict
    inverse: dict
    conditionals: tuple


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        p = self.parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = p[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def support_graph(pmf: JointPmf, vars) -> SupportGraph:
    """Multipartite support graph of the marginal on ``vars``."""
    sub = pmf.subset(vars)
    marg = pmf.marginal(sub)
    seen = {v: set() for v in sub}
    for tup in marg.mass:
        for v, s in zip(sub, tup):
            seen[v].add(s)
    parts = {
        v: tuple(s for s in marg.alphabets[v] if s in seen[v]) for v in sub
    }
    return SupportGraph(sub, parts, tuple(marg.mass))


def _components_by_search(graph: SupportGraph) -> list[set]:
    # breadth-first traversal used as an independent re-check of union-find
    node_edges: dict = {}
    for tup in graph.hyperedges:
        for v, s in zip(graph.variables, tup):
            node_edges.setdefault((v, s), []).append(tup)
    comps = []
    visited = set()
    for start in node_edges:
        if start in visited:
            continue
        comp = set()
        queue = deque([start])
        while queue:
            node = queue.popleft()
            if node in comp:
                continue
            comp.add(node)
            for tup in node_edges[node]:
                for other in zip(graph.variables, tup):
                    if other not in comp:
                        queue.append(other)
        visited |= comp
        comps.append(comp)
    return comps


def decompose(pmf: JointPmf, vars) -> ComponentPartition:
    """Component partition of the support graph of the marginal on ``vars``."""
    sub = pmf.subset(vars)
    if len(sub) < 2:
        raise ValueError("decomposition needs at least two variables")
    marg = pmf.marginal(sub)
    graph = support_graph(marg, sub)

    nodes = [(v, s) for v in sub for s in graph.parts[v]]
    index = {node: i for i, node in enumerate(nodes)}
    uf = _UnionFind(len(nodes))
    for tup in graph.hyperedges:
        anchor = index[(sub[0], tup[0])]
        for v, s in zip(sub[1:], tup[1:]):
            uf.union(anchor, index[(v, s)])

    by_root: dict = {}
    for node, i in index.items():
        by_root.setdefault(uf.find(i), set()).add(node)

    # maximality re-check: a second, independent traversal must agree
    recheck = {frozenset(c) for c in _components_by_search(graph)}
    if {frozenset(c) for c in by_root.values()} != recheck:
        raise RuntimeError("component decomposition failed its traversal re-check")

    first = sub[0]
    rank0 = {s: i for i, s in enumerate(marg.alphabets[first])}
    groups = sorted(
        by_root.values(),
        key=lambda c: min(rank0[s] for v, s in c if v == first),
    )

    components = []
    weights = []
    class_of: dict = {v: {} for v in sub}
    node_class = {}
    for ci, group in enumerate(groups):
        members = {}
        for v in sub:
            rank = {s: i for i, s in enumerate(marg.alphabets[v])}
            syms = sorted((s for w, s in group if w == v), key=rank.__getitem__)
            members[v] = tuple(syms)
            for s in syms:
                class_of[v][s] = ci
        for node in group:
            node_class[node] = ci
        components.append(members)

    comp_weight = [0.0] * len(groups)
    for tup, p in marg.mass.items():
        classes = {node_class[(v, s)] for v, s in zip(sub, tup)}
        if len(classes) != 1:
            raise RuntimeError("support tuple straddles two components")
        comp_weight[classes.pop()] += p

    comps = tuple(
        Component(members, w) for members, w in zip(components, comp_weight)
    )
    return ComponentPartition(
        variables=sub,
        alphabets={v: marg.alphabets[v] for v in sub},
        components=comps,
        weights=tuple(comp_weight),
        class_of=class_of,
        support=frozenset(marg.mass),
    )


def gk_entropy(partition: ComponentPartition) -> float:
    """Entropy of the component-weight distribution, H(K), in bits."""
    return -sum(w * log2(w) for w in partition.weights if w > 0.0)


def decompose_source(
    pmf: JointPmf, partition: ComponentPartition, var: str
) -> SourceDecomposition:
    """Split one variable into (component index, within-component index)."""
    if var not in partition.variables:
        raise UnknownVariableError(f"variable {var!r} is not part of the partition")
    marg = pmf.marginal_distribution(var)
    forward = {}
    inverse = {}
    conditionals = []
    for ci, comp in enumerate(partition.components):
        probs = []
        for wi, sym in enumerate(comp.members[var]):
            forward[sym] = (ci, wi)
            inverse[(ci, wi)] = sym
            probs.append(marg[sym] / comp.weight)
        conditionals.append(tuple(probs))
    return SourceDecomposition(var, forward, inverse, tuple(conditionals))


def source_conditional_entropy(
    partition: ComponentPartition, decomp: SourceDecomposition
) -> float:
    """H(X' | K) computed from the within-component conditionals."""
    total = 0.0
    for w, cond in zip(partition.weights, decomp.conditionals):
        total -= w * sum(p * log2(p) for p in cond if p > 0.0)
    return total


def class_of(partition: ComponentPartition, var: str, symbol) -> int:
    """Component index holding ``symbol`` of ``var``."""
    if var not in partition.variables:
        raise UnknownVariableError(f"variable {var!r} is not part of the partition")
    try:
        return partition.class_of[var][symbol]
    except KeyError:
        raise NotInSupportError(
            f"symbol {symbol!r} of {var!r} has no support mass"
        ) from None


def check_nesting(
    fine: ComponentPartition, coarse: ComponentPartition, var: str
):
    """Whether every fine class of ``var`` sits inside one coarse class.

    Returns (True, {fine index -> coarse index}) on success, (False, None)
    otherwise. A successful map witnesses that the coarse index is a function
    of the fine one.
    """
    for part in (fine, coarse):
        if var not in part.variables:
            raise UnknownVariableError(f"variable {var!r} is not part of the partition")
    if set(fine.class_of[var]) != set(coarse.class_of[var]):
        raise ValueError(f"partitions cover different supports of {var!r}")
    mapping = {}
    for fi, comp in enumerate(fine.components):
        targets = {coarse.class_of[var][s] for s in comp.members[var]}
        if len(targets) != 1:
            return False, None
        mapping[fi] = targets.pop()
    return True, mapping


def refinement_table(
    fine: ComponentPartition, coarse: ComponentPartition, var: str
) -> dict:
    """For each coarse class, its fine classes in deterministic rank order.

    Ranks follow the alphabet order of the smallest member symbol of ``var``
    in each fine class.
    """
    ok, mapping = check_nesting(fine, coarse, var)
    if not ok:
        raise NestingError(f"classes of {var!r} do not nest")
    rank = {s: i for i, s in enumerate(fine.alphabets[var])}
    by_coarse: dict = {}
    for fi, ci in mapping.items():
        by_coarse.setdefault(ci, []).append(fi)
    return {
        ci: tuple(sorted(fis, key=lambda fi: rank[fine.components[fi].members[var][0]]))
        for ci, fis in by_coarse.items()
    }


def refinement_index(
    fine: ComponentPartition, coarse: ComponentPartition, var: str, symbol
):
    """(coarse index, rank of the symbol's fine class within it)."""
    table = refinement_table(fine, coarse, var)
    fi = class_of(fine, var, symbol)
    ci = class_of(coarse, var, symbol)
    return ci, table[ci].index(fi)


def partition_to_dict(partition: ComponentPartition) -> dict:
    return {
        "variables": list(partition.variables),
        "entropy_bits": gk_entropy(partition),
        "components": [
            {
                "index": i,
                "weight": comp.weight,
                "members": {v: list(s) for v, s in comp.members.items()},
            }
            for i, comp in enumerate(partition.components)
        ],
    }
