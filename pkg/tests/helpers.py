"""Shared generators and independent oracles for the test suite.

Oracles deliberately avoid the library's code paths: components come from a
breadth-first path search over support tuples (the library uses union-find),
entropies from direct summation over explicitly built distributions, cut
values from exhaustive enumeration of node bipartitions, and the common
information from an exhaustive search over consistent labelings.
"""

from __future__ import annotations

from itertools import combinations, product
from math import log2

import numpy as np

from gknet import JointPmf, Network

# frozen oracle values for the two-block joint table (fixtures/pmf_two_blocks.json),
# computed by direct summation and path search before the main build
WORKED = {
    "H_XY": 2.584962500721156,
    "H_X": 1.5545851693377994,
    "H_Y": 1.9591479170272448,
    "H_X_given_Y": 0.6258145836939113,
    "H_Y_given_X": 1.0303773313833566,
    "I_XY": 0.9287705856438881,
    "H_K": 0.9182958340544896,
    "H_X_given_K": 0.63628933528331,
    "H_Y_given_K": 1.0408520829727552,
    "SUM3": 2.5954372523105547,  # H(X|K) + H(Y|K) + H(K)
}


def oracle_entropy(probs) -> float:
    return -sum(p * log2(p) for p in probs if p > 0.0)


def oracle_components(support, k: int):
    """Partition of k-ary support tuples by path connectivity.

    Two tuples are adjacent when they agree on some coordinate; this is the
    hyperedge connectivity of the multipartite support graph.
    """
    support = list(support)
    comps = []
    seen = set()
    for start in support:
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            t = stack.pop()
            for u in support:
                if u not in comp and any(t[i] == u[i] for i in range(k)):
                    comp.add(u)
                    stack.append(u)
        seen |= comp
        comps.append(comp)
    return comps


def oracle_pair_quantities(pmf: JointPmf):
    """Entropies, component weights, and per-class conditionals by summation."""
    x, y = pmf.variables
    comps = oracle_components(pmf.support, 2)
    weights = [sum(pmf.mass[t] for t in c) for c in comps]
    hx_k = 0.0
    hy_k = 0.0
    for c, w in zip(comps, weights):
        condx: dict = {}
        condy: dict = {}
        for (a, b) in c:
            condx[a] = condx.get(a, 0.0) + pmf.mass[(a, b)] / w
            condy[b] = condy.get(b, 0.0) + pmf.mass[(a, b)] / w
        hx_k += w * oracle_entropy(condx.values())
        hy_k += w * oracle_entropy(condy.values())
    return {
        "components": comps,
        "weights": weights,
        "H_K": oracle_entropy(weights),
        "H_X_given_K": hx_k,
        "H_Y_given_K": hy_k,
    }


def oracle_min_cut(net: Network, sources, sink: str) -> int:
    """Minimum cut by exhaustive enumeration of node bipartitions."""
    sources = set(sources)
    others = [v for v in net.nodes if v not in sources and v != sink]
    best = None
    for r in range(len(others) + 1):
        for extra in combinations(others, r):
            side = sources | set(extra)
            val = sum(e.cap for e in net.edges if e.tail in side and e.head not in side)
            best = val if best is None else min(best, val)
    return best


def oracle_gk_variational(pmf: JointPmf) -> float:
    """Max H(U) over all deterministic U = f(X) = g(Y) consistent on support.

    Exhaustive over labelings of the X support with range size at most
    min(|X support|, |Y support|); g is forced by consistency.
    """
    x, y = pmf.variables
    xs = sorted({t[0] for t in pmf.support}, key=lambda s: pmf.symbol_rank(x, s))
    ys = sorted({t[1] for t in pmf.support}, key=lambda s: pmf.symbol_rank(y, s))
    r = min(len(xs), len(ys))
    marg_x = pmf.marginal_distribution(x)
    best = 0.0
    for labels in product(range(r), repeat=len(xs)):
        f = dict(zip(xs, labels))
        g: dict = {}
        ok = True
        for (a, b) in pmf.support:
            if g.setdefault(b, f[a]) != f[a]:
                ok = False
                break
        if not ok:
            continue
        dist: dict = {}
        for a, p in marg_x.items():
            dist[f[a]] = dist.get(f[a], 0.0) + p
        best = max(best, oracle_entropy(dist.values()))
    return best


def symbols(n: int) -> tuple:
    return tuple(str(i) for i in range(n))


def random_pmf(rng, nx: int = 4, ny: int = 4, density: float = 0.6,
               variables=("X", "Y")) -> JointPmf:
    """Random two-variable pmf with a random support pattern."""
    while True:
        mask = rng.random((nx, ny)) < density
        if not mask.any():
            continue
        masses = rng.random((nx, ny)) + 0.05
        masses[~mask] = 0.0
        total = masses.sum()
        mass = {
            (str(i), str(j)): masses[i, j] / total
            for i in range(nx)
            for j in range(ny)
            if mask[i, j]
        }
        return JointPmf(
            variables, {variables[0]: symbols(nx), variables[1]: symbols(ny)}, mass
        )


def random_ci_pmf(rng, blocks: int = 3, block_size: int = 2) -> JointPmf:
    """Pmf that is conditionally independent given its component index."""
    weights = rng.random(blocks) + 0.2
    weights /= weights.sum()
    mass = {}
    for b in range(blocks):
        px = rng.random(block_size) + 0.1
        px /= px.sum()
        py = rng.random(block_size) + 0.1
        py /= py.sum()
        for i in range(block_size):
            for j in range(block_size):
                xs = str(b * block_size + i)
                ys = str(b * block_size + j)
                mass[(xs, ys)] = weights[b] * px[i] * py[j]
    n = blocks * block_size
    return JointPmf(("X", "Y"), {"X": symbols(n), "Y": symbols(n)}, mass)


def random_channel(rng, n_in: int, n_out: int, density: float = 0.5):
    rows = []
    for _ in range(n_in):
        mask = rng.random(n_out) < density
        if not mask.any():
            mask[rng.integers(n_out)] = True
        w = (rng.random(n_out) + 0.05) * mask
        rows.append(w / w.sum())
    return np.array(rows)


def random_chain_pmf(rng, nx: int = 4, ny: int = 4, nz: int = 4,
                     density: float = 0.5,
                     variables=("X", "Y1", "Y2")) -> JointPmf:
    """Joint pmf built multiplicatively as p(x) p(y|x) p(z|y)."""
    px = rng.random(nx) + 0.1
    px /= px.sum()
    py_x = random_channel(rng, nx, ny, density)
    pz_y = random_channel(rng, ny, nz, density)
    mass = {}
    for i in range(nx):
        for j in range(ny):
            if py_x[i, j] == 0.0:
                continue
            for k in range(nz):
                if pz_y[j, k] == 0.0:
                    continue
                mass[(str(i), str(j), str(k))] = px[i] * py_x[i, j] * pz_y[j, k]
    return JointPmf(
        variables,
        {variables[0]: symbols(nx), variables[1]: symbols(ny), variables[2]: symbols(nz)},
        mass,
    )


def random_two_source_network(rng) -> Network:
    """Small random layered DAG with two sources and one or two terminals."""
    while True:
        n_mid = int(rng.integers(0, 4))
        n_term = int(rng.integers(1, 3))
        mids = [f"m{i}" for i in range(n_mid)]
        terms = [f"t{i}" for i in range(n_term)]
        layers = [["sx", "sy"], mids, terms]
        edges = []
        for li in range(len(layers) - 1):
            for u in layers[li]:
                for w in [w for lj in layers[li + 1 :] for w in lj]:
                    if rng.random() < 0.55:
                        cap = int(rng.integers(0, 4))
                        if cap:
                            edges.append((u, w, cap))
        try:
            return Network(
                tuple(n for layer in layers for n in layer),
                tuple(edges),
                {"X": "sx", "Y": "sy"},
                tuple(terms),
            )
        except ValueError:
            continue
