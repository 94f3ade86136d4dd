"""Overlapping community detection and second-order consensus partitions.

Communities are found by clustering *edges*: edges sharing a node are
agglomerated by single linkage on the Tanimoto similarity of their outer
endpoints' weighted inclusive neighborhoods, the dendrogram is cut at the
level of maximum average partition density, and each edge cluster projects
to the union of its endpoints.  A node then belongs to every community one
of its edges landed in, which is what makes the partitions overlapping.

A consensus partition re-runs this under several weight functions, stacks
each node's community memberships into a partition support matrix, links
node pairs whose symmetrized co-occurrence across those rows clears a
threshold, and clusters that second-order network the same way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .data import DiscreteDataset
from .errors import InvalidInput
from .weights import WEIGHT_FUNCTIONS, WeightedGraph, elbow_truncate, weight_matrix


@dataclass(frozen=True)
class Partition:
    """Overlapping communities over nodes ``0..n-1``; order is preserved."""

    n: int
    communities: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        comms = tuple(tuple(sorted(set(int(x) for x in c))) for c in self.communities)
        object.__setattr__(self, "communities", comms)
        seen = set()
        covered = set()
        for c in comms:
            if not c:
                raise InvalidInput("empty community")
            if c[0] < 0 or c[-1] >= self.n:
                raise InvalidInput(f"community {c} outside 0..{self.n - 1}")
            if c in seen:
                raise InvalidInput(f"duplicate community {c}")
            seen.add(c)
            covered.update(c)
        if covered != set(range(self.n)):
            raise InvalidInput("communities must cover every node")

    def sizes(self) -> list[int]:
        return [len(c) for c in self.communities]

    def communities_of(self, v: int) -> list[int]:
        return [k for k, c in enumerate(self.communities) if v in c]


@dataclass(frozen=True)
class PartitionSupportMatrix:
    """Stacked binary membership rows of one node across several partitions.

    Row order is (partition order, community order within the partition);
    only communities containing the node contribute a row, so column
    ``node`` is all ones.
    """

    node: int
    n: int
    rows: np.ndarray = field(repr=False)

    def __post_init__(self):
        r = np.asarray(self.rows, dtype=np.uint8)
        if r.ndim != 2 or r.shape[1] != self.n or r.shape[0] == 0:
            raise InvalidInput("rows must be a nonempty (R, n) matrix")
        if not (r[:, self.node] == 1).all():
            raise InvalidInput("every row must contain the node itself")
        r.flags.writeable = False
        object.__setattr__(self, "rows", r)


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def _tanimoto(a: dict[int, float], b: dict[int, float]) -> float:
    dot = sum(w * b[k] for k, w in a.items() if k in b)
    na = sum(w * w for w in a.values())
    nb = sum(w * w for w in b.values())
    den = na + nb - dot
    return dot / den if den > 0 else 0.0


def _partition_density(clusters: Sequence[tuple[int, set[int]]], m_total: int) -> float:
    d = 0.0
    for mc, nodes in clusters:
        nc = len(nodes)
        if nc > 2:
            d += mc * (mc - nc + 1) / ((nc - 2) * (nc - 1))
    return 2.0 * d / m_total


def link_communities(g: WeightedGraph) -> Partition:
    """Edge clustering cut at maximum partition density.

    Deterministic: edges are taken in lexicographic order and similarity
    ties resolve the same way.  Isolated nodes come back as singleton
    communities; an edgeless graph is all singletons.
    """
    edges = g.edges()
    m = len(edges)
    isolated = [v for v in range(g.n) if g.degree(v) == 0]
    if m == 0:
        return Partition(g.n, tuple((v,) for v in range(g.n)))

    # weighted inclusive neighborhood of each endpoint
    incl: dict[int, dict[int, float]] = {}
    for v in range(g.n):
        adj = g.adjacency(v)
        if adj:
            vec = dict(adj)
            vec[v] = sum(adj.values()) / len(adj)
            incl[v] = vec

    eindex = {e: k for k, e in enumerate(edges)}
    incident: dict[int, list[tuple[int, int]]] = {v: [] for v in range(g.n)}
    for e in edges:
        incident[e[0]].append(e)
        incident[e[1]].append(e)

    sims = []
    for k in range(g.n):
        inc = incident[k]
        for a in range(len(inc)):
            for b in range(a + 1, len(inc)):
                e1, e2 = inc[a], inc[b]
                u = e1[0] if e1[1] == k else e1[1]
                v = e2[0] if e2[1] == k else e2[1]
                sims.append((-_tanimoto(incl[u], incl[v]), e1, e2))
    sims.sort()

    # group equal-similarity merges into levels, then scan for the best cut
    levels: list[list[tuple[int, int]]] = []
    for s, e1, e2 in sims:
        if not levels or s != prev:
            levels.append([])
            prev = s
        levels[-1].append((eindex[e1], eindex[e2]))

    uf = _UnionFind(m)
    stats: dict[int, tuple[int, set[int]]] = {
        k: (1, {edges[k][0], edges[k][1]}) for k in range(m)}
    best_density, best_level = 0.0, 0
    for lvl, pairs in enumerate(levels, start=1):
        for a, b in pairs:
            ra, rb = uf.find(a), uf.find(b)
            if ra == rb:
                continue
            uf.union(ra, rb)
            ma, sa = stats.pop(ra)
            mb, sb = stats.pop(rb)
            stats[uf.find(ra)] = (ma + mb, sa | sb)
        d = _partition_density(list(stats.values()), m)
        if d > best_density:
            best_density, best_level = d, lvl

    uf = _UnionFind(m)
    for pairs in levels[:best_level]:
        for a, b in pairs:
            uf.union(a, b)
    groups: dict[int, set[int]] = {}
    for k, (i, j) in enumerate(edges):
        groups.setdefault(uf.find(k), set()).update((i, j))

    comms = {tuple(sorted(s)) for s in groups.values()}
    comms.update((v,) for v in isolated)
    return Partition(g.n, tuple(sorted(comms)))


def build_psm(partitions: Sequence[Partition], v: int) -> PartitionSupportMatrix:
    """Stack the membership rows of node v across the given partitions."""
    if not partitions:
        raise InvalidInput("need at least one partition")
    n = partitions[0].n
    if any(p.n != n for p in partitions):
        raise InvalidInput("partitions must share one node universe")
    if not (0 <= v < n):
        raise InvalidInput(f"node {v} outside 0..{n - 1}")
    rows = []
    for p in partitions:
        for c in p.communities:
            if v in c:
                row = np.zeros(n, dtype=np.uint8)
                row[list(c)] = 1
                rows.append(row)
    return PartitionSupportMatrix(v, n, np.stack(rows))


def co_occurrence(psm: PartitionSupportMatrix, u: int) -> float:
    """Fraction of the node's membership rows that also contain u."""
    if not (0 <= u < psm.n):
        raise InvalidInput(f"node {u} outside 0..{psm.n - 1}")
    return float(psm.rows[:, u].mean())


def second_order_network(psms: Sequence[PartitionSupportMatrix],
                         t_co: float = 0.5) -> WeightedGraph:
    """Symmetrized co-occurrence graph over all nodes.

    Edge weight is (c(u->v) + c(v->u)) / 2 where c(u->v) is u's
    co-occurrence fraction with v; pairs below ``t_co`` (or never
    co-grouped) are absent.
    """
    n = len(psms)
    for v, psm in enumerate(psms):
        if psm.node != v or psm.n != n:
            raise InvalidInput("psms must be indexed by node over a shared universe")
    frac = np.stack([psm.rows.mean(axis=0) for psm in psms])
    g = WeightedGraph(n)
    for u in range(n):
        for v in range(u + 1, n):
            w = (frac[u, v] + frac[v, u]) / 2.0
            if w > 0.0 and w >= t_co:
                g.add_edge(u, v, w)
    return g


def consensus_partition(data: DiscreteDataset,
                        fns: Sequence[str] = WEIGHT_FUNCTIONS,
                        t_co: float = 0.5,
                        max_comm: int = 25) -> Partition:
    """Second-order consensus partition of the dataset's variables.

    One overlapping partition is built per weight function (all-pairs
    weights, elbow truncation, link communities); their agreement forms the
    second-order network, which is clustered the same way.  Communities
    larger than ``max_comm`` are re-partitioned recursively on their own
    columns; if that stalls, the weakest edges of the community's MI
    subgraph are dropped until it splits.
    """
    if not fns:
        raise InvalidInput("need at least one weight function")
    part = _consensus_once(data, fns, t_co)
    out: list[tuple[int, ...]] = []
    for c in part.communities:
        out.extend(_capped(data, c, fns, t_co, max_comm, depth=2))
    return Partition(data.n_vars, tuple(sorted(set(out))))


def _consensus_once(data: DiscreteDataset, fns: Sequence[str], t_co: float) -> Partition:
    partitions = []
    for fn in fns:
        pruned = elbow_truncate(weight_matrix(data, fn)).pruned
        partitions.append(link_communities(pruned))
    psms = [build_psm(partitions, v) for v in range(data.n_vars)]
    return link_communities(second_order_network(psms, t_co))


def _capped(data: DiscreteDataset, community: tuple[int, ...], fns: Sequence[str],
            t_co: float, max_comm: int, depth: int) -> list[tuple[int, ...]]:
    if len(community) <= max_comm:
        return [community]
    nodes = list(community)
    sub = data.select(nodes)
    if depth > 0:
        try:
            subpart = _consensus_once(sub, fns, t_co)
        except InvalidInput:
            subpart = None  # degenerate sub-data (e.g. equal weights); fall through
        if subpart is not None and len(subpart.communities) > 1:
            out: list[tuple[int, ...]] = []
            for c in subpart.communities:
                mapped = tuple(nodes[k] for k in c)
                out.extend(_capped(data, mapped, fns, t_co, max_comm, depth - 1))
            return out
    return [tuple(nodes[k] for k in c) for c in _tighten_split(sub, max_comm)]


def _tighten_split(sub: DiscreteDataset, max_comm: int) -> list[tuple[int, ...]]:
    """Split by dropping the weakest MI edges until every part fits."""
    g = weight_matrix(sub, "MI")
    while True:
        part = link_communities(g)
        if all(len(c) <= max_comm for c in part.communities):
            return list(part.communities)
        ranked = sorted(g.edges(), key=lambda e: (g.weight(*e), e))
        drop = max(1, len(ranked) // 10)
        kept = {e: g.weight(*e) for e in ranked[drop:]}
        if not kept:
            nodes = list(range(sub.n_vars))
            return [tuple(nodes[k:k + max_comm]) for k in range(0, len(nodes), max_comm)]
        g = WeightedGraph(g.n, kept)


def save_partition(p: Partition, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# nodes {p.n}\n")
        for c in p.communities:
            fh.write(" ".join(str(v) for v in c) + "\n")


def load_partition(path) -> Partition:
    n = None
    comms = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# nodes"):
                n = int(line.split()[2])
                continue
            line = line.split("#", 1)[0].strip()
            if line:
                comms.append(tuple(int(t) for t in line.split()))
    if n is None:
        n = 1 + max(v for c in comms for v in c) if comms else 0
    return Partition(n, tuple(comms))
