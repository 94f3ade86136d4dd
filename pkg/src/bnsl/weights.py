"""Pairwise variable weights, weighted graphs and elbow truncation.

Seven weight functions are supported on discrete data, all derived from
empirical mutual information or Pearson correlation on integer state
codes:

    MI          plain mutual information in nats
    MI_plus     2*MI(X,Y) / (H(X) + H(Y))
    MI_sqrt     MI(X,Y) / sqrt(H(X) * H(Y))
    MI_pr       MI(X,Y) / (sqrt(PR(X)) * sqrt(PR(Y)))   PR from the MI graph
    MI_sn       MI standardized over all pair weights (zero mean, unit std)
    Pearson     |rho| on integer state codes
    Pearson_sn  |rho| standardized over all pair weights
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple

import numpy as np

from .data import DiscreteDataset
from .errors import InvalidInput

WEIGHT_FUNCTIONS = ("MI", "MI_plus", "MI_sqrt", "MI_pr", "MI_sn", "Pearson", "Pearson_sn")


class WeightedGraph:
    """Undirected weighted graph on nodes ``0..n-1``; absent pair = no edge."""

    def __init__(self, n: int, weights: dict[tuple[int, int], float] | None = None):
        if n < 0:
            raise InvalidInput("n must be >= 0")
        self.n = n
        self._w: dict[tuple[int, int], float] = {}
        self._adj: dict[int, dict[int, float]] = {i: {} for i in range(n)}
        for (i, j), w in (weights or {}).items():
            self.add_edge(i, j, w)

    def add_edge(self, i: int, j: int, w: float) -> None:
        i, j = (i, j) if i < j else (j, i)
        if i == j or not (0 <= i < self.n and 0 <= j < self.n):
            raise InvalidInput(f"bad edge ({i}, {j}) for n={self.n}")
        w = float(w)
        if not math.isfinite(w):
            raise InvalidInput(f"non-finite weight on ({i}, {j})")
        self._w[(i, j)] = w
        self._adj[i][j] = w
        self._adj[j][i] = w

    @property
    def m(self) -> int:
        return len(self._w)

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self._w)

    def weight(self, i: int, j: int) -> float:
        return self._w[(i, j) if i < j else (j, i)]

    def has_edge(self, i: int, j: int) -> bool:
        return ((i, j) if i < j else (j, i)) in self._w

    def neighbors(self, i: int) -> list[int]:
        return sorted(self._adj[i])

    def adjacency(self, i: int) -> dict[int, float]:
        return self._adj[i]

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    def subgraph(self, nodes: Iterable[int]) -> "WeightedGraph":
        """Induced subgraph; node indices are preserved (n stays the same)."""
        keep = set(nodes)
        g = WeightedGraph(self.n)
        for (i, j), w in self._w.items():
            if i in keep and j in keep:
                g.add_edge(i, j, w)
        return g

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self.n == other.n and self._w == other._w


def entropy(counts) -> float:
    """Shannon entropy in nats of a nonnegative count vector."""
    c = np.asarray(counts, dtype=np.float64).ravel()
    if c.size == 0 or (c < 0).any() or c.sum() <= 0:
        raise InvalidInput("counts must be nonnegative with a positive total")
    p = c[c > 0] / c.sum()
    return float(-(p * np.log(p)).sum())


def mutual_information(data: DiscreteDataset, i: int, j: int) -> float:
    """Empirical MI in nats between columns i and j; zero cells are skipped."""
    if data.n_rows == 0:
        raise InvalidInput("dataset is empty")
    ri, rj = data.cardinalities[i], data.cardinalities[j]
    joint = np.bincount(data.column(i).astype(np.int64) * rj + data.column(j),
                        minlength=ri * rj).reshape(ri, rj).astype(np.float64)
    return _mi_from_joint(joint)


def _mi_from_joint(joint: np.ndarray) -> float:
    n = joint.sum()
    pi = joint.sum(axis=1) / n
    pj = joint.sum(axis=0) / n
    mask = joint > 0
    pij = joint[mask] / n
    outer = np.outer(pi, pj)[mask]
    return float(max((pij * np.log(pij / outer)).sum(), 0.0))


def pagerank(g: WeightedGraph, damping: float = 0.85, tol: float = 1e-10) -> np.ndarray:
    """Weighted PageRank by power iteration; dangling mass spreads uniformly.

    Scores are positive and sum to one; the result is invariant to a uniform
    rescaling of all edge weights.
    """
    n = g.n
    if n == 0:
        raise InvalidInput("empty graph")
    if g.m:
        ii, jj, ww = (np.array(t) for t in zip(*((i, j, w) for (i, j), w in g._w.items())))
    else:
        ii = jj = np.zeros(0, dtype=np.int64)
        ww = np.zeros(0)
    strength = np.zeros(n)
    np.add.at(strength, ii, ww)
    np.add.at(strength, jj, ww)
    dangling = strength <= 0
    safe = np.where(dangling, 1.0, strength)
    v = np.full(n, 1.0 / n)
    while True:
        nxt = np.full(n, (1.0 - damping) / n)
        nxt += damping * v[dangling].sum() / n
        np.add.at(nxt, jj, damping * v[ii] * ww / safe[ii])
        np.add.at(nxt, ii, damping * v[jj] * ww / safe[jj])
        if np.abs(nxt - v).sum() < tol:
            return nxt / nxt.sum()
        v = nxt


def weight_matrix(data: DiscreteDataset, fn: str) -> WeightedGraph:
    """All-pairs weights under one of the seven functions.

    The returned graph carries every pair (i, j), i < j.  Functions with an
    entropy denominator reject zero-entropy variables; the standardized
    variants reject an all-equal weight multiset.
    """
    if fn not in WEIGHT_FUNCTIONS:
        raise InvalidInput(f"unknown weight function '{fn}'")
    n = data.n_vars
    if n < 2:
        raise InvalidInput("need at least 2 variables")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    if fn in ("Pearson", "Pearson_sn"):
        with np.errstate(invalid="ignore", divide="ignore"):
            corr = np.corrcoef(data.samples.T.astype(np.float64))
        corr = np.nan_to_num(corr, nan=0.0)  # constant columns carry no signal
        w = {(i, j): abs(float(corr[i, j])) for i, j in pairs}
        if fn == "Pearson_sn":
            w = _standardize(w)
        return WeightedGraph(n, w)

    mi = {(i, j): mutual_information(data, i, j) for i, j in pairs}
    if fn == "MI":
        return WeightedGraph(n, mi)
    if fn == "MI_sn":
        return WeightedGraph(n, _standardize(mi))
    if fn == "MI_pr":
        pr = pagerank(WeightedGraph(n, mi))
        w = {(i, j): v / math.sqrt(pr[i] * pr[j]) for (i, j), v in mi.items()}
        return WeightedGraph(n, w)

    h = np.array([entropy(np.bincount(data.column(i), minlength=data.cardinalities[i]))
                  for i in range(n)])
    for i in range(n):
        if h[i] <= 0:
            raise InvalidInput(
                f"variable '{data.names[i]}' has zero entropy; '{fn}' is undefined")
    if fn == "MI_plus":
        w = {(i, j): 2.0 * v / (h[i] + h[j]) for (i, j), v in mi.items()}
    else:  # MI_sqrt
        w = {(i, j): v / math.sqrt(h[i] * h[j]) for (i, j), v in mi.items()}
    return WeightedGraph(n, w)


def _standardize(w: dict[tuple[int, int], float]) -> dict[tuple[int, int], float]:
    vals = np.array(list(w.values()))
    mu, sd = float(vals.mean()), float(vals.std())
    if sd == 0:
        raise InvalidInput("all pair weights are equal; standardization is undefined")
    return {k: (v - mu) / sd for k, v in w.items()}


class ElbowResult(NamedTuple):
    threshold: float
    pruned: WeightedGraph
    degenerate: bool


def elbow_truncate(g: WeightedGraph) -> ElbowResult:
    """Keep the edges at or above the elbow of the sorted weight curve.

    Weights are sorted descending; the elbow is the point of maximum
    perpendicular distance to the chord joining the first and last point
    (ties resolved toward the first index).  Edges with weight >= the elbow
    weight survive.  If all weights are equal, or the cut would keep every
    edge anyway, the graph is returned unchanged and flagged degenerate.
    """
    if g.m == 0:
        raise InvalidInput("graph has no edges")
    ws = np.sort(np.array([w for w in g._w.values()]))[::-1]
    m = ws.size
    if m == 1 or ws[0] == ws[-1]:
        return ElbowResult(float(ws[-1]), g, True)
    x = np.arange(m, dtype=np.float64)
    dx, dy = float(m - 1), float(ws[-1] - ws[0])
    # |cross| / |chord| = point-to-line distance from (x_i, w_i) to the chord
    dist = np.abs(dx * (ws - ws[0]) - dy * x) / math.hypot(dx, dy)
    threshold = float(ws[int(dist.argmax())])
    kept = {e: w for e, w in g._w.items() if w >= threshold}
    if len(kept) == g.m:
        return ElbowResult(threshold, g, True)
    return ElbowResult(threshold, WeightedGraph(g.n, kept), False)


def save_weighted_graph(g: WeightedGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"nodes\t{g.n}\n")
        for i, j in g.edges():
            fh.write(f"{i}\t{j}\t{g.weight(i, j)!r}\n")


def load_weighted_graph(path) -> WeightedGraph:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2 or header[0] != "nodes":
            raise InvalidInput("weighted graph file needs a 'nodes <n>' header")
        g = WeightedGraph(int(header[1]))
        for line in fh:
            if not line.strip():
                continue
            i, j, w = line.split()
            g.add_edge(int(i), int(j), float(w))
    return g
