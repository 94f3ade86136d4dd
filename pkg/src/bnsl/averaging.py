"""Bayesian model averaging over node orders with BDeu family scores.

Conditional on a total order of the nodes, parent sets of each child are
subsets of its predecessors, so the posterior over structures factorizes
per child and edge posteriors have the closed form

    P(j -> i | D, order) = sum_{U ni j} exp(score(i, U)) / sum_U exp(score(i, U))

with U ranging over predecessor subsets up to ``max_parents``.  The order
itself is integrated out by Metropolis-Hastings over transpositions (or
exactly, for small node sets, by enumerating every order weighted by its
marginal likelihood).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from .data import DiscreteDataset
from .errors import BudgetExceeded, FamilyTooLarge, InvalidInput

DEFAULT_MAX_CELLS = 2 ** 22
DEFAULT_SUBSET_BUDGET = 2 ** 20


@dataclass(frozen=True)
class EdgePosterior:
    """Directed edge posteriors over ``nodes``; entry [a, b] is P(a -> b)."""

    nodes: tuple[int, ...]
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        k = len(self.nodes)
        if m.shape != (k, k):
            raise InvalidInput(f"matrix must be ({k}, {k})")
        if (m < -1e-12).any() or (m > 1 + 1e-12).any() or np.diagonal(m).any():
            raise InvalidInput("entries must lie in [0, 1] with a zero diagonal")
        m = np.clip(m, 0.0, 1.0)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "nodes", tuple(int(v) for v in self.nodes))


@dataclass(frozen=True)
class LocalStructure:
    """A directed structure over a node subset, with per-edge support."""

    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    support: dict[tuple[int, int], float] = field(default_factory=dict)
    provenance: str | None = None

    def __post_init__(self):
        nodes = tuple(sorted(set(int(v) for v in self.nodes)))
        object.__setattr__(self, "nodes", nodes)
        ns = set(nodes)
        edges = tuple(sorted((int(a), int(b)) for a, b in self.edges))
        for a, b in edges:
            if a == b or a not in ns or b not in ns:
                raise InvalidInput(f"edge ({a}, {b}) outside the node set")
        if len(set(edges)) != len(edges):
            raise InvalidInput("duplicate edges")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "support", dict(self.support))

    def skeleton(self) -> set[frozenset[int]]:
        return {frozenset(e) for e in self.edges}


class ScoreCache:
    """Memoizes BDeu family scores by (child, parent set) on one dataset."""

    def __init__(self, data: DiscreteDataset, ess: float = 10.0,
                 max_cells: int = DEFAULT_MAX_CELLS):
        if ess <= 0:
            raise InvalidInput("ess must be positive")
        self.data = data
        self.ess = float(ess)
        self.max_cells = int(max_cells)
        self._scores: dict[tuple[int, tuple[int, ...]], float] = {}

    def family_score(self, child: int, parents) -> float:
        key = (child, tuple(sorted(parents)))
        got = self._scores.get(key)
        if got is None:
            got = bdeu_family_score(self.data, child, key[1], self.ess,
                                    max_cells=self.max_cells)
            self._scores[key] = got
        return got

    def matches(self, data: DiscreteDataset, ess: float) -> bool:
        return self.data is data and self.ess == float(ess)


def bdeu_family_score(data: DiscreteDataset, child: int, parents,
                      ess: float = 10.0, cache: ScoreCache | None = None,
                      max_cells: int = DEFAULT_MAX_CELLS) -> float:
    """BDeu log marginal likelihood of one child given a parent set.

    Pseudo-counts are ``ess / (q * r)`` per cell, q the number of parent
    configurations and r the child cardinality.  An empty dataset scores 0.
    """
    parents = tuple(sorted(set(int(p) for p in parents)))
    if child in parents:
        raise InvalidInput("child cannot be its own parent")
    if cache is not None:
        if not cache.matches(data, ess):
            raise InvalidInput("cache was built for different data or ess")
        return cache.family_score(child, parents)
    if ess <= 0:
        raise InvalidInput("ess must be positive")
    cards = data.cardinalities
    r = cards[child]
    q = 1
    for p in parents:
        q *= cards[p]
    if q * r > max_cells:
        raise FamilyTooLarge(
            f"family ({child} | {parents}) needs {q * r} count cells")
    cfg = np.zeros(data.n_rows, dtype=np.int64)
    for p in parents:
        cfg = cfg * cards[p] + data.column(p)
    counts = np.bincount(cfg * r + data.column(child), minlength=q * r)
    counts = counts.reshape(q, r).astype(np.float64)
    a_jk = ess / (q * r)
    a_j = ess / q
    nj = counts.sum(axis=1)
    score = (gammaln(a_j) - gammaln(a_j + nj)).sum()
    score += (gammaln(a_jk + counts) - gammaln(a_jk)).sum()
    return float(score)


def _child_stats(cache: ScoreCache, child: int, preds: frozenset[int],
                 max_parents: int, budget: int,
                 memo: dict | None = None) -> tuple[float, dict[int, float]]:
    """Log normalizer and per-parent inclusion log-sums for one child.

    Enumerates every predecessor subset up to ``max_parents`` once; results
    are memoized by (child, predecessor set) when ``memo`` is given.
    """
    key = (child, preds)
    if memo is not None and key in memo:
        return memo[key]
    ps = sorted(preds)
    total = sum(math.comb(len(ps), s) for s in range(0, max_parents + 1)
                if s <= len(ps))
    if total > budget:
        raise BudgetExceeded(
            f"child {child}: {total} parent sets exceed the budget of {budget}")
    scores = []
    incl: dict[int, list[float]] = {j: [] for j in ps}
    for size in range(0, min(max_parents, len(ps)) + 1):
        for u in itertools.combinations(ps, size):
            s = cache.family_score(child, u)
            scores.append(s)
            for j in u:
                incl[j].append(s)
    logz = float(logsumexp(scores))
    by_parent = {j: float(logsumexp(v)) if v else -np.inf for j, v in incl.items()}
    out = (logz, by_parent)
    if memo is not None:
        memo[key] = out
    return out


def _resolve(data, nodes, ess, cache) -> tuple[tuple[int, ...], ScoreCache]:
    if nodes is None:
        nodes = tuple(range(data.n_vars))
    else:
        nodes = tuple(int(v) for v in nodes)
        if len(set(nodes)) != len(nodes):
            raise InvalidInput("duplicate nodes")
    if cache is None:
        cache = ScoreCache(data, ess)
    elif not cache.matches(data, ess):
        raise InvalidInput("cache was built for different data or ess")
    return nodes, cache


def feature_posterior_given_order(data: DiscreteDataset, order,
                                  max_parents: int = 3, ess: float = 10.0,
                                  cache: ScoreCache | None = None,
                                  budget: int = DEFAULT_SUBSET_BUDGET) -> EdgePosterior:
    """Exact edge posteriors conditional on one total order.

    ``order`` lists node indices from first (no predecessors) to last; the
    posterior of j -> i is zero unless j precedes i.
    """
    order = tuple(int(v) for v in order)
    _, cache = _resolve(data, order, ess, cache)
    nodes = tuple(sorted(order))
    pos = {v: a for a, v in enumerate(nodes)}
    mat = np.zeros((len(nodes), len(nodes)))
    for p, child in enumerate(order):
        preds = frozenset(order[:p])
        logz, by_parent = _child_stats(cache, child, preds, max_parents, budget)
        for j, lj in by_parent.items():
            mat[pos[j], pos[child]] = math.exp(lj - logz)
    return EdgePosterior(nodes, mat)


def order_log_marginal(data: DiscreteDataset, order, max_parents: int = 3,
                       ess: float = 10.0, cache: ScoreCache | None = None,
                       budget: int = DEFAULT_SUBSET_BUDGET) -> float:
    """log P(D | order): per-child log-sum over admissible parent sets."""
    order = tuple(int(v) for v in order)
    _, cache = _resolve(data, order, ess, cache)
    total = 0.0
    for p, child in enumerate(order):
        logz, _ = _child_stats(cache, child, frozenset(order[:p]), max_parents, budget)
        total += logz
    return total


def exact_order_average(data: DiscreteDataset, nodes=None, max_parents: int = 3,
                        ess: float = 10.0, cache: ScoreCache | None = None,
                        budget: int = DEFAULT_SUBSET_BUDGET) -> EdgePosterior:
    """Average edge posteriors over every order, weighted by exp(marginal).

    Feasible only for small node sets (all m! orders are enumerated).
    """
    nodes, cache = _resolve(data, nodes, ess, cache)
    if len(nodes) > 8:
        raise InvalidInput("exact averaging is limited to 8 nodes")
    memo: dict = {}
    logw = []
    mats = []
    for perm in itertools.permutations(sorted(nodes)):
        total = 0.0
        mat = np.zeros((len(nodes), len(nodes)))
        pos = {v: a for a, v in enumerate(sorted(nodes))}
        for p, child in enumerate(perm):
            logz, by_parent = _child_stats(cache, child, frozenset(perm[:p]),
                                           max_parents, budget, memo)
            total += logz
            for j, lj in by_parent.items():
                mat[pos[j], pos[child]] = math.exp(lj - logz)
        logw.append(total)
        mats.append(mat)
    logw = np.array(logw)
    w = np.exp(logw - logsumexp(logw))
    avg = np.tensordot(w, np.stack(mats), axes=1)
    return EdgePosterior(tuple(sorted(nodes)), avg)


def order_mcmc(data: DiscreteDataset, T: int = 100, burn_in: int | None = None,
               thin: int | None = None, max_parents: int = 3, ess: float = 10.0,
               seed: int = 0, nodes=None, cache: ScoreCache | None = None,
               budget: int = DEFAULT_SUBSET_BUDGET) -> EdgePosterior:
    """Metropolis-Hastings over orders; returns the mean edge posterior.

    Proposals transpose two uniformly chosen positions and are accepted
    with min(1, exp(delta log marginal)).  ``burn_in`` defaults to 10 * m
    and ``thin`` to m.  Deterministic for fixed inputs and seed.
    """
    nodes, cache = _resolve(data, nodes, ess, cache)
    m = len(nodes)
    if T < 1:
        raise InvalidInput("T must be >= 1")
    sorted_nodes = tuple(sorted(nodes))
    if m == 1:
        return EdgePosterior(sorted_nodes, np.zeros((1, 1)))
    if burn_in is None:
        burn_in = 10 * m
    if thin is None:
        thin = m
    rng = np.random.default_rng(seed)
    order = [sorted_nodes[k] for k in rng.permutation(m)]
    memo: dict = {}

    def log_marginal(o) -> float:
        total = 0.0
        for p, child in enumerate(o):
            logz, _ = _child_stats(cache, child, frozenset(o[:p]),
                                   max_parents, budget, memo)
            total += logz
        return total

    cur = log_marginal(order)
    acc = np.zeros((m, m))
    kept = 0
    pos = {v: a for a, v in enumerate(sorted_nodes)}
    for step in range(1, burn_in + T * thin + 1):
        a, b = rng.choice(m, size=2, replace=False)
        order[a], order[b] = order[b], order[a]
        new = log_marginal(order)
        if math.log(rng.random()) < new - cur:
            cur = new
        else:
            order[a], order[b] = order[b], order[a]
        if step > burn_in and (step - burn_in) % thin == 0:
            for p, child in enumerate(order):
                logz, by_parent = _child_stats(cache, child, frozenset(order[:p]),
                                               max_parents, budget, memo)
                for j, lj in by_parent.items():
                    acc[pos[j], pos[child]] += math.exp(lj - logz)
            kept += 1
    return EdgePosterior(sorted_nodes, acc / kept)


def threshold_edges(post: EdgePosterior, t_avg: float = 0.5,
                    provenance: str | None = None) -> LocalStructure:
    """Keep directed edges whose posterior exceeds ``t_avg``.

    If both directions clear the threshold only the larger survives; exact
    ties keep the lexicographically smaller direction.
    """
    edges = []
    support = {}
    k = len(post.nodes)
    for a in range(k):
        for b in range(k):
            if a == b or post.matrix[a, b] <= t_avg:
                continue
            fwd, rev = post.matrix[a, b], post.matrix[b, a]
            if rev > t_avg and (rev > fwd or (rev == fwd and (b, a) < (a, b))):
                continue
            e = (post.nodes[a], post.nodes[b])
            edges.append(e)
            support[e] = float(fwd)
    return LocalStructure(post.nodes, tuple(edges), support, provenance)


def greedy_learn(data: DiscreteDataset, nodes=None, max_parents: int = 3,
                 ess: float = 10.0, seed: int = 0,
                 cache: ScoreCache | None = None) -> LocalStructure:
    """Steepest-ascent hill climbing with add/delete/reverse moves.

    The search is fully deterministic (fixed move ordering, ties to the
    lexicographically smallest move); ``seed`` is accepted for interface
    parity with :func:`order_mcmc` and ignored.
    """
    del seed
    nodes, cache = _resolve(data, nodes, ess, cache)
    nodes = tuple(sorted(nodes))
    parents: dict[int, set[int]] = {v: set() for v in nodes}

    def creates_cycle(tail: int, head: int) -> bool:
        # a cycle appears iff tail is reachable from head via existing arcs
        stack, seen = [head], set()
        while stack:
            x = stack.pop()
            if x == tail:
                return True
            for c in nodes:
                if x in parents[c] and c not in seen:
                    seen.add(c)
                    stack.append(c)
        return False

    def family(v: int) -> float:
        return cache.family_score(v, tuple(parents[v]))

    current = {v: family(v) for v in nodes}
    while True:
        best: tuple | None = None

        def consider(delta: float, key: tuple, move: tuple) -> None:
            nonlocal best
            if delta <= 0.0:
                return
            if best is None or delta > best[0] or (delta == best[0] and key < best[1]):
                best = (delta, key, move)

        for u in nodes:
            for v in nodes:
                if u == v:
                    continue
                if u in parents[v]:
                    without = cache.family_score(v, tuple(parents[v] - {u}))
                    consider(without - current[v], (1, u, v), ("del", u, v, without, None))
                    if len(parents[u]) < max_parents:
                        parents[v].discard(u)
                        cyc = creates_cycle(v, u)
                        parents[v].add(u)
                        if not cyc:
                            nu = cache.family_score(u, tuple(parents[u] | {v}))
                            delta = (without - current[v]) + (nu - current[u])
                            consider(delta, (2, u, v), ("rev", u, v, without, nu))
                elif len(parents[v]) < max_parents and not creates_cycle(u, v):
                    nv = cache.family_score(v, tuple(parents[v] | {u}))
                    consider(nv - current[v], (0, u, v), ("add", u, v, nv, None))
        if best is None:
            break
        _, _, (kind, u, v, sv, su) = best
        if kind == "add":
            parents[v].add(u)
            current[v] = sv
        elif kind == "del":
            parents[v].remove(u)
            current[v] = sv
        else:
            parents[v].remove(u)
            parents[u].add(v)
            current[v] = sv
            current[u] = su
    edges = tuple(sorted((u, v) for v in nodes for u in parents[v]))
    return LocalStructure(nodes, edges, {e: 1.0 for e in edges})


@dataclass(frozen=True)
class LearnerConfig:
    """How a node subset gets its local structure learned."""

    learner: str = "modelavg"  # "modelavg" or "greedy"
    max_parents: int = 3
    ess: float = 10.0
    t_avg: float = 0.5
    T: int = 100
    burn_in: int | None = None
    thin: int | None = None
    budget: int = DEFAULT_SUBSET_BUDGET

    def __post_init__(self):
        if self.learner not in ("modelavg", "greedy"):
            raise InvalidInput(f"unknown learner '{self.learner}'")


def learn_structure(data: DiscreteDataset, nodes, config: LearnerConfig,
                    seed: int = 0, cache: ScoreCache | None = None,
                    provenance: str | None = None) -> LocalStructure:
    """Run the configured learner on a node subset."""
    if config.learner == "greedy":
        s = greedy_learn(data, nodes, config.max_parents, config.ess, seed, cache)
    else:
        post = order_mcmc(data, config.T, config.burn_in, config.thin,
                          config.max_parents, config.ess, seed, nodes, cache,
                          config.budget)
        s = threshold_edges(post, config.t_avg)
    if provenance is not None:
        s = LocalStructure(s.nodes, s.edges, s.support, provenance)
    return s


def save_structure(s: LocalStructure, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# nodes {' '.join(str(v) for v in s.nodes)}\n")
        for a, b in s.edges:
            fh.write(f"{a} -> {b}\n")


def load_structure(path) -> LocalStructure:
    nodes: tuple[int, ...] = ()
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# nodes"):
                nodes = tuple(int(t) for t in line.split()[2:])
                continue
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            a, arrow, b = line.split()
            if arrow != "->":
                raise InvalidInput(f"bad structure line: {line!r}")
            edges.append((int(a), int(b)))
    if not nodes:
        nodes = tuple(sorted({v for e in edges for v in e}))
    return LocalStructure(nodes, tuple(edges))
