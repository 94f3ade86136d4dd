"""Markov blanket discovery and blanket-bounded sub-community sampling.

Blankets come from IAMB: grow a candidate blanket by repeatedly admitting
the variable with the highest conditional mutual information given the
current blanket, as long as a G-test rejects conditional independence,
then shrink by re-testing each member against the rest.  Learning windows
("sub-communities") are sampled by walking an inner markov graph and
padding each core with the blankets of its members, which is what lets a
community be learned in isolation from the rest of the network.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import chi2

from .data import DiscreteDataset
from .errors import ConditioningSetTooLarge, InvalidInput
from .weights import WeightedGraph, entropy

DEFAULT_CMI_CELLS = 2 ** 22


def mb_candidates(g: WeightedGraph, x: int) -> frozenset[int]:
    """Neighbors of x whose edge weight is at least x's mean incident weight."""
    adj = g.adjacency(x)
    if not adj:
        return frozenset()
    mean = sum(adj.values()) / len(adj)
    return frozenset(v for v, w in adj.items() if w >= mean)


def conditional_mutual_information(data: DiscreteDataset, x: int, y: int,
                                   z: Sequence[int] = (),
                                   max_cells: int = DEFAULT_CMI_CELLS) -> float:
    """CMI(X; Y | Z) in nats, as H(XZ) + H(YZ) - H(XYZ) - H(Z)."""
    if data.n_rows == 0:
        raise InvalidInput("dataset is empty")
    z = tuple(sorted(set(int(v) for v in z)))
    if x == y or x in z or y in z:
        raise InvalidInput("x, y and z must be disjoint")
    cards = data.cardinalities
    cells = cards[x] * cards[y]
    for v in z:
        cells *= cards[v]
    if cells > max_cells:
        raise ConditioningSetTooLarge(
            f"CMI({x}; {y} | {z}) needs {cells} count cells")
    cfg_z = np.zeros(data.n_rows, dtype=np.int64)
    for v in z:
        cfg_z = cfg_z * cards[v] + data.column(v)
    cfg_xz = cfg_z * cards[x] + data.column(x)
    cfg_yz = cfg_z * cards[y] + data.column(y)
    cfg_xyz = cfg_xz * cards[y] + data.column(y)
    h = (_h(cfg_xz) + _h(cfg_yz) - _h(cfg_xyz) - _h(cfg_z))
    return max(float(h), 0.0)


def _h(codes: np.ndarray) -> float:
    return entropy(np.bincount(codes))


def g_test(data: DiscreteDataset, x: int, y: int, z: Sequence[int] = (),
           max_cells: int = DEFAULT_CMI_CELLS) -> tuple[float, int, float]:
    """G statistic, degrees of freedom and p-value for X vs Y given Z."""
    z = tuple(sorted(set(int(v) for v in z)))
    cmi = conditional_mutual_information(data, x, y, z, max_cells)
    g = 2.0 * data.n_rows * cmi
    cards = data.cardinalities
    df = (cards[x] - 1) * (cards[y] - 1)
    for v in z:
        df *= cards[v]
    return g, df, float(chi2.sf(g, df))


def iamb(data: DiscreteDataset, x: int, candidates: Sequence[int],
         alpha: float = 0.05, max_cells: int = DEFAULT_CMI_CELLS) -> frozenset[int]:
    """IAMB Markov blanket of x within the given candidate set.

    Forward phase: admit the candidate maximizing CMI(x; c | blanket)
    (ties to the smallest index) while the G-test rejects independence at
    ``alpha``; stop the first time the best candidate fails.  Backward
    phase: drop any member that tests independent given the others.
    """
    if not (0 < alpha < 1):
        raise InvalidInput("alpha must be in (0, 1)")
    cand = sorted(set(int(c) for c in candidates) - {x})
    cmb: list[int] = []
    while True:
        rest = [c for c in cand if c not in cmb]
        if not rest:
            break
        best, best_cmi = None, -1.0
        for c in rest:
            v = conditional_mutual_information(data, x, c, cmb, max_cells)
            if v > best_cmi:
                best, best_cmi = c, v
        _, _, p = g_test(data, x, best, cmb, max_cells)
        if p < alpha:
            cmb.append(best)
        else:
            break
    for y in sorted(cmb):
        others = [c for c in cmb if c != y]
        _, _, p = g_test(data, x, y, others, max_cells)
        if p >= alpha:
            cmb.remove(y)
    return frozenset(cmb)


@dataclass(frozen=True)
class BlanketResult:
    """Per-member blankets of one community and the blanket-expanded set."""

    community: tuple[int, ...]
    blankets: dict[int, frozenset[int]]
    expanded: tuple[int, ...]


def community_blanket(data: DiscreteDataset, g: WeightedGraph,
                      community: Sequence[int], alpha: float = 0.05,
                      max_cells: int = DEFAULT_CMI_CELLS) -> BlanketResult:
    """IAMB blanket of every community member, searched over the member's
    weight-graph candidates plus the rest of the community."""
    comm = tuple(sorted(set(int(v) for v in community)))
    if not comm:
        raise InvalidInput("empty community")
    blankets = {}
    for x in comm:
        cand = set(mb_candidates(g, x)) | set(comm)
        blankets[x] = iamb(data, x, cand - {x}, alpha, max_cells)
    expanded = set(comm)
    for b in blankets.values():
        expanded |= b
    return BlanketResult(comm, blankets, tuple(sorted(expanded)))


def inner_markov_graph(community: Sequence[int],
                       blankets: Mapping[int, frozenset[int]]) -> dict[int, set[int]]:
    """Adjacency on the community: x ~ y iff either is in the other's blanket."""
    comm = sorted(set(int(v) for v in community))
    adj: dict[int, set[int]] = {v: set() for v in comm}
    for i, x in enumerate(comm):
        for y in comm[i + 1:]:
            if y in blankets.get(x, ()) or x in blankets.get(y, ()):
                adj[x].add(y)
                adj[y].add(x)
    return adj


@dataclass(frozen=True)
class SubCommunity:
    """A learning window: a sampled core plus the blankets of its members."""

    core: tuple[int, ...]
    members: tuple[int, ...]


def rnn_sample(img: Mapping[int, set[int]], blankets: Mapping[int, frozenset[int]],
               k: int | None = None, max_learn_size: int = 15,
               seed: int = 0) -> list[SubCommunity]:
    """Sample blanket-padded sub-communities until coverage and count.

    Each draw starts at a uniformly chosen unvisited node; the core is the
    start plus its inner-markov neighbors, members are the core plus every
    core member's blanket.  While the member set exceeds
    ``max_learn_size``, the non-start core node of smallest inner-markov
    degree leaves the core (ties to the smallest index); if the core alone
    still overflows, blanket members of smallest degree are dropped.
    Sampling stops once every node has appeared in some core *and* at
    least ``k`` draws were made (default: ceil(2 |C| / max_learn_size)).
    """
    nodes = sorted(img)
    if not nodes:
        raise InvalidInput("empty inner markov graph")
    if max_learn_size < 1:
        raise InvalidInput("max_learn_size must be >= 1")
    if k is None:
        k = -(-2 * len(nodes) // max_learn_size)
    rng = np.random.default_rng(seed)
    visited: set[int] = set()
    out: list[SubCommunity] = []
    while len(visited) < len(nodes) or len(out) < k:
        pool = sorted(set(nodes) - visited) or nodes
        start = pool[int(rng.integers(len(pool)))]
        core = {start} | set(img[start])

        def expand(c: set[int]) -> set[int]:
            members = set(c)
            for v in c:
                members |= blankets.get(v, frozenset())
            return members

        members = expand(core)
        while len(members) > max_learn_size and len(core) > 1:
            victim = min((v for v in core if v != start),
                         key=lambda v: (len(img[v]), v))
            core.remove(victim)
            members = expand(core)
        if len(members) > max_learn_size:
            spare = sorted(members - core,
                           key=lambda v: (len(img.get(v, ())), v))
            members = core | set(spare[len(members) - max_learn_size:])
        visited |= core
        out.append(SubCommunity(tuple(sorted(core)), tuple(sorted(members))))
    return out
