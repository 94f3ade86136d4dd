"""Discrete Bayesian networks, datasets, sampling and discretization.

Network files are line oriented, UTF-8, with ``#`` starting a comment:

    var <name> <k> <state0> ... <state{k-1}>
    arc <parent> <child>
    cpt <child> | <parent-state...> : p0 ... p{k-1}

A ``cpt`` line gives one conditional row per joint parent configuration;
parent state labels are listed in ascending parent index order (the order
the parents were declared as ``var`` lines).  Datasets are tab-separated:
a header row of variable names, then one row of integer state indices per
sample.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInput, NetworkFormatError

_PROB_TOL = 1e-9


@dataclass(eq=False)
class GroundTruthNet:
    """A discrete Bayesian network with full CPTs.

    ``cpts[i]`` has shape ``(q_i, r_i)`` where ``q_i`` is the product of
    the parent cardinalities (1 for roots) and ``r_i`` the cardinality of
    variable ``i``.  Row order is the mixed-radix order of parent states,
    parents sorted by ascending variable index, first parent slowest.
    """

    names: tuple[str, ...]
    states: tuple[tuple[str, ...], ...]
    arcs: tuple[tuple[int, int], ...]
    cpts: list[np.ndarray] = field(repr=False)

    def __post_init__(self):
        self.names = tuple(self.names)
        self.states = tuple(tuple(s) for s in self.states)
        self.arcs = tuple(sorted(set((int(p), int(c)) for p, c in self.arcs)))
        n = len(self.names)
        if len(set(self.names)) != n:
            raise InvalidInput("duplicate variable names")
        if len(self.states) != n or len(self.cpts) != n:
            raise InvalidInput("states/cpts length must match names")
        for s in self.states:
            if len(s) < 2:
                raise InvalidInput("every variable needs at least 2 states")
        for p, c in self.arcs:
            if p == c or not (0 <= p < n and 0 <= c < n):
                raise InvalidInput(f"bad arc ({p}, {c})")
        self.topological_order()  # raises on a cycle
        cpts = []
        for i in range(n):
            q = 1
            for p in self.parents_of(i):
                q *= len(self.states[p])
            r = len(self.states[i])
            t = np.asarray(self.cpts[i], dtype=np.float64)
            if t.shape != (q, r):
                raise InvalidInput(
                    f"cpt for '{self.names[i]}' must have shape ({q}, {r}), got {t.shape}")
            if (t < 0).any() or (np.abs(t.sum(axis=1) - 1.0) > _PROB_TOL).any():
                raise InvalidInput(f"cpt rows for '{self.names[i]}' must be distributions")
            cpts.append(t)
        self.cpts = cpts

    @property
    def n_vars(self) -> int:
        return len(self.names)

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.states)

    def parents_of(self, i: int) -> tuple[int, ...]:
        return tuple(sorted(p for p, c in self.arcs if c == i))

    def children_of(self, i: int) -> tuple[int, ...]:
        return tuple(sorted(c for p, c in self.arcs if p == i))

    def topological_order(self) -> list[int]:
        """Kahn's algorithm, lowest index first; raises on a cycle."""
        n = len(self.names)
        indeg = [0] * n
        out: list[list[int]] = [[] for _ in range(n)]
        for p, c in self.arcs:
            indeg[c] += 1
            out[p].append(c)
        ready = [i for i in range(n) if indeg[i] == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            i = heapq.heappop(ready)
            order.append(i)
            for c in out[i]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(ready, c)
        if len(order) != n:
            raise NetworkFormatError("arcs contain a cycle")
        return order

    def skeleton(self) -> set[frozenset[int]]:
        return {frozenset((p, c)) for p, c in self.arcs}

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroundTruthNet):
            return NotImplemented
        return (self.names == other.names and self.states == other.states
                and self.arcs == other.arcs
                and all(np.array_equal(a, b) for a, b in zip(self.cpts, other.cpts)))


@dataclass(eq=False)
class DiscreteDataset:
    """Complete discrete samples: an ``(N, V)`` integer matrix plus schema."""

    names: tuple[str, ...]
    cardinalities: tuple[int, ...]
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.names = tuple(self.names)
        self.cardinalities = tuple(int(c) for c in self.cardinalities)
        if len(set(self.names)) != len(self.names):
            raise InvalidInput("duplicate variable names")
        if len(self.cardinalities) != len(self.names):
            raise InvalidInput("cardinalities length must match names")
        if any(c < 2 for c in self.cardinalities):
            raise InvalidInput("every variable needs cardinality >= 2")
        a = np.asarray(self.samples)
        if a.ndim != 2 or a.shape[1] != len(self.names):
            raise InvalidInput(f"samples must be (N, {len(self.names)})")
        a = a.astype(np.int32, copy=True)
        for j, c in enumerate(self.cardinalities):
            col = a[:, j]
            if col.size and (col.min() < 0 or col.max() >= c):
                raise InvalidInput(f"column '{self.names[j]}' has states outside [0, {c})")
        a.flags.writeable = False
        self.samples = a

    @property
    def n_rows(self) -> int:
        return self.samples.shape[0]

    @property
    def n_vars(self) -> int:
        return self.samples.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.samples[:, i]

    def select(self, indices: Sequence[int]) -> "DiscreteDataset":
        """Column subset in the given order (names kept, indices renumbered)."""
        idx = list(indices)
        return DiscreteDataset(
            names=tuple(self.names[i] for i in idx),
            cardinalities=tuple(self.cardinalities[i] for i in idx),
            samples=self.samples[:, idx],
        )


def parse_network(text: str) -> GroundTruthNet:
    """Parse the line-oriented network format into a validated net."""
    names: list[str] = []
    states: list[tuple[str, ...]] = []
    index: dict[str, int] = {}
    arcs: list[tuple[int, int]] = []
    arc_seen: set[tuple[int, int]] = set()
    # cpt rows are collected per child as {config_index: (line_no, probs)}
    rows: dict[int, dict[int, np.ndarray]] = {}
    cpt_lines: list[tuple[int, list[str]]] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0]
        if kind == "var":
            if len(tok) < 3:
                raise NetworkFormatError("var needs a name and a state count", line_no)
            name = tok[1]
            if name in index:
                raise NetworkFormatError(f"duplicate variable '{name}'", line_no)
            try:
                k = int(tok[2])
            except ValueError:
                raise NetworkFormatError(f"bad state count '{tok[2]}'", line_no) from None
            labels = tok[3:]
            if k < 2:
                raise NetworkFormatError("state count must be >= 2", line_no)
            if len(labels) != k or len(set(labels)) != k:
                raise NetworkFormatError(f"expected {k} distinct state labels", line_no)
            index[name] = len(names)
            names.append(name)
            states.append(tuple(labels))
        elif kind == "arc":
            if len(tok) != 3:
                raise NetworkFormatError("arc needs a parent and a child", line_no)
            try:
                p, c = index[tok[1]], index[tok[2]]
            except KeyError as e:
                raise NetworkFormatError(f"unknown variable {e}", line_no) from None
            if p == c:
                raise NetworkFormatError("self arc", line_no)
            if (p, c) in arc_seen:
                raise NetworkFormatError(f"duplicate arc {tok[1]} -> {tok[2]}", line_no)
            arc_seen.add((p, c))
            arcs.append((p, c))
        elif kind == "cpt":
            cpt_lines.append((line_no, tok))  # resolved after all vars/arcs are known
        else:
            raise NetworkFormatError(f"unknown directive '{kind}'", line_no)

    parents = {i: tuple(sorted(p for p, c in arc_seen if c == i)) for i in range(len(names))}

    for line_no, tok in cpt_lines:
        if len(tok) < 2 or tok[1] not in index:
            raise NetworkFormatError("cpt needs a known child variable", line_no)
        child = index[tok[1]]
        rest = tok[2:]
        if rest and rest[0] == "|":
            rest = rest[1:]
        if ":" not in rest:
            raise NetworkFormatError("cpt needs ':' before probabilities", line_no)
        cut = rest.index(":")
        labels, probs_tok = rest[:cut], rest[cut + 1:]
        pars = parents[child]
        if len(labels) != len(pars):
            raise NetworkFormatError(
                f"'{names[child]}' has {len(pars)} parents, got {len(labels)} state labels",
                line_no)
        cfg = 0
        for p, lab in zip(pars, labels):
            if lab not in states[p]:
                raise NetworkFormatError(
                    f"'{lab}' is not a state of '{names[p]}'", line_no)
            cfg = cfg * len(states[p]) + states[p].index(lab)
        try:
            probs = np.array([float(t) for t in probs_tok], dtype=np.float64)
        except ValueError:
            raise NetworkFormatError("bad probability token", line_no) from None
        if probs.size != len(states[child]):
            raise NetworkFormatError(
                f"'{names[child]}' has {len(states[child])} states, got {probs.size} "
                "probabilities", line_no)
        if (probs < 0).any() or abs(probs.sum() - 1.0) > _PROB_TOL:
            raise NetworkFormatError("probability row must sum to 1", line_no)
        per_child = rows.setdefault(child, {})
        if cfg in per_child:
            raise NetworkFormatError("duplicate cpt row for this configuration", line_no)
        per_child[cfg] = probs

    cpts = []
    for i in range(len(names)):
        q = 1
        for p in parents[i]:
            q *= len(states[p])
        got = rows.get(i, {})
        if len(got) != q:
            raise NetworkFormatError(
                f"'{names[i]}' needs {q} cpt rows, got {len(got)}")
        cpts.append(np.stack([got[c] for c in range(q)]))

    return GroundTruthNet(tuple(names), tuple(states), tuple(arcs), cpts)


def serialize_network(net: GroundTruthNet) -> str:
    """Inverse of :func:`parse_network`; floats are written exactly."""
    out = []
    for name, labels in zip(net.names, net.states):
        out.append(f"var {name} {len(labels)} " + " ".join(labels))
    for p, c in net.arcs:
        out.append(f"arc {net.names[p]} {net.names[c]}")
    for i, name in enumerate(net.names):
        pars = net.parents_of(i)
        dims = [len(net.states[p]) for p in pars]
        for cfg in range(net.cpts[i].shape[0]):
            labels = []
            rem = cfg
            for d in reversed(range(len(pars))):
                labels.append(net.states[pars[d]][rem % dims[d]])
                rem //= dims[d]
            labels.reverse()
            probs = " ".join(repr(float(v)) for v in net.cpts[i][cfg])
            out.append(f"cpt {name} | " + " ".join(labels) + " : " + probs)
    return "\n".join(out) + "\n"


def load_network(path) -> GroundTruthNet:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_network(fh.read())


def save_network(net: GroundTruthNet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_network(net))


def forward_sample(net: GroundTruthNet, n: int, seed: int) -> DiscreteDataset:
    """Ancestral sampling: draw each variable given its sampled parents.

    Deterministic for a fixed ``(net, n, seed)``; variables are drawn in
    topological order (lowest index first among ready nodes).
    """
    if n < 0:
        raise InvalidInput("n must be >= 0")
    rng = np.random.default_rng(seed)
    cards = net.cardinalities
    out = np.zeros((n, net.n_vars), dtype=np.int32)
    for i in net.topological_order():
        pars = net.parents_of(i)
        cfg = np.zeros(n, dtype=np.int64)
        for p in pars:
            cfg = cfg * cards[p] + out[:, p]
        cdf = np.cumsum(net.cpts[i], axis=1)
        cdf[:, -1] = 1.0  # guard against rounding when u is close to 1
        u = rng.random(n)
        out[:, i] = (u[:, None] < cdf[cfg]).argmax(axis=1)
    return DiscreteDataset(net.names, cards, out)


def discretize(table, bins: int, names: Sequence[str] | None = None) -> DiscreteDataset:
    """Equal-frequency binning per column; equal values share a bin.

    Each distinct value v is assigned bin ``floor(count_below(v) * bins / N)``
    and bin codes are then compacted to consecutive integers, so bins hold
    N/bins entries up to tie-group granularity.  A column whose values all
    collapse into one bin (constant columns in particular) is rejected.
    """
    a = np.asarray(table, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] == 0:
        raise InvalidInput("table must be a nonempty 2-D array")
    if bins < 2:
        raise InvalidInput("bins must be >= 2")
    n, v = a.shape
    if names is None:
        names = tuple(f"x{j}" for j in range(v))
    cols = []
    cards = []
    for j in range(v):
        distinct, first_pos = _distinct_with_counts_below(a[:, j])
        codes = (first_pos * bins) // n
        codes = np.unique(codes, return_inverse=True)[1]  # compact to 0..B-1
        card = int(codes.max()) + 1 if codes.size else 0
        if card < 2:
            raise InvalidInput(
                f"column '{names[j]}' yields a single state after binning")
        cols.append(codes[np.searchsorted(distinct, a[:, j])])
        cards.append(card)
    return DiscreteDataset(tuple(names), tuple(cards), np.stack(cols, axis=1))


def _distinct_with_counts_below(col: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sorted distinct values and, for each, how many entries are smaller."""
    order = np.sort(col)
    mask = np.empty(order.shape, dtype=bool)
    mask[0] = True
    np.not_equal(order[1:], order[:-1], out=mask[1:])
    distinct = order[mask]
    first_pos = np.flatnonzero(mask)
    return distinct, first_pos


def save_dataset(ds: DiscreteDataset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(ds.names) + "\n")
        np.savetxt(fh, ds.samples, fmt="%d", delimiter="\t")


def load_dataset(path, cardinalities: Sequence[int] | None = None) -> DiscreteDataset:
    """Read a TSV dataset; cardinalities default to max observed state + 1."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header:
            raise InvalidInput("dataset file is empty")
        names = tuple(header.split("\t"))
        body = np.loadtxt(fh, dtype=np.int64, delimiter="\t", ndmin=2)
    if body.size == 0:
        body = body.reshape(0, len(names))
    if cardinalities is None:
        if body.shape[0] == 0:
            raise InvalidInput("cannot infer cardinalities from an empty dataset")
        cardinalities = tuple(int(body[:, j].max()) + 1 for j in range(len(names)))
    return DiscreteDataset(names, tuple(cardinalities), body)
