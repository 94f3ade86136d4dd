"""End-to-end orchestration: data -> weights -> partition -> learn -> merge.

Every stage is timed, failures are re-raised tagged with the stage name,
and all randomness is derived deterministically from one master seed, so
a run is reproducible from its config alone.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .averaging import (LearnerConfig, LocalStructure, ScoreCache,
                        learn_structure, save_structure)
from .blankets import community_blanket, inner_markov_graph, rnn_sample
from .data import (DiscreteDataset, GroundTruthNet, forward_sample,
                   load_dataset, load_network, save_dataset)
from .errors import InvalidInput, PipelineStageError
from .evaluate import EvalReport, partition_diagnostics, score_structure
from .merge import MergeResult, ensemble_subcommunities, merge_all, resolve
from .partition import Partition, consensus_partition, save_partition
from .weights import (WEIGHT_FUNCTIONS, WeightedGraph, elbow_truncate,
                      save_weighted_graph, weight_matrix)

log = logging.getLogger("bnsl.pipeline")


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a full run needs; JSON round-trippable."""

    network: str | None = None     # ground-truth net to sample and score against
    dataset: str | None = None     # or: a pre-built TSV dataset
    n_samples: int = 20000
    seed: int = 0
    weight_fns: tuple[str, ...] = WEIGHT_FUNCTIONS
    substrate_fn: str = "MI"       # weight graph behind blankets and triplets
    t_co: float = 0.5
    alpha: float = 0.05
    max_comm: int = 25
    max_learn_size: int = 15
    k_subsamples: int | None = None
    learner: str = "modelavg"
    max_parents: int = 3
    ess: float = 10.0
    t_avg: float = 0.5
    mcmc_T: int = 100
    burn_in: int | None = None
    thin: int | None = None
    t_tri: float | None = None
    directed_eval: bool = False
    emit_intermediate: str | None = None

    def learner_config(self) -> LearnerConfig:
        return LearnerConfig(self.learner, self.max_parents, self.ess,
                             self.t_avg, self.mcmc_T, self.burn_in, self.thin)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        raw = json.loads(text)
        unknown = set(raw) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise InvalidInput(f"unknown config keys: {sorted(unknown)}")
        if "weight_fns" in raw:
            raw["weight_fns"] = tuple(raw["weight_fns"])
        return cls(**raw)


@dataclass
class PipelineResult:
    structure: LocalStructure
    partition: Partition
    report: EvalReport | None
    run_report: dict


def derive_seed(master: int, *path: int) -> int:
    """Stable per-stage seed from the master seed and an index path."""
    return int(np.random.SeedSequence((master,) + path).generate_state(1)[0])


def structure_to_dict(s: LocalStructure) -> dict:
    return {
        "nodes": list(s.nodes),
        "edges": [list(e) for e in s.edges],
        "support": {f"{a},{b}": v for (a, b), v in sorted(s.support.items())},
        "provenance": s.provenance,
    }


def structure_from_dict(d: dict) -> LocalStructure:
    support = {tuple(int(t) for t in k.split(",")): float(v)
               for k, v in d.get("support", {}).items()}
    return LocalStructure(tuple(d["nodes"]),
                          tuple(tuple(e) for e in d["edges"]),
                          support, d.get("provenance"))


class _Stages:
    """Tiny helper tracking wall-clock per named stage."""

    def __init__(self):
        self.timings: dict[str, float] = {}

    def run(self, name: str, fn):
        log.info("stage %s", name)
        t0 = time.perf_counter()
        try:
            out = fn()
        except PipelineStageError:
            raise
        except Exception as e:
            raise PipelineStageError(name, e) from e
        self.timings[name] = time.perf_counter() - t0
        return out


def load_inputs(config: PipelineConfig) -> tuple[DiscreteDataset, GroundTruthNet | None]:
    """Dataset plus optional ground truth per the config's data source."""
    if config.network:
        net = load_network(config.network)
        return forward_sample(net, config.n_samples, config.seed), net
    if config.dataset:
        return load_dataset(config.dataset), None
    raise InvalidInput("config needs 'network' or 'dataset'")


def build_substrate(data: DiscreteDataset, fn: str = "MI") -> WeightedGraph:
    """Elbow-pruned weight graph used for blanket candidacy and triplets."""
    return elbow_truncate(weight_matrix(data, fn)).pruned


def learn_communities(data: DiscreteDataset, partition: Partition,
                      substrate: WeightedGraph, config: PipelineConfig,
                      cache: ScoreCache | None = None,
                      run_report: dict | None = None) -> list[LocalStructure]:
    """Blanket-isolate, sample and learn every community; one structure each."""
    if cache is None:
        cache = ScoreCache(data, config.ess)
    lc = config.learner_config()
    pool = []
    detail = []
    for ci, comm in enumerate(partition.communities):
        br = community_blanket(data, substrate, comm, config.alpha)
        img = inner_markov_graph(br.community, br.blankets)
        subs = rnn_sample(img, br.blankets, config.k_subsamples,
                          config.max_learn_size, derive_seed(config.seed, 1, ci))
        learned = []
        seen: set[tuple[int, ...]] = set()
        for si, sc in enumerate(subs):
            if sc.members in seen or len(sc.members) < 2:
                continue
            seen.add(sc.members)
            learned.append(learn_structure(
                data, sc.members, lc, derive_seed(config.seed, 2, ci, si),
                cache, provenance=f"community {ci}"))
        if not learned:  # lone node with an empty blanket
            pool.append(LocalStructure(comm, (), {}, f"community {ci}"))
            detail.append({"community": ci, "size": len(comm), "subsamples": 0})
            continue
        conflicts: list = []
        ens = ensemble_subcommunities(learned, conflicts)
        res = resolve(ens, substrate, data, lc, config.t_tri,
                      derive_seed(config.seed, 3, ci), cache)
        pool.append(LocalStructure(res.nodes, res.edges, res.support,
                                   f"community {ci}"))
        detail.append({"community": ci, "size": len(comm),
                       "expanded": len(br.expanded),
                       "subsamples": len(subs), "learned": len(learned),
                       "ensemble_conflicts": len(conflicts)})
    if run_report is not None:
        run_report["communities"] = detail
    return pool


def run_pipeline(config: PipelineConfig) -> PipelineResult:
    """Full run; see the module docstring for the stage layout."""
    stages = _Stages()
    run_report: dict = {"config": json.loads(config.to_json())}

    data, truth = stages.run("data", lambda: load_inputs(config))
    substrate = stages.run("weights", lambda: build_substrate(data, config.substrate_fn))
    partition = stages.run("partition", lambda: consensus_partition(
        data, config.weight_fns, config.t_co, config.max_comm))
    run_report["partition"] = [list(c) for c in partition.communities]

    cache = ScoreCache(data, config.ess)
    pool = stages.run("learn", lambda: learn_communities(
        data, partition, substrate, config, cache, run_report))
    merged: MergeResult = stages.run("merge", lambda: merge_all(
        pool, substrate, data, config.learner_config(), config.t_tri,
        derive_seed(config.seed, 4), cache))
    run_report["merge_sequence"] = [[list(a), list(b)] for a, b in merged.merge_sequence]
    run_report["jaccard_evaluations"] = merged.jaccard_evaluations
    run_report["conflicts"] = [
        {k: (list(v) if isinstance(v, tuple) else v) for k, v in c.items()}
        for c in merged.conflicts]

    report = None
    if truth is not None:
        report = stages.run("evaluate", lambda: score_structure(
            merged.structure, truth, config.directed_eval,
            timings=stages.timings, config=json.loads(config.to_json())))
        run_report["evaluation"] = report.to_dict()
    run_report["timings"] = dict(stages.timings)

    if config.emit_intermediate:
        stages.run("emit", lambda: _emit(config, data, substrate, partition,
                                         pool, merged, report, run_report))
    return PipelineResult(merged.structure, partition, report, run_report)


def _emit(config, data, substrate, partition, pool, merged, report, run_report):
    out = Path(config.emit_intermediate)
    out.mkdir(parents=True, exist_ok=True)
    save_dataset(data, out / "dataset.tsv")
    save_weighted_graph(substrate, out / "substrate.tsv")
    save_partition(partition, out / "partition.txt")
    for k, s in enumerate(pool):
        save_structure(s, out / f"community_{k}.edges")
    save_structure(merged.structure, out / "merged.edges")
    (out / "run_report.json").write_text(
        json.dumps(run_report, indent=2, sort_keys=True), encoding="utf-8")
    if report is not None:
        (out / "evaluation.json").write_text(report.to_json(), encoding="utf-8")


def diagnose(partition: Partition, substrate: WeightedGraph) -> dict:
    return partition_diagnostics(partition, substrate)
