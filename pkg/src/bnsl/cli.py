"""Command line interface.

Subcommands cover the pipeline stages individually (sample, partition,
learn, merge, evaluate, diagnose) and as one run (pipeline).  Exit code 0
on success; failures print a stage-tagged message and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .averaging import load_structure, save_structure
from .data import forward_sample, load_dataset, load_network, save_dataset
from .errors import PipelineStageError
from .evaluate import score_structure
from .merge import merge_all
from .partition import consensus_partition, load_partition, save_partition
from .pipeline import (PipelineConfig, build_substrate, derive_seed, diagnose,
                       learn_communities, run_pipeline, structure_from_dict,
                       structure_to_dict)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of pipeline settings")
    p.add_argument("--seed", type=int, help="master seed (overrides config)")
    p.add_argument("--emit-intermediate", metavar="DIR",
                   help="directory for per-stage artifacts")
    p.add_argument("--learner", choices=["modelavg", "greedy"],
                   help="local structure learner (overrides config)")
    p.add_argument("-v", "--verbose", action="store_true")


def _config(args: argparse.Namespace, **overrides) -> PipelineConfig:
    if args.config:
        cfg = PipelineConfig.from_json(Path(args.config).read_text(encoding="utf-8"))
    else:
        cfg = PipelineConfig()
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.emit_intermediate:
        overrides["emit_intermediate"] = args.emit_intermediate
    if args.learner:
        overrides["learner"] = args.learner
    return replace(cfg, **{k: v for k, v in overrides.items() if v is not None})


def _write_json(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="bnsl", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="forward-sample a network to a TSV dataset")
    p.add_argument("--network", required=True)
    p.add_argument("--n", type=int, default=20000)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("partition", help="consensus-partition a dataset's variables")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("learn", help="learn one structure per community")
    p.add_argument("--dataset", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--out", required=True, help="structures JSON")
    _add_common(p)

    p = sub.add_parser("merge", help="merge learned community structures")
    p.add_argument("--dataset", required=True)
    p.add_argument("--structures", required=True, help="structures JSON from learn")
    p.add_argument("--out", required=True, help="edge list of the final structure")
    p.add_argument("--report", help="JSON run report")
    _add_common(p)

    p = sub.add_parser("evaluate", help="score a learned structure against a network")
    p.add_argument("--learned", required=True, help="edge list file")
    p.add_argument("--network", required=True)
    p.add_argument("--directed", action="store_true")
    p.add_argument("--out", help="JSON report (default stdout)")
    _add_common(p)

    p = sub.add_parser("pipeline", help="run every stage end to end")
    p.add_argument("--out", help="edge list of the final structure")
    p.add_argument("--report", help="JSON run report (default stdout)")
    _add_common(p)

    p = sub.add_parser("diagnose", help="partition statistics on the weight graph")
    p.add_argument("--dataset", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--out", help="JSON (default stdout)")
    _add_common(p)

    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return _dispatch(args)
    except PipelineStageError as e:
        print(f"bnsl {args.command}: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - the CLI boundary reports and exits
        print(f"bnsl {args.command}: stage '{args.command}' failed: {e}",
              file=sys.stderr)
        return 1


def _dispatch(args: argparse.Namespace) -> int:
    cmd = args.command
    if cmd == "sample":
        cfg = _config(args, network=args.network, n_samples=args.n)
        net = load_network(cfg.network)
        save_dataset(forward_sample(net, cfg.n_samples, cfg.seed), args.out)
    elif cmd == "partition":
        cfg = _config(args, dataset=args.dataset)
        data = load_dataset(cfg.dataset)
        part = consensus_partition(data, cfg.weight_fns, cfg.t_co, cfg.max_comm)
        save_partition(part, args.out)
    elif cmd == "learn":
        cfg = _config(args, dataset=args.dataset)
        data = load_dataset(cfg.dataset)
        part = load_partition(args.partition)
        pool = learn_communities(data, part, build_substrate(data, cfg.substrate_fn), cfg)
        _write_json({"structures": [structure_to_dict(s) for s in pool]}, args.out)
    elif cmd == "merge":
        cfg = _config(args, dataset=args.dataset)
        data = load_dataset(cfg.dataset)
        raw = json.loads(Path(args.structures).read_text(encoding="utf-8"))
        pool = [structure_from_dict(d) for d in raw["structures"]]
        result = merge_all(pool, build_substrate(data, cfg.substrate_fn), data,
                           cfg.learner_config(), cfg.t_tri, derive_seed(cfg.seed, 4))
        save_structure(result.structure, args.out)
        if args.report:
            _write_json({
                "merge_sequence": [[list(a), list(b)] for a, b in result.merge_sequence],
                "jaccard_evaluations": result.jaccard_evaluations,
                "conflicts": [{k: (list(v) if isinstance(v, tuple) else v)
                               for k, v in c.items()} for c in result.conflicts],
            }, args.report)
    elif cmd == "evaluate":
        net = load_network(args.network)
        report = score_structure(load_structure(args.learned), net, args.directed)
        _write_json(report.to_dict(), args.out)
    elif cmd == "pipeline":
        cfg = _config(args)
        result = run_pipeline(cfg)
        if args.out:
            save_structure(result.structure, args.out)
        _write_json(result.run_report, args.report)
    elif cmd == "diagnose":
        cfg = _config(args, dataset=args.dataset)
        data = load_dataset(cfg.dataset)
        part = load_partition(args.partition)
        _write_json(diagnose(part, build_substrate(data, cfg.substrate_fn)), args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
