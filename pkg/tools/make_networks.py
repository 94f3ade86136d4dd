"""Generate the benchmark fixture networks bundled under networks/.

Four ground-truth networks are produced:

* ``alarm.net``      -- the classic 37-variable ICU-monitoring benchmark
                        structure (46 arcs, mixed cardinalities 2-4).
* ``insurance.net``  -- the classic 27-variable car-insurance benchmark
                        structure (52 arcs, cardinalities 2-5).
* ``win95pts.net``   -- a synthetic 76-variable binary troubleshooter-scale
                        surrogate (112 arcs) built from a seeded layered DAG.
* ``fivehub.net``    -- a small 9-variable fixture with exactly five root
                        variables, used for sampler marginal checks.

Only the alarm and insurance graph structures follow their canonical
benchmark counterparts.  All conditional probability tables here are
synthetic: rows are drawn from a seeded generator that keeps one dominant
state per parent configuration and rejects tables in which any single
parent has no visible marginal effect on its child.  The win95pts graph
is synthetic end to end; it matches the original benchmark only in
variable count, arc count, and all-binary cardinality.

Run from the repository root:

    python3 tools/make_networks.py [--out-dir networks]

Generation is deterministic; re-running overwrites identical files.
"""

from __future__ import annotations

import argparse
import itertools
from pathlib import Path

import numpy as np

from bnsl.data import GroundTruthNet, save_network

# ---------------------------------------------------------------------------
# Fixed benchmark structures.
# ---------------------------------------------------------------------------

ALARM_VARS = [
    ("HISTORY", 2), ("CVP", 3), ("PCWP", 3), ("HYPOVOLEMIA", 2),
    ("LVEDVOLUME", 3), ("LVFAILURE", 2), ("STROKEVOLUME", 3),
    ("ERRLOWOUTPUT", 2), ("HRBP", 3), ("HREKG", 3), ("ERRCAUTER", 2),
    ("HRSAT", 3), ("INSUFFANESTH", 2), ("ANAPHYLAXIS", 2), ("TPR", 3),
    ("EXPCO2", 4), ("KINKEDTUBE", 2), ("MINVOL", 4), ("FIO2", 2),
    ("PVSAT", 3), ("SAO2", 3), ("PAP", 3), ("PULMEMBOLUS", 2),
    ("SHUNT", 2), ("INTUBATION", 3), ("PRESS", 4), ("DISCONNECT", 2),
    ("MINVOLSET", 3), ("VENTMACH", 4), ("VENTTUBE", 4), ("VENTLUNG", 4),
    ("VENTALV", 4), ("ARTCO2", 3), ("CATECHOL", 2), ("HR", 3), ("CO", 3),
    ("BP", 3),
]

ALARM_ARCS = [
    ("LVFAILURE", "HISTORY"),
    ("LVEDVOLUME", "CVP"),
    ("LVEDVOLUME", "PCWP"),
    ("HYPOVOLEMIA", "LVEDVOLUME"),
    ("LVFAILURE", "LVEDVOLUME"),
    ("HYPOVOLEMIA", "STROKEVOLUME"),
    ("LVFAILURE", "STROKEVOLUME"),
    ("ERRLOWOUTPUT", "HRBP"),
    ("HR", "HRBP"),
    ("ERRCAUTER", "HREKG"),
    ("HR", "HREKG"),
    ("ERRCAUTER", "HRSAT"),
    ("HR", "HRSAT"),
    ("ANAPHYLAXIS", "TPR"),
    ("ARTCO2", "EXPCO2"),
    ("VENTLUNG", "EXPCO2"),
    ("INTUBATION", "MINVOL"),
    ("VENTLUNG", "MINVOL"),
    ("FIO2", "PVSAT"),
    ("VENTALV", "PVSAT"),
    ("PVSAT", "SAO2"),
    ("SHUNT", "SAO2"),
    ("PULMEMBOLUS", "PAP"),
    ("INTUBATION", "SHUNT"),
    ("PULMEMBOLUS", "SHUNT"),
    ("INTUBATION", "PRESS"),
    ("KINKEDTUBE", "PRESS"),
    ("VENTTUBE", "PRESS"),
    ("MINVOLSET", "VENTMACH"),
    ("DISCONNECT", "VENTTUBE"),
    ("VENTMACH", "VENTTUBE"),
    ("INTUBATION", "VENTLUNG"),
    ("KINKEDTUBE", "VENTLUNG"),
    ("VENTTUBE", "VENTLUNG"),
    ("INTUBATION", "VENTALV"),
    ("VENTLUNG", "VENTALV"),
    ("VENTALV", "ARTCO2"),
    ("ARTCO2", "CATECHOL"),
    ("INSUFFANESTH", "CATECHOL"),
    ("SAO2", "CATECHOL"),
    ("TPR", "CATECHOL"),
    ("CATECHOL", "HR"),
    ("HR", "CO"),
    ("STROKEVOLUME", "CO"),
    ("CO", "BP"),
    ("TPR", "BP"),
]

INSURANCE_VARS = [
    ("Age", 3), ("SocioEcon", 4), ("GoodStudent", 2), ("RiskAversion", 4),
    ("VehicleYear", 2), ("Accident", 4), ("ThisCarDam", 4),
    ("RuggedAuto", 3), ("MakeModel", 5), ("DrivQuality", 3), ("Mileage", 4),
    ("Antilock", 2), ("DrivingSkill", 3), ("SeniorTrain", 2),
    ("ThisCarCost", 4), ("Theft", 2), ("CarValue", 5), ("HomeBase", 4),
    ("AntiTheft", 2), ("PropCost", 4), ("OtherCarCost", 4), ("OtherCar", 2),
    ("MedCost", 4), ("Cushioning", 4), ("Airbag", 2), ("ILiCost", 4),
    ("DrivHist", 3),
]

INSURANCE_PARENTS = {
    "SocioEcon": ["Age"],
    "GoodStudent": ["Age", "SocioEcon"],
    "RiskAversion": ["Age", "SocioEcon"],
    "VehicleYear": ["SocioEcon", "RiskAversion"],
    "ThisCarDam": ["RuggedAuto", "Accident"],
    "RuggedAuto": ["VehicleYear", "MakeModel"],
    "Accident": ["Antilock", "Mileage", "DrivQuality"],
    "MakeModel": ["SocioEcon", "RiskAversion"],
    "DrivQuality": ["DrivingSkill", "RiskAversion"],
    "Antilock": ["VehicleYear", "MakeModel"],
    "DrivingSkill": ["Age", "SeniorTrain"],
    "SeniorTrain": ["Age", "RiskAversion"],
    "ThisCarCost": ["ThisCarDam", "Theft", "CarValue"],
    "Theft": ["AntiTheft", "HomeBase", "CarValue"],
    "CarValue": ["VehicleYear", "MakeModel", "Mileage"],
    "HomeBase": ["SocioEcon", "RiskAversion"],
    "AntiTheft": ["SocioEcon", "RiskAversion"],
    "PropCost": ["ThisCarCost", "OtherCarCost"],
    "OtherCarCost": ["Accident", "RuggedAuto"],
    "OtherCar": ["SocioEcon"],
    "MedCost": ["Accident", "Age", "Cushioning"],
    "Cushioning": ["RuggedAuto", "Airbag"],
    "Airbag": ["VehicleYear", "MakeModel"],
    "ILiCost": ["Accident"],
    "DrivHist": ["DrivingSkill", "RiskAversion"],
}

FIVEHUB_VARS = [
    ("root_a", 2), ("root_b", 3), ("root_c", 4), ("root_d", 3),
    ("root_e", 2), ("mix_ab", 3), ("mix_bc", 4), ("mix_cde", 3),
    ("sink", 2),
]

FIVEHUB_ARCS = [
    ("root_a", "mix_ab"), ("root_b", "mix_ab"),
    ("root_b", "mix_bc"), ("root_c", "mix_bc"),
    ("root_c", "mix_cde"), ("root_d", "mix_cde"), ("root_e", "mix_cde"),
    ("mix_ab", "sink"), ("mix_bc", "sink"),
]


# ---------------------------------------------------------------------------
# Synthetic parameter generation.
# ---------------------------------------------------------------------------

def root_prior(rng: np.random.Generator, card: int) -> np.ndarray:
    """A moderate prior: a Dirichlet draw blended toward uniform."""
    draw = rng.dirichlet(np.full(card, 4.0))
    prior = 0.75 * draw + 0.25 / card
    return prior / prior.sum()


def _marginal_gap(rows: np.ndarray, digits: np.ndarray, k: int,
                  card: int) -> float:
    """Largest total-variation gap between child marginals across the
    values of parent ``k`` when the remaining parents mix uniformly."""
    margs = [rows[digits[:, k] == a].mean(axis=0) for a in range(card)]
    gap = 0.0
    for a, b in itertools.combinations(range(card), 2):
        gap = max(gap, 0.5 * float(np.abs(margs[a] - margs[b]).sum()))
    return gap


def conditional_rows(rng: np.random.Generator, card: int,
                     parent_cards: list[int]) -> np.ndarray:
    """Sharp conditional rows in which every parent visibly matters.

    Each parent configuration gets one dominant child state with mass in
    [0.78, 0.92]; the remainder is spread with a small floor.  A candidate
    table is rejected unless, for every parent, varying that parent alone
    (others mixing uniformly) shifts the child marginal by at least a
    minimum total-variation gap, so no arc is vacuous or parity-hidden.
    """
    q = int(np.prod(parent_cards))
    digits = np.stack(np.unravel_index(np.arange(q), parent_cards), axis=1)
    min_gap = 0.10 if q <= 16 else 0.06
    for _ in range(400):
        dominant = rng.integers(0, card, size=q)
        if q > 1 and np.all(dominant == dominant[0]):
            continue
        mass = rng.uniform(0.78, 0.92, size=q)
        rows = np.empty((q, card))
        for j in range(q):
            if card == 1:
                rows[j] = [1.0]
                continue
            rest = (1.0 - mass[j]) * rng.dirichlet(np.full(card - 1, 2.0))
            row = np.insert(rest, dominant[j], mass[j])
            row = np.maximum(row, 0.02)
            rows[j] = row / row.sum()
        if all(_marginal_gap(rows, digits, k, parent_cards[k]) >= min_gap
               for k in range(len(parent_cards))):
            return rows
    raise RuntimeError("no detectable conditional table found; "
                       "loosen the gap or change the seed")


def build_network(var_list: list[tuple[str, int]],
                  arc_list: list[tuple[str, str]],
                  seed: int) -> GroundTruthNet:
    """Assemble a ground-truth network with synthetic parameters."""
    names = [name for name, _ in var_list]
    cards = [card for _, card in var_list]
    index = {name: i for i, name in enumerate(names)}
    arcs = sorted((index[p], index[c]) for p, c in arc_list)
    parents: dict[int, list[int]] = {i: [] for i in range(len(names))}
    for p, c in arcs:
        parents[c].append(p)
    rng = np.random.default_rng(seed)
    cpts = []
    for i in range(len(names)):
        pa = sorted(parents[i])
        if not pa:
            cpts.append(root_prior(rng, cards[i])[None, :])
        else:
            cpts.append(conditional_rows(rng, cards[i],
                                         [cards[p] for p in pa]))
    states = [tuple(f"s{k}" for k in range(card)) for card in cards]
    return GroundTruthNet(names=names, states=states, arcs=tuple(arcs),
                          cpts=cpts)


# ---------------------------------------------------------------------------
# Synthetic troubleshooter-scale structure.
# ---------------------------------------------------------------------------

def win95pts_structure(seed: int, n_vars: int = 76,
                       n_arcs: int = 112) -> tuple[list, list]:
    """A layered random DAG: 76 binary variables, 112 arcs, local wiring.

    Nodes attach to recent predecessors (a sliding window) so the graph
    decomposes into loosely coupled regions, the regime the partitioning
    stage is built for.  Parent counts are drawn per node and then
    adjusted to hit the arc total exactly; in-degree never exceeds 3.
    """
    rng = np.random.default_rng(seed)
    n_roots = 4
    counts = np.zeros(n_vars, dtype=int)
    choosable = np.arange(n_roots, n_vars)
    counts[choosable] = rng.choice([1, 2, 3], size=choosable.size,
                                   p=[0.55, 0.34, 0.11])
    while counts.sum() > n_arcs:
        heavy = np.flatnonzero(counts > 1)
        counts[rng.choice(heavy)] -= 1
    while counts.sum() < n_arcs:
        light = np.flatnonzero((counts < 3) & (np.arange(n_vars) >= n_roots))
        light = light[np.minimum(light, 12) > counts[light]]
        counts[rng.choice(light)] += 1
    var_list = [(f"n{i:02d}", 2) for i in range(n_vars)]
    arc_list = []
    for i in range(n_roots, n_vars):
        window = np.arange(max(0, i - 12), i)
        picks = rng.choice(window, size=counts[i], replace=False)
        for p in sorted(picks):
            arc_list.append((f"n{p:02d}", f"n{i:02d}"))
    return var_list, arc_list


# ---------------------------------------------------------------------------
# Entry point.
# ---------------------------------------------------------------------------

def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="networks",
                        help="directory for the generated .net files")
    args = parser.parse_args(argv)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    targets = [
        ("alarm", ALARM_VARS, ALARM_ARCS, 11),
        ("insurance", INSURANCE_VARS,
         [(p, c) for c, ps in INSURANCE_PARENTS.items() for p in ps], 12),
        ("fivehub", FIVEHUB_VARS, FIVEHUB_ARCS, 14),
    ]
    w_vars, w_arcs = win95pts_structure(seed=13)
    targets.insert(2, ("win95pts", w_vars, w_arcs, 13))

    for name, var_list, arc_list, seed in targets:
        net = build_network(var_list, arc_list, seed)
        path = out / f"{name}.net"
        save_network(net, path)
        print(f"{path}: {net.n_vars} variables, {len(net.arcs)} arcs")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
