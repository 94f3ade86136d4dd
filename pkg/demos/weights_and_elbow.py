"""Pairwise variable weights and the elbow cut that sparsifies them.

Every pair of variables gets a dependence weight; seven weight
functions are available, from raw mutual information to entropy and
PageRank normalized variants.  The elbow cut sorts the weights,
draws a chord from the strongest to the weakest, and truncates at the
point farthest from that chord.
"""

from pathlib import Path

from bnsl import elbow_truncate, forward_sample, load_network, weight_matrix
from bnsl.weights import WEIGHT_FUNCTIONS

NETWORKS = Path(__file__).resolve().parents[1] / "networks"


def main():
    net = load_network(NETWORKS / "insurance.net")
    data = forward_sample(net, 10000, seed=1)
    n_pairs = net.n_vars * (net.n_vars - 1) // 2
    print(f"{net.n_vars} variables, {n_pairs} pairs")

    for fn in WEIGHT_FUNCTIONS:
        g = weight_matrix(data, fn)
        cut = elbow_truncate(g)
        flag = " (degenerate)" if cut.degenerate else ""
        print(f"{fn:<12} threshold {cut.threshold:.4f} keeps "
              f"{cut.pruned.m}/{g.m} edges{flag}")

    g = weight_matrix(data, "MI")
    cut = elbow_truncate(g)
    top = sorted(cut.pruned.edges(),
                 key=lambda e: -cut.pruned.weight(*e))[:5]
    print("strongest retained pairs under MI:")
    for i, j in top:
        print(f"  {net.names[i]} -- {net.names[j]} "
              f"({cut.pruned.weight(i, j):.4f})")


if __name__ == "__main__":
    main()
