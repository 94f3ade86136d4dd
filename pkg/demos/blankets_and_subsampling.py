"""Markov blankets isolate a community before structure learning.

Learning a community in isolation distorts edges near its border, so
each community is expanded by the estimated Markov blankets of its
members.  When the expanded set is still too large to learn in one
piece, repeated neighborhood subsamples of bounded size cover it.
"""

from pathlib import Path

from bnsl import (build_substrate, community_blanket, consensus_partition,
                  forward_sample, inner_markov_graph, load_network,
                  rnn_sample)

NETWORKS = Path(__file__).resolve().parents[1] / "networks"


def main():
    net = load_network(NETWORKS / "alarm.net")
    data = forward_sample(net, 20000, seed=0)
    substrate = build_substrate(data)

    partition = consensus_partition(data)
    community = max(partition.communities, key=len)
    print("community:", ", ".join(net.names[v] for v in community))

    br = community_blanket(data, substrate, community)
    print(f"blanket expansion adds "
          f"{len(br.expanded) - len(br.community)} variables:")
    added = sorted(set(br.expanded) - set(br.community))
    print("  " + ", ".join(net.names[v] for v in added))
    for v in sorted(community)[:4]:
        names = ", ".join(net.names[u] for u in br.blankets[v])
        print(f"  blanket({net.names[v]}) = {{{names}}}")

    img = inner_markov_graph(br.community, br.blankets)
    n_edges = sum(len(nb) for nb in img.values()) // 2
    print(f"inner graph has {n_edges} edges over the community")

    subsamples = rnn_sample(img, br.blankets, seed=0)
    print(f"{len(subsamples)} neighborhood subsamples:")
    for sc in subsamples:
        names = ", ".join(net.names[v] for v in sc.core)
        print(f"  core [{names}] padded to {len(sc.members)} members")


if __name__ == "__main__":
    main()
