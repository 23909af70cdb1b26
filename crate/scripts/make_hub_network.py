"""Deterministic sparse hub-and-spoke network used in place of the E. coli
transcription network: a few high-degree regulators whose targets rarely
connect to each other, plus a thin random background."""

import random
import sys

N = 100
HUB_DEGREES = [10, 8, 7, 6, 6, 5, 5, 4]
BACKGROUND_EDGES = 60


def build(seed=20240531, hub_degrees=HUB_DEGREES, background=BACKGROUND_EDGES):
    rng = random.Random(seed)
    hubs = list(range(len(hub_degrees)))
    others = list(range(len(hub_degrees), N))
    edges = set()
    for h, d in zip(hubs, hub_degrees):
        for t in rng.sample(others, d):
            edges.add((h, t))
    # regulators occasionally regulate each other
    edges.update({(0, 3), (1, 4), (2, 5)})
    while len(edges) < sum(hub_degrees) + 3 + background:
        a, b = sorted(rng.sample(others, 2))
        edges.add((a, b))
    return sorted(tuple(sorted(e)) for e in edges)


def main(out):
    edges = build()
    with open(out, "w") as f:
        f.write("# synthetic hub-and-spoke network (100 nodes), generated by scripts/make_hub_network.py\n")
        f.write(f"nodes: {' '.join(f'v{i}' for i in range(N))}\n")
        for a, b in edges:
            f.write(f"v{a} v{b}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/hub_network.edgelist")
