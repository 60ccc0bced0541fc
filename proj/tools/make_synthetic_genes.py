#!/usr/bin/env python3
"""Regenerates data/synthetic_genes.csv.

Eight genes, two cohorts of 200 samples. Each cohort's spins come from an
exact 3-spin model with one strong planted triangle (genes G2, G5, G7) and
one weaker cohort-specific triangle. Expression = offset + scale*spin + noise.
"""
import itertools
import sys

import numpy as np

P = 8
PLANTED = (2, 5, 7)
COHORTS = {
    "normal": {PLANTED: 1.2, (1, 3, 8): 0.4},
    "tumor": {PLANTED: 1.0, (4, 6, 8): 0.5},
}
N_PER_COHORT = 200


def sample(couplings, n, rng):
    states = np.array(list(itertools.product([-1, 1], repeat=P)))
    energy = np.zeros(len(states))
    for edge, theta in couplings.items():
        energy += theta * np.prod(states[:, [v - 1 for v in edge]], axis=1)
    prob = np.exp(energy - energy.max())
    prob /= prob.sum()
    return states[rng.choice(len(states), size=n, p=prob)]


def main(path):
    rng = np.random.default_rng(20240601)
    offsets = rng.uniform(4.0, 9.0, size=P)
    scales = rng.uniform(0.8, 1.5, size=P)
    lines = ["sample,class," + ",".join(f"G{v}" for v in range(1, P + 1))]
    sid = 0
    for label, couplings in COHORTS.items():
        spins = sample(couplings, N_PER_COHORT, rng)
        values = offsets + scales * spins + rng.normal(0.0, 0.2, size=spins.shape)
        for row in values:
            sid += 1
            lines.append(f"S{sid:03d},{label}," + ",".join(f"{v:.4f}" for v in row))
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/synthetic_genes.csv")
