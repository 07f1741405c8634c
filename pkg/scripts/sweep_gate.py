#!/usr/bin/env python3
"""Sweep the augmentation knobs over a synthetic corpus and tabulate
what actually got applied: applied fraction, mean overlap with the
difference mask, and which strategies fired. Useful for sanity-checking
a (p, gamma_h) choice before an expensive training run."""

import argparse
from collections import Counter

import numpy as np

from facecut import simmask, synth
from facecut.cutout import CutoutConfig, face_cutout


def build_pairs(n, size, seed):
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n):
        pts = synth.landmark_template(size, size, jitter=1.0, rng=rng)
        real = synth.render_face(pts, size, size)
        fake, _ = synth.plant_manipulation(real, rng)
        pairs.append((fake, pts, simmask.difference_mask(real, fake)))
    return pairs


def sweep_cell(pairs, p, gamma_h, trials, seed):
    cfg = CutoutConfig(p=p, gamma_h=gamma_h, seed=seed)
    applied = 0
    rhos = []
    strategies = Counter()
    for i in range(trials):
        fake, pts, diff = pairs[i % len(pairs)]
        out = face_cutout(fake, pts, diff, cfg, f"sweep:{p}:{gamma_h}:{i}")
        if out.applied:
            applied += 1
            strategies[out.region.strategy.value] += 1
            if out.region.rho is not None:
                rhos.append(out.region.rho)
    top = ",".join(f"{k}:{v}" for k, v in strategies.most_common(3))
    return applied / trials, float(np.mean(rhos)) if rhos else float("nan"), top


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=16, help="distinct fake frames")
    ap.add_argument("--trials", type=int, default=500, help="calls per cell")
    ap.add_argument("--size", type=int, default=96)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    pairs = build_pairs(args.pairs, args.size, args.seed)
    ps = (0.1, 0.3, 0.5, 0.7, 0.9)
    gammas = (0.1, 0.3, 0.5)

    print(f"{'p':>4} {'gamma':>6} {'applied':>8} {'mean_rho':>9}  top strategies")
    for gamma in gammas:
        for p in ps:
            frac, mean_rho, top = sweep_cell(
                pairs, p, gamma, args.trials, args.seed
            )
            print(f"{p:4.1f} {gamma:6.1f} {frac:8.3f} {mean_rho:9.4f}  {top}")


if __name__ == "__main__":
    main()
