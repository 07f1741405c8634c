#!/usr/bin/env python3
"""Walk a synthetic corpus through the full toolchain.

Stages: corpus -> difference masks -> augmentation -> identity clusters
-> leak-free split -> audit -> one preview composite. Exits nonzero if
any stage does."""

import argparse
import sys
from pathlib import Path

from facecut import cli, io, synth


def stage(name, argv):
    print(f"\n== {name}: facecut {' '.join(str(a) for a in argv)}")
    rc = cli.main([str(a) for a in argv])
    if rc != 0:
        print(f"stage '{name}' exited {rc}", file=sys.stderr)
        sys.exit(rc)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--workdir", default="demo_run")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    root = Path(args.workdir)
    manifest = synth.make_corpus(
        root / "corpus", n_videos=12, frames_per_video=5, seed=args.seed
    )
    frames = io.read_frame_manifest(manifest)
    real_ids = sorted({f.video_id for f in frames if f.label == "real"})
    embeddings = synth.make_identity_embeddings(
        real_ids, frames_per_video=5, n_identities=4,
        seed=args.seed + 1, outlier_videos=1,
    )
    io.write_embeddings(root / "embeddings.jsonl", embeddings)
    print(f"corpus: {len(frames)} frames, {len(real_ids)} real videos")

    stage("mask", ["mask", "--manifest", manifest, "--out", root / "masks"])
    stage("augment", [
        "augment", "--manifest", manifest, "--out", root / "augmented",
        "--masks-dir", root / "masks", "--p", "0.5",
        "--seed", args.seed, "--workers", "4",
    ])
    stage("cluster", [
        "cluster", "--embeddings", root / "embeddings.jsonl",
        "--out", root / "clusters.csv", "--manifest", manifest,
        "--pca-out", root / "pca.csv",
    ])
    stage("split", [
        "split", "--manifest", manifest, "--clusters", root / "clusters.csv",
        "--out", root / "plan.csv", "--ratios", "0.6,0.2,0.2",
        "--seed", args.seed,
    ])
    stage("audit", [
        "audit", "--manifest", manifest, "--clusters", root / "clusters.csv",
        "--plan", root / "plan.csv", "--out", root / "audit.json",
    ])

    fake = next(f for f in frames if f.label == "fake")
    stage("preview", [
        "preview", "--image", fake.path,
        "--mask", root / "masks" / f"{fake.video_id}_{fake.frame_id}.png",
        "--out", root / "preview.png", "--seed", args.seed,
    ])

    print(f"\nall stages clean; outputs under {root}/")


if __name__ == "__main__":
    main()
