#!/usr/bin/env python3
"""Generate a synthetic demo corpus: frames, landmark sidecars, manifest
and per-frame identity encodings. Everything downstream (mask, augment,
cluster, split, eval) can run against the output directory."""

import argparse
from pathlib import Path

from facecut import io, synth


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True, help="corpus root directory")
    ap.add_argument("--videos", type=int, default=12)
    ap.add_argument("--frames", type=int, default=5)
    ap.add_argument("--size", type=int, default=96)
    ap.add_argument("--fake-fraction", type=float, default=0.5)
    ap.add_argument("--identities", type=int, default=4)
    ap.add_argument("--outliers", type=int, default=1,
                    help="videos whose encodings land in DBSCAN noise")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    root = Path(args.out)
    manifest = synth.make_corpus(
        root,
        n_videos=args.videos,
        frames_per_video=args.frames,
        size=args.size,
        seed=args.seed,
        fake_fraction=args.fake_fraction,
    )
    frames = io.read_frame_manifest(manifest)
    real_ids = sorted({f.video_id for f in frames if f.label == "real"})
    embeddings = synth.make_identity_embeddings(
        real_ids,
        frames_per_video=args.frames,
        n_identities=args.identities,
        seed=args.seed + 1,
        outlier_videos=args.outliers,
    )
    io.write_embeddings(root / "embeddings.jsonl", embeddings)

    n_fake = sum(1 for f in frames if f.label == "fake")
    print(f"corpus at {root}")
    print(f"  frames: {len(frames)} ({n_fake} fake)")
    print(f"  manifest: {manifest}")
    print(f"  embeddings: {root / 'embeddings.jsonl'}")


if __name__ == "__main__":
    main()
