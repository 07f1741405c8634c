import json
from pathlib import Path

import numpy as np
import pytest

from facecut import io, pipeline, synth
from facecut.cutout import CutoutConfig
from facecut.pipeline import JobConfig, MaskJob


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    manifest = synth.make_corpus(
        root, n_videos=4, frames_per_video=3, size=96, seed=7
    )
    return root, manifest


def tree_bytes(root):
    return {
        p.relative_to(root).as_posix(): p.read_bytes()
        for p in sorted(Path(root).rglob("*"))
        if p.is_file()
    }


class TestResizePad:
    def test_identity_when_already_target(self):
        rng = np.random.default_rng(0)
        img = rng.integers(0, 256, size=(224, 224, 3), dtype=np.uint8)
        assert np.array_equal(pipeline.resize_pad(img, 224), img)

    def test_wide_image_letterboxed(self):
        img = np.full((224, 448, 3), 200, dtype=np.uint8)
        out = pipeline.resize_pad(img, 224)
        assert out.shape == (224, 224, 3)
        # content lands in the middle 112 rows, margins stay black
        assert (out[:56] == 0).all()
        assert (out[168:] == 0).all()
        assert (out[56:168] == 200).all()

    def test_tall_image_pillarboxed(self):
        img = np.full((100, 50, 3), 90, dtype=np.uint8)
        out = pipeline.resize_pad(img, 224)
        assert out.shape == (224, 224, 3)
        nw = round(50 * 224 / 100)
        x0 = (224 - nw) // 2
        assert (out[:, :x0] == 0).all()
        assert (out[:, x0 + nw :] == 0).all()
        assert (out[:, x0 : x0 + nw] == 90).all()

    def test_upscale(self):
        img = np.full((10, 10, 3), 33, dtype=np.uint8)
        out = pipeline.resize_pad(img, 30)
        assert out.shape == (30, 30, 3)
        assert (out == 33).all()

    def test_bad_target(self):
        with pytest.raises(ValueError):
            pipeline.resize_pad(np.zeros((4, 4, 3), np.uint8), 0)


class TestBuildMasks:
    def test_planted_manipulation_recovered(self, tmp_path):
        rng = np.random.default_rng(1)
        pts = synth.landmark_template(96, 96)
        real = synth.render_face(pts, 96, 96)
        fake, truth = synth.plant_manipulation(real, rng)
        io.write_image(tmp_path / "real.png", real)
        io.write_image(tmp_path / "fake.png", fake)
        jobs = [MaskJob("v0", 0, str(tmp_path / "real.png"), str(tmp_path / "fake.png"))]
        report = pipeline.build_masks(jobs, tmp_path / "masks")
        assert report == {"total": 1, "written": 1, "failed": 0, "failures": []}
        index = io.read_mask_index(tmp_path / "masks")
        mask = io.read_mask(tmp_path / "masks" / index[io.mask_key("v0", 0)])
        inter = (mask & truth).sum()
        union = (mask | truth).sum()
        assert inter / union >= 0.5

    def test_identical_pair_gives_all_black_mask(self, face96, tmp_path):
        io.write_image(tmp_path / "same.png", face96)
        jobs = [MaskJob("v0", 0, str(tmp_path / "same.png"), str(tmp_path / "same.png"))]
        report = pipeline.build_masks(jobs, tmp_path / "masks")
        assert report["written"] == 1
        index = io.read_mask_index(tmp_path / "masks")
        mask = io.read_mask(tmp_path / "masks" / index[io.mask_key("v0", 0)])
        assert not mask.any()

    def test_worker_count_does_not_change_bytes(self, corpus, tmp_path):
        root, manifest = corpus
        frames = io.read_frame_manifest(manifest)
        jobs, unmatched = pipeline.mask_jobs_from_manifest(frames)
        assert unmatched == []
        assert len(jobs) == 6  # 2 fake videos x 3 frames
        r1 = pipeline.build_masks(jobs, tmp_path / "m1", workers=1)
        r4 = pipeline.build_masks(jobs, tmp_path / "m4", workers=4)
        assert r1 == r4
        assert tree_bytes(tmp_path / "m1") == tree_bytes(tmp_path / "m4")

    def test_dim_mismatch_is_skipped_not_fatal(self, tmp_path):
        io.write_image(tmp_path / "a.png", np.zeros((32, 32, 3), np.uint8))
        io.write_image(tmp_path / "b.png", np.zeros((48, 48, 3), np.uint8))
        io.write_image(tmp_path / "c.png", np.full((32, 32, 3), 9, np.uint8))
        jobs = [
            MaskJob("bad", 0, str(tmp_path / "a.png"), str(tmp_path / "b.png")),
            MaskJob("ok", 0, str(tmp_path / "a.png"), str(tmp_path / "c.png")),
        ]
        report = pipeline.build_masks(jobs, tmp_path / "masks")
        assert report["written"] == 1
        assert report["failed"] == 1
        assert report["failures"][0]["video_id"] == "bad"
        assert "DimMismatchError" in report["failures"][0]["error"]

    def test_unreadable_file_reported(self, tmp_path):
        io.write_image(tmp_path / "a.png", np.zeros((16, 16, 3), np.uint8))
        jobs = [MaskJob("v", 0, str(tmp_path / "a.png"), str(tmp_path / "nope.png"))]
        report = pipeline.build_masks(jobs, tmp_path / "masks")
        assert report["failed"] == 1


class TestRunAugment:
    def _job(self, corpus, out, **kw):
        root, manifest = corpus
        defaults = dict(
            manifest=str(manifest),
            output_dir=str(out),
            cutout=CutoutConfig(p=0.5, seed=11),
        )
        defaults.update(kw)
        return JobConfig(**defaults)

    def test_p_zero_is_identity(self, corpus, tmp_path):
        root, manifest = corpus
        job = self._job(corpus, tmp_path / "out", cutout=CutoutConfig(p=0.0, seed=1))
        report = pipeline.run_augment(job)
        assert report["applied"] == 0
        assert report["failed"] == 0
        assert report["passthrough"] == report["total"]
        for rec in io.read_frame_manifest(manifest):
            out = io.read_image(tmp_path / "out" / Path(rec.path).name)
            assert np.array_equal(out, io.read_image(rec.path))

    def test_worker_determinism(self, corpus, tmp_path):
        root, manifest = corpus
        frames = io.read_frame_manifest(manifest)
        jobs, _ = pipeline.mask_jobs_from_manifest(frames)
        pipeline.build_masks(jobs, tmp_path / "masks")
        reports = []
        for workers, name in ((1, "w1"), (8, "w8")):
            job = self._job(
                corpus,
                tmp_path / name,
                masks_dir=str(tmp_path / "masks"),
                workers=workers,
            )
            reports.append(pipeline.run_augment(job))
        assert reports[0] == reports[1]
        assert tree_bytes(tmp_path / "w1") == tree_bytes(tmp_path / "w8")

    def test_rerun_reproduces_bytes(self, corpus, tmp_path):
        job1 = self._job(corpus, tmp_path / "a")
        job2 = self._job(corpus, tmp_path / "b")
        pipeline.run_augment(job1)
        pipeline.run_augment(job2)
        assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")

    def test_different_seed_changes_output(self, corpus, tmp_path):
        job1 = self._job(corpus, tmp_path / "a", cutout=CutoutConfig(p=1.0, seed=1))
        job2 = self._job(corpus, tmp_path / "b", cutout=CutoutConfig(p=1.0, seed=2))
        pipeline.run_augment(job1)
        pipeline.run_augment(job2)
        a = {k: v for k, v in tree_bytes(tmp_path / "a").items() if k != "report.json"}
        b = {k: v for k, v in tree_bytes(tmp_path / "b").items() if k != "report.json"}
        assert a != b

    def test_missing_landmarks_isolated(self, tmp_path):
        manifest = synth.make_corpus(
            tmp_path / "c", n_videos=2, frames_per_video=2, seed=3
        )
        victim = io.read_frame_manifest(manifest)[0]
        Path(victim.path + ".landmarks.json").unlink()
        job = JobConfig(
            manifest=str(manifest),
            output_dir=str(tmp_path / "out"),
            cutout=CutoutConfig(p=1.0, seed=4),
        )
        report = pipeline.run_augment(job)
        assert report["failed"] == 1
        assert report["failures"][0]["image_id"] == victim.image_id
        assert "MissingLandmarks" in report["failures"][0]["error"]
        assert not (tmp_path / "out" / Path(victim.path).name).exists()
        assert report["processed"] == report["total"] - 1

    def test_missing_mask_warns_and_continues(self, corpus, tmp_path):
        root, manifest = corpus
        frames = io.read_frame_manifest(manifest)
        jobs, _ = pipeline.mask_jobs_from_manifest(frames)
        pipeline.build_masks(jobs, tmp_path / "masks")
        index = io.read_mask_index(tmp_path / "masks")
        dropped = sorted(index)[0]
        del index[dropped]
        io.write_mask_index(tmp_path / "masks", index)
        job = self._job(
            corpus,
            tmp_path / "out",
            masks_dir=str(tmp_path / "masks"),
            cutout=CutoutConfig(p=1.0, seed=5),
        )
        report = pipeline.run_augment(job)
        assert report["failed"] == 0
        assert len(report["warnings"]) == 1
        assert report["warnings"][0]["image_id"] == dropped
        assert "MissingMask" in report["warnings"][0]["warning"]

    def test_report_accounting_and_file(self, corpus, tmp_path):
        job = self._job(corpus, tmp_path / "out")
        report = pipeline.run_augment(job)
        assert report["total"] == report["processed"] + report["failed"]
        assert report["processed"] == report["applied"] + report["passthrough"]
        assert sum(report["strategy_counts"].values()) == report["applied"]
        on_disk = json.loads((tmp_path / "out" / "report.json").read_text())
        assert on_disk == report

    def test_applied_fraction_tracks_p_at_scale(self, tmp_path):
        # 10^4 manifest rows sharing one frame's bytes; the gate draws
        # from (seed, image_id), so distinct video ids are what matters
        import shutil

        size = 48
        pts = synth.landmark_template(size, size)
        face = synth.render_face(pts, size, size)
        frames_dir = tmp_path / "frames"
        frames_dir.mkdir()
        io.write_image(frames_dir / "src.png", face)
        io.write_landmarks(frames_dir / "src.png.landmarks.json", pts)
        records = []
        for i in range(10_000):
            name = f"v{i:05d}_0.png"
            shutil.copyfile(frames_dir / "src.png", frames_dir / name)
            shutil.copyfile(
                frames_dir / "src.png.landmarks.json",
                frames_dir / f"{name}.landmarks.json",
            )
            records.append(
                io.FrameRecord(f"v{i:05d}", 0, str(frames_dir / name), "real")
            )
        io.write_frame_manifest(tmp_path / "m.csv", records)
        job = JobConfig(
            manifest=str(tmp_path / "m.csv"),
            output_dir=str(tmp_path / "out"),
            cutout=CutoutConfig(p=0.5, seed=77),
            workers=8,
        )
        report = pipeline.run_augment(job)
        assert report["failed"] == 0
        assert abs(report["applied_fraction"] - 0.5) <= 0.02

    def test_resize_applied_to_outputs(self, corpus, tmp_path):
        job = self._job(
            corpus,
            tmp_path / "out",
            cutout=CutoutConfig(p=0.0, seed=6),
            resize_to=64,
        )
        pipeline.run_augment(job)
        root, manifest = corpus
        rec = io.read_frame_manifest(manifest)[0]
        out = io.read_image(tmp_path / "out" / Path(rec.path).name)
        assert out.shape == (64, 64, 3)


class TestPreview:
    def test_panel_layout(self, face96, landmarks96):
        cfg = CutoutConfig(p=1.0, seed=0)
        panel = pipeline.preview(face96, landmarks96, None, cfg)
        assert panel.shape == (96, 96 * 3 + 8, 3)

    def test_real_frame_middle_panel_untouched(self, face96, landmarks96):
        cfg = CutoutConfig(p=1.0, seed=1)
        panel = pipeline.preview(face96, landmarks96, None, cfg)
        middle = panel[:, 100:196]
        assert np.array_equal(middle, face96)

    def test_overlay_marks_diff_and_region(self, fake_pair96, landmarks96, face96):
        from facecut.simmask import difference_mask

        fake, _ = fake_pair96
        diff = difference_mask(face96, fake)
        cfg = CutoutConfig(p=1.0, seed=2)
        panel = pipeline.preview(fake, landmarks96, diff, cfg, "ov")
        middle = panel[:, 100:196]
        green = (middle == np.array([0, 255, 0])).all(axis=2)
        changed = (middle != fake).any(axis=2)
        # only diff pixels and the outline may differ from the source frame
        assert (changed & ~diff & ~green).sum() == 0
        # red tint raises the red channel on non-outline diff pixels
        tinted = diff & ~green
        assert (middle[tinted][:, 0] >= fake[tinted][:, 0]).all()

    def test_double_render_identical(self, fake_pair96, landmarks96, face96):
        from facecut.simmask import difference_mask

        fake, _ = fake_pair96
        diff = difference_mask(face96, fake)
        cfg = CutoutConfig(p=0.7, seed=3)
        a = pipeline.preview(fake, landmarks96, diff, cfg, "same")
        b = pipeline.preview(fake, landmarks96, diff, cfg, "same")
        assert np.array_equal(a, b)

    def test_fixed_seed_gives_identical_png_bytes(
        self, fake_pair96, landmarks96, face96, tmp_path
    ):
        from facecut.simmask import difference_mask

        fake, _ = fake_pair96
        diff = difference_mask(face96, fake)
        cfg = CutoutConfig(p=1.0, seed=9)
        for name in ("a.png", "b.png"):
            panel = pipeline.preview(fake, landmarks96, diff, cfg, "golden")
            io.write_image(tmp_path / name, panel)
        assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()

    def test_right_panel_is_augmented_output(self, face96, landmarks96):
        from facecut.cutout import face_cutout

        cfg = CutoutConfig(p=1.0, seed=4)
        panel = pipeline.preview(face96, landmarks96, None, cfg, "rp")
        outcome = face_cutout(face96, landmarks96, None, cfg, "rp")
        assert np.array_equal(panel[:, 200:], outcome.image)


class TestJobConfig:
    def test_worker_validation(self):
        with pytest.raises(ValueError):
            JobConfig(manifest="m", output_dir="o", workers=0)
