import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from facecut import clustering
from facecut.clustering import NOISE, DbscanParams, FaceEmbedding
from facecut.errors import DanglingSourceError, EmptyInputError, RankDeficientError
from facecut.split import VideoRecord


def blobs(rng, centers, per=20, sigma=0.05, dim=8):
    pts = []
    for c in centers:
        mu = np.zeros(dim)
        mu[: len(c)] = c
        pts.append(mu + rng.normal(0, sigma, size=(per, dim)))
    x = np.vstack(pts)
    return x[rng.permutation(len(x))]


class TestDbscan:
    def test_three_blobs(self):
        rng = np.random.default_rng(0)
        x = blobs(rng, [(0, 0), (5, 0), (0, 5)])
        labels = clustering.dbscan(x, DbscanParams(eps=0.5, min_pts=5))
        assert set(labels) == {0, 1, 2}
        # points from one generator blob never split across labels
        for lab in (0, 1, 2):
            member = x[labels == lab]
            assert member.std(axis=0).max() < 1.0

    def test_three_blobs_stable_across_eps(self):
        # an order of magnitude of eps around the blob scale, all well
        # below the center separation, gives the same three clusters
        rng = np.random.default_rng(3)
        x = blobs(rng, [(0, 0), (5, 0), (0, 5)])
        for eps in np.geomspace(0.25, 2.0, 5):
            labels = clustering.dbscan(x, DbscanParams(eps=float(eps), min_pts=5))
            assert labels.max() == 2
            assert (labels == NOISE).sum() == 0

    def test_min_pts_one_gives_eps_components(self):
        x = np.array([[0.0], [0.9], [1.8], [10.0]])
        labels = clustering.dbscan(x, DbscanParams(eps=1.0, min_pts=1))
        # every point is core, so even the singleton forms a cluster
        assert labels.tolist() == [0, 0, 0, 1]

    def test_eps_boundary_inclusive(self):
        x = np.array([[0.0], [1.0], [2.0]])
        labels = clustering.dbscan(x, DbscanParams(eps=1.0, min_pts=3))
        # the middle point reaches both ends at exactly eps
        assert labels.tolist() == [0, 0, 0]

    def test_self_counts_toward_min_pts(self):
        x = np.array([[0.0], [0.2]])
        labels = clustering.dbscan(x, DbscanParams(eps=0.5, min_pts=2))
        assert labels.tolist() == [0, 0]

    def test_isolated_points_are_noise(self):
        x = np.array([[0.0], [10.0], [20.0]])
        labels = clustering.dbscan(x, DbscanParams(eps=1.0, min_pts=2))
        assert labels.tolist() == [NOISE, NOISE, NOISE]

    def test_border_point_attaches_to_first_core(self):
        # two dense blobs, one border point reachable from both
        left = np.full((5, 1), 0.0)
        right = np.full((5, 1), 2.0)
        border = np.array([[1.0]])
        x = np.vstack([left, right, border])
        labels = clustering.dbscan(x, DbscanParams(eps=1.0, min_pts=5))
        assert labels[-1] == labels[0]

    def test_canonical_label_order(self):
        rng = np.random.default_rng(1)
        x = blobs(rng, [(0, 0), (5, 0), (0, 5), (5, 5)])
        labels = clustering.dbscan(x, DbscanParams(eps=0.5, min_pts=5))
        firsts = [np.nonzero(labels == lab)[0][0] for lab in range(labels.max() + 1)]
        assert firsts == sorted(firsts)

    def test_matches_reference_implementation(self):
        # the reference orders labels differently, so compare the parts
        # that are label-free: noise set, core partition, border validity
        for seed in range(30):
            rng = np.random.default_rng(seed)
            n_blobs = int(rng.integers(2, 5))
            centers = rng.uniform(-10, 10, size=(n_blobs, 2))
            x = blobs(rng, centers, per=int(rng.integers(8, 25)), sigma=0.3)
            x = np.vstack([x, rng.uniform(-30, 30, size=(5, x.shape[1]))])
            params = DbscanParams(eps=1.0, min_pts=4)
            got = clustering.dbscan(x, params)
            ref = oracles.dbscan_reference(x, params.eps, params.min_pts)
            core = oracles.core_points_brute(x, params.eps, params.min_pts)
            assert np.array_equal(got == NOISE, ref == NOISE), f"seed {seed}"
            assert oracles.core_partition(x, got, core) == oracles.core_partition(
                x, ref, core
            ), f"seed {seed}"
            for i in np.nonzero(~core & (got != NOISE))[0]:
                near = np.linalg.norm(x - x[i], axis=1) <= params.eps
                assert (near & core & (got == got[i])).any(), f"seed {seed}"

    def test_permutation_invariant_partition(self):
        rng = np.random.default_rng(7)
        x = blobs(rng, [(0, 0), (4, 4)], per=15, sigma=0.2)
        params = DbscanParams(eps=0.8, min_pts=4)
        base = clustering.dbscan(x, params)
        base_core = oracles.core_points_brute(x, params.eps, params.min_pts)
        base_parts = oracles.core_partition(x, base, base_core)
        for seed in range(10):
            perm = np.random.default_rng(seed).permutation(len(x))
            lp = clustering.dbscan(x[perm], params)
            # map back to original indices before comparing
            back = np.empty_like(lp)
            back[perm] = lp
            assert oracles.core_partition(x, back, base_core) == base_parts
            assert np.array_equal(
                oracles.core_points_brute(x[perm], params.eps, params.min_pts),
                base_core[perm],
            )

    def test_empty_input_raises(self):
        with pytest.raises(EmptyInputError):
            clustering.dbscan(np.empty((0, 2)))

    def test_param_validation(self):
        with pytest.raises(ValueError):
            DbscanParams(eps=0.0)
        with pytest.raises(ValueError):
            DbscanParams(min_pts=0)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_label_contract(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.uniform(-3, 3, size=(int(rng.integers(3, 40)), 2))
        labels = clustering.dbscan(x, DbscanParams(eps=1.0, min_pts=3))
        assert labels.shape == (len(x),)
        pos = sorted(set(labels[labels != NOISE]))
        assert pos == list(range(len(pos)))


class TestVideoClusters:
    @staticmethod
    def _embs(spec):
        # spec: {video_id: [vector, ...]}
        out = []
        for vid, vecs in spec.items():
            for f, v in enumerate(vecs):
                out.append(FaceEmbedding(vid, f, np.asarray(v, float)))
        return out

    def test_majority_vote(self):
        a = [0.0, 0.0]
        b = [5.0, 5.0]
        embs = self._embs(
            {
                "v1": [a, a, a, a, b],
                "v2": [b, b, b, b, b],
            }
        )
        got = clustering.video_clusters(embs, DbscanParams(eps=0.5, min_pts=4))
        assert got["v1"] == 0
        assert got["v2"] == 1

    def test_tie_goes_to_smaller_id(self):
        a = [0.0, 0.0]
        b = [5.0, 5.0]
        embs = self._embs(
            {
                "anchor_a": [a] * 4,
                "anchor_b": [b] * 4,
                "split": [a, a, b, b],
            }
        )
        got = clustering.video_clusters(embs, DbscanParams(eps=0.5, min_pts=4))
        assert got["split"] == min(got["anchor_a"], got["anchor_b"])

    def test_all_noise_video(self):
        a = [0.0, 0.0]
        embs = self._embs(
            {
                "dense": [a] * 6,
                "stray": [[40.0, 0.0], [0.0, 40.0], [40.0, 40.0]],
            }
        )
        got = clustering.video_clusters(embs, DbscanParams(eps=0.5, min_pts=4))
        assert got["dense"] == 0
        assert got["stray"] == NOISE

    def test_noise_frames_ignored_in_vote(self):
        a = [0.0, 0.0]
        embs = self._embs(
            {
                "v": [a, a, a, a, [99.0, 0.0], [0.0, 99.0], [99.0, 99.0]],
            }
        )
        got = clustering.video_clusters(embs, DbscanParams(eps=0.5, min_pts=4))
        assert got["v"] == 0

    def test_empty_raises(self):
        with pytest.raises(EmptyInputError):
            clustering.video_clusters([])


class TestPropagateToFakes:
    def test_fake_inherits_source(self):
        manifest = [
            VideoRecord("r1", "real"),
            VideoRecord("f1", "fake", source_video_id="r1"),
        ]
        got = clustering.propagate_to_fakes({"r1": 3}, manifest)
        assert got == {"r1": 3, "f1": 3}

    def test_identity_manifest_counts(self):
        # 59 identities, 10 fakes per real: every cluster's video count
        # must come out at 11x its real count after propagation
        n_ids, fakes_per = 59, 10
        assign = {f"real_{i:03d}": i % 7 for i in range(n_ids)}
        manifest = [VideoRecord(f"real_{i:03d}", "real") for i in range(n_ids)]
        for i in range(n_ids):
            for j in range(fakes_per):
                manifest.append(
                    VideoRecord(f"fake_{i:03d}_{j}", "fake", source_video_id=f"real_{i:03d}")
                )
        got = clustering.propagate_to_fakes(assign, manifest)
        assert len(got) == n_ids * (1 + fakes_per)
        for c in range(7):
            reals = sum(1 for v in assign.values() if v == c)
            total = sum(1 for v in got.values() if v == c)
            assert total == (1 + fakes_per) * reals

    def test_dangling_source_raises(self):
        manifest = [VideoRecord("f1", "fake", source_video_id="missing")]
        with pytest.raises(DanglingSourceError):
            clustering.propagate_to_fakes({}, manifest)

    def test_unassigned_real_raises(self):
        manifest = [VideoRecord("r9", "real")]
        with pytest.raises(DanglingSourceError):
            clustering.propagate_to_fakes({}, manifest)


class TestPca2d:
    def test_planar_data_distances_preserved(self):
        rng = np.random.default_rng(0)
        basis = np.linalg.qr(rng.normal(size=(32, 2)))[0]
        coords = rng.normal(size=(50, 2)) * [3.0, 1.0]
        x = coords @ basis.T
        proj = clustering.pca_2d(x)
        d_orig = np.linalg.norm(x[:, None] - x[None, :], axis=-1)
        d_proj = np.linalg.norm(proj[:, None] - proj[None, :], axis=-1)
        assert np.allclose(d_orig, d_proj, atol=1e-8)

    def test_isotropic_explained_variance(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(6000, 128))
        proj = clustering.pca_2d(x)
        total = ((x - x.mean(axis=0)) ** 2).sum()
        explained = (proj**2).sum()
        assert abs(explained / total - 2 / 128) <= 0.01

    def test_sign_convention_deterministic(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(40, 5)) * [5, 2, 1, 1, 1]
        a = clustering.pca_2d(x)
        b = clustering.pca_2d(x.copy())
        assert np.array_equal(a, b)
        # projection onto the dominant axis keeps the data spread ordering
        assert a[:, 0].std() >= a[:, 1].std()

    def test_duplicated_points_project_identically(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(40, 16))
        proj = clustering.pca_2d(np.vstack([x, x]))
        assert np.array_equal(proj[:40], proj[40:])

    def test_constant_data_rank_deficient(self):
        x = np.ones((10, 4))
        with pytest.raises(RankDeficientError):
            clustering.pca_2d(x)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            clustering.pca_2d(np.zeros((2, 4)))
