import numpy as np
import pytest

from gaitradar.tsne import (TsneConfig, input_affinities, kl_divergence,
                            kl_gradient, tsne)


def three_blobs(n_per: int = 20, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    pts = np.vstack([c + rng.normal(0, 0.5, size=(n_per, 2)) for c in centers])
    labels = np.repeat(np.arange(3), n_per)
    return pts, labels


def silhouette(y: np.ndarray, labels: np.ndarray) -> float:
    n = len(y)
    d = np.sqrt(((y[:, None, :] - y[None, :, :]) ** 2).sum(axis=2))
    scores = np.empty(n)
    for i in range(n):
        same = labels == labels[i]
        same[i] = False
        a = d[i, same].mean()
        b = min(d[i, labels == c].mean() for c in np.unique(labels)
                if c != labels[i])
        scores[i] = (b - a) / max(a, b)
    return float(scores.mean())


class TestInputAffinities:
    def test_equilateral_triangle_uniform(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
        p = input_affinities(pts, perplexity=2.0)
        off = p[~np.eye(3, dtype=bool)]
        np.testing.assert_allclose(off, 1.0 / 6.0, atol=1e-9)

    def test_symmetric_zero_diagonal_normalized(self):
        rng = np.random.default_rng(1)
        p = input_affinities(rng.normal(size=(30, 5)), perplexity=8.0)
        np.testing.assert_allclose(p, p.T, atol=1e-15)
        assert np.all(np.diag(p) == 0.0)
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(p >= 0)

    def test_perplexity_calibration(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(50, 4))
        perp = 12.0
        target = np.log2(perp)
        # recompute the conditional rows from the symmetrized matrix is not
        # possible, so verify against a direct per-row recalibration oracle
        from gaitradar.tsne import _row_affinities, _squared_distances
        d2 = _squared_distances(x)
        for i in range(len(x)):
            row = np.delete(d2[i], i)
            p = _row_affinities(row, perp)
            nz = p > 0
            entropy = -np.sum(p[nz] * np.log2(p[nz]))
            assert abs(entropy - target) < 1e-4

    def test_duplicate_points_handled(self):
        pts = np.vstack([np.zeros((3, 2)), np.ones((3, 2))])
        p = input_affinities(pts, perplexity=2.0)
        assert np.all(np.isfinite(p))
        assert p.sum() == pytest.approx(1.0)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            input_affinities(np.zeros((1, 2)), 2.0)
        with pytest.raises(ValueError):
            input_affinities(np.array([[np.nan, 0.0], [1.0, 1.0]]), 1.5)


class TestGradient:
    def test_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(12, 4))
        p = input_affinities(x, perplexity=3.0)
        y = rng.normal(0, 1.0, size=(12, 2))
        grad = kl_gradient(p, y)

        from gaitradar.tsne import _q_matrix
        eps = 1e-6
        fd = np.zeros_like(y)
        for i in range(len(y)):
            for j in range(2):
                for sign in (+1, -1):
                    yp = y.copy()
                    yp[i, j] += sign * eps
                    q, _ = _q_matrix(yp)
                    fd[i, j] += sign * kl_divergence(p, q)
        fd /= 2 * eps
        rel = np.abs(grad - fd).max() / np.abs(fd).max()
        assert rel < 1e-4

    def test_zero_at_matching_distributions(self):
        # two symmetric pairs: any configuration with Q == P has zero gradient;
        # easiest case is when P comes from the embedding's own kernel
        rng = np.random.default_rng(4)
        y = rng.normal(size=(8, 2))
        from gaitradar.tsne import _q_matrix
        q, _ = _q_matrix(y)
        grad = kl_gradient(q, y)
        np.testing.assert_allclose(grad, 0.0, atol=1e-10)


class TestTsne:
    def test_three_blobs_separate(self):
        pts, labels = three_blobs()
        y, trace = tsne(pts, TsneConfig(perplexity=15.0, iterations=500, seed=0))
        assert silhouette(y, labels) > 0.6

    def test_kl_decreases_after_exaggeration(self):
        pts, _ = three_blobs(n_per=10, seed=5)
        cfg = TsneConfig(perplexity=6.0, iterations=400, seed=1)
        _, trace = tsne(pts, cfg)
        assert trace[-1] < trace[cfg.exaggeration_iters]
        assert trace[-1] >= 0.0

    def test_deterministic_per_seed(self):
        pts, _ = three_blobs(n_per=8, seed=6)
        cfg = TsneConfig(perplexity=5.0, iterations=250, seed=7)
        y1, t1 = tsne(pts, cfg)
        y2, t2 = tsne(pts, cfg)
        np.testing.assert_array_equal(y1, y2)
        assert t1 == t2

    def test_embedding_centered(self):
        pts, _ = three_blobs(n_per=8, seed=8)
        y, _ = tsne(pts, TsneConfig(perplexity=5.0, iterations=250, seed=2))
        np.testing.assert_allclose(y.mean(axis=0), 0.0, atol=1e-9)

    def test_rejects_invalid_config(self):
        pts, _ = three_blobs(n_per=4)
        with pytest.raises(ValueError):
            tsne(pts, TsneConfig(perplexity=0.5))
        with pytest.raises(ValueError):
            tsne(pts, TsneConfig(perplexity=30.0))  # >= n/3 for n=12
        with pytest.raises(ValueError):
            tsne(pts, TsneConfig(perplexity=3.0, iterations=10))
        with pytest.raises(ValueError):
            tsne(pts[:3], TsneConfig(perplexity=1.5))
