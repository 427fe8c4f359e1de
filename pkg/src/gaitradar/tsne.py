"""Exact t-SNE: Gaussian input affinities calibrated by perplexity, Student-t
output kernel, KL-divergence gradient descent with momentum and early
exaggeration. O(n^2), dense, deterministic for a fixed seed."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Q_FLOOR = 1e-12


class TsneDivergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 30.0
    iterations: int = 1000
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    learning_rate: float = 200.0
    momentum_start: float = 0.5
    momentum_final: float = 0.8
    momentum_switch_iter: int = 250
    seed: int = 0

    def validate(self, n: int) -> None:
        if not 1.0 < self.perplexity < n / 3.0:
            raise ValueError(
                f"perplexity {self.perplexity} must be in (1, n/3) for n={n}")
        if self.iterations < 250:
            raise ValueError("iterations must be >= 250")


def _squared_distances(x: np.ndarray) -> np.ndarray:
    sq = np.sum(x**2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.fill_diagonal(d2, 0.0)
    return np.maximum(d2, 0.0)


def _row_affinities(d2_row: np.ndarray, perplexity: float,
                    tol: float = 1e-5, max_iter: int = 100
                    ) -> np.ndarray:
    """Conditional Gaussian distribution over one row, with the precision found
    by bisection so the Shannon entropy equals log2(perplexity) within tol."""
    target = np.log2(perplexity)
    beta, beta_lo, beta_hi = 1.0, 0.0, np.inf
    # Guard against duplicate points: with all-zero distances the entropy is
    # flat in beta, so the loop exits at max_iter with a uniform row.
    for _ in range(max_iter):
        w = np.exp(-beta * d2_row)
        total = w.sum()
        if total <= 0:
            beta_hi = beta
            beta = (beta_lo + beta_hi) / 2.0 if np.isfinite(beta_hi) else beta / 2.0
            continue
        p = w / total
        nz = p > 0
        entropy = -np.sum(p[nz] * np.log2(p[nz]))
        if abs(entropy - target) < tol:
            break
        if entropy > target:
            beta_lo = beta
            beta = beta * 2.0 if np.isinf(beta_hi) else (beta_lo + beta_hi) / 2.0
        else:
            beta_hi = beta
            beta = (beta_lo + beta_hi) / 2.0
    return p


def input_affinities(x: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetric joint probabilities P: zero diagonal, sums to 1."""
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite feature values")
    d2 = _squared_distances(x)
    cond = np.zeros((n, n))
    for i in range(n):
        row = np.delete(d2[i], i)
        p = _row_affinities(row, perplexity)
        cond[i, np.arange(n) != i] = p
    p_joint = (cond + cond.T) / (2.0 * n)
    np.fill_diagonal(p_joint, 0.0)
    return p_joint / p_joint.sum()


def _q_matrix(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Student-t (1 dof) joint probabilities Q and the unnormalized kernel W."""
    w = 1.0 / (1.0 + _squared_distances(y))
    np.fill_diagonal(w, 0.0)
    q = np.maximum(w / w.sum(), Q_FLOOR)
    np.fill_diagonal(q, 0.0)
    return q, w


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """sum p * log(p / q) over entries with p > 0, in nats."""
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / np.maximum(q[mask], Q_FLOOR))))


def kl_gradient(p: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Analytic gradient of KL(P || Q(Y)) with respect to the embedding Y."""
    q, w = _q_matrix(y)
    pq = (p - q) * w
    return 4.0 * ((np.diag(pq.sum(axis=1)) - pq) @ y)


def tsne(x: np.ndarray, cfg: TsneConfig = TsneConfig()
         ) -> tuple[np.ndarray, list[float]]:
    """Embed points to 2D; returns (n, 2) coordinates and the per-iteration KL trace."""
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    if n < 4:
        raise ValueError(f"embedding needs at least 4 points, got {n}")
    cfg.validate(n)
    p = input_affinities(x, cfg.perplexity)

    rng = np.random.default_rng(cfg.seed)
    y = rng.normal(0.0, 1e-4, size=(n, 2))
    velocity = np.zeros_like(y)
    gains = np.ones_like(y)  # delta-bar-delta per-coordinate step adaptation
    trace: list[float] = []

    for it in range(cfg.iterations):
        exag = cfg.early_exaggeration if it < cfg.exaggeration_iters else 1.0
        grad = kl_gradient(p * exag, y)
        if not np.all(np.isfinite(grad)):
            raise TsneDivergenceError(
                f"non-finite gradient at iteration {it}, "
                f"max |grad| = {np.nanmax(np.abs(grad)):.3e}")
        momentum = (cfg.momentum_start if it < cfg.momentum_switch_iter
                    else cfg.momentum_final)
        same_direction = np.sign(grad) == np.sign(velocity)
        gains = np.where(same_direction, gains * 0.8, gains + 0.2)
        gains = np.maximum(gains, 0.01)
        velocity = momentum * velocity - cfg.learning_rate * gains * grad
        y = y + velocity
        y = y - y.mean(axis=0)
        q, _ = _q_matrix(y)
        trace.append(kl_divergence(p, q))
    return y, trace
