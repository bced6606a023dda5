"""Training problems: least squares, logistic regression, synthetic generators.

Losses are minibatch means, so gradients of equal-size minibatches that
partition the dataset average to the full-batch gradient. All randomness
flows through numpy's default generator (PCG64) seeded explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import GroupPartition, contiguous_partition


def _resolve_batch(n: int, batch):
    if batch is None:
        return slice(None), n
    idx = np.asarray(batch, dtype=np.int64)
    return idx, idx.size


@dataclass
class LeastSquaresProblem:
    """f(x) = (1/(2k)) * ||A_B x - b_B||^2 over a minibatch B of size k."""

    design: np.ndarray
    targets: np.ndarray
    partition: GroupPartition | None = None
    x_true: np.ndarray | None = None
    true_support: np.ndarray | None = None  # bool per group

    @property
    def n_samples(self) -> int:
        return self.design.shape[0]

    @property
    def n_params(self) -> int:
        return self.design.shape[1]

    def loss_and_grad(self, x, batch=None):
        idx, k = _resolve_batch(self.n_samples, batch)
        A = self.design[idx]
        resid = A @ np.asarray(x, dtype=np.float64) - self.targets[idx]
        loss = 0.5 * float(resid @ resid) / k
        grad = (A.T @ resid) / k
        return loss, grad


@dataclass
class LogisticProblem:
    """Mean logistic loss with +-1 labels: (1/k) sum log(1 + exp(-y a.x))."""

    design: np.ndarray
    labels: np.ndarray  # entries in {-1, +1}
    partition: GroupPartition | None = None

    def __post_init__(self):
        self.design = np.asarray(self.design, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.float64)
        if not np.all(np.isin(self.labels, (-1.0, 1.0))):
            raise ValueError("labels must take values in {-1, +1}")

    @property
    def n_samples(self) -> int:
        return self.design.shape[0]

    @property
    def n_params(self) -> int:
        return self.design.shape[1]

    def loss_and_grad(self, x, batch=None):
        idx, k = _resolve_batch(self.n_samples, batch)
        A = self.design[idx]
        y = self.labels[idx]
        margin = y * (A @ np.asarray(x, dtype=np.float64))
        loss = float(np.sum(np.logaddexp(0.0, -margin))) / k
        # sigma(-margin) computed stably through logaddexp
        coef = -y * np.exp(-np.logaddexp(0.0, margin))
        grad = (A.T @ coef) / k
        return loss, grad


def generate_group_sparse_regression(
    n_groups: int = 50,
    group_size: int = 5,
    n_active: int = 10,
    n_samples: int = 600,
    noise_sigma: float = 0.01,
    seed: int = 0,
) -> LeastSquaresProblem:
    """Standard-normal design, group-sparse ground truth, Gaussian noise.

    Active groups are a uniform draw without replacement; their entries have
    magnitudes uniform in [0.5, 1.5] with random signs. Deterministic given
    the seed.
    """
    rng = np.random.default_rng(seed)
    n_params = n_groups * group_size
    active = np.sort(rng.choice(n_groups, size=n_active, replace=False))
    x_true = np.zeros(n_params)
    for g in active:
        lo = g * group_size
        mag = rng.uniform(0.5, 1.5, size=group_size)
        sign = rng.choice([-1.0, 1.0], size=group_size)
        x_true[lo : lo + group_size] = sign * mag
    A = rng.standard_normal((n_samples, n_params))
    b = A @ x_true + noise_sigma * rng.standard_normal(n_samples)
    support = np.zeros(n_groups, dtype=bool)
    support[active] = True
    return LeastSquaresProblem(
        design=A,
        targets=b,
        partition=contiguous_partition(n_groups, group_size),
        x_true=x_true,
        true_support=support,
    )


def generate_logistic_problem(
    n_samples: int = 200, n_features: int = 20, seed: int = 0
) -> LogisticProblem:
    """Separable-ish logistic data from a random linear teacher."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n_samples, n_features))
    w = rng.standard_normal(n_features)
    margin = A @ w + 0.5 * rng.standard_normal(n_samples)
    y = np.where(margin >= 0, 1.0, -1.0)
    return LogisticProblem(design=A, labels=y)
