"""Parameter vectors, group partitions, and diagonal preconditioners.

A parameter vector is a 1-D float64 ndarray. A diagonal preconditioner is a
1-D float64 ndarray of strictly positive entries, interpreted as the diagonal
of a matrix D. Groups are sorted int64 index arrays into the flat vector;
a partition is a disjoint collection of groups whose union may be a strict
subset of the coordinates (unpenalized coordinates are simply not listed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidPartitionError


def as_param_vector(v) -> np.ndarray:
    """Coerce to a finite 1-D float64 array."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"parameter vector must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("parameter vector has non-finite entries")
    return arr


def as_preconditioner(d) -> np.ndarray:
    """Coerce to a 1-D float64 array of strictly positive entries."""
    arr = np.asarray(d, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"preconditioner must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValueError("preconditioner entries must be finite and > 0")
    return arr


@dataclass(frozen=True, init=False, eq=False)
class GroupPartition:
    """Disjoint index groups over a parameter vector of length ``n_params``.

    Groups are stored sorted; the union of groups may omit coordinates,
    which are then treated as unpenalized by every consumer.
    """

    groups: tuple
    n_params: int

    def __init__(self, groups, n_params: int):
        frozen = tuple(
            np.array(sorted(int(i) for i in g), dtype=np.int64) for g in groups
        )
        object.__setattr__(self, "groups", frozen)
        object.__setattr__(self, "n_params", int(n_params))

    def __len__(self) -> int:
        return len(self.groups)

    def __iter__(self):
        return iter(self.groups)

    def covered(self) -> np.ndarray:
        """Sorted array of all grouped coordinate indices."""
        if not self.groups:
            return np.empty(0, dtype=np.int64)
        return np.sort(np.concatenate(self.groups))


def contiguous_partition(n_groups: int, group_size: int) -> GroupPartition:
    """Partition [0, n_groups*group_size) into consecutive equal-size groups."""
    idx = np.arange(n_groups * group_size, dtype=np.int64)
    return GroupPartition(
        [idx[k * group_size : (k + 1) * group_size] for k in range(n_groups)],
        n_params=n_groups * group_size,
    )


def validate_partition(p: GroupPartition) -> None:
    """Raise InvalidPartitionError naming the first offending group.

    Checks, in order per group: non-emptiness, index bounds, and overlap
    with any earlier group.
    """
    seen = np.zeros(p.n_params, dtype=bool)
    for k, g in enumerate(p.groups):
        if g.size == 0:
            raise InvalidPartitionError(f"empty group: group {k}")
        if g[0] < 0 or g[-1] >= p.n_params:
            raise InvalidPartitionError(
                f"index out of range: group {k} touches index "
                f"{g[0] if g[0] < 0 else g[-1]} with n_params={p.n_params}"
            )
        if np.unique(g).size != g.size or np.any(seen[g]):
            raise InvalidPartitionError(f"overlapping groups: group {k}")
        seen[g] = True


def group_l2_norm(v, g) -> float:
    """Euclidean norm of the subvector v[g]."""
    v = np.asarray(v, dtype=np.float64)
    return float(np.linalg.norm(v[np.asarray(g, dtype=np.int64)]))


def weighted_group_norm(v, d, g) -> float:
    """Norm ||D v||_2 restricted to group g, i.e. ||(d*v)[g]||_2."""
    v = np.asarray(v, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    g = np.asarray(g, dtype=np.int64)
    return float(np.linalg.norm(d[g] * v[g]))
