"""Structural pruning of layered networks from zeroed weight groups.

A unit whose entire outgoing weight column at the next layer is zero
contributes nothing downstream and is deleted (its incoming row, bias, and
the zero column). A unit whose incoming row is zero outputs the constant
act(bias); it is deleted too, with that constant folded into the next
layer's bias, which keeps the pruned network functionally identical for any
activation. Scanning runs from the output layer toward the input and repeats
until a fixpoint; removals can cascade in both directions because deleting
rows can empty columns one layer down and vice versa.

The output layer is never pruned, and neither are input features. Every
activation must map 0 to 0, otherwise pruning refuses to run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateLayerError, InvalidPartitionError
from .groups import GroupPartition
from .network import ACTIVATIONS, IDENTITY, Layer, LayeredNetwork, RELU, network_forward

_ZERO_PRESERVING = (RELU, IDENTITY)


@dataclass
class GroupMasks:
    """Per-layer boolean masks over rows/columns; True marks a zero group."""

    row: list  # per layer: bool array (out,) or None
    col: list  # per layer: bool array (in,) or None
    zero_tol: float
    n_groups: int
    n_zero_groups: int

    def direct_group_sparsity(self) -> float:
        """Fraction of groups with norm above the tolerance."""
        if self.n_groups == 0:
            return 0.0
        return (self.n_groups - self.n_zero_groups) / self.n_groups


@dataclass
class LayerPruneInfo:
    original_shape: tuple
    pruned_shape: tuple
    kept_rows: np.ndarray
    kept_cols: np.ndarray
    kept_fraction: float
    direct_kept_fraction: float | None


@dataclass
class PruneReport:
    layers: list = field(default_factory=list)
    direct_group_sparsity: float = 1.0
    effective_sparsity: float = 1.0


def zero_group_masks(
    net: LayeredNetwork, partition: GroupPartition, zero_tol: float = 0.0
) -> GroupMasks:
    """Classify each group as a full row or column of one layer and test it.

    Groups must cover exactly one weight-matrix row or column (biases are
    never grouped); anything else raises InvalidPartitionError naming the
    group.
    """
    if zero_tol < 0:
        raise ValueError("zero_tol must be >= 0")
    offsets = []
    o = 0
    for l in net.layers:
        offsets.append(o)
        o += l.weights.size + l.bias.size
    if partition.n_params != net.n_params:
        raise InvalidPartitionError(
            f"partition covers {partition.n_params} params, network has {net.n_params}"
        )

    row = [None] * len(net.layers)
    col = [None] * len(net.layers)
    n_zero = 0
    for k, g in enumerate(partition):
        li = max(i for i, off in enumerate(offsets) if g[0] >= off)
        l = net.layers[li]
        rel = g - offsets[li]
        if rel[-1] >= l.weights.size or rel[0] < 0:
            raise InvalidPartitionError(
                f"group {k} is not a weight row or column of one layer"
            )
        n_in, n_out = l.in_dim, l.out_dim
        matched = None
        if g.size == n_in:
            r = int(rel[0] // n_in)
            if np.array_equal(rel, r * n_in + np.arange(n_in)):
                matched = ("row", r)
        if matched is None and g.size == n_out:
            c = int(rel[0] % n_in)
            if np.array_equal(rel, np.arange(n_out) * n_in + c):
                matched = ("col", c)
        if matched is None:
            raise InvalidPartitionError(
                f"group {k} is not a weight row or column of one layer"
            )
        axis, pos = matched
        if axis == "row":
            if row[li] is None:
                row[li] = np.zeros(n_out, dtype=bool)
            is_zero = bool(np.linalg.norm(l.weights[pos, :]) <= zero_tol)
            row[li][pos] = is_zero
        else:
            if col[li] is None:
                col[li] = np.zeros(n_in, dtype=bool)
            is_zero = bool(np.linalg.norm(l.weights[:, pos]) <= zero_tol)
            col[li][pos] = is_zero
        n_zero += int(is_zero)
    return GroupMasks(row, col, zero_tol, len(partition), n_zero)


def _act0(kind, v):
    if kind == RELU:
        return np.maximum(v, 0.0)
    return v


def propagate_and_prune(net: LayeredNetwork, masks: GroupMasks):
    """Remove units implied by the masks, to fixpoint; returns (net, report).

    The first pass is driven by the masks alone (so a dense network with
    all-false masks comes back untouched bit-for-bit); later passes rescan
    actual weights with the same tolerance to catch cascades.
    """
    for l in net.layers:
        if l.activation not in _ZERO_PRESERVING:
            raise ValueError(
                f"activation {l.activation!r} does not fix zero; refusing to prune"
            )
    L = len(net.layers)
    W = [l.weights.copy() for l in net.layers]
    b = [l.bias.copy() for l in net.layers]
    acts = [l.activation for l in net.layers]
    kept = [np.arange(l.out_dim) for l in net.layers]
    tol = masks.zero_tol

    first = True
    changed = True
    while changed:
        changed = False
        for j in range(L - 2, -1, -1):
            n_units = W[j].shape[0]
            fold = np.zeros(n_units, dtype=bool)
            plain = np.zeros(n_units, dtype=bool)
            if first:
                if masks.row[j] is not None:
                    fold |= masks.row[j][kept[j]]
                if masks.col[j + 1] is not None:
                    plain |= masks.col[j + 1][kept[j]]
            else:
                if W[j].shape[1] > 0:
                    fold |= np.all(np.abs(W[j]) <= tol, axis=1)
                plain |= np.all(np.abs(W[j + 1]) <= tol, axis=0)
            remove = fold | plain
            if not remove.any():
                continue
            if remove.all():
                raise DegenerateLayerError(
                    f"pruning would empty hidden layer {j} "
                    f"({n_units} of {n_units} units removable)"
                )
            for u in np.flatnonzero(fold):
                b[j + 1] += W[j + 1][:, u] * _act0(acts[j], b[j][u])
            keep_local = ~remove
            W[j] = W[j][keep_local, :]
            b[j] = b[j][keep_local]
            kept[j] = kept[j][keep_local]
            W[j + 1] = W[j + 1][:, keep_local]
            changed = True
        first = False

    pruned = LayeredNetwork(
        [Layer(W[j], b[j], acts[j]) for j in range(L)]
    )

    infos = []
    orig_total = net.n_params
    new_total = pruned.n_params
    for j, (l_old, l_new) in enumerate(zip(net.layers, pruned.layers)):
        orig = l_old.weights.size + l_old.bias.size
        new = l_new.weights.size + l_new.bias.size
        direct = None
        if masks.row[j] is not None:
            direct = float(np.mean(~masks.row[j]))
        elif masks.col[j] is not None:
            direct = float(np.mean(~masks.col[j]))
        kept_cols = kept[j - 1] if j > 0 else np.arange(l_old.in_dim)
        infos.append(
            LayerPruneInfo(
                original_shape=l_old.weights.shape,
                pruned_shape=l_new.weights.shape,
                kept_rows=kept[j].copy(),
                kept_cols=kept_cols.copy(),
                kept_fraction=new / orig,
                direct_kept_fraction=direct,
            )
        )
    report = PruneReport(
        layers=infos,
        direct_group_sparsity=masks.direct_group_sparsity(),
        effective_sparsity=new_total / orig_total,
    )
    return pruned, report


def functional_equivalence_check(
    original: LayeredNetwork,
    pruned: LayeredNetwork,
    n_inputs: int = 100,
    seed: int = 0,
) -> float:
    """Max absolute output deviation on standard-normal probe inputs."""
    if original.input_dim != pruned.input_dim:
        raise ValueError("input dimensions differ; cannot compare")
    if original.output_dim != pruned.output_dim:
        raise ValueError("output dimensions differ; cannot compare")
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((n_inputs, original.input_dim))
    return float(
        np.max(np.abs(network_forward(original, U) - network_forward(pruned, U)))
    )
