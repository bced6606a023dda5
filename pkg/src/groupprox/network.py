"""Dense layered networks over flat parameter vectors, plus checkpoint I/O.

Layer l maps h -> act(W_l h + b_l) with W_l of shape (out, in) and chained
dims. The flat parameter layout is layer-major: for each layer, the weight
matrix in row-major (C) order followed by its bias. Checkpoints are a
single-line JSON header (dims, activations, layout, endianness) followed by
raw little-endian float64 payloads in the same order; round-trips are
bit-exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .exceptions import CheckpointError
from .groups import GroupPartition

RELU = "relu"
IDENTITY = "identity"
ACTIVATIONS = (RELU, IDENTITY)

SQUARED_ERROR = "squared_error"
SOFTMAX_CE = "softmax_ce"

FLATTEN_ORDER = "layer-major,row-major,weights-then-bias"
_MAGIC_KIND_NET = "network"
_MAGIC_KIND_VEC = "param_vector"


@dataclass
class Layer:
    weights: np.ndarray
    bias: np.ndarray
    activation: str

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 2 or self.bias.ndim != 1:
            raise ValueError("weights must be 2-D (out, in) and bias 1-D")
        if self.weights.shape[0] != self.bias.shape[0]:
            raise ValueError("bias length must match the output dimension")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation: {self.activation!r}")

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]


@dataclass
class LayeredNetwork:
    layers: list

    def __post_init__(self):
        if not self.layers:
            raise ValueError("network needs at least one layer")
        for a, b in zip(self.layers, self.layers[1:]):
            if a.out_dim != b.in_dim:
                raise ValueError(
                    f"dimension chain broken: {a.out_dim} -> {b.in_dim}"
                )

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def n_params(self) -> int:
        return sum(l.weights.size + l.bias.size for l in self.layers)

    def widths(self) -> list:
        return [self.input_dim] + [l.out_dim for l in self.layers]

    def flatten(self) -> np.ndarray:
        parts = []
        for l in self.layers:
            parts.append(l.weights.ravel(order="C"))
            parts.append(l.bias)
        return np.concatenate(parts)

    def with_params(self, x) -> "LayeredNetwork":
        """Copy of the network with parameters taken from the flat vector."""
        x = np.asarray(x, dtype=np.float64)
        if x.size != self.n_params:
            raise ValueError(f"expected {self.n_params} params, got {x.size}")
        layers = []
        o = 0
        for l in self.layers:
            w = x[o : o + l.weights.size].reshape(l.weights.shape).copy()
            o += l.weights.size
            b = x[o : o + l.bias.size].copy()
            o += l.bias.size
            layers.append(Layer(w, b, l.activation))
        return LayeredNetwork(layers)


def _act(z, kind):
    if kind == RELU:
        return np.maximum(z, 0.0)
    return z


def _act_grad(z, kind):
    if kind == RELU:
        return (z > 0).astype(np.float64)
    return np.ones_like(z)


def network_forward(net: LayeredNetwork, inputs) -> np.ndarray:
    """Batch-first forward pass: inputs (B, in) -> outputs (B, out)."""
    h = np.asarray(inputs, dtype=np.float64)
    if h.ndim == 1:
        h = h[None, :]
    for l in net.layers:
        h = _act(h @ l.weights.T + l.bias, l.activation)
    return h


def network_loss_and_grad(
    net: LayeredNetwork,
    x,
    inputs,
    targets,
    head: str = SQUARED_ERROR,
    batch=None,
):
    """Loss and flat-parameter gradient at parameter vector x.

    squared_error: (1/(2k)) sum ||f(u) - y||^2 with targets (B, out).
    softmax_ce: mean cross-entropy with integer class targets (B,).
    """
    if head not in (SQUARED_ERROR, SOFTMAX_CE):
        raise ValueError(f"unknown loss head: {head!r}")
    work = net.with_params(x)
    U = np.asarray(inputs, dtype=np.float64)
    if batch is not None:
        idx = np.asarray(batch, dtype=np.int64)
        U = U[idx]
        Y = np.asarray(targets)[idx]
    else:
        Y = np.asarray(targets)
    k = U.shape[0]

    pre = []
    acts = [U]
    h = U
    for l in work.layers:
        z = h @ l.weights.T + l.bias
        pre.append(z)
        h = _act(z, l.activation)
        acts.append(h)
    out = acts[-1]

    if head == SQUARED_ERROR:
        Y = np.asarray(Y, dtype=np.float64)
        diff = out - Y
        loss = 0.5 * float(np.sum(diff * diff)) / k
        dout = diff / k
    else:
        labels = np.asarray(Y, dtype=np.int64)
        shifted = out - out.max(axis=1, keepdims=True)
        logz = np.log(np.sum(np.exp(shifted), axis=1))
        loss = float(np.mean(logz - shifted[np.arange(k), labels]))
        P = np.exp(shifted - logz[:, None])
        P[np.arange(k), labels] -= 1.0
        dout = P / k

    grads = []
    delta = dout * _act_grad(pre[-1], work.layers[-1].activation)
    for li in range(len(work.layers) - 1, -1, -1):
        l = work.layers[li]
        dW = delta.T @ acts[li]
        db = delta.sum(axis=0)
        grads.append((dW, db))
        if li > 0:
            delta = (delta @ l.weights) * _act_grad(pre[li - 1], work.layers[li - 1].activation)
    grads.reverse()
    flat = np.concatenate([np.concatenate([dW.ravel(order="C"), db]) for dW, db in grads])
    return loss, flat


def _layer_offsets(net: LayeredNetwork):
    offsets = []
    o = 0
    for l in net.layers:
        offsets.append(o)
        o += l.weights.size + l.bias.size
    return offsets


def row_groups(net: LayeredNetwork) -> GroupPartition:
    """One group per weight-matrix row (a unit's incoming weights); biases excluded."""
    groups = []
    for off, l in zip(_layer_offsets(net), net.layers):
        n_in = l.in_dim
        for r in range(l.out_dim):
            groups.append(np.arange(off + r * n_in, off + (r + 1) * n_in, dtype=np.int64))
    return GroupPartition(groups, n_params=net.n_params)


def column_groups(net: LayeredNetwork) -> GroupPartition:
    """One group per weight-matrix column (a unit's outgoing weights); biases excluded."""
    groups = []
    for off, l in zip(_layer_offsets(net), net.layers):
        n_in = l.in_dim
        for c in range(l.in_dim):
            groups.append(off + np.arange(l.out_dim, dtype=np.int64) * n_in + c)
    return GroupPartition(groups, n_params=net.n_params)


def generate_teacher_student(
    widths,
    n_samples: int = 512,
    noise_sigma: float = 0.01,
    activation: str = RELU,
    seed: int = 0,
):
    """Synthetic regression task: targets from a random teacher network.

    Returns (student_net, inputs, targets). Hidden layers use the given
    activation, the output layer is linear. Student and teacher draw from
    independent streams of the same seed.
    """
    widths = [int(w) for w in widths]
    if len(widths) < 2:
        raise ValueError("need at least input and output widths")
    ss = np.random.SeedSequence(seed)
    teacher_rng, student_rng, data_rng = (
        np.random.default_rng(s) for s in ss.spawn(3)
    )

    def build(rng):
        layers = []
        for i in range(len(widths) - 1):
            fan_in = widths[i]
            w = rng.standard_normal((widths[i + 1], fan_in)) / np.sqrt(fan_in)
            b = np.zeros(widths[i + 1])
            act = activation if i < len(widths) - 2 else IDENTITY
            layers.append(Layer(w, b, act))
        return LayeredNetwork(layers)

    teacher = build(teacher_rng)
    student = build(student_rng)
    U = data_rng.standard_normal((n_samples, widths[0]))
    Y = network_forward(teacher, U) + noise_sigma * data_rng.standard_normal(
        (n_samples, widths[-1])
    )
    return student, U, Y


def save_checkpoint(path, net: LayeredNetwork) -> None:
    header = {
        "kind": _MAGIC_KIND_NET,
        "dtype": "float64",
        "endianness": "little",
        "flatten_order": FLATTEN_ORDER,
        "input_dim": net.input_dim,
        "layers": [
            {"out": l.out_dim, "in": l.in_dim, "activation": l.activation}
            for l in net.layers
        ],
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("ascii") + b"\n")
        for l in net.layers:
            fh.write(np.ascontiguousarray(l.weights, dtype="<f8").tobytes(order="C"))
            fh.write(np.ascontiguousarray(l.bias, dtype="<f8").tobytes())


def save_param_checkpoint(path, x) -> None:
    x = np.asarray(x, dtype=np.float64)
    header = {
        "kind": _MAGIC_KIND_VEC,
        "dtype": "float64",
        "endianness": "little",
        "length": int(x.size),
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("ascii") + b"\n")
        fh.write(np.ascontiguousarray(x, dtype="<f8").tobytes())


def read_checkpoint_header(path) -> dict:
    with open(path, "rb") as fh:
        line = fh.readline()
    try:
        return json.loads(line.decode("ascii"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"malformed checkpoint header in {path}") from exc


def load_checkpoint(path) -> LayeredNetwork:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("ascii"))
        if header.get("kind") != _MAGIC_KIND_NET:
            raise CheckpointError(
                f"expected a network checkpoint, got kind={header.get('kind')!r}"
            )
        layers = []
        for spec in header["layers"]:
            out, n_in = int(spec["out"]), int(spec["in"])
            w = np.frombuffer(fh.read(8 * out * n_in), dtype="<f8").reshape(out, n_in)
            b = np.frombuffer(fh.read(8 * out), dtype="<f8")
            layers.append(Layer(w.copy(), b.copy(), spec["activation"]))
        return LayeredNetwork(layers)


def load_param_checkpoint(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("ascii"))
        if header.get("kind") != _MAGIC_KIND_VEC:
            raise CheckpointError(
                f"expected a parameter checkpoint, got kind={header.get('kind')!r}"
            )
        n = int(header["length"])
        return np.frombuffer(fh.read(8 * n), dtype="<f8").copy()
