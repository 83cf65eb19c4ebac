"""Multilayer perceptron trial wave function R -> R.

Hidden layers use ReLU, the output layer is linear so amplitudes can be
negative.  Weights are stored as (fan_in, fan_out) matrices.

Checkpoint layout: one ASCII header line ``VQS1 <layers> <d0,d1,...> <seed>``
followed, for each layer in order, by the weight matrix (row-major) and then
the bias vector, all little-endian float64.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from vqs import autodiff as ad
from vqs.errors import ConfigError

ARCHITECTURES = {
    "box": (1, 1000, 1),
    "perturbed": (1, 500, 100, 1),
}

MAGIC = "VQS1"


@dataclass(eq=False)
class MlpParams:
    layer_dims: tuple
    weights: list
    biases: list
    seed: int = 0

    @property
    def num_layers(self) -> int:
        return len(self.weights)

    def num_parameters(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def arrays(self) -> list:
        """Parameters in optimizer order: W1, b1, W2, b2, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def copy(self) -> "MlpParams":
        return MlpParams(
            tuple(self.layer_dims),
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.seed,
        )

    def scale_output(self, factor: float) -> "MlpParams":
        scaled = self.copy()
        scaled.weights[-1] *= factor
        scaled.biases[-1] *= factor
        return scaled


def resolve_dims(architecture) -> tuple:
    if isinstance(architecture, str):
        try:
            return ARCHITECTURES[architecture]
        except KeyError:
            raise ConfigError(
                f"unknown architecture {architecture!r}; choose from {sorted(ARCHITECTURES)}"
            ) from None
    return tuple(int(d) for d in architecture)


def validate_dims(layer_dims) -> tuple:
    dims = tuple(layer_dims)
    if len(dims) < 2 or dims[0] != 1 or dims[-1] != 1 or any(d < 1 for d in dims):
        raise ConfigError(f"layer dims must start and end with 1 and be positive, got {dims}")
    return dims


def init_params(layer_dims, seed: int) -> MlpParams:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases."""
    dims = validate_dims(layer_dims)
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpParams(dims, weights, biases, seed)


def forward(params: MlpParams, xs) -> np.ndarray:
    """Network output at ``xs`` (1-D array of positions)."""
    h = np.asarray(xs, dtype=np.float64).reshape(-1, 1)
    last = params.num_layers - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ w + b
        if i < last:
            h = np.maximum(h, 0.0)
    return h[:, 0]


def forward_graph(params: MlpParams, xs, tape: ad.Tape):
    """Record the forward pass on ``tape``.

    Returns ``(output, leaves)``: the length-G output node and the parameter
    leaves in :meth:`MlpParams.arrays` order.
    """
    leaves = [tape.leaf(p) for p in params.arrays()]
    h = tape.constant(np.asarray(xs, dtype=np.float64).reshape(-1, 1))
    last = params.num_layers - 1
    for i in range(params.num_layers):
        h = ad.affine(h, leaves[2 * i], leaves[2 * i + 1])
        if i < last:
            h = ad.relu(h)
    return ad.reshape(h, (h.value.shape[0],)), leaves


def save_checkpoint(path, params: MlpParams) -> None:
    dims = ",".join(str(d) for d in params.layer_dims)
    header = f"{MAGIC} {params.num_layers} {dims} {params.seed}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        for w, b in zip(params.weights, params.biases):
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_checkpoint(path) -> MlpParams:
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii", errors="replace").split()
        payload = fh.read()
    if len(header) != 4 or header[0] != MAGIC:
        raise ConfigError(f"{path}: not a {MAGIC} checkpoint")
    try:
        num_layers = int(header[1])
        dims = validate_dims(int(d) for d in header[2].split(","))
        seed = int(header[3])
    except ValueError as exc:
        raise ConfigError(f"{path}: malformed checkpoint header: {exc}") from None
    if num_layers != len(dims) - 1:
        raise ConfigError(f"{path}: header layer count {num_layers} disagrees with dims {dims}")
    values = np.frombuffer(payload, dtype="<f8")
    expected = sum(i * o + o for i, o in zip(dims[:-1], dims[1:]))
    if values.size != expected or len(payload) % 8:
        raise ConfigError(f"{path}: expected {expected} parameters, found {len(payload) / 8:g}")
    weights, biases, pos = [], [], 0
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        weights.append(values[pos:pos + fan_in * fan_out].reshape(fan_in, fan_out).astype(np.float64))
        pos += fan_in * fan_out
        biases.append(values[pos:pos + fan_out].astype(np.float64))
        pos += fan_out
    return MlpParams(dims, weights, biases, seed)
