"""Tanh classifier head, its flat parameter codec, loss, and scoring.

The flat parameter layout is, for each hidden layer in order, the
input->hidden weights (row-major, one row per input unit) followed by the
hidden biases; the hidden->output weights (row-major, one row per hidden
unit) come last. The output layer has no bias. With one hidden layer the
length is ``n_in*h + h + h*m``.

An optional frozen convolution/pooling extractor turns images into feature
vectors before the dense head; its filters are never optimized.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import convolve2d

from .exceptions import DimensionError, EmptyBatchError
from .mfo import ObjectiveSpec
from .records import write_kv


@dataclass(frozen=True)
class ConvExtractor:
    """Frozen LeNet-style feature extractor.

    Each layer applies ``n_maps[i]`` valid convolutions with tanh, then
    2x2 sum-pooling squashed by tanh. Filters come from ``seed``.
    """

    n_maps: tuple[int, ...] = (6,)
    kernel_size: int = 5
    pooling: int = 2
    seed: int = 0

    def filter_bank(self, n_channels: int = 1):
        rng = np.random.default_rng(self.seed)
        bank = []
        channels = n_channels
        for maps in self.n_maps:
            fan_in = channels * self.kernel_size**2
            w = rng.normal(0.0, 1.0 / np.sqrt(fan_in), (maps, channels, self.kernel_size, self.kernel_size))
            b = np.zeros(maps)
            bank.append((w, b))
            channels = maps
        return bank

    def output_shape(self, height: int, width: int) -> tuple[int, int, int]:
        for _ in self.n_maps:
            height, width = height - self.kernel_size + 1, width - self.kernel_size + 1
            if height < 1 or width < 1:
                raise DimensionError("image too small for the extractor")
            height, width = (height + 1) // 2, (width + 1) // 2
        return self.n_maps[-1], height, width

    def n_features(self, height: int, width: int) -> int:
        return int(np.prod(self.output_shape(height, width)))

    def transform(self, images: np.ndarray) -> np.ndarray:
        """Map an ``N x H x W`` image stack to ``N x F`` features."""
        images = np.asarray(images, dtype=float)
        if images.ndim == 2:
            images = images[None]
        bank = self.filter_bank()
        out = []
        for image in images:
            maps = image[None]
            for w, b in bank:
                conv = np.stack([
                    np.tanh(sum(_convolve(maps[c], w[k, c]) for c in range(maps.shape[0])) + b[k])
                    for k in range(w.shape[0])
                ])
                maps = np.stack([pool_forward(m) for m in conv])
            out.append(maps.ravel())
        return np.array(out)


def _convolve(image, kernel):
    return convolve2d(image, kernel, mode="valid")


def conv_forward(image, filters, bias) -> np.ndarray:
    """Valid-mode convolution per filter followed by tanh.

    ``filters`` is ``K x k x k`` (or a single ``k x k``); ``bias`` holds one
    value per filter. Returns ``K`` feature maps.
    """
    image = np.asarray(image, dtype=float)
    filters = np.asarray(filters, dtype=float)
    if filters.ndim == 2:
        filters = filters[None]
    bias = np.broadcast_to(np.asarray(bias, dtype=float), (filters.shape[0],))
    kh, kw = filters.shape[1:]
    if image.ndim != 2 or image.shape[0] < kh or image.shape[1] < kw:
        raise DimensionError(f"image {image.shape} smaller than kernel {(kh, kw)}")
    return np.stack([np.tanh(_convolve(image, f) + b) for f, b in zip(filters, bias)])


def pool_forward(fm, beta: float = 1.0, bias: float = 0.0) -> np.ndarray:
    """2x2 sum-pooling squashed by ``tanh(beta * sum + bias)``.

    Odd dimensions are edge-padded to even size first.
    """
    fm = np.asarray(fm, dtype=float)
    pad = ((0, fm.shape[0] % 2), (0, fm.shape[1] % 2))
    if any(p[1] for p in pad):
        fm = np.pad(fm, pad, mode="edge")
    h, w = fm.shape[0] // 2, fm.shape[1] // 2
    window_sum = fm.reshape(h, 2, w, 2).sum(axis=(1, 3))
    return np.tanh(beta * window_sum + bias)


@dataclass(frozen=True)
class NetworkSpec:
    n_in: int
    n_hidden: int
    n_out: int
    n_layers: int = 1
    conv_extractor: ConvExtractor | None = None

    def __post_init__(self):
        if min(self.n_in, self.n_hidden, self.n_out, self.n_layers) < 1:
            raise DimensionError("all layer counts must be >= 1")

    @property
    def param_length(self) -> int:
        return encode(self)

    def layer_shapes(self) -> list[tuple[int, int, bool]]:
        """``(fan_in, fan_out, has_bias)`` for each dense layer in codec order."""
        shapes = [(self.n_in, self.n_hidden, True)]
        shapes += [(self.n_hidden, self.n_hidden, True)] * (self.n_layers - 1)
        shapes.append((self.n_hidden, self.n_out, False))
        return shapes


def encode(spec: NetworkSpec) -> int:
    """Length of the flat parameter vector for ``spec``."""
    return sum(a * b + (b if bias else 0) for a, b, bias in spec.layer_shapes())


def unpack(spec: NetworkSpec, params) -> list[tuple[np.ndarray, np.ndarray | None]]:
    """Split a flat vector into ``(weights, bias)`` pairs per layer."""
    params = np.asarray(params, dtype=float)
    if params.ndim != 1 or params.size != encode(spec):
        raise DimensionError(f"expected {encode(spec)} parameters, got shape {params.shape}")
    layers, pos = [], 0
    for fan_in, fan_out, has_bias in spec.layer_shapes():
        w = params[pos:pos + fan_in * fan_out].reshape(fan_in, fan_out)
        pos += fan_in * fan_out
        b = None
        if has_bias:
            b = params[pos:pos + fan_out]
            pos += fan_out
        layers.append((w, b))
    return layers


def decode_forward(spec: NetworkSpec, params, inputs) -> np.ndarray:
    """Forward pass; ``inputs`` is one feature vector or an ``N x n_in`` matrix."""
    x = np.asarray(inputs, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[None]
    if x.shape[1] != spec.n_in:
        raise DimensionError(f"expected {spec.n_in} input features, got {x.shape[1]}")
    for w, b in unpack(spec, params):
        z = x @ w
        if b is not None:
            z = z + b
        x = np.tanh(z)
    return x[0] if single else x


def loss(outputs, targets) -> float:
    """Half root of the per-sample summed squared error."""
    o = np.asarray(outputs, dtype=float)
    d = np.asarray(targets, dtype=float)
    if o.shape != d.shape:
        raise DimensionError(f"outputs {o.shape} and targets {d.shape} differ")
    if o.ndim == 1:
        o, d = o[:, None], d[:, None]
    n = o.shape[0]
    if n == 0:
        raise EmptyBatchError("loss of an empty batch")
    return 0.5 * float(np.sqrt(np.sum((o - d) ** 2) / n))


def classification_rate(outputs, labels) -> float:
    """Percentage of rows whose argmax unit equals the label."""
    o = np.asarray(outputs, dtype=float)
    labels = np.asarray(labels)
    if o.ndim == 1:
        o = o[:, None]
    if len(o) == 0:
        raise EmptyBatchError("classification rate of an empty batch")
    pred = np.argmax(o, axis=1)  # first maximum wins ties
    return 100.0 * float(np.mean(pred == labels))


def pm1_targets(labels, n_classes: int) -> np.ndarray:
    """One-hot rows with +1 for the class and -1 elsewhere."""
    labels = np.asarray(labels, dtype=int)
    out = -np.ones((len(labels), n_classes))
    out[np.arange(len(labels)), labels] = 1.0
    return out


@dataclass
class LabeledBatch:
    inputs: np.ndarray
    targets: np.ndarray
    labels: np.ndarray = field(default=None)

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=float)
        self.targets = np.asarray(self.targets, dtype=float)
        if len(self.inputs) != len(self.targets):
            raise DimensionError("inputs and targets differ in length")
        if self.labels is None:
            self.labels = np.argmax(self.targets, axis=1)

    @classmethod
    def from_labels(cls, inputs, labels, n_classes: int) -> "LabeledBatch":
        return cls(inputs, pm1_targets(labels, n_classes), np.asarray(labels, dtype=int))

    def __len__(self):
        return len(self.inputs)


class _BatchRotation:
    """Per-iteration mini-batch selector for the network objective."""

    def __init__(self, n_samples: int, n_batches: int, seed: int):
        order = np.random.default_rng(seed).permutation(n_samples)
        self.chunks = np.array_split(order, n_batches)
        self.current = self.chunks[0]

    def __call__(self, iteration: int) -> None:
        self.current = self.chunks[(iteration - 1) % len(self.chunks)]


def make_objective(
    spec: NetworkSpec,
    train: LabeledBatch,
    bound: float = 10.0,
    n_batches: int = 1,
    batch_seed: int = 0,
) -> ObjectiveSpec:
    """Network training loss as a box-bounded objective.

    With ``n_batches > 1`` the training set is split into that many fixed
    chunks and the optimizer's iteration hook rotates through them.
    """
    if train.inputs.ndim != 2 or train.inputs.shape[1] != spec.n_in:
        raise DimensionError("training inputs do not match the network input width")
    if train.targets.shape[1] != spec.n_out:
        raise DimensionError("training targets do not match the network output width")
    dim = encode(spec)
    x, d = train.inputs, train.targets

    if n_batches <= 1:
        def evaluate(params):
            return loss(decode_forward(spec, params, x), d)

        return ObjectiveSpec(dim, -bound, bound, evaluate, name="network-loss")

    rotation = _BatchRotation(len(train), n_batches, batch_seed)

    def evaluate(params):
        idx = rotation.current
        return loss(decode_forward(spec, params, x[idx]), d[idx])

    return ObjectiveSpec(dim, -bound, bound, evaluate, on_iteration=rotation, name="network-loss")


def save_params(path, params, spec: NetworkSpec, **meta) -> tuple[Path, Path]:
    """Write one parameter per line plus a ``.meta`` key-value sidecar."""
    path = Path(path)
    params = np.asarray(params, dtype=float)
    if params.size != encode(spec):
        raise DimensionError("parameter vector does not match the network spec")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for value in params:
            writer.writerow([repr(float(value))])
    info = {
        "n_in": spec.n_in,
        "n_hidden": spec.n_hidden,
        "n_out": spec.n_out,
        "n_layers": spec.n_layers,
        "param_length": encode(spec),
    }
    info.update(meta)
    sidecar = write_kv(path.with_suffix(".meta"), info)
    return path, sidecar


def load_params(path) -> np.ndarray:
    return np.loadtxt(path, dtype=float, ndmin=1)
