"""Forward-only CNN engine for desk-scale experiments.

Models are a flat list of layers (conv2d, relu, maxpool2, global_avg_pool,
dense, softmax) with weights held as plain float64 arrays.  The engine runs
single images, records every intermediate activation, and supports
re-randomizing layer weights for the saliency sanity checks.  'same'
padding follows the usual convention: output ceil(in/stride), zeros split
evenly with the extra row/column at the end.
"""

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from sigsal import kernels
from sigsal.errors import (
    FormatError,
    MissingWeight,
    NotParametric,
    ShapeError,
    UnknownLayer,
)
from sigsal.numutil import as_tensor
from sigsal.rng import Xoshiro256, derive_subseed
from sigsal.tensorio import read_tensor, write_tensor

KINDS = ("conv2d", "relu", "maxpool2", "global_avg_pool", "dense", "softmax")
PARAMETRIC = ("conv2d", "dense")


@dataclass(frozen=True)
class LayerSpec:
    name: str
    kind: str
    out_channels: int = None
    kernel_size: tuple = None  # (kh, kw)
    stride: int = 1
    padding: str = "same"
    out_features: int = None


@dataclass(frozen=True)
class ModelBundle:
    input_shape: tuple  # (c, h, w)
    layers: tuple
    weights: dict  # name -> {"kernel": ndarray, "bias": ndarray}

    def layer(self, name):
        for spec in self.layers:
            if spec.name == name:
                return spec
        raise UnknownLayer(f"no layer named {name!r}")

    def parametric_from_output(self):
        """Parametric layer names ordered from the output end inward."""
        return [spec.name for spec in reversed(self.layers) if spec.kind in PARAMETRIC]


@dataclass(frozen=True)
class ForwardTrace:
    input: np.ndarray
    outputs: dict = field(repr=False)  # layer name -> activation
    probabilities: np.ndarray = None


def _conv_geometry(size, k, stride, padding):
    """(out_size, pad_begin, pad_end) for one spatial axis."""
    if padding == "same":
        out = -(-size // stride)
        total = max((out - 1) * stride + k - size, 0)
        return out, total // 2, total - total // 2
    out = (size - k) // stride + 1
    return out, 0, 0


def _shape_after(spec, shape, weights):
    """Shape composition for one layer; raises ShapeError on mismatch."""
    if spec.kind == "conv2d":
        if len(shape) != 3:
            raise ShapeError(f"{spec.name}: conv2d needs a [c, h, w] input, got {shape}")
        c, h, w = shape
        kh, kw = spec.kernel_size
        kernel = weights[spec.name]["kernel"]
        expect = (spec.out_channels, c, kh, kw)
        if kernel.shape != expect:
            raise ShapeError(f"{spec.name}: kernel shape {kernel.shape}, expected {expect}")
        if weights[spec.name]["bias"].shape != (spec.out_channels,):
            raise ShapeError(f"{spec.name}: bias shape must be ({spec.out_channels},)")
        oh, _, _ = _conv_geometry(h, kh, spec.stride, spec.padding)
        ow, _, _ = _conv_geometry(w, kw, spec.stride, spec.padding)
        if oh < 1 or ow < 1:
            raise ShapeError(f"{spec.name}: output collapses to {oh}x{ow}")
        return (spec.out_channels, oh, ow)
    if spec.kind == "relu":
        return shape
    if spec.kind == "maxpool2":
        if len(shape) != 3:
            raise ShapeError(f"{spec.name}: maxpool2 needs a [c, h, w] input, got {shape}")
        c, h, w = shape
        if h < 2 or w < 2:
            raise ShapeError(f"{spec.name}: grid {h}x{w} too small for 2x2 pooling")
        return (c, h // 2, w // 2)
    if spec.kind == "global_avg_pool":
        if len(shape) != 3:
            raise ShapeError(f"{spec.name}: global_avg_pool needs [c, h, w], got {shape}")
        return (shape[0],)
    if spec.kind == "dense":
        if len(shape) != 1:
            raise ShapeError(f"{spec.name}: dense needs a rank-1 input, got {shape}")
        kernel = weights[spec.name]["kernel"]
        expect = (spec.out_features, shape[0])
        if kernel.shape != expect:
            raise ShapeError(f"{spec.name}: matrix shape {kernel.shape}, expected {expect}")
        if weights[spec.name]["bias"].shape != (spec.out_features,):
            raise ShapeError(f"{spec.name}: bias shape must be ({spec.out_features},)")
        return (spec.out_features,)
    if spec.kind == "softmax":
        if len(shape) != 1:
            raise ShapeError(f"{spec.name}: softmax needs a rank-1 input, got {shape}")
        return shape
    raise UnknownLayer(f"{spec.name}: unknown kind {spec.kind!r}")


def validate_bundle(bundle):
    """Eager shape-composition check over the whole model."""
    names = [spec.name for spec in bundle.layers]
    if len(set(names)) != len(names):
        raise FormatError("duplicate layer names in model")
    shape = tuple(bundle.input_shape)
    for spec in bundle.layers:
        if spec.kind in PARAMETRIC and spec.name not in bundle.weights:
            raise MissingWeight(f"no weights loaded for layer {spec.name!r}")
        shape = _shape_after(spec, shape, bundle.weights)
    return bundle


def _layer_from_json(entry):
    kind = entry.get("kind")
    if kind not in KINDS:
        raise UnknownLayer(f"unknown layer kind {kind!r}")
    common = dict(name=entry["name"], kind=kind)
    if kind == "conv2d":
        return LayerSpec(
            out_channels=int(entry["out_channels"]),
            kernel_size=tuple(int(v) for v in entry["kernel"]),
            stride=int(entry.get("stride", 1)),
            padding=entry.get("padding", "same"),
            **common,
        )
    if kind == "dense":
        return LayerSpec(out_features=int(entry["out_features"]), **common)
    return LayerSpec(**common)


def load_model(model_dir):
    """Load model.json plus one NPY pair per parametric layer; validate shapes."""
    model_dir = Path(model_dir)
    descriptor = model_dir / "model.json"
    try:
        with open(descriptor) as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise MissingWeight(f"{descriptor} not found") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{descriptor}: invalid JSON") from exc

    try:
        input_shape = tuple(int(v) for v in doc["input"])
        layers = tuple(_layer_from_json(entry) for entry in doc["layers"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{descriptor}: malformed descriptor") from exc
    if len(input_shape) != 3:
        raise FormatError(f"{descriptor}: input must be [c, h, w]")

    weights = {}
    for spec in layers:
        if spec.kind not in PARAMETRIC:
            continue
        kpath = model_dir / f"{spec.name}.kernel.npy"
        bpath = model_dir / f"{spec.name}.bias.npy"
        if not kpath.exists() or not bpath.exists():
            raise MissingWeight(f"weight files for layer {spec.name!r} not found")
        weights[spec.name] = {"kernel": read_tensor(kpath), "bias": read_tensor(bpath)}
    return validate_bundle(ModelBundle(input_shape, layers, weights))


def save_model(bundle, model_dir):
    """Inverse of load_model."""
    model_dir = Path(model_dir)
    model_dir.mkdir(parents=True, exist_ok=True)
    doc = {"input": list(bundle.input_shape), "layers": []}
    for spec in bundle.layers:
        entry = {"name": spec.name, "kind": spec.kind}
        if spec.kind == "conv2d":
            entry.update(
                out_channels=spec.out_channels,
                kernel=list(spec.kernel_size),
                stride=spec.stride,
                padding=spec.padding,
            )
        elif spec.kind == "dense":
            entry["out_features"] = spec.out_features
        doc["layers"].append(entry)
    with open(model_dir / "model.json", "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    for name, pair in bundle.weights.items():
        write_tensor(pair["kernel"], model_dir / f"{name}.kernel.npy")
        write_tensor(pair["bias"], model_dir / f"{name}.bias.npy")


def _softmax(z):
    e = np.exp(z - z.max())
    return e / e.sum()


def forward(bundle, img):
    """Run one image through the model, recording every layer output."""
    img = as_tensor(img, rank=(2, 3), name="model input")
    if img.ndim == 2:
        img = img[None, :, :]
    if img.shape != tuple(bundle.input_shape):
        raise ShapeError(f"input shape {img.shape}, model expects {bundle.input_shape}")

    x = img
    outputs = {}
    for spec in bundle.layers:
        if spec.kind == "conv2d":
            kh, kw = spec.kernel_size
            _, pt, pb = _conv_geometry(x.shape[1], kh, spec.stride, spec.padding)
            _, pl, pr = _conv_geometry(x.shape[2], kw, spec.stride, spec.padding)
            pair = bundle.weights[spec.name]
            x = kernels.conv2d(x, pair["kernel"], pair["bias"], spec.stride, (pt, pb, pl, pr))
        elif spec.kind == "relu":
            x = np.maximum(x, 0.0)
        elif spec.kind == "maxpool2":
            c, h, w = x.shape
            x = x[:, : h // 2 * 2, : w // 2 * 2].reshape(c, h // 2, 2, w // 2, 2).max(axis=(2, 4))
        elif spec.kind == "global_avg_pool":
            x = x.mean(axis=(1, 2))
        elif spec.kind == "dense":
            pair = bundle.weights[spec.name]
            x = pair["kernel"] @ x + pair["bias"]
        elif spec.kind == "softmax":
            x = _softmax(x)
        outputs[spec.name] = x

    probabilities = x if bundle.layers and bundle.layers[-1].kind == "softmax" else None
    return ForwardTrace(input=img, outputs=outputs, probabilities=probabilities)


def _redraw(stream, original):
    """i.i.d. normal draw matching the original tensor's std (0.05 if zero)."""
    sigma = float(np.std(original))
    if sigma == 0.0:
        sigma = 0.05
    return sigma * stream.normal(original.size).reshape(original.shape)


def randomize_layer(bundle, name, seed):
    """New bundle with the named layer's kernel and bias redrawn; pure."""
    spec = bundle.layer(name)
    if spec.kind not in PARAMETRIC:
        raise NotParametric(f"layer {name!r} has no weights to randomize")
    stream = Xoshiro256(seed)
    pair = bundle.weights[name]
    redrawn = {
        "kernel": _redraw(stream, pair["kernel"]),  # kernel first, then bias
        "bias": _redraw(stream, pair["bias"]),
    }
    weights = dict(bundle.weights)
    weights[name] = redrawn
    return replace(bundle, weights=weights)


def cascading_randomize(bundle, upto, seed):
    """Randomize every parametric layer from the output end through ``upto``.

    Layer i in output-to-input order draws from sub-seed h(seed, i), so a
    longer cascade extends a shorter one rather than reshuffling it.
    """
    order = bundle.parametric_from_output()
    if upto not in order:
        bundle.layer(upto)  # raises UnknownLayer if absent
        raise NotParametric(f"layer {upto!r} has no weights to randomize")
    out = bundle
    for i, name in enumerate(order):
        out = randomize_layer(out, name, derive_subseed(seed, i))
        if name == upto:
            break
    return out


def reference_model(seed=0):
    """The repo's standard test network: two conv blocks, GAP, a 2-way head."""
    layers = (
        LayerSpec("conv1", "conv2d", out_channels=8, kernel_size=(3, 3)),
        LayerSpec("relu1", "relu"),
        LayerSpec("pool1", "maxpool2"),
        LayerSpec("conv2", "conv2d", out_channels=16, kernel_size=(3, 3)),
        LayerSpec("relu2", "relu"),
        LayerSpec("pool2", "maxpool2"),
        LayerSpec("gap", "global_avg_pool"),
        LayerSpec("fc", "dense", out_features=2),
        LayerSpec("softmax", "softmax"),
    )
    shapes = {
        "conv1": ((8, 1, 3, 3), (8,)),
        "conv2": ((16, 8, 3, 3), (16,)),
        "fc": ((2, 16), (2,)),
    }
    weights = {}
    for i, (name, (kshape, bshape)) in enumerate(shapes.items()):
        stream = Xoshiro256(derive_subseed(seed, i))
        fan_in = int(np.prod(kshape[1:]))
        scale = np.sqrt(2.0 / fan_in)
        weights[name] = {
            "kernel": scale * stream.normal(int(np.prod(kshape))).reshape(kshape),
            "bias": np.zeros(bshape),
        }
    return validate_bundle(ModelBundle((1, 32, 32), layers, weights))
