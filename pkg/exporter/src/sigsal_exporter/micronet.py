"""Reference micronet bundles computed in torch, for cross-engine parity.

export_micronet writes the standard two-conv test network (seeded weights)
in the engine's model-directory layout, together with a forward trace of a
seeded input — the input itself, every layer's output, and the final
probabilities — all computed here in float64 torch.  An independent
implementation of the same semantics can then be checked layer by layer
against the trace.
"""

from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F

from sigsal_exporter.formats import write_json, write_npy

_DESCRIPTOR = {
    "input": [1, 32, 32],
    "layers": [
        {"name": "conv1", "kind": "conv2d", "out_channels": 8,
         "kernel": [3, 3], "stride": 1, "padding": "same"},
        {"name": "relu1", "kind": "relu"},
        {"name": "pool1", "kind": "maxpool2"},
        {"name": "conv2", "kind": "conv2d", "out_channels": 16,
         "kernel": [3, 3], "stride": 1, "padding": "same"},
        {"name": "relu2", "kind": "relu"},
        {"name": "pool2", "kind": "maxpool2"},
        {"name": "gap", "kind": "global_avg_pool"},
        {"name": "fc", "kind": "dense", "out_features": 2},
        {"name": "softmax", "kind": "softmax"},
    ],
}


def _draw_weights(seed):
    rng = np.random.default_rng(seed)
    weights = {}
    for name, kshape in (("conv1", (8, 1, 3, 3)), ("conv2", (16, 8, 3, 3)), ("fc", (2, 16))):
        fan_in = int(np.prod(kshape[1:]))
        weights[name] = {
            "kernel": rng.normal(0.0, np.sqrt(2.0 / fan_in), size=kshape),
            "bias": rng.normal(0.0, 0.05, size=kshape[0]),
        }
    return weights


def _forward_trace(weights, image):
    """Float64 torch forward pass recording every layer output."""
    x = torch.from_numpy(image[None])  # [1, 1, 32, 32]
    tensors = {
        name: {k: torch.from_numpy(v) for k, v in pair.items()}
        for name, pair in weights.items()
    }
    outputs = {}
    x = F.conv2d(x, tensors["conv1"]["kernel"], tensors["conv1"]["bias"], padding="same")
    outputs["conv1"] = x
    x = F.relu(x)
    outputs["relu1"] = x
    x = F.max_pool2d(x, 2)
    outputs["pool1"] = x
    x = F.conv2d(x, tensors["conv2"]["kernel"], tensors["conv2"]["bias"], padding="same")
    outputs["conv2"] = x
    x = F.relu(x)
    outputs["relu2"] = x
    x = F.max_pool2d(x, 2)
    outputs["pool2"] = x
    x = x.mean(dim=(2, 3))
    outputs["gap"] = x
    x = F.linear(x, tensors["fc"]["kernel"], tensors["fc"]["bias"])
    outputs["fc"] = x
    x = F.softmax(x, dim=1)
    outputs["softmax"] = x
    return {name: out[0].numpy() for name, out in outputs.items()}


def export_micronet(seed, outdir):
    """Write the bundle plus a reference trace; returns the model dir."""
    outdir = Path(outdir)
    trace_dir = outdir / "trace"
    trace_dir.mkdir(parents=True, exist_ok=True)

    weights = _draw_weights(seed)
    write_json(_DESCRIPTOR, outdir / "model.json")
    for name, pair in weights.items():
        write_npy(pair["kernel"], outdir / f"{name}.kernel.npy")
        write_npy(pair["bias"], outdir / f"{name}.bias.npy")

    image = np.random.default_rng(seed + 1).random((1, 32, 32))
    outputs = _forward_trace(weights, image)
    write_npy(image, outdir / "input.npy")
    for name, value in outputs.items():
        write_npy(value, trace_dir / f"{name}.npy")
    write_npy(outputs["softmax"], outdir / "probabilities.npy")
    write_json(
        {
            "seed": seed,
            "input": "input.npy",
            "layers": [entry["name"] for entry in _DESCRIPTOR["layers"]],
            "probabilities": "probabilities.npy",
        },
        outdir / "trace.json",
    )
    return outdir
