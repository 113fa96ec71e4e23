"""Run a torchvision classifier over images and dump one layer's activations.

Per image the exporter writes the selected layer's post-forward activations
as a [channels, h, w] float64 NPY, the preprocessed input's luminance as a
PGM (handy for overlays at the engine side), and a JSON sidecar with the
output probabilities.  A manifest lists every artifact.

Pretrained weights are used when they can be fetched; otherwise the same
architecture is seeded deterministically so the pipeline stays testable
offline (the manifest records which happened).
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from PIL import Image
from torchvision import models
from torchvision.transforms import functional as tvf

from sigsal_exporter.formats import write_json, write_npy, write_pgm


class LayerNotFound(Exception):
    """The layer selector does not resolve to a module of the model."""


class ImageError(Exception):
    """An input image could not be decoded."""


_IMAGENET_MEAN = [0.485, 0.456, 0.406]
_IMAGENET_STD = [0.229, 0.224, 0.225]


@dataclass
class ExportJob:
    model: str = "resnet18"
    layer: str = "layer4"
    images: list = field(default_factory=list)
    outdir: str = "export"
    size: int = 224
    seed: int = 0  # weight init when pretrained weights are unavailable


def load_classifier(name, seed=0):
    """(model, weights_source) with graceful fallback to seeded init."""
    try:
        model = models.get_model(name, weights="DEFAULT")
        source = "pretrained"
    except Exception:  # no weight host in offline environments
        torch.manual_seed(seed)
        model = models.get_model(name, weights=None)
        source = f"seeded:{seed}"
    model.eval()
    return model, source


def _preprocess(path, size):
    try:
        with Image.open(path) as img:
            rgb = img.convert("RGB").resize((size, size), Image.BILINEAR)
    except (OSError, SyntaxError) as exc:
        raise ImageError(f"cannot decode {path}: {exc}") from exc
    tensor = tvf.to_tensor(rgb)  # [3, H, W] in [0, 1]
    gray = (0.299 * tensor[0] + 0.587 * tensor[1] + 0.114 * tensor[2]).numpy()
    normalized = tvf.normalize(tensor, _IMAGENET_MEAN, _IMAGENET_STD)
    return normalized.unsqueeze(0), gray


def export_activations(job):
    """Run the job; returns the manifest path."""
    outdir = Path(job.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    model, source = load_classifier(job.model, job.seed)
    try:
        module = model.get_submodule(job.layer)
    except AttributeError as exc:
        raise LayerNotFound(f"{job.model} has no module {job.layer!r}") from exc

    captured = {}
    handle = module.register_forward_hook(
        lambda _mod, _inp, out: captured.__setitem__("acts", out.detach())
    )
    records = []
    try:
        for image_path in job.images:
            batch, gray = _preprocess(image_path, job.size)
            with torch.no_grad():
                logits = model(batch)
            probs = torch.softmax(logits[0], dim=0).numpy()
            acts = captured["acts"][0].numpy()  # [channels, h, w]

            stem = Path(image_path).stem
            acts_path = outdir / f"{stem}.acts.npy"
            gray_path = outdir / f"{stem}.gray.pgm"
            sidecar_path = outdir / f"{stem}.json"
            write_npy(acts, acts_path)
            write_pgm(gray, gray_path)
            write_json(
                {
                    "image": str(image_path),
                    "probabilities": [float(p) for p in probs],
                    "top_class": int(np.argmax(probs)),
                },
                sidecar_path,
            )
            records.append({
                "id": stem,
                "image": str(image_path),
                "activations": acts_path.name,
                "gray_image": gray_path.name,
                "sidecar": sidecar_path.name,
                "shape": list(acts.shape),
            })
    finally:
        handle.remove()

    manifest_path = outdir / "manifest.json"
    write_json(
        {
            "model": job.model,
            "layer": job.layer,
            "weights": source,
            "input_size": job.size,
            "records": records,
        },
        manifest_path,
    )
    return manifest_path
