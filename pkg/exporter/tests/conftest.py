import json
import subprocess
import sys

import numpy as np
import pytest
from PIL import Image, ImageDraw


def run_engine(args):
    """Invoke the saliency engine CLI (the primary's external interface)."""
    proc = subprocess.run(
        [sys.executable, "-m", "sigsal.cli", *args],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout) if proc.stdout.strip() else None


def run_exporter(args):
    from sigsal_exporter.cli import main

    assert main(args) == 0


@pytest.fixture(scope="session")
def sample_images(tmp_path_factory):
    """Three small synthetic photos (distinct shapes on textured grounds)."""
    root = tmp_path_factory.mktemp("images")
    rng = np.random.default_rng(99)
    paths = []
    for i, color in enumerate([(220, 60, 40), (40, 180, 90), (60, 80, 220)]):
        noise = rng.integers(90, 150, size=(96, 96, 3), dtype=np.uint8)
        img = Image.fromarray(noise, "RGB")
        draw = ImageDraw.Draw(img)
        if i == 0:
            draw.ellipse([20, 24, 70, 74], fill=color)
        elif i == 1:
            draw.rectangle([18, 30, 78, 66], fill=color)
        else:
            draw.polygon([(48, 12), (84, 80), (12, 80)], fill=color)
        path = root / f"sample{i}.png"
        img.save(path)
        paths.append(path)
    return paths
