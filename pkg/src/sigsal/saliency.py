"""Activation-signature saliency maps, background suppression, Eigen-CAM.

The main map is built per channel from the inverse transform of the DCT
coefficient signs, squared elementwise, averaged over channels, bilaterally
filtered at the activation-grid resolution, resized to the requested output
dimensions, and min-max normalized.  Because signs are invariant to positive
rescaling and the trailing normalization removes the remaining scale, the
map is bitwise identical for a stack and any positive multiple of it.
"""

from dataclasses import dataclass

import numpy as np

from sigsal import kernels
from sigsal.errors import DegenerateInput, InvalidShape, InvalidValue
from sigsal.numutil import as_tensor, minmax_normalize, resize_bilinear
from sigsal.spectral import reconstruct, signature


@dataclass(frozen=True)
class BilateralParams:
    """Edge-preserving smoothing parameters on the activation grid.

    Defaults: sigma_spatial 3 px, radius 2 * sigma_spatial, and sigma_range
    0.1 on a map pre-normalized to [0, 1] (a range sigma is meaningless
    without a fixed value scale).
    """

    sigma_spatial: float = 3.0
    sigma_range: float = 0.1
    radius: int = 6

    def __post_init__(self):
        if self.sigma_spatial <= 0 or self.sigma_range <= 0:
            raise InvalidValue("bilateral sigmas must be positive")
        if int(self.radius) < 1:
            raise InvalidValue("bilateral radius must be >= 1")


@dataclass(frozen=True)
class SaliencyMap:
    """Rank-2 map with values in [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        v = as_tensor(self.values, rank=2, name="saliency values")
        if v.min() < 0.0 or v.max() > 1.0:
            raise InvalidValue("saliency values must lie in [0, 1]")
        object.__setattr__(self, "values", v)

    @property
    def height(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]


def bilateral_filter(img, params=BilateralParams()):
    """Bilateral filter of a rank-2 map; preserves the global value range."""
    img = as_tensor(img, rank=2, name="bilateral input")
    return kernels.bilateral(
        img, float(params.sigma_spatial), float(params.sigma_range), int(params.radius)
    )


def suppress_background(img):
    """Single-image foreground emphasis: squared sign reconstruction, normalized."""
    img = as_tensor(img, rank=2, name="image")
    recon = reconstruct(signature(img))
    return minmax_normalize(recon * recon)


def _activation_stack(acts):
    acts = as_tensor(acts, rank=3, name="activation stack")
    if acts.shape[0] < 1:
        raise InvalidShape("activation stack needs at least one channel")
    return acts


def signature_activation_map(acts, out_h, out_w, params=BilateralParams()):
    """Saliency map of an [S, h, w] activation stack at (out_h, out_w)."""
    acts = _activation_stack(acts)
    n_channels, h, w = acts.shape
    acc = np.zeros((h, w))
    for s in range(n_channels):  # fixed order keeps the mean deterministic
        recon = reconstruct(signature(acts[s]))
        acc += recon * recon
    averaged = acc / n_channels
    filtered = bilateral_filter(minmax_normalize(averaged), params)
    resized = resize_bilinear(filtered, out_h, out_w)
    return SaliencyMap(minmax_normalize(resized))


def eigen_cam_map(acts, out_h, out_w):
    """Projection onto the first principal component of the channel matrix.

    Power iteration runs on the small S x S Gram matrix to relative
    tolerance 1e-10 (at most 10,000 sweeps); the sign ambiguity of the
    singular vector is removed by taking absolute values.
    """
    acts = _activation_stack(acts)
    n_channels, h, w = acts.shape
    v_mat = acts.reshape(n_channels, h * w).T
    if not v_mat.any():
        raise DegenerateInput("eigen-cam of an all-zero stack")
    gram = v_mat.T @ v_mat

    u = np.full(n_channels, 1.0 / np.sqrt(n_channels))
    for start in range(n_channels + 1):
        if start > 0:  # previous start vector was in the null space
            u = np.zeros(n_channels)
            u[start - 1] = 1.0
        if np.linalg.norm(gram @ u) > 0.0:
            break
    for _ in range(10000):
        nxt = gram @ u
        norm = np.linalg.norm(nxt)
        if norm == 0.0:
            break
        nxt /= norm
        if np.linalg.norm(nxt - u) <= 1e-10:
            u = nxt
            break
        u = nxt

    projection = np.abs(v_mat @ u).reshape(h, w)
    return SaliencyMap(minmax_normalize(resize_bilinear(projection, out_h, out_w)))


def _jet(v):
    """Piecewise-linear jet-style colormap, [0,1] -> RGB in [0,1]."""
    r = np.clip(1.5 - np.abs(4.0 * v - 3.0), 0.0, 1.0)
    g = np.clip(1.5 - np.abs(4.0 * v - 2.0), 0.0, 1.0)
    b = np.clip(1.5 - np.abs(4.0 * v - 1.0), 0.0, 1.0)
    return np.stack([r, g, b], axis=-1)


def render_overlay(img, saliency, alpha=0.5):
    """Blend a jet-colored map over a grayscale image: alpha*color + (1-alpha)*gray."""
    img = as_tensor(img, rank=2, name="image")
    values = saliency.values if isinstance(saliency, SaliencyMap) else as_tensor(saliency, rank=2)
    if img.shape != values.shape:
        raise InvalidShape(f"image {img.shape} vs map {values.shape}")
    if not 0.0 <= alpha <= 1.0:
        raise InvalidValue("alpha must lie in [0, 1]")
    gray = np.repeat(np.clip(img, 0.0, 1.0)[:, :, None], 3, axis=2)
    return np.clip(alpha * _jet(values) + (1.0 - alpha) * gray, 0.0, 1.0)
