"""Bundled desk-scale model and dataset for noise-robustness runs.

The dataset is three classes of 8x8 period-2 grating patches (vertical,
horizontal, checkerboard) with random phase and additive pixel noise. The
``tinycnn`` model is a single 3x3 conv layer whose three filters are
second-difference detectors for the three orientations, followed by
rectified mean pooling and argmax. Deterministic for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conv import run_conv
from .engine import DIFFERENTIAL_PAIR, AccumulationTree, NoiseSpec, QuantSpec
from .linkbudget import CoreGeometry
from .rng import keyed_rng

CLASS_NAMES = ("vertical", "horizontal", "checker")

# Directional second-difference filters; each responds to exactly one of the
# three period-2 patterns and is blind to the other two.
_FILTERS = np.array(
    [
        [[-1, 2, -1]] * 3,                                   # vertical alternation
        [[-1, -1, -1], [2, 2, 2], [-1, -1, -1]],             # horizontal alternation
        [[-1, 2, -1], [2, -4, 2], [-1, 2, -1]],              # checkerboard
    ],
    dtype=np.float64,
)[:, None, :, :]  # (c_out=3, c_in=1, 3, 3)


def make_dataset(n: int, seed: int = 0, size: int = 8, pixel_noise: float = 0.1):
    """n labelled patches, shape (n, 1, size, size), values in [0, 1]."""
    rng = keyed_rng(seed, "synth-data")
    images = np.empty((n, 1, size, size))
    labels = rng.integers(0, 3, size=n)
    rr, cc = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    for i in range(n):
        phase = int(rng.integers(0, 2))
        if labels[i] == 0:
            base = (cc + phase) % 2
        elif labels[i] == 1:
            base = (rr + phase) % 2
        else:
            base = (rr + cc + phase) % 2
        noisy = base + pixel_noise * rng.standard_normal((size, size))
        images[i, 0] = np.clip(noisy, 0.0, 1.0)
    return images, labels


@dataclass(frozen=True)
class LayerStats:
    name: str
    mean: float
    std: float
    min: float
    max: float


def run_tinycnn(
    images: np.ndarray,
    geom: CoreGeometry,
    noise: NoiseSpec,
    tree: AccumulationTree = AccumulationTree(),
):
    """Classify patches through the analog conv layer.

    Returns (predictions, layer statistics). Scores are rectified mean conv
    responses per orientation filter; the conv itself runs on the engine with
    6-bit inputs and 7-bit differential weights.
    """
    in_quant = QuantSpec(bits=6, lo=0.0, hi=1.0)
    w_quant = QuantSpec(bits=7, lo=-4.0, hi=4.0, signed_mode=DIFFERENTIAL_PAIR)
    preds = np.empty(len(images), dtype=np.int64)
    responses = []
    for i, image in enumerate(images):
        y = run_conv(
            image,
            _FILTERS,
            geom,
            in_quant,
            w_quant,
            out_quant=None,
            noise=NoiseSpec(noise.sigma_in, noise.sigma_w, noise.sigma_out, noise.seed + i),
            tree=tree,
        )
        scores = np.abs(y).mean(axis=(1, 2))
        preds[i] = int(np.argmax(scores))
        responses.append(y)
    stacked = np.stack(responses)
    stats = [
        LayerStats(
            name="conv3x3",
            mean=float(stacked.mean()),
            std=float(stacked.std()),
            min=float(stacked.min()),
            max=float(stacked.max()),
        )
    ]
    return preds, stats


def simulate_accuracy(
    geom: CoreGeometry,
    noise: NoiseSpec,
    n_samples: int = 60,
    data_seed: int = 1,
):
    """Accuracy of the bundled model on a fresh synthetic draw."""
    images, labels = make_dataset(n_samples, seed=data_seed)
    preds, stats = run_tinycnn(images, geom, noise)
    accuracy = float((preds == labels).mean())
    return accuracy, preds, labels, stats
