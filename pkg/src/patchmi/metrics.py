"""Classic adjacent-frame similarity measures used as comparison baselines."""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .errors import ConfigError, NumericalError


class MetricKind(Enum):
    PMI = "pmi"
    EUCLIDEAN = "euclidean"
    COSINE = "cosine"
    PSNR = "psnr"
    HISTOGRAM_MI = "histogram_mi"

    @property
    def higher_is_similar(self) -> bool:
        # Euclidean is a distance; everything else grows with similarity.
        return self is not MetricKind.EUCLIDEAN

    @classmethod
    def parse(cls, name: str) -> "MetricKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            options = ", ".join(kind.value for kind in cls)
            raise ConfigError(f"unknown metric {name!r} (choose from: {options})") from None


def _check_shapes(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ConfigError(f"frame shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def euclidean(a: np.ndarray, b: np.ndarray) -> float:
    """L2 norm of the elementwise difference over all values."""
    a, b = _check_shapes(a, b)
    return float(np.sqrt(np.sum((a - b) ** 2)))


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of the flattened frames."""
    a, b = _check_shapes(a, b)
    va, vb = a.ravel(), b.ravel()
    na, nb = float(np.linalg.norm(va)), float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise NumericalError("cosine similarity undefined for a zero-norm frame")
    return float(np.dot(va, vb) / (na * nb))


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB under MAX = 1; identical frames give +inf."""
    a, b = _check_shapes(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def histogram_mi(a: np.ndarray, b: np.ndarray, bins: int = 64) -> float:
    """Mutual information of the pixel co-occurrence histogram, in nats.

    Uses ``bins`` uniform bins over [0, 1] for both marginals and the
    joint, with the usual 0 * log 0 = 0 convention.
    """
    a, b = _check_shapes(a, b)
    if bins < 2:
        raise ConfigError("histogram bins must be at least 2")
    joint, _, _ = np.histogram2d(
        a.ravel(), b.ravel(), bins=bins, range=[[0.0, 1.0], [0.0, 1.0]]
    )
    pxy = joint / joint.sum()
    px = pxy.sum(axis=1)
    py = pxy.sum(axis=0)
    nz = pxy > 0.0
    return float(np.sum(pxy[nz] * np.log(pxy[nz] / np.outer(px, py)[nz])))
