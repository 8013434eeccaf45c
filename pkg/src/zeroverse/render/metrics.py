"""Image comparison."""
from __future__ import annotations

import math

import numpy as np

from ..errors import InvalidParameter

IDENTICAL = math.inf  # what psnr reports for identical images


def psnr(a, b) -> float:
    """Peak signal-to-noise ratio in dB over 8-bit channels; ``IDENTICAL`` (+inf) when equal."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise InvalidParameter(f"image shapes differ: {a.shape} vs {b.shape}")
    mse = np.mean((a.astype(np.float64) - b.astype(np.float64)) ** 2)
    if mse == 0:
        return IDENTICAL
    return 20 * math.log10(255.0 / math.sqrt(mse))


def format_psnr(value: float) -> str:
    return "identical" if value == IDENTICAL else f"{value:.2f} dB"
