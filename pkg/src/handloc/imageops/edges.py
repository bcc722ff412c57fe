"""Canny edge detection."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..errors import ConfigError
from .filters import as_gray, correlate

SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
SOBEL_Y = SOBEL_X.T
# Largest Sobel magnitude attainable on a [0, 1] image.
SOBEL_NORM = 4.0 * np.sqrt(2.0)

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def gaussian_kernel(size: int = 5, sigma: float = 1.4) -> np.ndarray:
    r = size // 2
    y, x = np.mgrid[-r:r + 1, -r:r + 1]
    k = np.exp(-(x ** 2 + y ** 2) / (2.0 * sigma ** 2))
    return k / k.sum()


def gradients(img, sigma: float = 1.4, kernel_size: int = 5):
    """Normalised gradient magnitude and direction (degrees in [0, 180))."""
    smooth = correlate(img, gaussian_kernel(kernel_size, sigma))
    gx = correlate(smooth, SOBEL_X)
    gy = correlate(smooth, SOBEL_Y)
    magnitude = np.hypot(gx, gy) / SOBEL_NORM
    direction = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    direction[direction >= 180.0] = 0.0
    return magnitude, direction


# (dy, dx) of the neighbour along the gradient for each quantised direction.
_STEPS = {0: (0, 1), 45: (1, 1), 90: (1, 0), 135: (1, -1)}


def _shifted(a: np.ndarray, dy: int, dx: int) -> np.ndarray:
    """``out[y, x] = a[y + dy, x + dx]`` with zeros outside."""
    h, w = a.shape
    out = np.zeros_like(a)
    ys = slice(max(0, -dy), min(h, h - dy))
    xs = slice(max(0, -dx), min(w, w - dx))
    yd = slice(max(0, dy), min(h, h + dy))
    xd = slice(max(0, dx), min(w, w + dx))
    out[ys, xs] = a[yd, xd]
    return out


def non_maximum_suppression(magnitude: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Keep pixels that are ridge maxima across the edge.

    Ties between the two pixels straddling an edge keep the one on the
    negative side of the gradient so that a step edge stays one pixel wide.
    """
    sector = (((direction + 22.5) // 45).astype(int) % 4) * 45
    keep = np.zeros(magnitude.shape, dtype=bool)
    for angle, (dy, dx) in _STEPS.items():
        ahead = _shifted(magnitude, dy, dx)
        behind = _shifted(magnitude, -dy, -dx)
        sel = (sector == angle) & (magnitude >= ahead) & (magnitude > behind)
        keep |= sel
    keep &= magnitude > 0
    return np.where(keep, magnitude, 0.0)


def hysteresis(nms: np.ndarray, low: float, high: float) -> np.ndarray:
    weak = nms >= low
    labels, n = ndimage.label(weak, structure=EIGHT_CONNECTED)
    if n == 0:
        return np.zeros(nms.shape)
    strong_labels = np.unique(labels[(nms >= high) & weak])
    strong_labels = strong_labels[strong_labels > 0]
    return np.isin(labels, strong_labels).astype(np.float64)


def canny(img, low: float = 0.1, high: float = 0.2, sigma: float = 1.4, kernel_size: int = 5) -> np.ndarray:
    """Binary Canny edge map.

    ``low`` and ``high`` are fractions of the largest possible Sobel response.
    """
    if not 0 <= low < high <= 1:
        raise ConfigError(f"need 0 <= low < high <= 1, got low={low}, high={high}")
    magnitude, direction = gradients(as_gray(img), sigma, kernel_size)
    return hysteresis(non_maximum_suppression(magnitude, direction), low, high)
