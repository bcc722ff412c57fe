"""Point, neighbourhood and binary-morphology filters on grayscale arrays.

Images are 2-D float arrays with intensities in [0, 1]; row index is y.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError

__all__ = ["negate", "median_filter", "otsu_threshold", "morphology", "correlate"]


def as_gray(img) -> np.ndarray:
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D grayscale image, got shape {arr.shape}")
    return arr


def negate(img) -> np.ndarray:
    return 1.0 - as_gray(img)


def _windows(padded: np.ndarray, shape, out_shape):
    """Yield every shifted view of ``padded`` covering a window of ``shape``."""
    kh, kw = shape
    h, w = out_shape
    for dy in range(kh):
        for dx in range(kw):
            yield dy, dx, padded[dy:dy + h, dx:dx + w]


def correlate(img, kernel, mode: str = "edge") -> np.ndarray:
    """Direct 2-D correlation with an odd-sized kernel."""
    img = as_gray(img)
    kernel = np.asarray(kernel, dtype=np.float64)
    kh, kw = kernel.shape
    padded = np.pad(img, ((kh // 2, kh // 2), (kw // 2, kw // 2)), mode=mode)
    out = np.zeros_like(img)
    for dy, dx, view in _windows(padded, kernel.shape, img.shape):
        if kernel[dy, dx] != 0:
            out += kernel[dy, dx] * view
    return out


def median_filter(img, radius: int = 1) -> np.ndarray:
    """Median over the ``(2r+1)^2`` neighbourhood, replicating border pixels."""
    if radius < 1:
        raise ConfigError(f"median radius must be >= 1, got {radius}")
    img = as_gray(img)
    size = 2 * radius + 1
    padded = np.pad(img, radius, mode="edge")
    stack = np.stack([v for _, _, v in _windows(padded, (size, size), img.shape)])
    return np.median(stack, axis=0)


def quantize(img) -> np.ndarray:
    return np.clip(np.rint(as_gray(img) * 255), 0, 255).astype(np.int64)


def otsu_threshold(img):
    """Otsu's threshold on a 256-bin histogram.

    Returns ``(threshold, mask)`` with ``mask`` 1.0 where the quantized
    intensity lies above the threshold bin.  When several bins maximise the
    between-class variance the middle of that run is used.  A constant image
    thresholds at its own value and yields an empty mask.
    """
    levels = quantize(img)
    hist = np.bincount(levels.ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    bins = np.arange(256, dtype=np.float64)
    w0 = np.cumsum(hist)
    w1 = total - w0
    s0 = np.cumsum(hist * bins)
    mu_total = s0[-1] / total
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = s0 / w0
        mu1 = (s0[-1] - s0) / w1
        between = w0 * w1 * (mu0 - mu1) ** 2 / total ** 2
    between[(w0 == 0) | (w1 == 0)] = -1.0
    best = between.max()
    if best <= 0:
        k = int(round(mu_total))
    else:
        winners = np.flatnonzero(np.isclose(between, best, rtol=1e-12, atol=0.0))
        k = int(winners[(len(winners) - 1) // 2])
    mask = (levels > k).astype(np.float64)
    return k / 255.0, mask


def _check_se(se_width: int, se_height: int):
    for name, v in (("se_width", se_width), ("se_height", se_height)):
        if v < 1 or v % 2 == 0:
            raise ConfigError(f"{name} must be an odd integer >= 1, got {v}")


def _rank_1d(mask: np.ndarray, size: int, axis: int, reduce) -> np.ndarray:
    if size == 1:
        return mask
    r = size // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (r, r)
    padded = np.pad(mask, pad, mode="constant", constant_values=0)
    n = mask.shape[axis]
    views = [np.take(padded, np.arange(k, k + n), axis=axis) for k in range(size)]
    return reduce.reduce(np.stack(views), axis=0)


def _dilate(mask, w, h):
    return _rank_1d(_rank_1d(mask, w, 1, np.maximum), h, 0, np.maximum)


def _erode(mask, w, h):
    return _rank_1d(_rank_1d(mask, w, 1, np.minimum), h, 0, np.minimum)


def morphology(mask, op: str, se_width: int = 3, se_height: int = 3) -> np.ndarray:
    """Binary morphology with a ``se_height x se_width`` rectangle.

    Pixels outside the image count as background.  Compound operations run
    on a zero-padded canvas so that closing behaves as on an unbounded plane.
    """
    _check_se(se_width, se_height)
    m = (as_gray(mask) > 0.5).astype(np.float64)
    py, px = se_height // 2, se_width // 2
    canvas = np.pad(m, ((py, py), (px, px)))
    if op == "dilate":
        out = _dilate(canvas, se_width, se_height)
    elif op == "erode":
        out = _erode(canvas, se_width, se_height)
    elif op == "open":
        out = _dilate(_erode(canvas, se_width, se_height), se_width, se_height)
    elif op == "close":
        out = _erode(_dilate(canvas, se_width, se_height), se_width, se_height)
    else:
        raise ConfigError(f"unknown morphology op {op!r}")
    return out[py:py + m.shape[0], px:px + m.shape[1]]
