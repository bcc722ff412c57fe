"""Straight-line Hough transform and line erasure.

Lines use the normal form ``r = x cos(theta) + y sin(theta)`` with ``x`` the
column and ``y`` the row of a pixel centre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List

import numpy as np
from scipy import ndimage

from .edges import EIGHT_CONNECTED
from .filters import as_gray


@dataclass(frozen=True)
class HoughLine:
    r: float
    theta: float  # degrees in [0, 180)
    votes: int

    def distance(self, x, y):
        t = math.radians(self.theta)
        return np.abs(x * math.cos(t) + y * math.sin(t) - self.r)


def accumulate(edges, dtheta: float = 1.0, dr: float = 1.0):
    """Vote every edge pixel into an ``(n_r, n_theta)`` accumulator.

    Returns ``(acc, rs, thetas)`` where ``rs`` and ``thetas`` (degrees) label
    the accumulator rows and columns.
    """
    edges = as_gray(edges)
    h, w = edges.shape
    diag = math.ceil(math.hypot(h, w))
    n_r = int(round(2 * diag / dr)) + 1
    thetas = np.arange(0.0, 180.0, dtheta)
    rs = -diag + dr * np.arange(n_r)
    ys, xs = np.nonzero(edges > 0.5)
    acc = np.zeros((n_r, len(thetas)), dtype=np.int64)
    if len(xs) == 0:
        return acc, rs, thetas
    rad = np.deg2rad(thetas)
    cos, sin = np.cos(rad), np.sin(rad)
    cols = np.arange(len(thetas))
    # chunk the edge pixels to bound memory on dense edge maps
    for start in range(0, len(xs), 4096):
        x = xs[start:start + 4096, None].astype(np.float64)
        y = ys[start:start + 4096, None].astype(np.float64)
        r_idx = np.rint((x * cos + y * sin + diag) / dr).astype(np.int64)
        flat = (r_idx * len(thetas) + cols).ravel()
        acc += np.bincount(flat, minlength=acc.size).reshape(acc.shape)
    return acc, rs, thetas


def hough_lines(edges, vote_threshold: int, dtheta: float = 1.0, dr: float = 1.0) -> List[HoughLine]:
    """Peaks of the Hough accumulator, strongest first.

    A peak is a cell at least as large as its 8 neighbours with at least
    ``vote_threshold`` votes; a plateau of equal neighbouring peaks yields a
    single line at its middle cell.
    """
    acc, rs, thetas = accumulate(edges, dtheta, dr)
    if acc.max(initial=0) == 0:
        return []
    local_max = ndimage.maximum_filter(acc, size=3, mode="constant", cval=0)
    peaks = (acc == local_max) & (acc >= max(vote_threshold, 1))
    labels, n = ndimage.label(peaks, structure=EIGHT_CONNECTED)
    lines = []
    for idx in range(1, n + 1):
        cells = np.argwhere(labels == idx)
        ri, ti = cells[(len(cells) - 1) // 2]
        lines.append(HoughLine(float(rs[ri]), float(thetas[ti]), int(acc[ri, ti])))
    lines.sort(key=lambda ln: (-ln.votes, ln.theta, ln.r))
    return lines


def line_mask(shape, lines: Iterable[HoughLine], thickness: float = 3) -> np.ndarray:
    """Boolean mask of pixels within ``thickness / 2`` of any line."""
    h, w = shape
    ys, xs = np.mgrid[0:h, 0:w]
    mask = np.zeros((h, w), dtype=bool)
    for ln in lines:
        mask |= ln.distance(xs, ys) <= thickness / 2.0
    return mask


def erase_lines(img, lines: Iterable[HoughLine], thickness: float = 3) -> np.ndarray:
    """Paint white over every pixel within ``thickness / 2`` of a line."""
    img = as_gray(img)
    out = img.copy()
    out[line_mask(img.shape, lines, thickness)] = 1.0
    return out
