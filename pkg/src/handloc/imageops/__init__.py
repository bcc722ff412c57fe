"""Grayscale image processing primitives."""

from .edges import canny, gradients
from .filters import correlate, median_filter, morphology, negate, otsu_threshold
from .hough import HoughLine, accumulate, erase_lines, hough_lines, line_mask
from .io import read_image, write_image

__all__ = [
    "HoughLine",
    "accumulate",
    "canny",
    "correlate",
    "erase_lines",
    "gradients",
    "hough_lines",
    "line_mask",
    "median_filter",
    "morphology",
    "negate",
    "otsu_threshold",
    "read_image",
    "write_image",
]
