"""8-bit grayscale image files (PNG and binary PGM)."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .filters import as_gray


def to_uint8(img) -> np.ndarray:
    return np.clip(np.rint(as_gray(img) * 255.0), 0, 255).astype(np.uint8)


def read_image(path) -> np.ndarray:
    """Load a grayscale image as float intensities ``v / 255``."""
    with Image.open(path) as im:
        if im.mode not in ("L", "P", "1"):
            im = im.convert("L")
        arr = np.asarray(im.convert("L"), dtype=np.float64)
    return arr / 255.0


def write_image(path, img) -> None:
    """Write a PNG or P5 PGM depending on the file suffix."""
    path = Path(path)
    data = to_uint8(img)
    if path.suffix.lower() == ".pgm":
        h, w = data.shape
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(data.tobytes())
    else:
        Image.fromarray(data).save(path, format="PNG")
