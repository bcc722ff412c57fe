"""
Preparing model input planes
============================

Generates one synthetic page, blanks out confident OCR words, erases
table rulings and stacks the requested channel variant.
"""

import numpy as np

from handloc.preprocess import HoughConfig, find_rulings, fuse_channels, make_pre_plane, mask_ocr_words, resize_to_model
from handloc.synthetic import generate_document

rng = np.random.default_rng(3)
doc = generate_document(rng)
print("page", doc.image.shape, "with", len(doc.words), "OCR words")

# rulings are searched on the page with confident words already whitened
cfg = HoughConfig()
lines = find_rulings(mask_ocr_words(doc.image, doc.words), cfg)
# each 2-px stroke has an edge on either side, so expect about two peaks per ruling
print("found", len(lines), "line peaks; generator drew", len(doc.rulings), "rulings")

pre = make_pre_plane(doc.image, doc.words, cfg)
print("ink pixels before: %d, after: %d" % ((doc.image < 0.5).sum(), (pre < 0.5).sum()))

# scale both planes to the square model resolution and fuse them
stack = fuse_channels(resize_to_model(doc.image), resize_to_model(pre), "o/o-/pre-")
print("fused", stack.variant, "->", stack.as_array().shape)
