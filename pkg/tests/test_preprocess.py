import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from handloc.errors import ConfigError, InputValidationError
from handloc.geometry import BBox
from handloc.imageops import line_mask
from handloc.preprocess import (
    VARIANTS,
    HoughConfig,
    OcrWord,
    box_from_model,
    box_pixel_slices,
    box_to_model,
    find_rulings,
    fuse_channels,
    load_ocr_sidecar,
    make_pre_plane,
    mask_ocr_words,
    parse_variant,
    resize_to_model,
)
from handloc.synthetic import _scribble


def word(x0, y0, x1, y1, conf):
    return OcrWord(BBox(x0, y0, x1, y1), "w", conf)


def test_mask_ocr_words_threshold():
    img = np.full((20, 30), 0.2)
    out = mask_ocr_words(img, [word(2, 3, 10, 8, 0.9)])
    assert (out[3:8, 2:10] == 1.0).all()
    out[3:8, 2:10] = 0.2
    assert np.array_equal(out, img)
    assert np.array_equal(mask_ocr_words(img, [word(2, 3, 10, 8, 0.5)]), img)
    assert np.array_equal(mask_ocr_words(img, [word(2, 3, 10, 8, 0.7)]), img)
    assert np.array_equal(mask_ocr_words(img, []), img)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 40), st.floats(-5, 40), st.floats(0, 20), st.floats(0, 20), st.floats(0, 1)),
                max_size=6))
def test_mask_never_darkens(words):
    img = np.random.default_rng(0).random((30, 30))
    ws = [OcrWord(BBox(x, y, x + w, y + h), "", c) for x, y, w, h, c in words]
    assert (mask_ocr_words(img, ws) >= img).all()


def test_box_pixel_slices_fractional():
    assert box_pixel_slices(BBox(1.5, 2.0, 3.2, 4.0), (10, 10)) == (slice(2, 4), slice(1, 4))
    assert box_pixel_slices(BBox(-3, -3, 2, 2), (10, 10)) == (slice(0, 2), slice(0, 2))


def ruled_page():
    rng = np.random.default_rng(11)
    img = np.ones((300, 400))
    for y in (60, 100, 140, 180):
        img[y:y + 2, 30:370] = 0.05
    img[60:182, 30:32] = 0.05
    img[60:182, 368:370] = 0.05
    printed = [word(50, 70, 110, 90, 0.95), word(150, 110, 260, 130, 0.95)]
    for w in printed:
        img[int(w.bbox.y_min) + 3:int(w.bbox.y_max) - 3, int(w.bbox.x_min) + 2:int(w.bbox.x_max) - 2:4] = 0.1
    scribble = _scribble(rng, img.shape, 120, 220, 150, 50)
    img[scribble] = 0.2
    return img, printed, scribble


def test_pre_plane_keeps_only_scribble():
    img, printed, scribble = ruled_page()
    cfg = HoughConfig(min_votes=100)
    pre = make_pre_plane(img, printed, cfg)
    dark = pre < 0.5
    assert np.array_equal(dark, scribble)
    assert np.array_equal(pre[scribble], img[scribble])


def test_pre_plane_changes_only_words_and_lines():
    img, printed, _ = ruled_page()
    cfg = HoughConfig(min_votes=100)
    pre = make_pre_plane(img, printed, cfg)
    allowed = line_mask(img.shape, find_rulings(mask_ocr_words(img, printed), cfg), cfg.thickness)
    for w in printed:
        allowed[box_pixel_slices(w.bbox, img.shape)] = True
    assert not ((pre != img) & ~allowed).any()


def test_pre_plane_blank_and_blob():
    blank = np.ones((120, 160))
    assert np.array_equal(make_pre_plane(blank, []), blank)
    blob = np.ones((120, 160))
    blob[_scribble(np.random.default_rng(3), blob.shape, 20, 30, 100, 50)] = 0.15
    assert np.array_equal(make_pre_plane(blob, []), blob)


def test_resize_identity_and_shape():
    img = np.random.default_rng(0).random((768, 768))
    assert np.array_equal(resize_to_model(img), img)
    assert resize_to_model(np.random.default_rng(1).random((1000, 700))).shape == (768, 768)


def test_resize_checkerboard_corners():
    board = np.array([[0.0, 1.0], [1.0, 0.0]])
    up = resize_to_model(board, side=4)
    assert up[0, 0] == 0.0 and up[0, -1] == 1.0 and up[-1, 0] == 1.0 and up[-1, -1] == 0.0
    # bilinear oracle at an interior sample: position (1/3, 1/3) of the source grid
    fy = fx = 1 / 3
    expected = (board[0, 0] * (1 - fx) + board[0, 1] * fx) * (1 - fy) + (board[1, 0] * (1 - fx) + board[1, 1] * fx) * fy
    assert up[1, 1] == pytest.approx(expected)


def test_box_scaling_examples():
    b = BBox(3, 4, 50, 60)
    assert box_to_model(b, 768, 768) == b
    assert box_to_model(BBox(0, 0, 700, 1000), 700, 1000) == BBox(0, 0, 768, 768)
    out = box_to_model(BBox(70, 100, 140, 200), 700, 1000)
    assert list(out) == pytest.approx([76.8, 76.8, 153.6, 153.6])
    with pytest.raises(InputValidationError):
        box_to_model(b, 0, 10)


@settings(max_examples=200)
@given(st.floats(0, 2000), st.floats(0, 2000), st.floats(0, 500), st.floats(0, 500),
       st.integers(1, 4000), st.integers(1, 4000))
def test_box_round_trip(x, y, w, h, ow, oh):
    b = BBox(x, y, x + w, y + h)
    back = box_from_model(box_to_model(b, ow, oh), ow, oh)
    assert list(back) == pytest.approx(list(b), abs=1e-9)


def test_fuse_channels():
    o = np.random.default_rng(2).random((8, 9))
    pre = np.random.default_rng(3).random((8, 9))
    assert np.array_equal(fuse_channels(o, pre, "o").planes[0], o)
    s = fuse_channels(o, pre, "o/o-/pre-")
    assert len(s.planes) == 3
    assert np.array_equal(s.planes[1], 1 - o) and np.array_equal(s.planes[2], 1 - pre)
    s = fuse_channels(o, pre, "o-/pre-")
    assert np.array_equal(s.planes[0], 1 - o) and np.array_equal(s.planes[1], 1 - pre)
    assert s.as_array().shape == (8, 9, 2)
    with pytest.raises(InputValidationError):
        fuse_channels(o, pre[:, :5], "o/pre")


@pytest.mark.parametrize("variant", VARIANTS)
def test_variant_parsing_round_trip(variant):
    terms = parse_variant(variant)
    assert "/".join(terms) == variant
    o = np.zeros((2, 2))
    assert len(fuse_channels(o, o, variant).planes) == variant.count("/") + 1


@pytest.mark.parametrize("bad", ["x", "o/o", "pre/o", "o//pre", ""])
def test_unknown_variant(bad):
    with pytest.raises(ConfigError):
        parse_variant(bad)


def test_ocr_sidecar(tmp_path):
    path = tmp_path / "a.json"
    path.write_text(json.dumps({"image_id": "a", "words": [{"bbox": [1, 2, 3, 4], "text": "hi", "conf": 0.8}]}))
    (w,) = load_ocr_sidecar(path)
    assert w.bbox == BBox(1, 2, 4, 6) and w.text == "hi" and w.confidence == 0.8
    path.write_text(json.dumps({"image_id": "a", "words": [{"bbox": [1, 2, 3, 4], "text": "", "conf": 1.3}]}))
    with pytest.raises(InputValidationError):
        load_ocr_sidecar(path)
