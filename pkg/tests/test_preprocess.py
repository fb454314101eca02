import numpy as np
import pytest

from mammo_augment.errors import BoxOutOfBounds, LesionOutsideCrop, NoForeground
from mammo_augment.models import BoundingBox, Image, Laterality
from mammo_augment.preprocess import crop, detect_foreground, flip_horizontal, laterality, resize

from conftest import random_box, random_image


def box(x0, y0, x1, y1):
    return BoundingBox(x_min=x0, y_min=y0, x_max=x1, y_max=y1)


def image8(pixels):
    return Image(pixels=np.asarray(pixels, dtype=np.uint8), bit_depth=8)


def test_foreground_picks_largest_component():
    pixels = np.zeros((10, 12), dtype=np.uint8)
    pixels[1:3, 1:3] = 200  # 4 pixels
    pixels[4:9, 5:11] = 200  # 30 pixels
    assert detect_foreground(image8(pixels)) == box(5, 4, 10, 8)


def test_foreground_uses_eight_connectivity():
    pixels = np.zeros((5, 5), dtype=np.uint8)
    for i in range(5):
        pixels[i, i] = 255
    assert detect_foreground(image8(pixels)) == box(0, 0, 4, 4)


def test_foreground_tie_goes_to_first_in_raster_order():
    pixels = np.zeros((6, 6), dtype=np.uint8)
    pixels[4:6, 0:2] = 255
    pixels[0:2, 4:6] = 255
    assert detect_foreground(image8(pixels)) == box(4, 0, 5, 1)


def test_foreground_threshold_is_relative_to_full_scale():
    pixels = np.full((4, 4), 3000, dtype=np.uint16)
    image = Image(pixels=pixels, bit_depth=16)
    # 0.05 * 65535 is above 3000
    with pytest.raises(NoForeground):
        detect_foreground(image)
    assert detect_foreground(image, 0.04) == box(0, 0, 3, 3)


def test_crop_translates_and_clips_lesions():
    image = image8(np.arange(100).reshape(10, 10))
    result = crop(image, box(2, 3, 7, 8), [box(3, 4, 5, 5), box(0, 0, 4, 4)])
    assert result.cropped.size == (6, 6)
    assert result.cropped.pixels[0, 0] == 32
    assert result.transformed_lesions == (box(1, 1, 3, 2), box(0, 0, 2, 1))


def test_crop_translation_recovers_original_boxes():
    rng = np.random.default_rng(5)
    for _ in range(100):
        image = random_image(rng, 30, 20)
        region = box(3, 2, 25, 17)
        lesions = [random_box(rng, 20, 14).translate(4, 3) for _ in range(3)]
        result = crop(image, region, lesions)
        restored = [b.translate(region.x_min, region.y_min) for b in result.transformed_lesions]
        assert restored == lesions


def test_crop_errors():
    image = image8(np.zeros((5, 5)))
    with pytest.raises(LesionOutsideCrop) as excinfo:
        crop(image, box(0, 0, 1, 1), [box(0, 0, 0, 0), box(3, 3, 4, 4)])
    assert excinfo.value.index == 1
    with pytest.raises(BoxOutOfBounds):
        crop(image, box(0, 0, 5, 4), [])


def test_flip_twice_is_identity():
    rng = np.random.default_rng(9)
    for _ in range(100):
        width, height = (int(v) for v in rng.integers(1, 40, size=2))
        image = random_image(rng, width, height, bit_depth=16)
        boxes = [random_box(rng, width, height) for _ in range(3)]
        once, flipped = flip_horizontal(image, boxes)
        twice, restored = flip_horizontal(once, flipped)
        assert twice == image
        assert restored == boxes


def test_flip_mirrors_boxes():
    image = image8(np.zeros((2, 10)))
    _, boxes = flip_horizontal(image, [box(0, 0, 2, 1)])
    assert boxes == [box(7, 0, 9, 1)]


def test_laterality():
    left = np.zeros((4, 9), dtype=np.uint8)
    left[:, :3] = 100
    assert laterality(image8(left)) == Laterality.LEFT
    assert laterality(image8(left[:, ::-1])) == Laterality.RIGHT
    # middle column of an odd width is ignored
    middle = np.zeros((4, 9), dtype=np.uint8)
    middle[:, 4] = 255
    assert laterality(image8(middle)) == Laterality.LEFT
    assert laterality(image8(np.full((3, 1), 9))) == Laterality.LEFT


def test_resize_to_same_size_is_identity():
    image = image8(np.arange(12).reshape(3, 4))
    out, boxes = resize(image, [box(0, 0, 1, 1)], 4, 3)
    assert out == image
    assert boxes == [box(0, 0, 1, 1)]


def test_resize_constant_image_stays_constant():
    image = Image(pixels=np.full((7, 5), 1234, dtype=np.uint16), bit_depth=16)
    out, _ = resize(image, [], 16, 12)
    assert out.size == (16, 12)
    assert np.all(out.pixels == 1234)


def test_resize_upscale_by_two_interpolates():
    image = image8([[0, 100]])
    out, _ = resize(image, [], 4, 1)
    # source positions -0.25, 0.25, 0.75, 1.25 clamped to [0, 1]
    np.testing.assert_array_equal(out.pixels, [[0, 25, 75, 100]])


def test_resize_scales_boxes_within_bounds():
    image = image8(np.zeros((100, 200)))
    _, boxes = resize(image, [box(20, 10, 199, 99), box(50, 50, 50, 50)], 100, 50)
    assert boxes[0] == box(10, 5, 99, 49)
    assert boxes[1] == box(25, 25, 25, 25)
