import numpy as np
import pytest

from glcvis.cpcr import (
    Collision,
    CpcrError,
    CpcrImage,
    UndecodableError,
    decode_cpcr,
    display_gray,
    encode_cpcr,
    mean_class_composite,
    quantize_unit,
    read_sidecar,
    write_pgm,
    write_sidecar,
)
from glcvis.dataset import AttributeMeta, Dataset

REFERENCE_POINT = [8, 10, 10, 8, 7, 10, 9, 7, 1, 1]


def make_dataset(rows, labels):
    matrix = np.asarray(rows, dtype=float)
    attrs = tuple(
        AttributeMeta(f"x{j+1}", float(matrix[:, j].min()), float(matrix[:, j].max()))
        for j in range(matrix.shape[1])
    )
    return Dataset(attributes=attrs, rows=matrix, labels=tuple(labels))


def test_encode_reference_point_cells():
    img = encode_cpcr(REFERENCE_POINT, grid_size=10)
    assert [(x, y) for x, y, _ in img.cells] == [
        (8, 10),
        (10, 8),
        (7, 10),
        (9, 7),
        (1, 1),
    ]
    assert img.pair_count == 5
    assert img.collisions == ()


def test_intensities_strictly_increase_first_pair_darkest():
    img = encode_cpcr(REFERENCE_POINT, grid_size=10)
    intensities = [v for _, _, v in img.cells]
    assert intensities == sorted(intensities)
    assert len(set(intensities)) == len(intensities)
    assert 0.0 < intensities[0] < intensities[-1] < 1.0


def test_decode_reference_point():
    img = encode_cpcr(REFERENCE_POINT, grid_size=10)
    assert decode_cpcr(img).tolist() == [float(v) for v in REFERENCE_POINT]


def test_single_pair_image():
    img = encode_cpcr([1, 1], grid_size=10)
    assert img.cells == ((1, 1, 0.5),)
    assert decode_cpcr(img).tolist() == [1.0, 1.0]


def test_collision_spiral_places_right_neighbor():
    img = encode_cpcr([3, 3, 3, 3], grid_size=10)
    assert [(x, y) for x, y, _ in img.cells] == [(3, 3), (4, 3)]
    assert img.collisions == (
        Collision(pair_index=1, intended=(3, 3), placed=(4, 3)),
    )
    assert decode_cpcr(img).tolist() == [3.0, 3.0, 3.0, 3.0]


def test_collision_spiral_skips_occupied_ring_cells():
    # four identical pairs: spiral fills right, then down, then left
    img = encode_cpcr([5, 5, 5, 5, 5, 5, 5, 5], grid_size=10)
    placed = [(x, y) for x, y, _ in img.cells]
    assert placed[0] == (5, 5)
    assert len(set(placed)) == 4
    assert decode_cpcr(img).tolist() == [5.0] * 8


def test_collision_at_grid_corner_stays_in_grid():
    img = encode_cpcr([10, 10, 10, 10, 10, 10], grid_size=10)
    for x, y, _ in img.cells:
        assert 1 <= x <= 10 and 1 <= y <= 10
    assert decode_cpcr(img).tolist() == [10.0] * 6


def test_matrix_layout_top_row_is_high_y():
    img = encode_cpcr([1, 10, 10, 1], grid_size=10)
    mat = img.matrix()
    assert mat[0, 0] != 0.0  # (1, 10) -> top-left
    assert mat[9, 9] != 0.0  # (10, 1) -> bottom-right


def test_grid_too_small():
    with pytest.raises(CpcrError):
        encode_cpcr([5, 5], grid_size=4)
    with pytest.raises(CpcrError):
        encode_cpcr([0, 1], grid_size=10)


def test_non_integer_rejected():
    with pytest.raises(CpcrError):
        encode_cpcr([1.5, 2.0], grid_size=10)


def test_odd_dimension_padding_round_trip():
    img = encode_cpcr([2, 9, 4], grid_size=10)
    assert img.pair_count == 2
    assert decode_cpcr(img).tolist() == [2.0, 9.0, 4.0]


def test_blank_image_undecodable():
    blank = CpcrImage(
        grid_size=10,
        cells=(),
        collisions=(),
        pair_count=0,
        original_dim=0,
    )
    with pytest.raises(UndecodableError):
        decode_cpcr(blank)


def test_intensity_ties_undecodable():
    img = CpcrImage(
        grid_size=10,
        cells=((1, 1, 0.5), (2, 2, 0.5)),
        collisions=(),
        pair_count=2,
        original_dim=4,
    )
    with pytest.raises(UndecodableError):
        decode_cpcr(img)


def test_round_trip_random_points_with_heavy_duplicates():
    rng = np.random.default_rng(20240813)
    for _ in range(1000):
        n = int(rng.integers(2, 41))
        grid = int(rng.integers(3, 11))
        if rng.random() < 0.4:
            # duplicate-heavy stress: few distinct levels
            levels = rng.integers(1, 3, size=n) * 1
        else:
            levels = rng.integers(1, grid + 1, size=n)
        if (n + n % 2) // 2 > grid * grid:
            continue
        img = encode_cpcr(levels, grid_size=grid)
        back = decode_cpcr(img)
        assert back.tolist() == [float(v) for v in levels]


def test_sidecar_round_trip(tmp_path):
    img = encode_cpcr([3, 3, 3, 3], grid_size=10)
    path = tmp_path / "img.json"
    write_sidecar(img, path)
    again = read_sidecar(path)
    assert again == img
    assert decode_cpcr(again).tolist() == [3.0, 3.0, 3.0, 3.0]


def test_pgm_output_deterministic(tmp_path):
    img = encode_cpcr(REFERENCE_POINT, grid_size=10)
    p1, p2 = tmp_path / "a.pgm", tmp_path / "b.pgm"
    write_pgm(display_gray(img), p1)
    write_pgm(display_gray(img), p2)
    data = p1.read_bytes()
    assert data == p2.read_bytes()
    assert data.startswith(b"P5\n10 10\n255\n")
    gray = display_gray(img)
    assert gray[0, 7] == 0  # first pair (8,10) drawn black at the top row


def test_quantize_unit():
    assert quantize_unit(np.array([0.0, 0.5, 1.0]), 10).tolist() == [1, 6, 10]
    with pytest.raises(CpcrError):
        quantize_unit(np.array([1.2]), 10)


# ---------------------------------------------------------------------------
# composites


def test_composite_single_member_classes_equal_member_images():
    d = make_dataset([[1, 2, 3, 4], [4, 3, 2, 1]], ["A", "B"])
    comp = mean_class_composite(d, ("A", "B"), grid_size=4)
    # single members: mean equals that member's image (normalized + quantized)
    assert comp.left.max() > 0
    assert comp.right.max() > 0
    panel = comp.panel()
    assert panel.shape == (4, 2 * 4 + 1)


def test_composite_width_contract():
    d = make_dataset([[1, 2], [3, 4]], ["A", "B"])
    comp = mean_class_composite(d, ("A", "B"), grid_size=5, gutter=3)
    assert comp.panel().shape == (5, 13)


def test_composite_cellwise_mean_on_three_case_toy():
    rows = [[1, 1], [1, 1], [5, 5]]
    d = make_dataset(rows, ["A", "A", "B"])
    comp = mean_class_composite(d, ("A", "B"), grid_size=5)
    norm_rows = [[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]]
    from glcvis.cpcr import encode_cpcr as enc

    imgs = [enc(quantize_unit(np.array(r), 5), 5).matrix() for r in norm_rows]
    expected_left = (imgs[0] + imgs[1]) / 2
    assert np.allclose(comp.left, expected_left)
    assert np.allclose(comp.right, imgs[2])


def test_composite_swap_symmetry():
    d = make_dataset([[1, 2, 3, 4], [4, 3, 2, 1], [2, 2, 2, 2]], ["A", "B", "A"])
    ab = mean_class_composite(d, ("A", "B"), grid_size=4)
    ba = mean_class_composite(d, ("B", "A"), grid_size=4)
    assert np.allclose(ab.left, ba.right)
    assert np.allclose(ab.right, ba.left)


def test_composite_target_case_overlay():
    d = make_dataset([[1, 2, 3, 4], [4, 3, 2, 1]], ["A", "B"])
    comp = mean_class_composite(d, ("A", "B"), grid_size=4, target_row=0)
    assert comp.target_cells
    rgb = comp.rgb()
    x, y = comp.target_cells[0]
    assert rgb[4 - y, x - 1].tolist() == [1.0, 0.0, 0.0]


def test_composite_unknown_class():
    d = make_dataset([[1, 2]], ["A"])
    with pytest.raises(CpcrError):
        mean_class_composite(d, ("A", "Z"), grid_size=4)
