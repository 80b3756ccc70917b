import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glcvis import coords
from glcvis.coords import (
    CoordsError,
    GlcGraph,
    decode,
    decode_cpc,
    decode_cpc_stars,
    decode_inline,
    decode_pc,
    decode_spc,
    encode,
    encode_cpc,
    encode_cpc_stars,
    encode_inline,
    encode_pc,
    encode_spc,
    graph_distance,
    identity_pairing,
    lp_distance,
    mapping_distortion,
    star_pairing,
)

RNG = np.random.default_rng(20240812)


# ---------------------------------------------------------------------------
# parallel axes


def test_pc_definition():
    g = encode_pc([0.5, 0.7])
    assert g.nodes.tolist() == [[0.0, 0.5], [1.0, 0.7]]


def test_pc_constant_vector_is_horizontal():
    g = encode_pc([1.0, 1.0, 1.0])
    assert g.nodes.tolist() == [[0.0, 1.0], [1.0, 1.0], [2.0, 1.0]]


def test_pc_48d_node_count():
    g = encode_pc(RNG.uniform(0, 1, 48))
    assert g.node_count == 48
    assert len(g.edges) == 47


# ---------------------------------------------------------------------------
# collocated pairs


def test_cpc_state_vector_example():
    g = encode_cpc([0.2, 0.4, 0.1, 0.6, 0.4, 0.8])
    assert g.nodes.tolist() == [[0.2, 0.4], [0.1, 0.6], [0.4, 0.8]]
    assert decode_cpc(g).tolist() == [0.2, 0.4, 0.1, 0.6, 0.4, 0.8]


def test_cpc_zero_vector():
    g = encode_cpc([0.0, 0.0, 0.0, 0.0])
    assert g.nodes.tolist() == [[0.0, 0.0], [0.0, 0.0]]
    assert len(g.edges) == 1


def test_cpc_pads_odd_input():
    g = encode_cpc([1.0, 2.0, 3.0])
    assert g.nodes.tolist() == [[1.0, 2.0], [3.0, 3.0]]
    assert decode_cpc(g).tolist() == [1.0, 2.0, 3.0]


def test_cpc_pairing_mismatch():
    with pytest.raises(CoordsError):
        encode_cpc([1.0, 2.0], pairing=((0, 2),))


def test_decode_wrong_system():
    g = encode_pc([1.0, 2.0])
    with pytest.raises(CoordsError):
        decode_cpc(g)


# ---------------------------------------------------------------------------
# shifted pairs


def test_spc_fig_point_identity_pairing():
    g = encode_spc([3, 2, 1, 4, 2, 6], offsets=np.zeros((3, 2)))
    assert g.nodes.tolist() == [[3.0, 2.0], [1.0, 4.0], [2.0, 6.0]]
    assert decode_spc(g).tolist() == [3.0, 2.0, 1.0, 4.0, 2.0, 6.0]


def test_spc_fig_point_alternative_pairing():
    g = encode_spc(
        [3, 2, 1, 4, 2, 6],
        pairing=((1, 0), (2, 5), (4, 3)),
        offsets=np.zeros((3, 2)),
    )
    assert g.nodes.tolist() == [[2.0, 3.0], [1.0, 6.0], [2.0, 4.0]]
    assert decode_spc(g).tolist() == [3.0, 2.0, 1.0, 4.0, 2.0, 6.0]


def test_spc_zero_vector_lands_on_offsets():
    offsets = np.array([[0.0, 0.0], [2.0, 0.0], [4.0, 0.0]])
    g = encode_spc(np.zeros(6), offsets=offsets)
    assert g.nodes.tolist() == offsets.tolist()


def test_spc_partially_coinciding_offsets_rejected():
    with pytest.raises(CoordsError):
        encode_spc(np.zeros(6), offsets=[[0, 0], [0, 0], [1, 0]])


def test_spc_default_offsets_do_not_overlap():
    g = encode_spc(RNG.uniform(0, 1, 10))
    offs = np.asarray(g.offsets)
    assert len({tuple(o) for o in offs.tolist()}) == 5


def test_spc_locality_for_normalized_data():
    # every node inside its unit pair-plane square [offset, offset + 1]
    for _ in range(50):
        x = RNG.uniform(0, 1, 8)
        g = encode_spc(x)
        for node, (ox, oy) in zip(g.nodes, np.asarray(g.offsets)):
            assert ox - 1e-12 <= node[0] <= ox + 1.0 + 1e-12
            assert oy - 1e-12 <= node[1] <= oy + 1.0 + 1e-12


# ---------------------------------------------------------------------------
# radial pairs


def test_stars_zero_vector_at_origin():
    g = encode_cpc_stars(np.zeros(6))
    assert np.allclose(g.nodes, 0.0)
    assert g.node_count == 3


def test_stars_chaining_follows_collocation_order():
    assert star_pairing(6) == ((1, 2), (3, 4), (5, 0))


def test_stars_192d_gives_96_nodes():
    g = encode_cpc_stars(RNG.uniform(0, 1, 192))
    assert g.node_count == 96
    assert len(g.edges) == 95  # closing segment is a rendering detail


def test_stars_round_trip_8d():
    x = RNG.uniform(0, 1, 8)
    g = encode_cpc_stars(x)
    assert np.max(np.abs(decode_cpc_stars(g) - x)) < 1e-12


def test_stars_angle_validation():
    with pytest.raises(CoordsError):
        encode_cpc_stars(np.zeros(6), angles=[0.0, 0.5])  # wrong count
    with pytest.raises(CoordsError):
        encode_cpc_stars(np.zeros(6), angles=[0.0, 2.0, 1.0])  # not increasing


# ---------------------------------------------------------------------------
# in-line axes


def test_inline_single_attribute():
    g = encode_inline([0.5], offsets=[0.0])
    assert g.nodes.tolist() == [[0.5, 0.0]]


def test_inline_two_axes():
    g = encode_inline([1.0, 1.0], offsets=[0.0, 2.0])
    assert g.nodes.tolist() == [[1.0, 0.0], [3.0, 0.0]]
    assert decode_inline(g).tolist() == [1.0, 1.0]


def test_inline_zero_vector_at_offsets():
    g = encode_inline(np.zeros(3), offsets=[0.0, 2.0, 4.0])
    assert g.nodes[:, 0].tolist() == [0.0, 2.0, 4.0]


def test_inline_rejects_non_increasing_offsets():
    with pytest.raises(CoordsError):
        encode_inline([1.0, 2.0], offsets=[1.0, 1.0])


# ---------------------------------------------------------------------------
# round-trip property across all systems


ENCODERS = {
    "pc": (encode_pc, decode_pc),
    "cpc": (encode_cpc, decode_cpc),
    "spc": (encode_spc, decode_spc),
    "stars": (encode_cpc_stars, decode_cpc_stars),
    "inline": (encode_inline, decode_inline),
}


@pytest.mark.parametrize("system", list(ENCODERS))
def test_lossless_round_trip_random(system):
    enc, dec = ENCODERS[system]
    rng = np.random.default_rng(99)
    for _ in range(200):
        n = int(rng.integers(2, 61))
        x = rng.uniform(0, 1, n)
        err = np.max(np.abs(dec(enc(x)) - x))
        assert err < 1e-9


def test_node_count_law():
    for n in range(2, 30):
        x = RNG.uniform(0, 1, n)
        assert encode_cpc(x).node_count == -(-n // 2)
        assert encode_spc(x).node_count == -(-n // 2)
        assert encode_cpc_stars(x).node_count == -(-n // 2)
        assert encode_pc(x).node_count == n
        assert encode_inline(x).node_count == n


def test_graph_json_round_trip():
    x = RNG.uniform(0, 1, 7)
    for system in ENCODERS:
        g = encode(system, x)
        back = GlcGraph.from_json(g.to_json())
        assert back.system == g.system
        assert np.array_equal(back.nodes, g.nodes)
        assert np.max(np.abs(decode(back) - x)) < 1e-12


# ---------------------------------------------------------------------------
# distances


def test_graph_distance_cpc_examples():
    gx = encode_cpc([0.0, 0.0, 0.0, 0.0])
    gy = encode_cpc([1.0, 1.0, 1.0, 1.0])
    assert graph_distance(gx, gy, 2) == pytest.approx(2.0, abs=1e-12)
    assert graph_distance(gx, gy, 1) == pytest.approx(4.0, abs=1e-12)
    assert graph_distance(gx, gx, 2) == 0.0


def test_graph_distance_matches_lp_for_pc_cpc_spc():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(2, 40))
        x, y = rng.uniform(0, 1, n), rng.uniform(0, 1, n)
        for p in (1, 2):
            expected = lp_distance(x, y, p)
            assert abs(graph_distance(encode_pc(x), encode_pc(y), p) - expected) < 1e-9
            assert abs(graph_distance(encode_cpc(x), encode_cpc(y), p) - expected) < 1e-9
            assert abs(graph_distance(encode_spc(x), encode_spc(y), p) - expected) < 1e-9


def test_graph_distance_structure_checks():
    with pytest.raises(CoordsError):
        graph_distance(encode_pc([1, 2]), encode_cpc([1, 2]), 2)
    with pytest.raises(CoordsError):
        graph_distance(encode_pc([1, 2]), encode_pc([1, 2, 3]), 2)
    g1 = encode_spc([1, 2, 3, 4], offsets=[[0, 0], [2, 0]])
    g2 = encode_spc([1, 2, 3, 4], offsets=[[0, 0], [3, 0]])
    with pytest.raises(CoordsError):
        graph_distance(g1, g2, 2)


# ---------------------------------------------------------------------------
# mapping distortion


def test_distortion_identity():
    pts = RNG.uniform(0, 1, (10, 5))
    report = mapping_distortion(pts, pts)
    assert report.max_ratio == pytest.approx(1.0, abs=1e-12)
    assert report.min_ratio == pytest.approx(1.0, abs=1e-12)
    assert report.mean_stress == pytest.approx(0.0, abs=1e-12)
    assert report.pair_count == 45


def test_distortion_total_collapse():
    pts = RNG.uniform(0, 1, (6, 4))
    collapsed = np.zeros((6, 2))
    report = mapping_distortion(pts, collapsed)
    assert report.min_ratio == 0.0
    assert report.max_ratio == 0.0


def test_distortion_projection_never_expands():
    pts = RNG.uniform(0, 1, (10, 50))
    low = pts[:, :2]
    report = mapping_distortion(pts, low)
    assert report.max_ratio <= 1.0 + 1e-12


def test_distortion_isometry_rotation():
    rng = np.random.default_rng(3)
    pts = rng.uniform(0, 1, (8, 4))
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    report = mapping_distortion(pts, pts @ q)
    assert abs(report.max_ratio - 1.0) < 1e-9
    assert abs(report.min_ratio - 1.0) < 1e-9


def test_distortion_duplicates_rejected():
    pts = np.array([[1.0, 2.0], [1.0, 2.0], [3.0, 4.0]])
    with pytest.raises(CoordsError):
        mapping_distortion(pts, pts)
