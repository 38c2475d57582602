import itertools

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.stats import norm

from unicodec.core import ConstructionError, DomainError, LLR_SATURATION, ParseError, ebn0_to_sigma
from unicodec.outer import CRC11
from unicodec.polar import (
    LengthMatch,
    PolarCodeSpec,
    ReliabilitySequence,
    apply_length_match,
    build_reliability_sequence,
    construct_aed_code,
    construct_from_sequence,
    construct_polar_code,
    decode_sc,
    density_evolution_reliabilities,
    design_ebn0_for_target,
    extract_nested,
    ga_predicted_fer,
    info_set_from_min,
    length_match_transmit,
    nr_like_polar_spec,
    partial_order_closure,
    polar_encode,
    polar_transform,
    rate_flexible_sequence,
    read_codespec,
    select_info_set,
    write_codespec,
)
from unicodec.polar.codespec import rle_decode, rle_encode


def kron_generator(N):
    G = np.array([[1]], dtype=np.uint8)
    while G.shape[0] < N:
        G = np.kron(np.array([[1, 0], [1, 1]], dtype=np.uint8), G)
    return G


def test_polar_transform_small_examples():
    np.testing.assert_array_equal(polar_transform([0, 0, 0, 0]), [0, 0, 0, 0])
    np.testing.assert_array_equal(polar_transform([0, 0, 0, 1]), [1, 1, 1, 1])
    np.testing.assert_array_equal(polar_transform([1, 0, 0, 0]), [1, 0, 0, 0])


def test_polar_transform_matches_kronecker_matrix():
    G = kron_generator(8)
    for u in itertools.product((0, 1), repeat=8):
        u = np.array(u, dtype=np.uint8)
        np.testing.assert_array_equal(polar_transform(u), (u @ G) % 2)


@pytest.mark.parametrize("N", [2, 4, 8, 16])
def test_polar_transform_is_involution_exhaustive(N):
    words = ((np.arange(1 << N)[:, None] >> np.arange(N)[None, :]) & 1).astype(np.uint8)
    np.testing.assert_array_equal(polar_transform(polar_transform(words)), words)


def test_polar_transform_rejects_bad_length():
    with pytest.raises(DomainError):
        polar_transform([0, 1, 0])


def test_density_evolution_single_step():
    sigma = 1.0
    rel = density_evolution_reliabilities(1, sigma)
    raw = 2.0 / sigma**2
    assert rel[1] == pytest.approx(2 * raw)
    assert rel[1] >= raw >= rel[0] > 0


def test_density_evolution_monotone_in_sigma():
    worse = density_evolution_reliabilities(8, 1.0)
    better = density_evolution_reliabilities(8, 0.8)
    assert np.all(better >= worse * (1 - 1e-12))


def test_density_evolution_rejects_bad_arguments():
    with pytest.raises(DomainError):
        density_evolution_reliabilities(3, 0.0)
    with pytest.raises(DomainError):
        density_evolution_reliabilities(0, 1.0)


def test_density_evolution_polarizes():
    sigma = 0.7
    middle = []
    for n in (4, 8, 10):
        rel = density_evolution_reliabilities(n, sigma)
        p = norm.sf(np.sqrt(rel / 2))
        middle.append(np.mean((p > 1e-3) & (p < 0.2)))
    assert middle[2] < middle[0]
    assert np.mean(density_evolution_reliabilities(10, sigma) > 2 / sigma**2) > 0.5


def test_select_info_set_examples():
    rel = density_evolution_reliabilities(3, 1.0)
    assert select_info_set(rel, 4).tolist() == [3, 5, 6, 7]
    assert select_info_set(rel, 8).tolist() == list(range(8))
    assert select_info_set(rel, 0).tolist() == []
    with pytest.raises(DomainError):
        select_info_set(rel, 9)


def test_select_info_set_breaks_ties_toward_larger_index():
    assert select_info_set([1.0, 2.0, 2.0, 0.5], 1).tolist() == [2]
    assert select_info_set([3.0, 3.0, 3.0, 3.0], 2).tolist() == [2, 3]


def test_extract_nested_filter():
    seq = ReliabilitySequence(order=(0, 1, 2, 3, 5, 4, 6, 7), design_snr_db=0.0)
    assert extract_nested(seq, 2).order == (0, 1, 2, 3)
    assert extract_nested(seq, 3) == seq
    with pytest.raises(DomainError):
        extract_nested(seq, 4)


def test_extract_nested_agrees_with_direct_construction():
    master = build_reliability_sequence(10, 8.0)
    nested = extract_nested(master, 8)
    direct = build_reliability_sequence(8, 8.0)
    overlap = np.intersect1d(nested.info_set(128), direct.info_set(128)).size
    assert overlap / 128 >= 0.9


def test_reliability_sequence_must_be_permutation():
    with pytest.raises(ValidationError):
        ReliabilitySequence(order=(0, 1, 1, 3), design_snr_db=0.0)


def test_rate_flexible_sequence_is_a_permutation():
    seq = rate_flexible_sequence(5, target_fer=1e-4)
    assert sorted(seq.order) == list(range(32))
    # the all-ones channel is always the most reliable, the all-zeros one the least
    assert seq.order[-1] == 31 and seq.order[0] == 0


def test_select_info_set_is_deterministic_and_sized():
    rel = density_evolution_reliabilities(8, 0.9)
    first = select_info_set(rel, 100)
    assert first.size == 100
    np.testing.assert_array_equal(first, select_info_set(rel, 100))


def test_design_point_hits_target(fig1_code):
    ebn0 = fig1_code.design_snr_db
    rel = density_evolution_reliabilities(8, ebn0_to_sigma(ebn0, 0.5))
    assert ga_predicted_fer(rel, fig1_code.info_set) == pytest.approx(1e-6, rel=0.05)
    assert design_ebn0_for_target(8, 128, 1e-3) < ebn0


def test_all_zero_message_encodes_to_zero(fig1_code):
    assert not polar_encode(fig1_code, np.zeros(128, dtype=np.uint8)).any()


def test_encode_places_message_on_info_set(toy_code):
    message = np.array([1, 0, 1, 1], dtype=np.uint8)
    u = polar_transform(polar_encode(toy_code, message))
    np.testing.assert_array_equal(u[list(toy_code.info_set)], message)
    assert not u[toy_code.frozen_set].any()


def test_nr_like_spec_has_crc11_payload():
    spec = nr_like_polar_spec()
    assert (spec.N, spec.K, spec.payload_bits) == (256, 128, 117)
    assert spec.crc == CRC11


def test_spec_validation():
    with pytest.raises(ValidationError):
        PolarCodeSpec(n=3, K=2, info_set=(5, 3))
    with pytest.raises(ValidationError):
        PolarCodeSpec(n=3, K=2, info_set=(6, 7), length_match=LengthMatch(kind="shortened", count=1))


def test_no_length_match_is_identity(toy_code):
    llr = np.arange(8, dtype=float) - 3.5
    np.testing.assert_array_equal(apply_length_match(toy_code, llr), llr)


def test_shortened_positions_get_saturated_llr():
    spec = construct_polar_code(8, 3, design_snr_db=2.0, length_match=LengthMatch(kind="shortened", count=2))
    assert 6 not in spec.info_set and 7 not in spec.info_set
    full = apply_length_match(spec, np.ones(6))
    assert full[6] == LLR_SATURATION and full[7] == LLR_SATURATION


def test_punctured_noiseless_frame_decodes(rng):
    spec = construct_polar_code(8, 3, design_snr_db=2.0, length_match=LengthMatch(kind="punctured", count=2))
    assert spec.transmitted_length == 6
    for _ in range(20):
        message = rng.integers(0, 2, 3, dtype=np.uint8)
        sent = length_match_transmit(spec, polar_encode(spec, message))
        llr = 10.0 * (1.0 - 2.0 * sent)
        np.testing.assert_array_equal(decode_sc(spec, llr).message, message)


def test_shortening_overlap_is_a_construction_error():
    with pytest.raises(ConstructionError):
        construct_from_sequence(build_reliability_sequence(3, 2.0), 8, 7,
                                length_match=LengthMatch(kind="shortened", count=2))


def test_partial_order_closure():
    # 14 = 0b001110 dominates exactly the 32 indices of weight >= 3 not of the form {0, a, b}
    closure = partial_order_closure([14], 6)
    assert closure.size == 32
    assert 31 in closure and 63 in closure and 7 not in closure


def test_info_set_from_min_is_upward_closed():
    rel = density_evolution_reliabilities(6, 0.8)
    info = info_set_from_min([14], 6, 40, rel)
    assert info.size == 40
    members = set(info.tolist())
    for i in members:
        assert set(partial_order_closure([i], 6).tolist()) <= members
    with pytest.raises(ConstructionError):
        info_set_from_min([7], 6, 20, rel)


def test_aed_code_carries_block_profile():
    spec = construct_aed_code(64, 32, [14], design_snr_db=2.0)
    assert list(spec.block_profile) == [1, 5]
    assert spec.i_min == (14,)


def test_rle_examples():
    assert rle_encode([1, 2, 3, 7, 8]) == [[1, 3], [7, 2]]
    assert rle_decode([[1, 3], [7, 2]]) == [1, 2, 3, 7, 8]
    with pytest.raises(ValueError):
        rle_decode([[4, 2], [5, 1]])


def test_codespec_round_trip(tmp_path, fig1_code):
    spec = nr_like_polar_spec()
    for original in (spec, fig1_code, construct_aed_code(64, 32, [14], design_snr_db=2.0)):
        path = write_codespec(original, tmp_path / f"{original.name}.json")
        assert read_codespec(path) == original


def test_codespec_parse_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "format": "unicodec.polar",\n  "n": 3,,\n}\n')
    with pytest.raises(ParseError) as info:
        read_codespec(bad)
    assert info.value.line == 3
    other = tmp_path / "other.json"
    other.write_text('{"format": "something-else", "version": 1}')
    with pytest.raises(ParseError):
        read_codespec(other)
    with pytest.raises(ParseError):
        read_codespec(tmp_path / "missing.json")
