import itertools

import numpy as np
import pytest

from unicodec.core import ConstructionError, DomainError, SeedSpec
from unicodec.outer import CRC6
from unicodec.polar import (
    AedDecoder,
    PolarCodeSpec,
    ScDecoder,
    ScNodeKind,
    SclDecoder,
    apply_permutation,
    classify_node,
    construct_aed_code,
    construct_polar_code,
    decode_aed,
    decode_sc,
    decode_scl,
    decode_ssc,
    invert_permutation,
    polar_encode,
    polar_transform,
    sample_automorphisms,
)


def codebook(spec):
    messages = np.array(list(itertools.product((0, 1), repeat=spec.payload_bits)), dtype=np.uint8)
    return np.array([polar_encode(spec, m) for m in messages])


def ml_decode(book, llr):
    return book[np.argmax((1.0 - 2.0 * book) @ llr)]


@pytest.fixture(scope="module")
def aed_code():
    return construct_aed_code(256, 128, [31, 57], design_snr_db=2.5, name="polar-aed-256")


@pytest.fixture(scope="module")
def aed_code_64():
    return construct_aed_code(64, 32, [14], design_snr_db=2.0, name="polar-aed-64")


def test_classify_node():
    assert classify_node([True] * 8) is ScNodeKind.RATE0
    assert classify_node([False] * 4) is ScNodeKind.RATE1
    assert classify_node([True, True, True, False]) is ScNodeKind.REP
    assert classify_node([True, False, False, False]) is ScNodeKind.SPC
    assert classify_node([True, True, False, False]) is ScNodeKind.GENERIC


def test_noiseless_zero_frame(fig1_code):
    out = decode_sc(fig1_code, np.full(256, 8.0))
    assert not out.message.any() and not out.codeword.any()
    assert out.crc_ok


def test_length_mismatch_is_rejected(toy_code):
    with pytest.raises(DomainError):
        decode_sc(toy_code, np.zeros(5))


def test_sc_never_beats_ml_on_toy_code(toy_code, rng, noisy_llrs):
    book = codebook(toy_code)
    sc_errors = ml_errors = 0
    for _ in range(20_000):
        c = book[rng.integers(len(book))]
        llr = noisy_llrs(c, 0.8)
        sc_errors += not np.array_equal(decode_sc(toy_code, llr).codeword, c)
        ml_errors += not np.array_equal(ml_decode(book, llr), c)
    assert ml_errors > 0
    assert sc_errors >= ml_errors


def test_exact_kernel_decodes_noiseless(code_64, rng):
    message = rng.integers(0, 2, code_64.payload_bits, dtype=np.uint8)
    c = polar_encode(code_64, message)
    out = decode_sc(code_64, 4.0 * (1.0 - 2.0 * c), kernel="exact")
    np.testing.assert_array_equal(out.message, message)


def _assert_ssc_matches_sc(spec, frames, sigma, rng, noisy_llrs):
    for _ in range(frames):
        c = polar_encode(spec, rng.integers(0, 2, spec.payload_bits, dtype=np.uint8))
        llr = noisy_llrs(c, sigma)
        np.testing.assert_array_equal(decode_ssc(spec, llr).codeword, decode_sc(spec, llr).codeword)


def test_ssc_matches_sc(toy_code, code_64, fig1_code, rng, noisy_llrs):
    _assert_ssc_matches_sc(toy_code, 2000, 0.9, rng, noisy_llrs)
    _assert_ssc_matches_sc(code_64, 1000, 0.9, rng, noisy_llrs)
    _assert_ssc_matches_sc(fig1_code, 200, 0.8, rng, noisy_llrs)


def test_ssc_matches_sc_with_zero_llrs(code_64, rng):
    for _ in range(200):
        llr = rng.standard_normal(64) * 2.0
        llr[rng.choice(64, 8, replace=False)] = 0.0
        np.testing.assert_array_equal(decode_ssc(code_64, llr).codeword, decode_sc(code_64, llr).codeword)


@pytest.mark.slow
def test_ssc_matches_sc_ten_thousand_frames(code_64, rng, noisy_llrs):
    _assert_ssc_matches_sc(code_64, 10_000, 0.85, rng, noisy_llrs)


def test_ssc_uses_fewer_operations(fig1_code, rng, noisy_llrs):
    llr = noisy_llrs(np.zeros(256, dtype=np.uint8), 0.8)
    assert decode_ssc(fig1_code, llr).operations < decode_sc(fig1_code, llr).operations


def test_scl_with_one_path_is_sc(code_64, fig1_code, rng, noisy_llrs):
    for spec, frames in ((code_64, 2000), (fig1_code, 100)):
        for _ in range(frames):
            c = polar_encode(spec, rng.integers(0, 2, spec.payload_bits, dtype=np.uint8))
            llr = noisy_llrs(c, 0.9)
            np.testing.assert_array_equal(decode_scl(spec, llr, 1).codeword, decode_sc(spec, llr).codeword)


def test_scl_full_list_is_ml(toy_code, rng, noisy_llrs):
    book = codebook(toy_code)
    for _ in range(10_000):
        llr = noisy_llrs(book[rng.integers(len(book))], 1.0)
        np.testing.assert_array_equal(decode_scl(toy_code, llr, 16).codeword, ml_decode(book, llr))


def test_scl_path_metrics_sorted_and_non_negative(fig1_code, rng, noisy_llrs):
    out = decode_scl(fig1_code, noisy_llrs(np.zeros(256, dtype=np.uint8), 0.9), 8)
    metrics = np.array(out.extra["path_metrics"])
    assert metrics.size == 8
    assert np.all(metrics >= 0)
    assert np.all(np.diff(metrics) >= 0)
    assert out.metric == metrics[0]


def test_scl_rejects_empty_list(toy_code):
    with pytest.raises(DomainError):
        decode_scl(toy_code, np.ones(8), 0)


def test_ca_scl_returns_crc_passing_path(rng):
    spec = construct_polar_code(64, 32, design_snr_db=2.0, crc=CRC6)
    decoder = SclDecoder(spec, list_size=8)
    assert decoder.name == "CA-SCL-8"
    for _ in range(50):
        message = rng.integers(0, 2, spec.payload_bits, dtype=np.uint8)
        c = polar_encode(spec, message)
        out = decoder.decode(6.0 * (1.0 - 2.0 * c))
        assert out.crc_ok
        np.testing.assert_array_equal(out.message, message)


def test_sample_automorphisms_identity_first(aed_code, seed):
    perms = sample_automorphisms(aed_code, 1, seed)
    assert len(perms) == 1
    np.testing.assert_array_equal(perms[0], np.arange(256))


def test_sample_automorphisms_distinct(aed_code, seed):
    perms = sample_automorphisms(aed_code, 8, seed)
    assert len({p.tobytes() for p in perms}) == 8
    for p in perms:
        assert sorted(p.tolist()) == list(range(256))
    # translations move index 0
    assert any(p[0] != 0 for p in perms[1:])


def test_permutation_helpers_invert(aed_code, seed):
    x = np.arange(256) * 3
    for pi in sample_automorphisms(aed_code, 4, seed):
        np.testing.assert_array_equal(apply_permutation(apply_permutation(x, pi), invert_permutation(pi)), x)


def test_automorphisms_preserve_the_code(aed_code_64, seed, rng):
    frozen = aed_code_64.frozen_set
    for pi in sample_automorphisms(aed_code_64, 16, seed):
        for _ in range(10):
            c = polar_encode(aed_code_64, rng.integers(0, 2, aed_code_64.K, dtype=np.uint8))
            assert not polar_transform(c[pi])[frozen].any()


def test_automorphisms_need_block_profile(toy_code, seed):
    with pytest.raises(ConstructionError):
        sample_automorphisms(toy_code, 2, seed)
    tiny = PolarCodeSpec(n=3, K=4, info_set=(3, 5, 6, 7), block_profile=(1, 1, 1))
    with pytest.raises(ConstructionError):
        sample_automorphisms(tiny, 2, seed)


def test_aed_single_member_is_sc(aed_code, rng, noisy_llrs, seed):
    for _ in range(50):
        c = polar_encode(aed_code, rng.integers(0, 2, aed_code.K, dtype=np.uint8))
        llr = noisy_llrs(c, 0.85)
        np.testing.assert_array_equal(decode_aed(aed_code, llr, 1, seed).codeword, decode_sc(aed_code, llr).codeword)


def test_aed_picks_transmitted_codeword_at_low_noise(aed_code, rng, noisy_llrs):
    decoder = AedDecoder(aed_code, ensemble_size=8, seed=SeedSpec(master_seed=3))
    for _ in range(20):
        message = rng.integers(0, 2, aed_code.K, dtype=np.uint8)
        out = decoder.decode(noisy_llrs(polar_encode(aed_code, message), 0.4))
        np.testing.assert_array_equal(out.message, message)


def test_aed_is_independent_of_dispatch(aed_code, rng, noisy_llrs, seed):
    from concurrent.futures import ThreadPoolExecutor

    llr = noisy_llrs(np.zeros(256, dtype=np.uint8), 0.9)
    serial = decode_aed(aed_code, llr, 8, seed)
    with ThreadPoolExecutor(max_workers=4) as pool:
        parallel = decode_aed(aed_code, llr, 8, seed, executor=pool)
    np.testing.assert_array_equal(serial.codeword, parallel.codeword)
    assert serial.metric == parallel.metric


def test_aed_not_worse_than_sc(aed_code, rng, noisy_llrs, seed):
    decoder = AedDecoder(aed_code, ensemble_size=8, seed=seed)
    sc_errors = aed_errors = 0
    for _ in range(300):
        llr = noisy_llrs(np.zeros(256, dtype=np.uint8), 0.82)
        sc_errors += decode_sc(aed_code, llr).codeword.any()
        aed_errors += decoder.decode(llr).codeword.any()
    assert aed_errors <= sc_errors


def test_decoder_classes_describe(toy_code):
    sc = ScDecoder(toy_code)
    ssc = ScDecoder(toy_code, simplified=True)
    assert sc.name == "SC" and ssc.name == "SSC"
    assert sc.describe()["code"] == "toy-8-4"
    with pytest.raises(DomainError):
        ScDecoder(toy_code, kernel="exact", simplified=True)
