from collections import Counter

import numpy as np
import pytest

from unicodec.core import ConstructionError, DomainError, ParseError, SeedSpec
from unicodec.ldpc import (
    AccumulatorEncoder,
    BaseGraph,
    DoubleDiagonalEncoder,
    GaussianEliminationEncoder,
    ParityCheckMatrix,
    RateMatcher,
    bg2_like_base_graph,
    code_from_matrix,
    creates_four_cycle,
    dvbs2_address_table,
    dvbs2_like,
    expand_base_graph,
    format_alist,
    gf2_rank,
    ira_from_address_table,
    lifting_set_index,
    load_alist,
    load_base_graph,
    nr_like_bg2,
    parse_alist,
    parse_base_graph,
    select_lifting,
    standard_bg2,
    standard_dvbs2_table,
    syndrome,
    write_alist,
    write_base_graph,
)

HAMMING_ALIST = """7 3
3 4
2 2 2 3 1 1 1
4 4 4
1 2 0
1 3 0
2 3 0
1 2 3
1 0 0
2 0 0
3 0 0
1 2 4 5
1 3 4 6
2 3 4 7
"""

HAMMING = np.array(
    [[1, 1, 0, 1, 1, 0, 0],
     [1, 0, 1, 1, 0, 1, 0],
     [0, 1, 1, 1, 0, 0, 1]], dtype=np.uint8)


@pytest.fixture(scope="module")
def nr_code():
    return nr_like_bg2(128, 256)


def test_parse_hamming_alist():
    H = parse_alist(HAMMING_ALIST)
    assert H.shape == (3, 7)
    assert H.nnz == 12
    np.testing.assert_array_equal(H.to_dense(), HAMMING)
    np.testing.assert_array_equal(H.col_degrees, [2, 2, 2, 3, 1, 1, 1])


def test_alist_round_trip(tmp_path):
    H = ParityCheckMatrix.from_dense(HAMMING, name="hamming")
    path = write_alist(H, tmp_path / "hamming.alist")
    assert path.read_text() == HAMMING_ALIST
    back = load_alist(path)
    np.testing.assert_array_equal(back.to_dense(), HAMMING)
    assert back.name == "hamming"


def test_format_alist_pads_with_zeros():
    lines = format_alist(ParityCheckMatrix.from_dense(HAMMING)).splitlines()
    assert lines[8] == "1 0 0"


def test_alist_parse_errors(tmp_path):
    with pytest.raises(ParseError) as info:
        parse_alist("")
    assert info.value.line == 1

    bad_degree = HAMMING_ALIST.replace("2 2 2 3 1 1 1", "2 2 2 3 1 1 2")
    with pytest.raises(ParseError) as info:
        parse_alist(bad_degree)
    assert info.value.line == 11

    with pytest.raises(ParseError):
        parse_alist(HAMMING_ALIST.replace("1 2 4 5", "1 2 4 x"))
    with pytest.raises(ParseError):
        parse_alist("\n".join(HAMMING_ALIST.splitlines()[:-1]))
    with pytest.raises(ParseError):
        load_alist(tmp_path / "missing.alist")


def test_tanner_graph_edges_are_row_major():
    graph = ParityCheckMatrix.from_dense(HAMMING).tanner_graph()
    assert graph.num_edges == 12
    np.testing.assert_array_equal(graph.edge_cols, [0, 1, 3, 4, 0, 2, 3, 5, 1, 2, 3, 6])
    np.testing.assert_array_equal(graph.row_starts, [0, 4, 8, 12])
    np.testing.assert_array_equal(graph.edge_cols[graph.col_order][:3], [0, 0, 1])


def test_layers_must_partition_rows():
    with pytest.raises(DomainError):
        ParityCheckMatrix.from_dense(HAMMING, layers=[[0], [1]])
    with pytest.raises(DomainError):
        ParityCheckMatrix.from_dense(HAMMING, layers=[[0, 1], [1, 2]])


def test_expand_identity_and_shift():
    np.testing.assert_array_equal(expand_base_graph([[0]], 4).to_dense(), np.eye(4, dtype=np.uint8))
    shifted = expand_base_graph([[1]], 3).to_dense()
    assert {tuple(x) for x in np.argwhere(shifted)} == {(0, 1), (1, 2), (2, 0)}
    assert not expand_base_graph([[-1, -1]], 2).to_dense().any()


@pytest.mark.parametrize("table, Z", [([[3]], 3), ([[-2]], 3), ([[0]], 0)])
def test_expand_rejects_bad_shifts(table, Z):
    with pytest.raises(DomainError):
        expand_base_graph(table, Z)


def test_recover_base_graph():
    table = [[0, -1, 3], [2, 4, -1]]
    H = expand_base_graph(table, 5)
    assert H.recover_base_graph(5).shifts == ((0, -1, 3), (2, 4, -1))
    with pytest.raises(ConstructionError):
        ParityCheckMatrix.from_dense(np.ones((2, 2))).recover_base_graph(2)


def test_base_graph_must_match_matrix():
    base = BaseGraph(lifting_size=3, shifts=((1,),))
    with pytest.raises(ConstructionError):
        ParityCheckMatrix(np.eye(3), base_graph=base)


def test_base_graph_file_round_trip(tmp_path):
    base = BaseGraph(lifting_size=7, shifts=((0, -1, 6), (3, 2, -1)))
    path = write_base_graph(base, tmp_path / "bg.txt")
    assert load_base_graph(path) == base


def test_base_graph_parse_errors():
    with pytest.raises(ParseError) as info:
        parse_base_graph("3\n1 2\n0 5\n")
    assert info.value.line == 3
    with pytest.raises(ParseError):
        parse_base_graph("3\n2 2\n0 1\n")
    with pytest.raises(ParseError):
        parse_base_graph("")


def test_four_cycle_check():
    table = np.array([[0, 0], [0, -1]])
    assert creates_four_cycle(table, 1, 1, 0, 4)
    assert not creates_four_cycle(table, 1, 1, 1, 4)


def test_syndrome_examples():
    H = ParityCheckMatrix.from_dense(HAMMING)
    np.testing.assert_array_equal(syndrome(H, [1, 0, 0, 0, 0, 0, 0]), [1, 1, 0])
    np.testing.assert_array_equal(syndrome(H, [0] * 7), [0, 0, 0])
    with pytest.raises(DomainError):
        syndrome(H, [0] * 6)


def test_syndrome_matches_dense_product(rng):
    dense = (rng.random((20, 50)) < 0.2).astype(np.uint8)
    H = ParityCheckMatrix.from_dense(dense)
    for _ in range(20):
        word = rng.integers(0, 2, 50)
        np.testing.assert_array_equal(syndrome(H, word), dense.astype(int) @ word % 2)


def test_gaussian_encoder_on_hamming():
    code = code_from_matrix(ParityCheckMatrix.from_dense(HAMMING, name="hamming"))
    assert isinstance(code.encoder, GaussianEliminationEncoder)
    assert code.K == 4 and code.N == 7
    words = []
    for value in range(16):
        message = np.array([(value >> i) & 1 for i in range(4)], dtype=np.uint8)
        word = code.encode(message)
        assert not syndrome(code.H, word).any()
        np.testing.assert_array_equal(code.extract_message(word), message)
        words.append(word)
    weights = [int(w.sum()) for w in words if w.any()]
    assert len({w.tobytes() for w in words}) == 16
    assert min(weights) == 3


def test_gaussian_encoder_tolerates_redundant_rows():
    H = ParityCheckMatrix.from_dense(np.vstack([HAMMING, HAMMING[0] ^ HAMMING[1]]))
    assert GaussianEliminationEncoder(H).K == 4


def test_select_lifting():
    assert select_lifting(128) == (22, 6)
    assert select_lifting(1000) == (104, 10)
    with pytest.raises(DomainError):
        select_lifting(0)


def test_nr_like_dimensions(nr_code):
    assert (nr_code.K, nr_code.N) == (128, 256)
    assert nr_code.rate == 0.5
    assert nr_code.H.shape == (8 * 22, 18 * 22)
    assert isinstance(nr_code.encoder, DoubleDiagonalEncoder)
    punctured = nr_code.rate_matcher.punctured
    np.testing.assert_array_equal(punctured, np.concatenate([np.arange(44), np.arange(392, 396)]))
    assert nr_code.H.N - gf2_rank(nr_code.H.to_dense()) == 220


def test_nr_like_encodes_to_codewords(nr_code, rng):
    assert not nr_code.encode(np.zeros(128, dtype=np.uint8)).any()
    for _ in range(1000):
        message = rng.integers(0, 2, 128).astype(np.uint8)
        mother = nr_code.encoder.encode(np.concatenate([message, np.zeros(92, dtype=np.uint8)]))
        assert not syndrome(nr_code.H, mother).any()
        np.testing.assert_array_equal(nr_code.extract_message(mother), message)
    sent = nr_code.encode(message)
    assert sent.size == 256
    np.testing.assert_array_equal(sent, mother[nr_code.rate_matcher.order])


def test_nr_like_uses_the_standard_table(nr_code):
    full = standard_bg2(22)
    assert nr_code.H.base_graph.shifts == tuple(row[:18] for row in full.shifts[:8])
    assert nr_like_bg2(128, 256).H.base_graph == nr_code.H.base_graph


def test_standard_bg2_shift_values():
    assert lifting_set_index(22) == 5
    assert lifting_set_index(2) == 0 and lifting_set_index(384) == 1
    with pytest.raises(DomainError):
        lifting_set_index(17)
    bg = standard_bg2(22)
    assert (bg.rows, bg.cols) == (42, 52)
    table = bg.table()
    assert int((table >= 0).sum()) == 197
    # set 5 values 156, 143 and 55 reduced mod 22
    assert (table[0, 0], table[0, 1], table[1, 6]) == (2, 11, 11)
    np.testing.assert_array_equal(np.flatnonzero(table[0] >= 0), [0, 1, 2, 3, 6, 9, 10, 11])
    assert [int(table[r, 10]) for r in range(4)] == [0, -1, 1, 0]
    assert standard_bg2(2).table()[0, 0] == 9 % 2
    assert standard_bg2(384).table()[0, 0] == 174


def test_seeded_bg2_stand_in():
    first = nr_like_bg2(128, 256, seed=SeedSpec(master_seed=7))
    again = nr_like_bg2(128, 256, seed=SeedSpec(master_seed=7))
    other = nr_like_bg2(128, 256, seed=SeedSpec(master_seed=8))
    assert again.H.base_graph == first.H.base_graph
    assert other.H.base_graph != first.H.base_graph
    mask = standard_bg2(22).table() >= 0
    np.testing.assert_array_equal(bg2_like_base_graph(22, SeedSpec()).table() >= 0, mask)


def test_nr_like_rejects_wrong_base_graph():
    with pytest.raises(ConstructionError):
        nr_like_bg2(128, 256, base_graph=BaseGraph(lifting_size=22, shifts=((0,),)))
    with pytest.raises(DomainError):
        nr_like_bg2(128, 128)


def test_rate_matcher_repeats_and_fillers():
    matcher = RateMatcher(4, order=[1, 2, 1], fillers=[3])
    np.testing.assert_array_equal(matcher.transmit([0, 1, 0, 0]), [1, 0, 1])
    np.testing.assert_array_equal(matcher.punctured, [0])
    mother = matcher.recover([1.0, 2.0, 3.0])
    assert mother[:3].tolist() == [0.0, 4.0, 2.0]
    assert mother[3] > 1e20
    with pytest.raises(DomainError):
        RateMatcher(3, order=[0, 1], fillers=[1])


def test_small_ira_uses_accumulator(rng):
    H = ira_from_address_table([[0, 97, 211]], N=720, K=360, name="ira-small")
    code = code_from_matrix(H)
    assert isinstance(code.encoder, AccumulatorEncoder)
    np.testing.assert_array_equal(H.col_degrees[:360], 3)
    for _ in range(1000):
        word = code.encode(rng.integers(0, 2, 360))
        assert not syndrome(H, word).any()


@pytest.mark.parametrize("rate, groups, q", [("1/2", 90, 90), ("8/9", 160, 20)])
def test_seeded_dvbs2_table_is_balanced(rate, groups, q):
    table = dvbs2_address_table(rate, SeedSpec())
    assert len(table) == groups
    counts = Counter(x % q for addresses in table for x in addresses)
    assert len(counts) == q and len(set(counts.values())) == 1
    assert all(len(set(addresses)) == len(addresses) for addresses in table)


def test_dvbs2_half_rate_profile(rng):
    code = dvbs2_like("1/2")
    assert (code.K, code.N) == (32400, 64800)
    degrees = code.H.col_degrees
    assert np.all(degrees[:12960] == 8) and np.all(degrees[12960:32400] == 3)
    assert np.all(degrees[32400:-1] == 2) and degrees[-1] == 1
    assert len(code.H.layers) == 90
    word = code.encode(rng.integers(0, 2, 32400))
    assert not syndrome(code.H, word).any()


def test_dvbs2_rejects_unknown_rate():
    with pytest.raises(DomainError):
        dvbs2_like("2/3")


def test_standard_dvbs2_tables():
    half = standard_dvbs2_table("1/2")
    assert len(half) == 90
    assert half[0] == [54, 9318, 14392, 27561, 26909, 10219, 2534, 8597]
    assert half[36] == [0, 14567, 24965]
    assert [len(row) for row in half] == [8] * 36 + [3] * 54
    high = standard_dvbs2_table("8/9")
    assert len(high) == 160
    assert high[0] == [0, 6235, 2848, 3222] and high[-1] == [19, 1696, 1459]
    assert all(0 <= x < 7200 for row in high for x in row)
    with pytest.raises(DomainError):
        standard_dvbs2_table("3/5")


def test_dvbs2_high_rate_profile(rng):
    code = dvbs2_like("8/9")
    assert (code.K, code.N) == (57600, 64800)
    degrees = code.H.col_degrees
    assert np.all(degrees[:7200] == 4) and np.all(degrees[7200:57600] == 3)
    assert len(code.H.layers) == 20
    word = code.encode(rng.integers(0, 2, 57600))
    assert not syndrome(code.H, word).any()


def test_seeded_dvbs2_stand_in_differs_from_standard():
    seeded = dvbs2_like("1/2", seed=SeedSpec())
    assert (seeded.K, seeded.N) == (32400, 64800)
    assert seeded.H.nnz == dvbs2_like("1/2").H.nnz
    assert dvbs2_address_table("1/2", SeedSpec()) != standard_dvbs2_table("1/2")


def test_default_layers_follow_lifting_size():
    H = expand_base_graph([[0, 1, -1], [-1, 2, 0]], 3)
    assert [layer.tolist() for layer in H.layers] == [[0, 1, 2], [3, 4, 5]]
    plain = ParityCheckMatrix(H.csr)
    assert len(plain.layers) == 6
    lifted = ParityCheckMatrix(H.csr, lifting_size=3)
    assert [layer.tolist() for layer in lifted.layers] == [[0, 1, 2], [3, 4, 5]]
    assert lifted.recover_base_graph() == H.base_graph
    with pytest.raises(DomainError):
        ParityCheckMatrix(H.csr, lifting_size=4)
    with pytest.raises(DomainError):
        ParityCheckMatrix(H.csr, base_graph=H.base_graph, lifting_size=2)


def test_load_alist_with_lifting_size(tmp_path):
    H = expand_base_graph([[0, 1, -1, 2], [-1, 2, 0, 1]], 5, name="qc")
    path = write_alist(H, tmp_path / "qc.alist")
    assert len(load_alist(path).layers) == 10
    loaded = load_alist(path, lifting_size=5)
    assert loaded.lifting_size == 5
    assert [layer.tolist() for layer in loaded.layers] == [list(range(5)), list(range(5, 10))]
