import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qimstego import StegoParams, embed_block, embed_coeff, extract_block, extract_coeff, select_step

DEFAULTS = StegoParams()

coeffs = st.integers(min_value=-1024, max_value=1023)
steps = st.integers(min_value=1, max_value=32).map(lambda k: 2 * k)
bits = st.integers(min_value=0, max_value=1)


class TestEmbedCoeff:
    @pytest.mark.parametrize(
        "c,q,b,expected",
        [
            (13, 4, 1, 14),
            (13, 4, 0, 12),
            (0, 8, 0, 0),
            (-13, 4, 1, -14),
            (0, 2, 1, 1),
            (-1, 2, 0, 0),
        ],
    )
    def test_examples(self, c, q, b, expected):
        assert embed_coeff(c, q, b) == expected

    def test_rejects_odd_or_small_step(self):
        with pytest.raises(ValueError):
            embed_coeff(5, 3, 1)
        with pytest.raises(ValueError):
            embed_coeff(5, 0, 1)

    def test_rejects_non_bit(self):
        with pytest.raises(ValueError):
            embed_coeff(5, 4, 2)

    @given(coeffs, steps, bits)
    def test_idempotent(self, c, q, b):
        once = embed_coeff(c, q, b)
        assert embed_coeff(once, q, b) == once

    @given(coeffs, steps, bits)
    def test_bounded_distortion(self, c, q, b):
        assert abs(abs(embed_coeff(c, q, b)) - abs(c)) <= q - 1

    @given(coeffs, steps, bits, bits)
    def test_round_trip(self, c, q, b, tie):
        assert extract_coeff(embed_coeff(c, q, b), q, tie_bit=tie) == b


class TestExtractCoeff:
    @pytest.mark.parametrize(
        "c2,q,expected",
        [
            (14, 4, 1),
            (12, 4, 0),
            (0, 2, 0),
            (-14, 4, 1),
            (15, 4, 1),
            (16, 4, 0),
        ],
    )
    def test_examples(self, c2, q, expected):
        assert extract_coeff(c2, q) == expected

    def test_tie_resolves_to_tie_bit(self):
        # 1 is equidistant from lattice points 0 and 2 when q = 4
        assert extract_coeff(1, 4, tie_bit=0) == 0
        assert extract_coeff(1, 4, tie_bit=1) == 1


class TestSelectStep:
    def test_all_zero_area_forces_minimum(self):
        assert select_step([0] * 20, DEFAULTS) == 2

    def test_rarest_then_smallest_then_round_even(self):
        area = [0] * 12 + [1] * 4 + [2] * 2 + [3] + [5]
        assert select_step(area, DEFAULTS) == 4

    def test_clamps_to_q_max(self):
        area = [0] * 19 + [100]
        assert select_step(area, DEFAULTS) == 32

    def test_negative_values_count_by_magnitude(self):
        assert select_step([-6, 6, 0, 0], DEFAULTS) == select_step([6, 6, 0, 0], DEFAULTS)

    def test_raises_on_empty(self):
        with pytest.raises(ValueError):
            select_step([], DEFAULTS)

    @given(st.lists(coeffs, min_size=1, max_size=30), st.randoms(use_true_random=False))
    def test_permutation_invariant(self, vals, rnd):
        q = select_step(vals, DEFAULTS)
        shuffled = list(vals)
        rnd.shuffle(shuffled)
        assert select_step(shuffled, DEFAULTS) == q
        assert q % 2 == 0 and DEFAULTS.q_min <= q <= DEFAULTS.q_max


def _block_with_q4_area():
    block = [0] * 64
    block[0] = 50
    area = [0] * 12 + [1] * 4 + [2] * 2 + [3] + [5]
    block[1:21] = area
    block[21:24] = [5, -3, 0]
    return block


class TestEmbedBlock:
    def test_empty_bits_leaves_block_unchanged(self):
        block = _block_with_q4_area()
        out = embed_block(block, [], DEFAULTS)
        assert out.tolist() == block

    def test_three_bits_example(self):
        block = _block_with_q4_area()
        out = embed_block(block, [1, 0, 1], DEFAULTS)
        assert out[21:24].tolist() == [6, 0, 2]
        assert out[:21].tolist() == block[:21]
        assert out[24:].tolist() == block[24:]

    def test_all_zero_block_uses_minimum_step(self):
        out = embed_block([0] * 64, [1, 1], DEFAULTS)
        assert out[21:23].tolist() == [1, 1]
        assert not out[23:].any() and not out[:21].any()

    def test_consumes_at_most_area(self):
        out = embed_block([0] * 64, [1] * 100, DEFAULTS)
        assert out[21:].tolist() == [1] * 43


class TestExtractBlock:
    def test_inverse_of_embed(self):
        embedded = embed_block(_block_with_q4_area(), [1, 0, 1], DEFAULTS)
        assert extract_block(embedded, 3, DEFAULTS) == [1, 0, 1]

    def test_count_zero(self):
        assert extract_block([0] * 64, 0, DEFAULTS) == []

    def test_count_beyond_area_rejected(self):
        with pytest.raises(ValueError):
            extract_block([0] * 64, 44, DEFAULTS)


block_strategy = st.lists(coeffs, min_size=64, max_size=64)


@given(
    block_strategy,
    st.lists(bits, min_size=0, max_size=43),
    st.integers(min_value=2, max_value=63),
)
@settings(max_examples=300)
def test_block_round_trip_and_area_preservation(block, message, split):
    params = StegoParams(split_index=split)
    usable = message[: 64 - split]
    out = embed_block(block, message, params)
    assert out[:split].tolist() == block[:split]
    assert extract_block(out, len(usable), params) == usable


def test_block_round_trip_bulk():
    # module invariant: extract_block inverts embed_block on the consumed
    # prefix, 10^4 randomized (block, bits, split) cases
    rng = np.random.default_rng(97)
    for _ in range(10_000):
        split = int(rng.integers(2, 64))
        params = StegoParams(split_index=split)
        block = rng.integers(-1024, 1024, size=64)
        nbits = int(rng.integers(0, 64 - split + 1))
        bits = rng.integers(0, 2, size=nbits).tolist()
        out = embed_block(block, bits, params)
        assert extract_block(out, nbits, params) == bits


@given(block_strategy, st.integers(min_value=2, max_value=63))
@settings(max_examples=200)
def test_select_step_reproducible_after_embedding(block, split):
    # the embedder and extractor must derive the same step from a stego block
    params = StegoParams(split_index=split)
    q = select_step(np.asarray(block[1:split]), params)
    out = embed_block(block, [1, 0] * 32, params)
    assert select_step(out[1:split], params) == q


class TestStegoParams:
    @pytest.mark.parametrize(
        "kw",
        [
            {"split_index": 1},
            {"split_index": 64},
            {"q_min": 3},
            {"q_min": 0},
            {"q_max": 30, "q_min": 32},
            {"q_max": 7},
            {"tie_bit": 2},
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            StegoParams(**kw)

    def test_defaults(self):
        p = StegoParams()
        assert (p.split_index, p.q_min, p.q_max, p.tie_bit) == (21, 2, 32, 0)
        assert p.area_size == 43
