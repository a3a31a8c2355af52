import numpy as np
import pytest

from util import gray_image, noisy_image, zero_image

from qimstego import (
    InsufficientCapacity,
    LengthOutOfRange,
    StegoParams,
    capacity,
    embed_message,
    embed_message_fixed_q,
    extract_message,
    extract_message_fixed_q,
    parse,
    serialize,
)

DEFAULTS = StegoParams()


class TestCapacity:
    def test_512x512_default_split(self):
        assert capacity(zero_image(64, 64), DEFAULTS) == 176_128

    def test_single_block_single_coefficient(self):
        img = zero_image(1, 1)
        assert capacity(img, StegoParams(split_index=63)) == 1

    def test_16x16(self):
        assert capacity(zero_image(2, 2), DEFAULTS) == 172

    def test_counts_luma_only(self, parsed_covers):
        for img in parsed_covers.values():
            assert capacity(img, DEFAULTS) == 4096 * 43


class TestEmbedMessage:
    def test_empty_payload_embeds_only_header(self):
        cover = zero_image(2, 2)
        stego, report = embed_message(cover, b"", DEFAULTS)
        assert report.bits_embedded == 32
        assert report.blocks_used == 1  # ceil(32 / 43)
        # 32 zero bits on a zero block with q = 2 leave the coefficients zero
        assert np.array_equal(stego.coeff_planes[0].blocks, cover.coeff_planes[0].blocks)
        assert extract_message(stego, DEFAULTS) == b""

    def test_exact_fit_boundary(self):
        cover = zero_image(64, 64)  # capacity 176,128
        stego, report = embed_message(cover, bytes(22_000), DEFAULTS)
        assert report.bits_embedded == 32 + 8 * 22_000 == 176_032
        with pytest.raises(InsufficientCapacity) as exc:
            embed_message(cover, bytes(22_013), DEFAULTS)
        assert "176136" in str(exc.value) and "176128" in str(exc.value)

    def test_round_trip_in_memory(self):
        rng = np.random.default_rng(11)
        cover = noisy_image(rng, 8, 8)
        payload = rng.bytes(100)
        stego, report = embed_message(cover, payload, DEFAULTS)
        assert extract_message(stego, DEFAULTS) == payload
        assert report.bits_embedded == 32 + 800
        assert report.capacity_bits == capacity(cover, DEFAULTS)
        assert report.blocks_used == -(-832 // 43)

    def test_round_trip_through_file(self, parsed_covers):
        rng = np.random.default_rng(5)
        cover = parsed_covers["camera"]
        payload = rng.bytes(4000)
        stego, _ = embed_message(cover, payload, DEFAULTS)
        recovered = extract_message(parse(serialize(stego)), DEFAULTS)
        assert recovered == payload

    def test_stego_file_survives_external_decoder(self, parsed_covers):
        import io
        import warnings

        from PIL import Image

        rng = np.random.default_rng(8)
        for name, cover in parsed_covers.items():
            stego, _ = embed_message(cover, rng.bytes(2000), DEFAULTS)
            data = serialize(stego)
            with warnings.catch_warnings():
                warnings.simplefilter("error")
                img = Image.open(io.BytesIO(data))
                img.load()
            assert img.size == (512, 512), name

    def test_cover_preserved_outside_embedding_area(self, parsed_covers):
        rng = np.random.default_rng(6)
        cover = parsed_covers["moon"]
        payload = rng.bytes(3000)
        stego, _ = embed_message(cover, payload, DEFAULTS)
        a = cover.coeff_planes[0].blocks
        b = stego.coeff_planes[0].blocks
        assert np.array_equal(a[:, : DEFAULTS.split_index], b[:, : DEFAULTS.split_index])
        assert cover.preserved_segments == stego.preserved_segments
        assert cover.quant_tables == stego.quant_tables

    def test_chroma_planes_untouched(self):
        import io

        import skimage.data
        from PIL import Image

        buf = io.BytesIO()
        Image.fromarray(skimage.data.astronaut()).save(buf, "JPEG", quality=95, subsampling=2)
        cover = parse(buf.getvalue())
        stego, _ = embed_message(cover, b"covert", DEFAULTS)
        for a, b in zip(cover.coeff_planes[1:], stego.coeff_planes[1:]):
            assert np.array_equal(a.blocks, b.blocks)
        assert extract_message(parse(serialize(stego)), DEFAULTS) == b"covert"

    def test_deterministic_stego_bytes(self, parsed_covers):
        cover = parsed_covers["camera"]
        payload = b"same input, same output"
        a = serialize(embed_message(cover, payload, DEFAULTS)[0])
        b = serialize(embed_message(cover, payload, DEFAULTS)[0])
        assert a == b

    def test_payload_too_large_for_header(self):
        with pytest.raises((ValueError, InsufficientCapacity)):
            embed_message(zero_image(2, 2), bytes(10_000), DEFAULTS)


class TestExtractMessage:
    def test_clean_cover_never_crashes(self, parsed_covers):
        for img in parsed_covers.values():
            try:
                out = extract_message(img, DEFAULTS)
            except LengthOutOfRange:
                continue
            assert isinstance(out, bytes)

    def test_split_mismatch_is_error_or_garbage(self, parsed_covers):
        rng = np.random.default_rng(13)
        payload = rng.bytes(2000)
        stego, _ = embed_message(parsed_covers["camera"], payload, DEFAULTS)
        try:
            out = extract_message(stego, StegoParams(split_index=30))
        except LengthOutOfRange:
            return
        assert out != payload

    def test_cover_smaller_than_header(self):
        img = zero_image(1, 1)
        with pytest.raises(LengthOutOfRange):
            extract_message(img, StegoParams(split_index=63))  # capacity 1 bit

    def test_announced_length_beyond_capacity(self):
        # blocks of large constant values extract as all-ones header bits
        blocks = np.full((4, 64), 7, dtype=np.int32)
        img = gray_image(blocks)
        with pytest.raises(LengthOutOfRange):
            extract_message(img, DEFAULTS)


class TestFixedStepBaseline:
    def test_round_trip(self, parsed_covers):
        rng = np.random.default_rng(17)
        payload = rng.bytes(1500)
        cover = parsed_covers["camera"]
        stego, report = embed_message_fixed_q(cover, payload, 4, DEFAULTS)
        assert report.step_histogram == {4: report.blocks_used}
        assert extract_message_fixed_q(parse(serialize(stego)), 4, DEFAULTS) == payload

    def test_zero_bytes_snap_to_even_lattice(self):
        # every zero payload bit lands on the even lattice; only the 32
        # length-header bits may produce odd (q/2-offset) values
        rng = np.random.default_rng(19)
        cover = noisy_image(rng, 8, 8)
        payload = bytes(100)
        stego, _ = embed_message_fixed_q(cover, payload, 2, DEFAULTS)
        blocks = stego.coeff_planes[0].blocks
        area = DEFAULTS.area_size
        for p in range(32, 32 + 800):
            coeff = blocks[p // area, DEFAULTS.split_index + p % area]
            assert coeff % 2 == 0

    def test_rejects_odd_step(self):
        with pytest.raises(ValueError):
            embed_message_fixed_q(zero_image(2, 2), b"", 3, DEFAULTS)
        with pytest.raises(ValueError):
            extract_message_fixed_q(zero_image(2, 2), 0, DEFAULTS)


class TestReport:
    def test_mean_step(self):
        rng = np.random.default_rng(23)
        cover = noisy_image(rng, 8, 8)
        _, report = embed_message(cover, rng.bytes(200), DEFAULTS)
        hist = report.step_histogram
        expect = sum(q * n for q, n in hist.items()) / sum(hist.values())
        assert report.mean_step == pytest.approx(expect)
        assert sum(hist.values()) == report.blocks_used
