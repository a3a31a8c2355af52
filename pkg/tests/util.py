"""Builders for synthetic in-memory JPEG images used across the tests."""

from __future__ import annotations

import numpy as np

from qimstego import CoeffPlane, ComponentSpec, FrameHeader, JpegImage, QuantTable


def flat_quant(value: int = 1, precision: int = 8) -> QuantTable:
    return QuantTable(entries=(value,) * 64, precision=precision)


def dc_heavy_quant(dc: int, ac: int = 1) -> QuantTable:
    return QuantTable(entries=(dc,) + (ac,) * 63)


def gray_image(
    blocks,
    width: int | None = None,
    height: int | None = None,
    quant: QuantTable | None = None,
    restart_interval: int = 0,
) -> JpegImage:
    """Single-component image from an (n, 64) coefficient array.

    Carries no Huffman tables, so serialization always takes the
    build-from-statistics path.
    """
    blocks = np.asarray(blocks, dtype=np.int32)
    n = blocks.shape[0]
    if width is None:
        side = int(round(n**0.5))
        if side * side != n:
            raise ValueError("square grid expected when width/height omitted")
        width = height = side * 8
    bw = -(-width // 8)
    bh = -(-height // 8)
    if bw * bh != n:
        raise ValueError(f"{n} blocks do not tile {width}x{height}")
    frame = FrameHeader(
        width=width,
        height=height,
        precision=8,
        components=(ComponentSpec(comp_id=1, h_sampling=1, v_sampling=1, quant_id=0),),
    )
    return JpegImage(
        frame=frame,
        quant_tables={0: quant or flat_quant()},
        huffman_tables={},
        scan_tables={1: (0, 0)},
        restart_interval=restart_interval,
        coeff_planes=(CoeffPlane(blocks_wide=bw, blocks_high=bh, blocks=blocks),),
        preserved_segments=(),
    )


def zero_image(blocks_wide: int = 64, blocks_high: int = 64, **kw) -> JpegImage:
    blocks = np.zeros((blocks_wide * blocks_high, 64), dtype=np.int32)
    return gray_image(blocks, width=blocks_wide * 8, height=blocks_high * 8, **kw)


def noisy_image(rng: np.random.Generator, blocks_wide: int = 8, blocks_high: int = 8) -> JpegImage:
    """Random cover with a roughly natural coefficient decay."""
    n = blocks_wide * blocks_high
    mags = rng.geometric(0.45, size=(n, 64)) - 1
    decay = np.maximum(1, np.arange(64) // 8)
    mags = mags // decay
    signs = rng.choice(np.array([-1, 1], dtype=np.int32), size=(n, 64))
    blocks = (mags * signs).astype(np.int32)
    blocks[:, 0] = rng.integers(-400, 401, size=n)
    return gray_image(blocks, width=blocks_wide * 8, height=blocks_high * 8)
