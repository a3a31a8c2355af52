"""Whole-image message embedding and extraction.

The payload is framed as a 32-bit big-endian byte count followed by the body,
bits taken MSB first.  Luma blocks are filled in raster order until the bit
stream runs out; everything outside the luma embedding areas is untouched.
The fixed-step variants exist as the detectability baseline.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace

import numpy as np

from .jpeg_codec import CoeffPlane, JpegImage
from .qim import StegoParams, embed_block, extract_block, select_step

__all__ = [
    "InsufficientCapacity",
    "LengthOutOfRange",
    "EmbedReport",
    "capacity",
    "embed_message",
    "extract_message",
    "embed_message_fixed_q",
    "extract_message_fixed_q",
]


class InsufficientCapacity(Exception):
    """The framed message does not fit the cover's embedding areas."""


class LengthOutOfRange(Exception):
    """The extracted length header is impossible: wrong image, wrong
    parameters, or no embedded message."""


@dataclass(frozen=True)
class EmbedReport:
    bits_embedded: int
    blocks_used: int
    capacity_bits: int
    step_histogram: dict[int, int]

    @property
    def mean_step(self) -> float:
        total = sum(self.step_histogram.values())
        return sum(q * n for q, n in self.step_histogram.items()) / total if total else 0.0


def capacity(image: JpegImage, params: StegoParams) -> int:
    """Payload capacity in bits: luma block count times embedding-area size."""
    plane = image.coeff_planes[0]
    return plane.blocks_wide * plane.blocks_high * params.area_size


def _frame_payload(payload: bytes) -> np.ndarray:
    if len(payload) >= 1 << 32:
        raise ValueError("payload too large for the 32-bit length header")
    framed = len(payload).to_bytes(4, "big") + payload
    return np.unpackbits(np.frombuffer(framed, dtype=np.uint8))


def _embed(image: JpegImage, payload: bytes, params: StegoParams, fixed_q: int | None):
    cap = capacity(image, params)
    need = 32 + 8 * len(payload)
    if need > cap:
        raise InsufficientCapacity(f"message needs {need} bits, cover offers {cap}")
    bits = _frame_payload(payload)
    plane = image.coeff_planes[0]
    blocks = plane.blocks.copy()
    split = params.split_index
    area = params.area_size
    hist: Counter[int] = Counter()
    pos = 0
    total = bits.size
    used = 0
    for i in range(blocks.shape[0]):
        if pos >= total:
            break
        q = fixed_q if fixed_q is not None else select_step(blocks[i, 1:split], params)
        k = min(area, total - pos)
        blocks[i] = embed_block(blocks[i], bits[pos : pos + k], params, step=q)
        pos += k
        used += 1
        hist[q] += 1
    new_plane = CoeffPlane(plane.blocks_wide, plane.blocks_high, blocks)
    stego = replace(image, coeff_planes=(new_plane,) + image.coeff_planes[1:])
    report = EmbedReport(
        bits_embedded=total,
        blocks_used=used,
        capacity_bits=cap,
        step_histogram=dict(sorted(hist.items())),
    )
    return stego, report


def _extract(image: JpegImage, params: StegoParams, fixed_q: int | None) -> bytes:
    plane = image.coeff_planes[0]
    blocks = plane.blocks
    area = params.area_size
    cap = blocks.shape[0] * area
    split = params.split_index
    bits: list[int] = []
    idx = 0

    def pull(until: int) -> None:
        nonlocal idx
        while len(bits) < until and idx < blocks.shape[0]:
            q = fixed_q if fixed_q is not None else select_step(blocks[idx, 1:split], params)
            bits.extend(extract_block(blocks[idx], area, params, step=q))
            idx += 1

    pull(32)
    if len(bits) < 32:
        raise LengthOutOfRange("cover too small to hold a length header")
    n = int.from_bytes(np.packbits(np.asarray(bits[:32], dtype=np.uint8)).tobytes(), "big")
    total = 32 + 8 * n
    if total > cap:
        raise LengthOutOfRange(
            f"header announces {n} payload bytes but capacity is {(cap - 32) // 8}"
        )
    pull(total)
    return np.packbits(np.asarray(bits[32:total], dtype=np.uint8)).tobytes()


def embed_message(image: JpegImage, payload: bytes, params: StegoParams = StegoParams()):
    """Embed ``payload`` with the per-block adaptive step.

    Returns (stego image, report).  Raises InsufficientCapacity when the
    framed message exceeds the cover's capacity.
    """
    return _embed(image, payload, params, None)


def extract_message(image: JpegImage, params: StegoParams = StegoParams()) -> bytes:
    """Recover an embedded payload; needs only the same params, no key."""
    return _extract(image, params, None)


def _check_fixed_q(q: int) -> None:
    if q < 2 or q % 2:
        raise ValueError(f"fixed step must be an even integer >= 2, got {q}")


def embed_message_fixed_q(
    image: JpegImage, payload: bytes, q: int, params: StegoParams = StegoParams()
):
    """Classical fixed-step variant: every block uses the constant ``q``."""
    _check_fixed_q(q)
    return _embed(image, payload, params, q)


def extract_message_fixed_q(
    image: JpegImage, q: int, params: StegoParams = StegoParams()
) -> bytes:
    _check_fixed_q(q)
    return _extract(image, params, q)
