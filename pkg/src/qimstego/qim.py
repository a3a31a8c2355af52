"""QIM bit embedding on quantized DCT coefficients with a per-block adaptive step.

A bit is hidden in a coefficient by snapping its magnitude onto one of two
interleaved lattices: multiples of the step q (bit 0) or multiples of q offset
by q/2 (bit 1).  The step itself is recomputed from the block's untouched
low-frequency coefficients, so extraction needs no side information.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "StegoParams",
    "embed_coeff",
    "extract_coeff",
    "select_step",
    "embed_block",
    "extract_block",
]


@dataclass(frozen=True)
class StegoParams:
    """Embedding configuration shared by embedder and extractor.

    Zigzag indices ``1 .. split_index-1`` form the non-embedding area (they
    are read, never written); indices ``split_index .. 63`` receive payload
    bits.  The DC coefficient (index 0) is never touched.
    """

    split_index: int = 21
    q_min: int = 2
    q_max: int = 32
    tie_bit: int = 0

    def __post_init__(self) -> None:
        if not 2 <= self.split_index <= 63:
            raise ValueError(f"split_index must be in 2..63, got {self.split_index}")
        if self.q_min < 2 or self.q_min % 2:
            raise ValueError(f"q_min must be an even integer >= 2, got {self.q_min}")
        if self.q_max < self.q_min or self.q_max % 2:
            raise ValueError(f"q_max must be an even integer >= q_min, got {self.q_max}")
        if self.tie_bit not in (0, 1):
            raise ValueError(f"tie_bit must be 0 or 1, got {self.tie_bit}")

    @property
    def area_size(self) -> int:
        """Number of embedding-area coefficients per block."""
        return 64 - self.split_index


def _check_step(q: int) -> None:
    if q < 2 or q % 2:
        raise ValueError(f"quantization step must be an even integer >= 2, got {q}")


def embed_coeff(c: int, q: int, b: int) -> int:
    """Embed bit ``b`` into coefficient ``c`` using step ``q``.

    The lattice rule is applied to the magnitude and the original sign is
    reapplied (sign of 0 counts as +), keeping the lattice symmetric around
    zero so negative coefficients round-trip exactly.
    """
    _check_step(q)
    if b not in (0, 1):
        raise ValueError(f"message bit must be 0 or 1, got {b}")
    m = -c if c < 0 else c
    m2 = q * (m // q) + (q // 2) * b
    return -m2 if c < 0 else m2


def extract_coeff(c2: int, q: int, tie_bit: int = 0) -> int:
    """Recover the bit from coefficient ``c2``: nearest of the two lattices wins.

    Equidistant inputs (possible only for coefficients no embedder produced)
    resolve to ``tie_bit`` so extraction is total and deterministic.
    """
    _check_step(q)
    m = -c2 if c2 < 0 else c2
    d0 = m - q * (m // q)
    d1 = d0 - q // 2
    if d1 < 0:
        d1 = -d1
    if d0 < d1:
        return 0
    if d1 < d0:
        return 1
    return tie_bit


def select_step(non_embedding_coeffs: Sequence[int], params: StegoParams) -> int:
    """Derive the block's step from its non-embedding coefficients.

    Take the smallest absolute value among the rarest absolute values, round
    it up to even, and clamp to [q_min, q_max].  Purely a function of the
    input multiset, so the extractor recomputes the identical step from the
    unmodified area.
    """
    arr = np.abs(np.asarray(non_embedding_coeffs, dtype=np.int64))
    if arr.size == 0:
        raise ValueError("non-embedding area must not be empty")
    freq = Counter(arr.tolist())
    rarest = min(freq.values())
    v = min(val for val, n in freq.items() if n == rarest)
    q = v if v > params.q_min else params.q_min
    q += q & 1
    return q if q <= params.q_max else params.q_max


def embed_block(
    block: Sequence[int],
    bits: Sequence[int],
    params: StegoParams,
    step: int | None = None,
) -> np.ndarray:
    """Embed leading ``bits`` into one 64-coefficient block (zigzag order).

    Consumes ``min(len(bits), 64 - split_index)`` bits; DC and the
    non-embedding area are returned unchanged.  ``step`` overrides the
    adaptive rule (used by the fixed-step baseline).
    """
    arr = np.array(block, dtype=np.int32)
    if arr.shape != (64,):
        raise ValueError(f"block must hold 64 coefficients, got shape {arr.shape}")
    split = params.split_index
    q = select_step(arr[1:split], params) if step is None else step
    k = min(len(bits), 64 - split)
    for j in range(k):
        arr[split + j] = embed_coeff(int(arr[split + j]), q, int(bits[j]))
    return arr


def extract_block(
    block: Sequence[int],
    count: int,
    params: StegoParams,
    step: int | None = None,
) -> list[int]:
    """Extract the first ``count`` bits from a block's embedding area."""
    arr = np.asarray(block)
    if arr.shape != (64,):
        raise ValueError(f"block must hold 64 coefficients, got shape {arr.shape}")
    split = params.split_index
    if count > 64 - split:
        raise ValueError(f"count {count} exceeds embedding area of {64 - split}")
    q = select_step(arr[1:split], params) if step is None else step
    return [extract_coeff(int(arr[split + j]), q, params.tie_bit) for j in range(count)]
