"""Canonical Huffman coding for baseline JPEG entropy segments."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

__all__ = ["HuffmanTable", "BitWriter", "build_optimal_table"]


@dataclass(frozen=True)
class HuffmanTable:
    """One entropy-coding table: 16 code-length counts plus canonical symbols."""

    table_class: int  # 0 = DC, 1 = AC
    counts: tuple[int, ...]
    symbols: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.table_class not in (0, 1):
            raise ValueError(f"table class must be 0 (DC) or 1 (AC), got {self.table_class}")
        if len(self.counts) != 16:
            raise ValueError("exactly 16 code-length counts required")
        if any(n < 0 for n in self.counts):
            raise ValueError("negative code-length count")
        if sum(self.counts) != len(self.symbols):
            raise ValueError("symbol list length does not match code-length counts")
        if not self.symbols:
            raise ValueError("table defines no symbols")
        if any(not 0 <= s <= 255 for s in self.symbols):
            raise ValueError("symbols must be bytes")
        # prefix feasibility: the running code may never overflow its level
        code = 0
        for length, n in enumerate(self.counts, start=1):
            code += n
            if code > (1 << length):
                raise ValueError(f"overfull Huffman code space at length {length}")
            code <<= 1

    def codes(self) -> dict[int, tuple[int, int]]:
        """Canonical code assignment: symbol -> (code, bit length)."""
        out: dict[int, tuple[int, int]] = {}
        code = 0
        k = 0
        for length, n in enumerate(self.counts, start=1):
            for _ in range(n):
                out[self.symbols[k]] = (code, length)
                code += 1
                k += 1
            code <<= 1
        return out

    def decode_lut(self) -> list[int]:
        """65536-entry table: 16-bit lookahead -> (length << 8) | symbol, 0 = no code."""
        lut = [0] * 65536
        code = 0
        k = 0
        for length, n in enumerate(self.counts, start=1):
            for _ in range(n):
                entry = (length << 8) | self.symbols[k]
                lo = code << (16 - length)
                hi = (code + 1) << (16 - length)
                lut[lo:hi] = [entry] * (hi - lo)
                code += 1
                k += 1
            code <<= 1
        return lut


class BitWriter:
    """MSB-first bit accumulator producing byte-stuffed JPEG entropy data."""

    def __init__(self) -> None:
        self.buf = bytearray()
        self._acc = 0
        self._n = 0

    def write(self, code: int, length: int) -> None:
        if length == 0:
            return
        self._acc = (self._acc << length) | (code & ((1 << length) - 1))
        self._n += length
        buf = self.buf
        while self._n >= 8:
            self._n -= 8
            byte = (self._acc >> self._n) & 0xFF
            buf.append(byte)
            if byte == 0xFF:
                buf.append(0x00)  # stuffing so the decoder never sees a marker
        self._acc &= (1 << self._n) - 1

    def pad_to_byte(self) -> None:
        """Fill the current byte with 1-bits, the T.81 padding convention."""
        if self._n:
            pad = 8 - self._n
            self.write((1 << pad) - 1, pad)

    def append_marker(self, marker: int) -> None:
        """Emit a restart marker; caller must have padded to a byte boundary."""
        if self._n:
            raise RuntimeError("marker emitted mid-byte")
        self.buf += bytes((0xFF, marker))


def build_optimal_table(table_class: int, freqs: Sequence[int]) -> HuffmanTable:
    """Build a length-limited canonical table from per-symbol frequencies.

    Standard JPEG optimal-table procedure: pairwise merge of the two least
    frequent entries (a dummy 257th symbol reserves the all-ones code), then
    fold code lengths above 16 back down.
    """
    if len(freqs) > 256:
        raise ValueError("at most 256 symbols")
    freq = list(freqs) + [0] * (257 - len(freqs))
    freq[256] = 1
    codesize = [0] * 257
    others = [-1] * 257

    while True:
        v1 = -1
        for i in range(257):
            f = freq[i]
            if f and (v1 < 0 or f <= freq[v1]):
                v1 = i
        v2 = -1
        for i in range(257):
            f = freq[i]
            if f and i != v1 and (v2 < 0 or f <= freq[v2]):
                v2 = i
        if v2 < 0:
            break
        freq[v1] += freq[v2]
        freq[v2] = 0
        codesize[v1] += 1
        while others[v1] >= 0:
            v1 = others[v1]
            codesize[v1] += 1
        others[v1] = v2
        codesize[v2] += 1
        while others[v2] >= 0:
            v2 = others[v2]
            codesize[v2] += 1

    bits = [0] * (max(codesize) + 1)
    for size in codesize:
        if size:
            bits[size] += 1

    # squeeze lengths > 16: move a pair up, compensate one level below
    i = len(bits) - 1
    while i > 16:
        while bits[i] > 0:
            j = i - 2
            while bits[j] == 0:
                j -= 1
            bits[i] -= 2
            bits[i - 1] += 1
            bits[j + 1] += 2
            bits[j] -= 1
        i -= 1
    # drop the reserved dummy symbol from the longest used length
    j = min(16, len(bits) - 1)
    while bits[j] == 0:
        j -= 1
    bits[j] -= 1

    counts = tuple((bits[k] if k < len(bits) else 0) for k in range(1, 17))
    symbols = tuple(s for _, s in sorted((codesize[s], s) for s in range(256) if codesize[s]))
    return HuffmanTable(table_class=table_class, counts=counts, symbols=symbols)
