"""Baseline JPEG codec operating at the quantized-DCT-coefficient level.

Parses SOF0 (baseline sequential Huffman, 8-bit) streams into per-component
coefficient planes with DC prediction resolved, re-serializes them losslessly
with respect to the coefficients, and decodes the luminance plane to pixels
for quality measurement.  Everything else (progressive, arithmetic, 12-bit,
hierarchical) is rejected up front.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .huffman import BitWriter, HuffmanTable, build_optimal_table

__all__ = [
    "MalformedStream",
    "UnsupportedJpeg",
    "EncodingOverflow",
    "QuantTable",
    "ComponentSpec",
    "FrameHeader",
    "CoeffPlane",
    "PixelPlane",
    "JpegImage",
    "ZIGZAG_TO_NATURAL",
    "zigzag_to_natural",
    "parse",
    "serialize",
    "decode_pixels",
]


class MalformedStream(Exception):
    """Input bytes are not a decodable JPEG stream."""


class UnsupportedJpeg(Exception):
    """Recognizable JPEG, but not baseline sequential Huffman 8-bit."""


class EncodingOverflow(Exception):
    """Coefficient magnitude too large for entropy coding (category > 15)."""


# Marker bytes (second byte of the 0xFFxx pair).
_SOI = 0xD8
_EOI = 0xD9
_SOS = 0xDA
_DQT = 0xDB
_DRI = 0xDD
_DHT = 0xC4
_SOF0 = 0xC0
_COM = 0xFE
_RST0 = 0xD0

_UNSUPPORTED = {
    0xC1: "extended sequential DCT",
    0xC2: "progressive DCT",
    0xC3: "lossless sequential",
    0xC5: "differential sequential DCT",
    0xC6: "differential progressive DCT",
    0xC7: "differential lossless",
    0xC9: "extended sequential DCT (arithmetic)",
    0xCA: "progressive DCT (arithmetic)",
    0xCB: "lossless sequential (arithmetic)",
    0xCC: "arithmetic conditioning",
    0xCD: "differential sequential DCT (arithmetic)",
    0xCE: "differential progressive DCT (arithmetic)",
    0xCF: "differential lossless (arithmetic)",
    0xDC: "deferred line count (DNL)",
    0xDE: "hierarchical progression",
    0xDF: "reference component expansion",
}

# Position of each zigzag index in the natural (row-major) 8x8 layout.
ZIGZAG_TO_NATURAL = (
    0, 1, 8, 16, 9, 2, 3, 10,
    17, 24, 32, 25, 18, 11, 4, 5,
    12, 19, 26, 33, 40, 48, 41, 34,
    27, 20, 13, 6, 7, 14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36,
    29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46,
    53, 60, 61, 54, 47, 55, 62, 63,
)

_ZZ_TO_NAT = np.array(ZIGZAG_TO_NATURAL, dtype=np.intp)


def zigzag_to_natural(index: int) -> tuple[int, int]:
    """Map a zigzag position (0..63) to its (row, col) in the 8x8 block."""
    if not 0 <= index <= 63:
        raise ValueError(f"zigzag index must be in 0..63, got {index}")
    nat = ZIGZAG_TO_NATURAL[index]
    return nat >> 3, nat & 7


@dataclass(frozen=True)
class QuantTable:
    """64 quantization divisors in zigzag order."""

    entries: tuple[int, ...]
    precision: int = 8

    def __post_init__(self) -> None:
        if len(self.entries) != 64:
            raise ValueError("quantization table must have 64 entries")
        if self.precision not in (8, 16):
            raise ValueError("quantization precision must be 8 or 16 bit")
        limit = 255 if self.precision == 8 else 65535
        if any(not 1 <= e <= limit for e in self.entries):
            raise ValueError("quantization entries must be positive and fit the precision")


@dataclass(frozen=True)
class ComponentSpec:
    comp_id: int
    h_sampling: int
    v_sampling: int
    quant_id: int


@dataclass(frozen=True)
class FrameHeader:
    width: int
    height: int
    precision: int
    components: tuple[ComponentSpec, ...]

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("frame dimensions must be at least 1x1")
        if self.precision != 8:
            raise ValueError("only 8-bit precision frames are representable")
        if not 1 <= len(self.components) <= 4:
            raise ValueError("1..4 components required")
        for c in self.components:
            if not (1 <= c.h_sampling <= 4 and 1 <= c.v_sampling <= 4):
                raise ValueError("sampling factors must be in 1..4")


@dataclass(frozen=True)
class CoeffPlane:
    """All blocks of one component: (blocks_wide*blocks_high, 64) int32 rows.

    Rows are zigzag-ordered; index 0 holds the absolute (not differential)
    DC coefficient.
    """

    blocks_wide: int
    blocks_high: int
    blocks: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(np.asarray(self.blocks, dtype=np.int32))
        if arr.shape != (self.blocks_wide * self.blocks_high, 64):
            raise ValueError(
                f"expected {self.blocks_wide * self.blocks_high} blocks of 64, got shape {arr.shape}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "blocks", arr)


@dataclass(frozen=True)
class PixelPlane:
    """Decoded 8-bit luminance raster, row-major."""

    width: int
    height: int
    samples: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(np.asarray(self.samples, dtype=np.uint8))
        if arr.shape != (self.height, self.width):
            raise ValueError(f"expected samples of shape {(self.height, self.width)}, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)


def _plane_dims(frame: FrameHeader) -> list[tuple[int, int]]:
    """Blocks-wide/high of each component's coded plane, padding included.

    Single-component frames are coded non-interleaved (one block per MCU, no
    padding to sampling multiples); multi-component frames pad each plane to
    whole interleaved MCUs.
    """
    comps = frame.components
    if len(comps) == 1:
        return [(-(-frame.width // 8), -(-frame.height // 8))]
    hmax = max(c.h_sampling for c in comps)
    vmax = max(c.v_sampling for c in comps)
    mcus_x = -(-frame.width // (8 * hmax))
    mcus_y = -(-frame.height // (8 * vmax))
    return [(mcus_x * c.h_sampling, mcus_y * c.v_sampling) for c in comps]


def _mcu_count(frame: FrameHeader) -> int:
    comps = frame.components
    if len(comps) == 1:
        w, h = _plane_dims(frame)[0]
        return w * h
    hmax = max(c.h_sampling for c in comps)
    vmax = max(c.v_sampling for c in comps)
    return (-(-frame.width // (8 * hmax))) * (-(-frame.height // (8 * vmax)))


def _iter_mcus(frame: FrameHeader):
    """Yield, per MCU in coding order, the data units as (component, block index)."""
    comps = frame.components
    dims = _plane_dims(frame)
    if len(comps) == 1:
        for i in range(dims[0][0] * dims[0][1]):
            yield ((0, i),)
        return
    hmax = max(c.h_sampling for c in comps)
    vmax = max(c.v_sampling for c in comps)
    mcus_x = -(-frame.width // (8 * hmax))
    mcus_y = -(-frame.height // (8 * vmax))
    for yy in range(mcus_y):
        for xx in range(mcus_x):
            units = []
            for ci, c in enumerate(comps):
                pw = dims[ci][0]
                for by in range(c.v_sampling):
                    base = (yy * c.v_sampling + by) * pw + xx * c.h_sampling
                    for bx in range(c.h_sampling):
                        units.append((ci, base + bx))
            yield tuple(units)


@dataclass(frozen=True)
class JpegImage:
    """A fully parsed baseline JPEG: headers, tables, and coefficient planes."""

    frame: FrameHeader
    quant_tables: dict[int, QuantTable]
    huffman_tables: dict[tuple[int, int], HuffmanTable]
    scan_tables: dict[int, tuple[int, int]]
    restart_interval: int
    coeff_planes: tuple[CoeffPlane, ...]
    preserved_segments: tuple[tuple[int, bytes], ...] = ()

    def __post_init__(self) -> None:
        if len(self.coeff_planes) != len(self.frame.components):
            raise ValueError("one coefficient plane per frame component required")
        for (w, h), plane in zip(_plane_dims(self.frame), self.coeff_planes):
            if (plane.blocks_wide, plane.blocks_high) != (w, h):
                raise ValueError("coefficient plane dimensions inconsistent with frame geometry")
        for c in self.frame.components:
            if c.quant_id not in self.quant_tables:
                raise ValueError(f"component {c.comp_id} references missing quant table {c.quant_id}")
            if c.comp_id not in self.scan_tables:
                raise ValueError(f"component {c.comp_id} has no entropy table assignment")
        if not 0 <= self.restart_interval <= 0xFFFF:
            raise ValueError("restart interval out of range")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class _BitReader:
    """MSB-first reader over one destuffed entropy segment."""

    __slots__ = ("data", "pos", "limit")

    def __init__(self, segment: bytes) -> None:
        # 1-padding mirrors T.81 fill bits; extra bytes keep lookahead in bounds
        self.data = segment + b"\xff" * 8
        self.pos = 0
        self.limit = len(segment) * 8

    def decode(self, lut: list[int]) -> int:
        pos = self.pos
        if pos > self.limit:
            raise MalformedStream("entropy data exhausted mid-block")
        data = self.data
        i = pos >> 3
        window = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2]
        entry = lut[(window >> (8 - (pos & 7))) & 0xFFFF]
        if entry == 0:
            raise MalformedStream("undefined Huffman code in entropy data")
        self.pos = pos + (entry >> 8)
        return entry & 0xFF

    def receive_extend(self, n: int) -> int:
        pos = self.pos
        data = self.data
        i = pos >> 3
        window = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2]
        v = ((window >> (8 - (pos & 7))) & 0xFFFF) >> (16 - n)
        self.pos = pos + n
        if v < 1 << (n - 1):
            v -= (1 << n) - 1
        return v


def _decode_block(reader: _BitReader, dc_lut: list[int], ac_lut: list[int], pred: int):
    row = [0] * 64
    s = reader.decode(dc_lut)
    if s > 15:
        raise MalformedStream("invalid DC magnitude category")
    if s:
        pred += reader.receive_extend(s)
    row[0] = pred
    k = 1
    while k < 64:
        rs = reader.decode(ac_lut)
        s = rs & 15
        if s == 0:
            if rs == 0x00:  # end of block
                break
            if rs == 0xF0:  # run of 16 zeros
                k += 16
                continue
            raise MalformedStream("invalid AC symbol")
        k += rs >> 4
        if k > 63:
            raise MalformedStream("AC zero run exceeds block")
        row[k] = reader.receive_extend(s)
        k += 1
    return pred, row


def _split_entropy(data: bytes, pos: int):
    """Destuff entropy data from ``pos``, splitting at restart markers.

    Returns (segments, restart ids, offset of the terminating marker's 0xFF).
    """
    n = len(data)
    segments: list[bytes] = []
    rst_ids: list[int] = []
    cur = bytearray()
    i = pos
    while True:
        if i >= n:
            raise MalformedStream("truncated entropy data")
        b = data[i]
        if b != 0xFF:
            cur.append(b)
            i += 1
            continue
        if i + 1 >= n:
            raise MalformedStream("truncated entropy data")
        nxt = data[i + 1]
        if nxt == 0x00:
            cur.append(0xFF)
            i += 2
            continue
        if _RST0 <= nxt <= _RST0 + 7:
            segments.append(bytes(cur))
            rst_ids.append(nxt - _RST0)
            cur = bytearray()
            i += 2
            continue
        segments.append(bytes(cur))
        return segments, rst_ids, i


def _parse_dqt(payload: bytes, tables: dict[int, QuantTable]) -> None:
    i = 0
    n = len(payload)
    if n == 0:
        raise MalformedStream("empty DQT segment")
    while i < n:
        pq = payload[i] >> 4
        tq = payload[i] & 15
        i += 1
        if pq not in (0, 1):
            raise MalformedStream(f"bad quantization table precision {pq}")
        if tq > 3:
            raise MalformedStream(f"bad quantization table id {tq}")
        width = 64 if pq == 0 else 128
        if i + width > n:
            raise MalformedStream("truncated quantization table")
        if pq == 0:
            entries = tuple(payload[i : i + 64])
        else:
            entries = tuple((payload[i + 2 * k] << 8) | payload[i + 2 * k + 1] for k in range(64))
        i += width
        try:
            tables[tq] = QuantTable(entries=entries, precision=8 if pq == 0 else 16)
        except ValueError as exc:
            raise MalformedStream(f"invalid quantization table: {exc}") from None


def _parse_dht(payload: bytes, tables: dict[tuple[int, int], HuffmanTable]) -> None:
    i = 0
    n = len(payload)
    if n == 0:
        raise MalformedStream("empty DHT segment")
    while i < n:
        if i + 17 > n:
            raise MalformedStream("truncated Huffman table header")
        tc = payload[i] >> 4
        th = payload[i] & 15
        if tc > 1:
            raise MalformedStream(f"bad Huffman table class {tc}")
        if th > 3:
            raise MalformedStream(f"bad Huffman table id {th}")
        counts = tuple(payload[i + 1 : i + 17])
        i += 17
        total = sum(counts)
        if i + total > n:
            raise MalformedStream("truncated Huffman symbol list")
        symbols = tuple(payload[i : i + total])
        i += total
        try:
            tables[(tc, th)] = HuffmanTable(table_class=tc, counts=counts, symbols=symbols)
        except ValueError as exc:
            raise MalformedStream(f"invalid Huffman table: {exc}") from None


def _parse_sof0(payload: bytes) -> FrameHeader:
    if len(payload) < 6:
        raise MalformedStream("truncated frame header")
    precision = payload[0]
    height = (payload[1] << 8) | payload[2]
    width = (payload[3] << 8) | payload[4]
    ncomp = payload[5]
    if precision != 8:
        raise UnsupportedJpeg(f"{precision}-bit sample precision")
    if height == 0:
        raise UnsupportedJpeg("deferred image height (DNL)")
    if width == 0:
        raise MalformedStream("zero image width")
    if not 1 <= ncomp <= 4:
        raise UnsupportedJpeg(f"{ncomp}-component frames are not supported")
    if len(payload) != 6 + 3 * ncomp:
        raise MalformedStream("frame header length mismatch")
    comps = []
    seen: set[int] = set()
    for k in range(ncomp):
        cid = payload[6 + 3 * k]
        hv = payload[7 + 3 * k]
        tq = payload[8 + 3 * k]
        h, v = hv >> 4, hv & 15
        if not (1 <= h <= 4 and 1 <= v <= 4):
            raise MalformedStream("sampling factors out of range")
        if tq > 3:
            raise MalformedStream(f"bad quantization table reference {tq}")
        if cid in seen:
            raise MalformedStream(f"duplicate component id {cid}")
        seen.add(cid)
        comps.append(ComponentSpec(comp_id=cid, h_sampling=h, v_sampling=v, quant_id=tq))
    return FrameHeader(width=width, height=height, precision=precision, components=tuple(comps))


def _parse_sos(
    payload: bytes,
    frame: FrameHeader,
    quant_tables: dict[int, QuantTable],
    huffman_tables: dict[tuple[int, int], HuffmanTable],
) -> dict[int, tuple[int, int]]:
    if len(payload) < 1:
        raise MalformedStream("truncated scan header")
    ns = payload[0]
    if not 1 <= ns <= 4:
        raise MalformedStream(f"bad scan component count {ns}")
    if len(payload) != 1 + 2 * ns + 3:
        raise MalformedStream("scan header length mismatch")
    if ns != len(frame.components):
        if len(frame.components) == 1:
            raise MalformedStream("scan component count does not match frame")
        raise UnsupportedJpeg("partial (non-interleaved multi-component) scans")
    scan_tables: dict[int, tuple[int, int]] = {}
    for k in range(ns):
        cs = payload[1 + 2 * k]
        td = payload[2 + 2 * k] >> 4
        ta = payload[2 + 2 * k] & 15
        if frame.components[k].comp_id != cs:
            raise MalformedStream("scan components must follow frame order")
        if (0, td) not in huffman_tables:
            raise MalformedStream(f"scan references undefined DC table {td}")
        if (1, ta) not in huffman_tables:
            raise MalformedStream(f"scan references undefined AC table {ta}")
        if frame.components[k].quant_id not in quant_tables:
            raise MalformedStream("scan component references undefined quantization table")
        scan_tables[cs] = (td, ta)
    ss, se, a = payload[1 + 2 * ns], payload[2 + 2 * ns], payload[3 + 2 * ns]
    if (ss, se, a) != (0, 63, 0):
        raise MalformedStream("baseline scan must cover the full spectrum in one pass")
    return scan_tables


def _decode_entropy(
    frame: FrameHeader,
    scan_tables: dict[int, tuple[int, int]],
    huffman_tables: dict[tuple[int, int], HuffmanTable],
    segments: list[bytes],
    rst_ids: list[int],
    interval: int,
) -> list[np.ndarray]:
    dims = _plane_dims(frame)
    planes = [np.zeros((w * h, 64), dtype=np.int32) for w, h in dims]

    lut_cache: dict[tuple[int, int], list[int]] = {}
    luts = []
    for c in frame.components:
        td, ta = scan_tables[c.comp_id]
        for key in ((0, td), (1, ta)):
            if key not in lut_cache:
                lut_cache[key] = huffman_tables[key].decode_lut()
        luts.append((lut_cache[(0, td)], lut_cache[(1, ta)]))

    n_mcus = _mcu_count(frame)
    eff = interval if interval else n_mcus
    expected = -(-n_mcus // eff)
    if len(segments) != expected:
        raise MalformedStream(f"expected {expected} entropy segment(s), found {len(segments)}")
    for k, r in enumerate(rst_ids):
        if r != k & 7:
            raise MalformedStream("restart markers out of sequence")

    ncomp = len(frame.components)
    preds = [0] * ncomp
    reader: _BitReader | None = None
    for m, units in enumerate(_iter_mcus(frame)):
        if m % eff == 0:
            if reader is not None and reader.pos > reader.limit:
                raise MalformedStream("entropy segment overran its restart boundary")
            reader = _BitReader(segments[m // eff])
            preds = [0] * ncomp
        for ci, bi in units:
            dc_lut, ac_lut = luts[ci]
            preds[ci], planes[ci][bi] = _decode_block(reader, dc_lut, ac_lut, preds[ci])
    if reader is not None and reader.pos > reader.limit:
        raise MalformedStream("entropy data shorter than the image")
    return planes


def parse(data: bytes) -> JpegImage:
    """Parse a baseline JPEG byte stream down to quantized DCT coefficients.

    Raises MalformedStream for truncated or garbled input and UnsupportedJpeg
    for valid-but-out-of-scope modes (progressive, arithmetic, 12-bit, ...).
    """
    n = len(data)
    if n < 2 or data[0] != 0xFF or data[1] != _SOI:
        raise MalformedStream("missing SOI marker")
    pos = 2
    quant_tables: dict[int, QuantTable] = {}
    huffman_tables: dict[tuple[int, int], HuffmanTable] = {}
    preserved: list[tuple[int, bytes]] = []
    frame: FrameHeader | None = None
    restart_interval = 0
    planes: list[np.ndarray] | None = None
    scan_tables: dict[int, tuple[int, int]] = {}
    saw_eoi = False

    while pos < n:
        if data[pos] != 0xFF:
            raise MalformedStream(f"expected a marker at offset {pos}")
        while pos + 1 < n and data[pos + 1] == 0xFF:
            pos += 1  # fill bytes before the marker byte
        if pos + 1 >= n:
            raise MalformedStream("truncated marker")
        marker = data[pos + 1]
        pos += 2

        if marker == _EOI:
            saw_eoi = True
            break
        if marker == _SOI:
            raise MalformedStream("unexpected SOI inside stream")
        if marker in _UNSUPPORTED:
            raise UnsupportedJpeg(f"unsupported JPEG mode: {_UNSUPPORTED[marker]}")
        if _RST0 <= marker <= _RST0 + 7 or marker == 0x01:
            raise MalformedStream("restart/TEM marker outside entropy data")

        if pos + 2 > n:
            raise MalformedStream("truncated segment header")
        seglen = (data[pos] << 8) | data[pos + 1]
        if seglen < 2 or pos + seglen > n:
            raise MalformedStream("segment length out of bounds")
        payload = bytes(data[pos + 2 : pos + seglen])
        end = pos + seglen

        if 0xE0 <= marker <= 0xEF or marker == _COM:
            preserved.append((marker, payload))
        elif marker == _DQT:
            _parse_dqt(payload, quant_tables)
        elif marker == _DHT:
            _parse_dht(payload, huffman_tables)
        elif marker == _DRI:
            if len(payload) != 2:
                raise MalformedStream("bad DRI segment length")
            restart_interval = (payload[0] << 8) | payload[1]
        elif marker == _SOF0:
            if frame is not None:
                raise MalformedStream("multiple frame headers")
            frame = _parse_sof0(payload)
        elif marker == _SOS:
            if frame is None:
                raise MalformedStream("scan before frame header")
            if planes is not None:
                raise UnsupportedJpeg("multi-scan baseline streams")
            scan_tables = _parse_sos(payload, frame, quant_tables, huffman_tables)
            segments, rst_ids, pos = _split_entropy(data, end)
            planes = _decode_entropy(
                frame, scan_tables, huffman_tables, segments, rst_ids, restart_interval
            )
            continue
        else:
            raise MalformedStream(f"unexpected marker 0xFF{marker:02X}")
        pos = end

    if not saw_eoi:
        raise MalformedStream("truncated stream: no EOI marker")
    if frame is None or planes is None:
        raise MalformedStream("stream contains no image scan")

    coeff_planes = tuple(
        CoeffPlane(blocks_wide=w, blocks_high=h, blocks=arr)
        for (w, h), arr in zip(_plane_dims(frame), planes)
    )
    return JpegImage(
        frame=frame,
        quant_tables=quant_tables,
        huffman_tables=huffman_tables,
        scan_tables=scan_tables,
        restart_interval=restart_interval,
        coeff_planes=coeff_planes,
        preserved_segments=tuple(preserved),
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _encode_block_symbols(vals: list[int], pred: int, dc_key, ac_key, out: list) -> int:
    dc = vals[0]
    diff = dc - pred
    mag = diff if diff >= 0 else -diff
    s = mag.bit_length()
    if s > 15:
        raise EncodingOverflow(f"DC difference {diff} beyond magnitude category 15")
    out.append((dc_key, s, s, diff if diff >= 0 else diff + (1 << s) - 1))
    run = 0
    for k in range(1, 64):
        v = vals[k]
        if v == 0:
            run += 1
            continue
        while run > 15:
            out.append((ac_key, 0xF0, 0, 0))
            run -= 16
        mag = v if v > 0 else -v
        s = mag.bit_length()
        if s > 15:
            raise EncodingOverflow(f"AC coefficient {v} beyond magnitude category 15")
        out.append((ac_key, (run << 4) | s, s, v if v > 0 else v + (1 << s) - 1))
        run = 0
    if run:
        out.append((ac_key, 0x00, 0, 0))
    return dc


def _symbol_stream(image: JpegImage) -> list:
    """Entropy symbols for the whole scan, with None marking restart boundaries."""
    frame = image.frame
    planes = [p.blocks for p in image.coeff_planes]
    keys = []
    for c in frame.components:
        td, ta = image.scan_tables[c.comp_id]
        keys.append(((0, td), (1, ta)))
    interval = image.restart_interval
    ncomp = len(frame.components)
    preds = [0] * ncomp
    stream: list = []
    for m, units in enumerate(_iter_mcus(frame)):
        if interval and m and m % interval == 0:
            stream.append(None)
            preds = [0] * ncomp
        for ci, bi in units:
            dc_key, ac_key = keys[ci]
            preds[ci] = _encode_block_symbols(
                planes[ci][bi].tolist(), preds[ci], dc_key, ac_key, stream
            )
    return stream


def _choose_tables(image: JpegImage, freqs: dict) -> dict[tuple[int, int], HuffmanTable]:
    """Reuse an original table when it can encode every needed symbol, else rebuild."""
    chosen: dict[tuple[int, int], HuffmanTable] = {}
    for key, freq in freqs.items():
        orig = image.huffman_tables.get(key)
        if orig is not None:
            have = set(orig.symbols)
            if all(f == 0 or s in have for s, f in enumerate(freq)):
                chosen[key] = orig
                continue
        chosen[key] = build_optimal_table(key[0], freq)
    return chosen


def _append_segment(out: bytearray, marker: int, body) -> None:
    out += bytes((0xFF, marker))
    out += (len(body) + 2).to_bytes(2, "big")
    out += body


def serialize(image: JpegImage) -> bytes:
    """Serialize to a baseline JPEG stream, lossless w.r.t. the coefficients.

    Original Huffman tables are reused when they can still encode every
    (possibly modified) coefficient; otherwise replacement tables are built
    from the actual symbol statistics.
    """
    stream = _symbol_stream(image)

    freqs: dict[tuple[int, int], list[int]] = {}
    for entry in stream:
        if entry is None:
            continue
        arr = freqs.get(entry[0])
        if arr is None:
            arr = freqs[entry[0]] = [0] * 256
        arr[entry[1]] += 1
    tables = _choose_tables(image, freqs)
    codes = {key: t.codes() for key, t in tables.items()}

    out = bytearray(b"\xff\xd8")
    for marker, payload in image.preserved_segments:
        _append_segment(out, marker, payload)
    for tid in sorted(image.quant_tables):
        qt = image.quant_tables[tid]
        body = bytearray()
        body.append(((0 if qt.precision == 8 else 1) << 4) | tid)
        if qt.precision == 8:
            body += bytes(qt.entries)
        else:
            for e in qt.entries:
                body += e.to_bytes(2, "big")
        _append_segment(out, _DQT, body)

    frame = image.frame
    body = bytearray([frame.precision])
    body += frame.height.to_bytes(2, "big") + frame.width.to_bytes(2, "big")
    body.append(len(frame.components))
    for c in frame.components:
        body += bytes((c.comp_id, (c.h_sampling << 4) | c.v_sampling, c.quant_id))
    _append_segment(out, _SOF0, body)

    for cls, tid in sorted(tables, key=lambda k: (k[1], k[0])):
        t = tables[(cls, tid)]
        body = bytearray([(cls << 4) | tid])
        body += bytes(t.counts)
        body += bytes(t.symbols)
        _append_segment(out, _DHT, body)

    if image.restart_interval:
        _append_segment(out, _DRI, image.restart_interval.to_bytes(2, "big"))

    body = bytearray([len(frame.components)])
    for c in frame.components:
        td, ta = image.scan_tables[c.comp_id]
        body += bytes((c.comp_id, (td << 4) | ta))
    body += b"\x00\x3f\x00"
    _append_segment(out, _SOS, body)

    writer = BitWriter()
    rst = 0
    for entry in stream:
        if entry is None:
            writer.pad_to_byte()
            writer.append_marker(_RST0 + (rst & 7))
            rst += 1
            continue
        key, sym, nbits, bits = entry
        code, length = codes[key][sym]
        writer.write(code, length)
        if nbits:
            writer.write(bits, nbits)
    writer.pad_to_byte()
    out += writer.buf
    out += bytes((0xFF, _EOI))
    return bytes(out)


# ---------------------------------------------------------------------------
# Pixel decoding
# ---------------------------------------------------------------------------


def _idct_basis() -> np.ndarray:
    u = np.arange(8, dtype=np.float64)
    scale = np.where(u == 0, 1.0 / math.sqrt(2.0), 1.0)
    x = np.arange(8, dtype=np.float64)
    return 0.5 * scale[:, None] * np.cos((2.0 * x[None, :] + 1.0) * u[:, None] * math.pi / 16.0)


_IDCT_M = _idct_basis()


def decode_pixels(image: JpegImage) -> PixelPlane:
    """Decode the luminance plane for quality measurement.

    Dequantizes, applies the exact floating-point 8x8 inverse DCT, level
    shifts by +128, rounds, clamps to 0..255, and crops block padding.
    Chroma components are ignored.
    """
    frame = image.frame
    comp = frame.components[0]
    plane = image.coeff_planes[0]
    qt = np.asarray(image.quant_tables[comp.quant_id].entries, dtype=np.float64)
    deq = plane.blocks.astype(np.float64) * qt
    nat = np.empty_like(deq)
    nat[:, _ZZ_TO_NAT] = deq
    blocks = nat.reshape(-1, 8, 8)
    pix = np.einsum("vy,nvu,ux->nyx", _IDCT_M, blocks, _IDCT_M, optimize=True)
    pix = np.clip(np.rint(pix + 128.0), 0.0, 255.0).astype(np.uint8)
    grid = (
        pix.reshape(plane.blocks_high, plane.blocks_wide, 8, 8)
        .transpose(0, 2, 1, 3)
        .reshape(plane.blocks_high * 8, plane.blocks_wide * 8)
    )
    hmax = max(c.h_sampling for c in frame.components)
    vmax = max(c.v_sampling for c in frame.components)
    w = -((-frame.width * comp.h_sampling) // hmax)
    h = -((-frame.height * comp.v_sampling) // vmax)
    return PixelPlane(width=w, height=h, samples=grid[:h, :w])
