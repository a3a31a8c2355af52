"""QIM steganography for baseline JPEG with a per-block adaptive step."""

from .huffman import HuffmanTable
from .jpeg_codec import (
    CoeffPlane,
    ComponentSpec,
    EncodingOverflow,
    FrameHeader,
    JpegImage,
    MalformedStream,
    PixelPlane,
    QuantTable,
    UnsupportedJpeg,
    ZIGZAG_TO_NATURAL,
    decode_pixels,
    parse,
    serialize,
    zigzag_to_natural,
)
from .metrics import (
    DimensionMismatch,
    Histogram,
    QualityReport,
    RangeMismatch,
    ac_histogram,
    chi_square,
    l1_distance,
    mse,
    psnr,
    quality_report,
)
from .pipeline import (
    EmbedReport,
    InsufficientCapacity,
    LengthOutOfRange,
    capacity,
    embed_message,
    embed_message_fixed_q,
    extract_message,
    extract_message_fixed_q,
)
from .qim import (
    StegoParams,
    embed_block,
    embed_coeff,
    extract_block,
    extract_coeff,
    select_step,
)

__version__ = "0.1.0"

__all__ = [
    "CoeffPlane",
    "ComponentSpec",
    "DimensionMismatch",
    "EmbedReport",
    "EncodingOverflow",
    "FrameHeader",
    "Histogram",
    "HuffmanTable",
    "InsufficientCapacity",
    "JpegImage",
    "LengthOutOfRange",
    "MalformedStream",
    "PixelPlane",
    "QualityReport",
    "QuantTable",
    "RangeMismatch",
    "StegoParams",
    "UnsupportedJpeg",
    "ZIGZAG_TO_NATURAL",
    "ac_histogram",
    "capacity",
    "chi_square",
    "decode_pixels",
    "embed_block",
    "embed_coeff",
    "embed_message",
    "embed_message_fixed_q",
    "extract_block",
    "extract_coeff",
    "extract_message",
    "extract_message_fixed_q",
    "l1_distance",
    "mse",
    "parse",
    "psnr",
    "quality_report",
    "select_step",
    "serialize",
    "zigzag_to_natural",
]
