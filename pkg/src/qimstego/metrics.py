"""Quality and detectability metrics: PSNR, AC histograms, histogram distances."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .jpeg_codec import JpegImage, PixelPlane, decode_pixels

__all__ = [
    "DimensionMismatch",
    "RangeMismatch",
    "Histogram",
    "QualityReport",
    "psnr",
    "mse",
    "ac_histogram",
    "chi_square",
    "l1_distance",
    "quality_report",
]

DEFAULT_RANGE_LO = -60
DEFAULT_RANGE_HI = 60


class DimensionMismatch(Exception):
    """Pixel planes of different sizes cannot be compared."""


class RangeMismatch(Exception):
    """Histograms over different value ranges cannot be compared."""


@dataclass(frozen=True)
class Histogram:
    """Per-value counts of quantized AC coefficients over [lo, hi].

    Values outside the range land in the overflow bucket so total mass is
    preserved no matter the range.
    """

    lo: int
    hi: int
    counts: np.ndarray
    overflow: int

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError("histogram range is empty")
        arr = np.ascontiguousarray(np.asarray(self.counts, dtype=np.int64))
        if arr.shape != (self.hi - self.lo + 1,):
            raise ValueError(f"expected {self.hi - self.lo + 1} bins, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)

    def total(self) -> int:
        return int(self.counts.sum()) + self.overflow

    def to_csv(self) -> str:
        """Two-column CSV: one row per value plus a trailing overflow row."""
        lines = ["value,count"]
        for v, c in zip(range(self.lo, self.hi + 1), self.counts.tolist()):
            lines.append(f"{v},{c}")
        lines.append(f"overflow,{self.overflow}")
        return "\n".join(lines) + "\n"


def mse(a: PixelPlane, b: PixelPlane) -> float:
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatch(
            f"{a.width}x{a.height} vs {b.width}x{b.height} planes are not comparable"
        )
    d = a.samples.astype(np.float64) - b.samples.astype(np.float64)
    return float(np.mean(d * d))


def psnr(a: PixelPlane, b: PixelPlane) -> float:
    """Peak signal-to-noise ratio in dB; +inf for identical planes."""
    e = mse(a, b)
    if e == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 * 255.0 / e)


def ac_histogram(image: JpegImage, lo: int = DEFAULT_RANGE_LO, hi: int = DEFAULT_RANGE_HI) -> Histogram:
    """Histogram of every luma AC coefficient (zigzag 1..63, all blocks)."""
    if lo > hi:
        raise ValueError("histogram range is empty")
    vals = image.coeff_planes[0].blocks[:, 1:].ravel()
    in_range = (vals >= lo) & (vals <= hi)
    counts = np.bincount(
        (vals[in_range] - lo).astype(np.int64), minlength=hi - lo + 1
    ).astype(np.int64)
    return Histogram(lo=lo, hi=hi, counts=counts, overflow=int(vals.size - in_range.sum()))


def _check_ranges(h1: Histogram, h2: Histogram) -> None:
    if (h1.lo, h1.hi) != (h2.lo, h2.hi):
        raise RangeMismatch(
            f"[{h1.lo},{h1.hi}] vs [{h2.lo},{h2.hi}] histograms are not comparable"
        )


def chi_square(h1: Histogram, h2: Histogram) -> float:
    """Symmetrized chi-square distance over the in-range bins.

    Sum of (a-b)^2 / (a+b), skipping bins empty in both histograms; zero iff
    the binned counts are equal.
    """
    _check_ranges(h1, h2)
    a = h1.counts.astype(np.float64)
    b = h2.counts.astype(np.float64)
    s = a + b
    nz = s > 0
    d = a[nz] - b[nz]
    return float(np.sum(d * d / s[nz]))


def l1_distance(h1: Histogram, h2: Histogram) -> float:
    _check_ranges(h1, h2)
    return float(np.abs(h1.counts - h2.counts).sum())


@dataclass(frozen=True)
class QualityReport:
    psnr_db: float
    mse: float
    chi_square: float
    l1_distance: float

    def __post_init__(self) -> None:
        if (self.psnr_db == math.inf) != (self.mse == 0.0):
            raise ValueError("psnr must be +inf exactly when mse is zero")

    @staticmethod
    def csv_header() -> str:
        return "psnr_db,mse,chi_square,l1_distance"

    def csv_row(self) -> str:
        return ",".join(_fmt(v) for v in (self.psnr_db, self.mse, self.chi_square, self.l1_distance))


def _fmt(v: float) -> str:
    if v == math.inf:
        return "inf"
    return f"{v:.6f}"


def quality_report(
    cover: JpegImage,
    stego: JpegImage,
    lo: int = DEFAULT_RANGE_LO,
    hi: int = DEFAULT_RANGE_HI,
) -> QualityReport:
    """PSNR/MSE between decoded luminances plus histogram distances."""
    pa = decode_pixels(cover)
    pb = decode_pixels(stego)
    e = mse(pa, pb)
    ha = ac_histogram(cover, lo, hi)
    hb = ac_histogram(stego, lo, hi)
    return QualityReport(
        psnr_db=math.inf if e == 0.0 else 10.0 * math.log10(255.0 * 255.0 / e),
        mse=e,
        chi_square=chi_square(ha, hb),
        l1_distance=l1_distance(ha, hb),
    )
