"""Command-line surface: embed, extract, analyze, experiment, recompress."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .jpeg_codec import (
    EncodingOverflow,
    MalformedStream,
    UnsupportedJpeg,
    decode_pixels,
    parse,
    serialize,
)
from .metrics import (
    DEFAULT_RANGE_HI,
    DEFAULT_RANGE_LO,
    DimensionMismatch,
    QualityReport,
    RangeMismatch,
    ac_histogram,
    chi_square,
    psnr,
    quality_report,
)
from .pipeline import (
    InsufficientCapacity,
    LengthOutOfRange,
    capacity,
    embed_message,
    embed_message_fixed_q,
    extract_message,
    extract_message_fixed_q,
)
from .qim import StegoParams

# Domain-specific exit codes start at 10 so they never collide with
# argparse's usage-error exit status 2.
EXIT_MALFORMED = 10
EXIT_UNSUPPORTED = 11
EXIT_OVERFLOW = 12
EXIT_NO_CAPACITY = 13
EXIT_NO_MESSAGE = 14
EXIT_METRIC_MISMATCH = 15


def _params(args: argparse.Namespace) -> StegoParams:
    return StegoParams(split_index=args.split_index, q_min=args.q_min, q_max=args.q_max)


def _fmt(v: float) -> str:
    return "inf" if v == float("inf") else f"{v:.6f}"


def _print_report(report) -> None:
    print(f"bits embedded: {report.bits_embedded}")
    print(f"capacity: {report.capacity_bits} bits")
    print(f"blocks used: {report.blocks_used}")
    hist = " ".join(f"q={q}:{n}" for q, n in report.step_histogram.items())
    print(f"step histogram: {hist if hist else '(empty)'}")


def _cmd_embed(args: argparse.Namespace) -> int:
    params = _params(args)
    cover = parse(Path(args.cover).read_bytes())
    payload = Path(args.message).read_bytes()
    if args.fixed_q is not None:
        stego, report = embed_message_fixed_q(cover, payload, args.fixed_q, params)
    else:
        stego, report = embed_message(cover, payload, params)
    data = serialize(stego)
    Path(args.output).write_bytes(data)
    _print_report(report)
    return 0


def _cmd_extract(args: argparse.Namespace) -> int:
    params = _params(args)
    stego = parse(Path(args.stego).read_bytes())
    if args.fixed_q is not None:
        payload = extract_message_fixed_q(stego, args.fixed_q, params)
    else:
        payload = extract_message(stego, params)
    Path(args.output).write_bytes(payload)
    print(f"recovered {len(payload)} bytes")
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    cover = parse(Path(args.cover).read_bytes())
    stego = parse(Path(args.stego).read_bytes())
    lo, hi = args.range_lo, args.range_hi
    report = quality_report(cover, stego, lo, hi)
    print(QualityReport.csv_header())
    print(report.csv_row())
    prefix = args.hist_out
    Path(f"{prefix}_cover.csv").write_text(ac_histogram(cover, lo, hi).to_csv(), encoding="utf-8")
    Path(f"{prefix}_stego.csv").write_text(ac_histogram(stego, lo, hi).to_csv(), encoding="utf-8")
    return 0


@dataclass(frozen=True)
class ExperimentRow:
    image_id: str
    capacity_bits: int
    psnr_adaptive_db: float
    psnr_fixed_db: float
    chi2_adaptive: float
    chi2_fixed: float
    mean_q: float

    def csv_row(self) -> str:
        return ",".join(
            (
                self.image_id,
                str(self.capacity_bits),
                _fmt(self.psnr_adaptive_db),
                _fmt(self.psnr_fixed_db),
                _fmt(self.chi2_adaptive),
                _fmt(self.chi2_fixed),
                _fmt(self.mean_q),
            )
        )


_EXPERIMENT_HEADER = (
    "image_id,capacity_bits,psnr_adaptive_db,psnr_fixed_db,chi2_adaptive,chi2_fixed,mean_q"
)


def _cmd_experiment(args: argparse.Namespace) -> int:
    params = _params(args)
    lo, hi = args.range_lo, args.range_hi
    capacities = [int(c) for c in args.capacities.split(",") if c]
    if not capacities or any(c < 32 for c in capacities):
        print("error: capacities must be integers >= 32 (the length header)", file=sys.stderr)
        return 2
    corpus = Path(args.corpus)
    paths = sorted(p for p in corpus.iterdir() if p.suffix.lower() in (".jpg", ".jpeg"))
    rows: list[ExperimentRow] = []
    warnings: list[str] = []
    processed = 0
    for i_img, path in enumerate(paths):
        try:
            cover = parse(path.read_bytes())
        except (MalformedStream, UnsupportedJpeg) as exc:
            warnings.append(f"{path.name}: {exc}")
            continue
        cap = capacity(cover, params)
        cover_pix = decode_pixels(cover)
        cover_hist = ac_histogram(cover, lo, hi)
        for i_cap, cap_bits in enumerate(capacities):
            if cap_bits > cap:
                warnings.append(f"{path.name}: requested {cap_bits} bits exceeds capacity {cap}")
                continue
            nbytes = (cap_bits - 32) // 8
            # per-row RNG stream derived from (seed, image, capacity) indices
            payload = np.random.default_rng([args.seed, i_img, i_cap]).bytes(nbytes)

            stego_a, report = embed_message(cover, payload, params)
            img_a = parse(serialize(stego_a))
            stego_f, _ = embed_message_fixed_q(cover, payload, args.fixed_q, params)
            img_f = parse(serialize(stego_f))
            rows.append(
                ExperimentRow(
                    image_id=path.name,
                    capacity_bits=cap_bits,
                    psnr_adaptive_db=psnr(cover_pix, decode_pixels(img_a)),
                    psnr_fixed_db=psnr(cover_pix, decode_pixels(img_f)),
                    chi2_adaptive=chi_square(cover_hist, ac_histogram(img_a, lo, hi)),
                    chi2_fixed=chi_square(cover_hist, ac_histogram(img_f, lo, hi)),
                    mean_q=report.mean_step,
                )
            )
        processed += 1
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    if processed == 0:
        print("error: no readable cover images in the corpus", file=sys.stderr)
        return 1
    rows.sort(key=lambda r: (r.image_id, r.capacity_bits))
    lines = [f"# seed={args.seed}"]
    lines += [f"# warning: {w}" for w in warnings]
    lines.append(_EXPERIMENT_HEADER)
    lines += [r.csv_row() for r in rows]
    Path(args.output).write_text("\n".join(lines) + "\n", encoding="utf-8")
    for cap_bits in sorted({r.capacity_bits for r in rows}):
        group = [r.psnr_adaptive_db for r in rows if r.capacity_bits == cap_bits]
        print(f"mean adaptive PSNR at {cap_bits} bits: {_fmt(sum(group) / len(group))} dB")
    print(f"wrote {len(rows)} rows to {args.output}")
    return 0


def _cmd_recompress(args: argparse.Namespace) -> int:
    original = parse(Path(args.input).read_bytes())
    data = serialize(original)
    Path(args.output).write_bytes(data)
    again = parse(data)
    ok = (
        original.frame == again.frame
        and original.quant_tables == again.quant_tables
        and original.restart_interval == again.restart_interval
        and all(
            np.array_equal(a.blocks, b.blocks)
            for a, b in zip(original.coeff_planes, again.coeff_planes)
        )
    )
    if ok:
        print("lossless: coefficients, quantization tables, frame, and restart interval identical")
        return 0
    print("MISMATCH after transcoding", file=sys.stderr)
    return 1


def _add_param_flags(p: argparse.ArgumentParser, fixed_q_default: int | None = None) -> None:
    p.add_argument("--split-index", type=int, default=21, help="first embedding-area zigzag index (default 21)")
    p.add_argument("--q-min", type=int, default=2, help="smallest allowed step (even, default 2)")
    p.add_argument("--q-max", type=int, default=32, help="largest allowed step (even, default 32)")
    if fixed_q_default is not None:
        p.add_argument("--fixed-q", type=int, default=fixed_q_default, help="constant step for the baseline pipeline (default %(default)s)")
    else:
        p.add_argument("--fixed-q", type=int, default=None, help="bypass the adaptive rule and use this constant step")


def _add_range_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--range-lo", type=int, default=DEFAULT_RANGE_LO, help="histogram lower bound (default %(default)s)")
    p.add_argument("--range-hi", type=int, default=DEFAULT_RANGE_HI, help="histogram upper bound (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qimstego",
        description="Hide and recover messages in the quantized DCT coefficients of baseline JPEGs.",
        epilog=(
            "exit codes: 10 malformed JPEG, 11 unsupported JPEG mode, 12 coefficient overflow, "
            "13 insufficient capacity, 14 no message found / wrong parameters, 15 metric mismatch"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="embed a message file into a JPEG cover")
    p.add_argument("cover")
    p.add_argument("message")
    p.add_argument("output")
    _add_param_flags(p)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("extract", help="recover an embedded message from a stego JPEG")
    p.add_argument("stego")
    p.add_argument("output")
    _add_param_flags(p)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("analyze", help="PSNR and histogram distances between cover and stego")
    p.add_argument("cover")
    p.add_argument("stego")
    p.add_argument("hist_out", help="prefix for <prefix>_cover.csv and <prefix>_stego.csv")
    _add_range_flags(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("experiment", help="capacity sweep over a corpus, adaptive vs fixed step")
    p.add_argument("corpus", help="directory of cover JPEGs")
    p.add_argument("output", help="output CSV path")
    p.add_argument("--capacities", default="10000,25000,50000", help="comma-separated bit counts")
    p.add_argument("--seed", type=int, default=20210, help="payload RNG seed, recorded in the CSV")
    _add_param_flags(p, fixed_q_default=8)
    _add_range_flags(p)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("recompress", help="transcoding-identity check: parse, re-serialize, verify")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=_cmd_recompress)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MalformedStream as exc:
        print(f"error: malformed JPEG: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except UnsupportedJpeg as exc:
        print(f"error: unsupported JPEG: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except EncodingOverflow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except InsufficientCapacity as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CAPACITY
    except LengthOutOfRange as exc:
        print(f"error: no message found or wrong parameters: {exc}", file=sys.stderr)
        return EXIT_NO_MESSAGE
    except (DimensionMismatch, RangeMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_METRIC_MISMATCH
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
