#!/usr/bin/env python3
"""Write the standard 512x512 grayscale QF-95 cover images into a directory.

The covers come from scikit-image's bundled sample set and are compressed by
Pillow, i.e. an encoder independent of this package, which is what the codec
and pipeline tests expect of a cover.
"""

import argparse
from pathlib import Path

import numpy as np
from PIL import Image
import skimage.data


def cover_arrays() -> dict[str, np.ndarray]:
    return {
        "camera": skimage.data.camera(),
        "moon": skimage.data.moon(),
        "astronaut_gray": np.asarray(Image.fromarray(skimage.data.astronaut()).convert("L")),
    }


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", help="output directory for the .jpg covers")
    ap.add_argument("--quality", type=int, default=95, help="JPEG quality factor (default 95)")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, arr in cover_arrays().items():
        path = out / f"{name}.jpg"
        Image.fromarray(arr).save(path, "JPEG", quality=args.quality)
        print(f"wrote {path} ({arr.shape[1]}x{arr.shape[0]}, QF {args.quality})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
