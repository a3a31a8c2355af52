import io
import sys
from pathlib import Path

import hypothesis
import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

hypothesis.settings.register_profile("default", deadline=None)
hypothesis.settings.load_profile("default")

COVER_QUALITY = 95


def _cover_arrays():
    from PIL import Image
    import skimage.data as data

    return {
        "camera": data.camera(),
        "moon": data.moon(),
        "astronaut_gray": np.asarray(Image.fromarray(data.astronaut()).convert("L")),
    }


@pytest.fixture(scope="session")
def cover_dir(tmp_path_factory) -> Path:
    """Three 512x512 grayscale QF-95 covers written by an independent encoder."""
    from PIL import Image

    d = tmp_path_factory.mktemp("covers")
    for name, arr in _cover_arrays().items():
        Image.fromarray(arr).save(d / f"{name}.jpg", "JPEG", quality=COVER_QUALITY)
    return d


@pytest.fixture(scope="session")
def cover_files(cover_dir) -> dict[str, bytes]:
    return {p.stem: p.read_bytes() for p in sorted(cover_dir.glob("*.jpg"))}


@pytest.fixture(scope="session")
def parsed_covers(cover_files):
    from qimstego import parse

    return {name: parse(data) for name, data in cover_files.items()}


@pytest.fixture(scope="session")
def camera_jpeg(cover_files) -> bytes:
    return cover_files["camera"]


def pil_encode_gray(arr: np.ndarray, quality: int = COVER_QUALITY, **save_kw) -> bytes:
    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, "JPEG", quality=quality, **save_kw)
    return buf.getvalue()


def pil_decode(data: bytes) -> np.ndarray:
    from PIL import Image

    img = Image.open(io.BytesIO(data))
    img.load()
    return np.asarray(img)
