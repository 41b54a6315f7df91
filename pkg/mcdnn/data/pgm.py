"""Leitura e escrita de imagens PGM binárias (P5) de 8 bits."""

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from mcdnn.errors import ImageReadError
from mcdnn.models.image import GrayImage


def read_pgm(path) -> GrayImage:
    try:
        with Image.open(path) as im:
            if im.mode != "L":
                raise ImageReadError(f"{path}: esperado PGM de 8 bits, modo {im.mode}")
            return GrayImage.from_array(np.asarray(im, dtype=np.uint8))
    except (OSError, UnidentifiedImageError) as e:
        raise ImageReadError(f"não foi possível ler {path}: {e}") from e


def write_pgm(path, img: GrayImage) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(img.to_array()).save(path, format="PPM")
    return str(path)


def read_corpus_dir(directory) -> list[GrayImage]:
    """Todas as imagens *.pgm de uma pasta, por ordem de nome."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ImageReadError(f"pasta não encontrada: {directory}")
    return [read_pgm(p) for p in sorted(directory.glob("*.pgm"))]
