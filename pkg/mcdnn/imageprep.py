"""Pré-processamento determinístico de caracteres isolados.

Todas as operações são funções puras; o arredondamento é sempre metade para cima
em precisão dupla, e o redimensionamento usa a convenção de centro de pixel com
coordenadas saturadas nas margens.
"""

import logging

import numpy as np

from mcdnn.models.dataset import Dataset
from mcdnn.models.image import GrayImage, PipelineOrder, PreprocessConfig
from mcdnn.utils import to_uint8

logger = logging.getLogger(__name__)


def maximize_contrast(img: GrayImage) -> GrayImage:
    """Estica as intensidades para 0..255; imagens constantes passam inalteradas."""
    arr = img.to_array().astype(np.float64)
    lo, hi = arr.min(), arr.max()
    if hi == lo:
        return img
    return GrayImage.from_array(to_uint8((arr - lo) * 255.0 / (hi - lo)))


def _sample_axis(in_size: int, out_size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    dst = np.arange(out_size, dtype=np.float64)
    src = (dst + 0.5) * (in_size / out_size) - 0.5
    src = np.clip(src, 0.0, in_size - 1)
    lo = np.floor(src).astype(np.intp)
    hi = np.minimum(lo + 1, in_size - 1)
    frac = src - lo
    return lo, hi, frac


def bilinear_resize(img: GrayImage, out_w: int, out_h: int) -> GrayImage:
    if out_w < 1 or out_h < 1:
        raise ValueError(f"dimensões de saída inválidas: {out_w}x{out_h}")
    arr = img.to_array().astype(np.float64)
    x0, x1, fx = _sample_axis(img.width, out_w)
    y0, y1, fy = _sample_axis(img.height, out_h)

    fx = fx[np.newaxis, :]
    fy = fy[:, np.newaxis]
    top = (1.0 - fx) * arr[y0][:, x0] + fx * arr[y0][:, x1]
    bottom = (1.0 - fx) * arr[y1][:, x0] + fx * arr[y1][:, x1]
    out = (1.0 - fy) * top + fy * bottom
    return GrayImage.from_array(to_uint8(out))


def _scaled_side(side: int, box: int, biggest: int) -> int:
    # round_half_up(side * box / biggest) em aritmética inteira exata
    return max(1, (2 * side * box + biggest) // (2 * biggest))


def scale_to_box(img: GrayImage, box: int) -> GrayImage:
    """Escala uniforme: a maior dimensão fica exatamente igual a `box`."""
    if box < 1:
        raise ValueError(f"box tem de ser >= 1, recebido {box}")
    biggest = max(img.width, img.height)
    out_w = box if img.width == biggest else _scaled_side(img.width, box, biggest)
    out_h = box if img.height == biggest else _scaled_side(img.height, box, biggest)
    return bilinear_resize(img, out_w, out_h)


def center_on_canvas(img: GrayImage, canvas: int, fill: int = 255) -> GrayImage:
    if img.width > canvas or img.height > canvas:
        raise ValueError(
            f"imagem {img.width}x{img.height} não cabe num canvas {canvas}x{canvas}"
        )
    out = np.full((canvas, canvas), fill, dtype=np.uint8)
    left = (canvas - img.width) // 2
    top = (canvas - img.height) // 2
    out[top:top + img.height, left:left + img.width] = img.to_array()
    return GrayImage.from_array(out)


def preprocess(img: GrayImage, cfg: PreprocessConfig) -> GrayImage:
    """Pipeline completo; a saída é sempre canvas×canvas."""
    if cfg.order is PipelineOrder.CONTRAST_THEN_SCALE:
        staged = scale_to_box(maximize_contrast(img), cfg.box)
    else:
        staged = maximize_contrast(scale_to_box(img, cfg.box))
    return center_on_canvas(staged, cfg.canvas, cfg.fill)


def normalize_for_net(img: GrayImage, dtype=np.float32) -> np.ndarray:
    """Tensor de um mapa (1, h, w) com valores p / 127.5 - 1 em [-1, 1]."""
    arr = img.to_array().astype(np.float64) / 127.5 - 1.0
    return arr.astype(dtype)[np.newaxis, :, :]


def preprocess_dataset(ds: Dataset, cfg: PreprocessConfig) -> Dataset:
    out = ds.map_images(lambda img: preprocess(img, cfg))
    out.metadata["preprocessing"] = cfg.to_dict()
    logger.debug(f"[preprocess] {len(ds)} imagens, ordem {cfg.order.value}")
    return out
