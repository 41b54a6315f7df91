"""Deteção de desvios entre dois pipelines de pré-processamento."""

import logging
from typing import Sequence

import numpy as np

from mcdnn.errors import EmptyDatasetError
from mcdnn.imageprep import preprocess
from mcdnn.models.image import GrayImage, PreprocessConfig, SkewReport

logger = logging.getLogger(__name__)


class SkewDetector:
    """Aplica dois pipelines ao mesmo corpus e mede as diferenças pixel a pixel."""

    def compare(
        self, corpus: Sequence[GrayImage], a: PreprocessConfig, b: PreprocessConfig
    ) -> SkewReport:
        if not corpus:
            raise EmptyDatasetError("corpus vazio: nada para comparar")

        per_image: list[float] = []
        identical = 0
        max_pixel = 0

        for img in corpus:
            out_a = preprocess(img, a)
            out_b = preprocess(img, b)
            if out_a.pixels == out_b.pixels:
                identical += 1
                per_image.append(0.0)
                continue
            diff = np.abs(out_a.to_array().astype(np.int16) - out_b.to_array().astype(np.int16))
            per_image.append(float(diff.mean()))
            max_pixel = max(max_pixel, int(diff.max()))

        report = SkewReport(
            per_image=per_image,
            mean_diff=float(np.mean(per_image)),
            max_diff=float(np.max(per_image)),
            max_pixel_diff=max_pixel,
            identical_count=identical,
            corpus_size=len(corpus),
            config_a=a.to_dict(),
            config_b=b.to_dict(),
        )
        logger.info(
            f"[skew] {len(corpus)} imagens, {identical} idênticas, "
            f"diferença média {report.mean_diff:.6g}"
        )
        return report


def compare_pipelines(
    corpus: Sequence[GrayImage], a: PreprocessConfig, b: PreprocessConfig
) -> SkewReport:
    return SkewDetector().compare(corpus, a, b)
