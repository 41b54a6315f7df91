"""Modelos de dados do workbench."""

from mcdnn.models.arch import ArchSpec, Conv, Full, LayerShape, MaxPool, ShapePlan
from mcdnn.models.dataset import Dataset, Sample
from mcdnn.models.evaluation import ClassScores, EnsembleSpec, EvalReport, LatencyBreakdown
from mcdnn.models.image import GrayImage, PipelineOrder, PreprocessConfig, SkewReport
from mcdnn.models.training import DeformParams, EpochLog, Hyperparams, TrainingLog

__all__ = [
    "ArchSpec", "Conv", "Full", "LayerShape", "MaxPool", "ShapePlan",
    "Dataset", "Sample",
    "ClassScores", "EnsembleSpec", "EvalReport", "LatencyBreakdown",
    "GrayImage", "PipelineOrder", "PreprocessConfig", "SkewReport",
    "DeformParams", "EpochLog", "Hyperparams", "TrainingLog",
]
