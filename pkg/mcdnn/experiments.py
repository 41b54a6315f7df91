"""Experiências repetidas à escala de secretária sobre glifos sintéticos.

- ensemble_benefit: o erro top-1 de um MCDNN de várias colunas fica abaixo do erro
  médio dos seus membros?
- skew_reproduction: uma coluna treinada com uma ordem de pré-processamento perde
  exatidão quando o teste usa a ordem inversa?
"""

import json
import logging
from dataclasses import dataclass, field, asdict
from typing import Optional

from mcdnn.arch_dsl import parse_arch
from mcdnn.data.synth import synth_glyphs
from mcdnn.ensemble import evaluate
from mcdnn.imageprep import preprocess_dataset
from mcdnn.models.dataset import Dataset
from mcdnn.models.evaluation import EnsembleSpec
from mcdnn.models.image import PipelineOrder, PreprocessConfig
from mcdnn.models.training import DeformParams, Hyperparams
from mcdnn.skew_detector import compare_pipelines
from mcdnn.trainer import top1_error, train_column, train_columns
from mcdnn.utils import fmt6

logger = logging.getLogger(__name__)

DESK_ARCH = "48x48-10C3-MP2-20C2-MP2-40C2-MP2-80C2-MP2-100N-20N"


def desk_hyperparams(**overrides) -> Hyperparams:
    """SGD por amostra com taxa maior que a de produção; as redes aqui são pequenas."""
    values = dict(epochs=8, lr0=0.01, lr_decay=0.95, deform=DeformParams.for_canvas(48, 40))
    values.update(overrides)
    return Hyperparams(**values)


@dataclass
class DrawResult:
    seed: int
    value: float
    baseline: float
    passed: bool
    details: dict = field(default_factory=dict)


@dataclass
class ExperimentResult:
    name: str
    draws: list[DrawResult] = field(default_factory=list)
    required: int = 9
    extra: dict = field(default_factory=dict)

    @property
    def passes(self) -> int:
        return sum(1 for d in self.draws if d.passed)

    @property
    def passed(self) -> bool:
        return self.passes >= self.required and self.extra.get("precondition", True)

    def to_dict(self) -> dict:
        data = asdict(self)
        data.update(passes=self.passes, passed=self.passed)
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"experiment={self.name}"]
        for d in self.draws:
            lines.append(
                f"draw seed={d.seed} value={fmt6(d.value)} baseline={fmt6(d.baseline)} "
                f"passed={'yes' if d.passed else 'no'}"
            )
        for key, value in sorted(self.extra.items()):
            lines.append(f"{key}={fmt6(value) if isinstance(value, float) else value}")
        lines.append(f"passes={self.passes}/{len(self.draws)} required={self.required}")
        lines.append(f"passed={'yes' if self.passed else 'no'}")
        return "\n".join(lines) + "\n"


def desk_task(
    classes: int, train_per_class: int, test_per_class: int, seed: int, writers: int = 10
) -> tuple[Dataset, Dataset]:
    """Glifos em bruto: as primeiras `train_per_class` amostras de cada classe vão para treino."""
    per_class = train_per_class + test_per_class
    ds = synth_glyphs(classes, per_class, writers, seed)
    train_idx, test_idx = [], []
    for i in range(len(ds)):
        (train_idx if i % per_class < train_per_class else test_idx).append(i)
    return ds.subset(train_idx), ds.subset(test_idx)


def _empty_like(ds: Dataset) -> Dataset:
    return Dataset([], ds.class_count, ds.class_names, dict(ds.metadata))


def ensemble_benefit(
    draws: int = 10,
    classes: int = 20,
    train_per_class: int = 200,
    test_per_class: int = 50,
    columns: int = 4,
    arch: str = DESK_ARCH,
    hp: Optional[Hyperparams] = None,
    cfg: Optional[PreprocessConfig] = None,
    base_seed: int = 0,
    threads: int = 1,
    required: int = 9,
) -> ExperimentResult:
    spec = parse_arch(arch)
    hp = hp or desk_hyperparams()
    cfg = cfg or PreprocessConfig(box=40, canvas=spec.input_h)
    result = ExperimentResult(name="ensemble-benefit", required=required)

    for draw in range(draws):
        seed = base_seed + draw
        raw_train, raw_test = desk_task(classes, train_per_class, test_per_class, seed)
        train = preprocess_dataset(raw_train, cfg)
        test = preprocess_dataset(raw_test, cfg)
        seeds = [1000 * seed + i + 1 for i in range(columns)]
        trained = train_columns([spec] * columns, seeds, train, _empty_like(train), hp, threads, cfg.fill)

        members = {f"s{s}": r.column for s, r in zip(seeds, trained)}
        report = evaluate(members, EnsembleSpec(tuple(members), name=f"draw{draw}"), test, ks=(1,), threads=threads)
        passed = report.top1_error < report.mean_member_top1
        result.draws.append(DrawResult(
            seed=seed,
            value=report.top1_error,
            baseline=report.mean_member_top1,
            passed=passed,
            details={m: report.member_error(m) for m in report.member_ids},
        ))
        logger.info(
            f"[ensemble-benefit seed={seed}] ensemble {report.top1_error:.6g} "
            f"vs média dos membros {report.mean_member_top1:.6g}"
        )
    return result


def skew_reproduction(
    draws: int = 10,
    classes: int = 20,
    train_per_class: int = 200,
    test_per_class: int = 50,
    arch: str = DESK_ARCH,
    hp: Optional[Hyperparams] = None,
    train_order: PipelineOrder = PipelineOrder.CONTRAST_THEN_SCALE,
    base_seed: int = 0,
    required: int = 9,
) -> ExperimentResult:
    spec = parse_arch(arch)
    hp = hp or desk_hyperparams()
    matched_cfg = PreprocessConfig(box=40, canvas=spec.input_h, order=train_order)
    other = next(o for o in PipelineOrder if o is not train_order)
    skewed_cfg = PreprocessConfig(box=40, canvas=spec.input_h, order=other)
    result = ExperimentResult(name="skew", required=required)

    for draw in range(draws):
        seed = base_seed + draw
        raw_train, raw_test = desk_task(classes, train_per_class, test_per_class, seed)
        if draw == 0:
            skew = compare_pipelines([s.image for s in raw_test.samples], matched_cfg, skewed_cfg)
            result.extra.update(mean_diff=skew.mean_diff, precondition=skew.mean_diff > 0)

        train = preprocess_dataset(raw_train, matched_cfg)
        trained = train_column(spec, train, _empty_like(train), hp, seed=1000 * seed + 1, fill=matched_cfg.fill)
        matched = top1_error(trained.column, preprocess_dataset(raw_test, matched_cfg))
        skewed = top1_error(trained.column, preprocess_dataset(raw_test, skewed_cfg))
        result.draws.append(DrawResult(seed=seed, value=skewed, baseline=matched, passed=skewed >= matched))
        logger.info(f"[skew seed={seed}] teste {other.value}: {skewed:.6g}, teste igual ao treino: {matched:.6g}")
    return result
