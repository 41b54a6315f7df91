"""Multi-column DNN: média das saídas, predição top-k e relatórios de avaliação."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Mapping, Optional, Sequence

import numpy as np

from mcdnn.errors import ClassCountMismatchError, EmptyDatasetError
from mcdnn.imageprep import normalize_for_net
from mcdnn.models.dataset import Dataset
from mcdnn.models.evaluation import ClassScores, EnsembleSpec, EvalReport, LatencyBreakdown
from mcdnn.nn.column import Column, forward_column

logger = logging.getLogger(__name__)


def average_scores(members: Sequence[ClassScores]) -> ClassScores:
    """Média aritmética elemento a elemento.

    Os membros são ordenados por classe antes da soma, pelo que o resultado não
    depende da ordem dos membros; membros todos iguais devolvem o próprio vetor.
    """
    if not members:
        raise ValueError("lista de membros vazia")
    length = len(members[0])
    if any(len(m) != length for m in members):
        raise ValueError(f"membros com comprimentos diferentes: {[len(m) for m in members]}")
    first = np.asarray(members[0].values, dtype=np.float64)
    if all(np.array_equal(first, m.values) for m in members[1:]):
        return ClassScores(first.copy())
    stacked = np.stack([np.asarray(m.values, dtype=np.float64) for m in members])
    stacked.sort(axis=0)
    return ClassScores(stacked.sum(axis=0) / len(members))


def predict_topk(scores: ClassScores, k: int) -> list[int]:
    """k índices por ordem decrescente de score; empates pelo índice mais baixo."""
    values = np.asarray(scores.values)
    if not 1 <= k <= values.shape[0]:
        raise ValueError(f"k={k} fora de 1..{values.shape[0]}")
    order = np.argsort(-values, kind="stable")
    return [int(i) for i in order[:k]]


def _label_rank(values: np.ndarray, label: int) -> int:
    """Posição (0-based) do rótulo na ordenação de predict_topk."""
    target = values[label]
    better = np.count_nonzero(values > target)
    ties_before = np.count_nonzero(values[:label] == target)
    return int(better + ties_before)


def _check_members(columns: Mapping[str, Column], member_ids: Sequence[str]) -> int:
    missing = [m for m in member_ids if m not in columns]
    if missing:
        raise KeyError(f"colunas desconhecidas no ensemble: {missing}")
    counts = {columns[m].class_count for m in member_ids}
    if len(counts) != 1:
        raise ClassCountMismatchError(f"membros com contagens de classes diferentes: {sorted(counts)}")
    return counts.pop()


class _Accumulator:
    """Contagens de erro por ensemble e por membro; junta-se de forma associativa."""

    def __init__(self, ensembles: Sequence[EnsembleSpec], members: Sequence[str], ks: Sequence[int]):
        self.ks = list(ks)
        self.ensemble_counts = {e.name: {k: 0 for k in ks} for e in ensembles}
        self.member_counts = {m: {k: 0 for k in ks} for m in members}
        self.ensemble_seconds = {e.name: 0.0 for e in ensembles}
        self.member_seconds = {m: 0.0 for m in members}
        self.sample_seconds = 0.0

    def merge(self, other: "_Accumulator") -> "_Accumulator":
        for name, counts in other.ensemble_counts.items():
            for k, v in counts.items():
                self.ensemble_counts[name][k] += v
            self.ensemble_seconds[name] += other.ensemble_seconds[name]
        for member, counts in other.member_counts.items():
            for k, v in counts.items():
                self.member_counts[member][k] += v
            self.member_seconds[member] += other.member_seconds[member]
        self.sample_seconds += other.sample_seconds
        return self


def _evaluate_chunk(
    columns: Mapping[str, Column],
    ensembles: Sequence[EnsembleSpec],
    members: Sequence[str],
    dataset: Dataset,
    indices: Sequence[int],
    ks: Sequence[int],
) -> _Accumulator:
    acc = _Accumulator(ensembles, members, ks)
    for index in indices:
        sample = dataset.samples[index]
        x = normalize_for_net(sample.image)
        scores: dict[str, ClassScores] = {}
        averaged: dict[str, ClassScores] = {}

        sample_started = time.perf_counter()
        for member in members:
            column = columns[member]
            started = time.perf_counter()
            scores[member] = forward_column(column, x)
            acc.member_seconds[member] += time.perf_counter() - started
        for ensemble in ensembles:
            if len(ensemble.member_ids) == 1:
                averaged[ensemble.name] = scores[ensemble.member_ids[0]]
                continue
            started = time.perf_counter()
            averaged[ensemble.name] = average_scores([scores[m] for m in ensemble.member_ids])
            acc.ensemble_seconds[ensemble.name] += time.perf_counter() - started
        acc.sample_seconds += time.perf_counter() - sample_started

        for member in members:
            rank = _label_rank(scores[member].values, sample.label)
            for k in ks:
                if rank >= k:
                    acc.member_counts[member][k] += 1
        for ensemble in ensembles:
            rank = _label_rank(averaged[ensemble.name].values, sample.label)
            for k in ks:
                if rank >= k:
                    acc.ensemble_counts[ensemble.name][k] += 1
    return acc


def evaluate_many(
    columns: Mapping[str, Column],
    ensembles: Sequence[EnsembleSpec],
    dataset: Dataset,
    ks: Sequence[int] = (1, 10),
    threads: int = 1,
) -> list[EvalReport]:
    """Avalia vários ensembles que partilham membros, com uma passagem por membro e amostra."""
    if len(dataset) == 0:
        raise EmptyDatasetError("dataset de avaliação vazio")
    members: list[str] = []
    for ensemble in ensembles:
        _check_members(columns, ensemble.member_ids)
        for m in ensemble.member_ids:
            if m not in members:
                members.append(m)
    class_count = _check_members(columns, members)
    if dataset.class_count != class_count:
        raise ClassCountMismatchError(
            f"dataset com {dataset.class_count} classes, colunas com {class_count}"
        )
    if any(k < 1 for k in ks):
        raise ValueError(f"k tem de ser >= 1, recebido {sorted(ks)}")
    ks = sorted({1, *ks})
    if ks[-1] > class_count:
        raise ValueError(f"k={ks[-1]} maior que o número de classes ({class_count})")

    indices = list(range(len(dataset)))
    if threads <= 1:
        acc = _evaluate_chunk(columns, ensembles, members, dataset, indices, ks)
    else:
        chunks = [indices[i::threads] for i in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(
                lambda chunk: _evaluate_chunk(columns, ensembles, members, dataset, chunk, ks),
                chunks,
            ))
        acc = partials[0]
        for partial in partials[1:]:
            acc.merge(partial)

    n = len(dataset)
    reports = []
    for ensemble in ensembles:
        member_ms = {m: 1000.0 * acc.member_seconds[m] / n for m in ensemble.member_ids}
        # passagens dos membros mais a média, medidas com o mesmo relógio
        ensemble_ms = sum(member_ms.values()) + 1000.0 * acc.ensemble_seconds[ensemble.name] / n
        reports.append(EvalReport(
            n_samples=n,
            member_ids=list(ensemble.member_ids),
            topk_counts=dict(acc.ensemble_counts[ensemble.name]),
            mean_latency_ms=ensemble_ms,
            member_latency_ms=member_ms,
            member_topk_counts={m: dict(acc.member_counts[m]) for m in ensemble.member_ids},
            name=ensemble.name,
            metadata={"class_count": class_count, "wall_ms": 1000.0 * acc.sample_seconds / n},
        ))
        logger.info(
            f"[{ensemble.name}] top-1 {reports[-1].top1_error:.6g} "
            f"({acc.ensemble_counts[ensemble.name][1]}/{n}), {ensemble_ms:.4g} ms/caractere"
        )
    return reports


def evaluate(
    columns: Mapping[str, Column],
    spec: EnsembleSpec,
    dataset: Dataset,
    ks: Sequence[int] = (1, 10),
    threads: int = 1,
) -> EvalReport:
    return evaluate_many(columns, [spec], dataset, ks, threads)[0]


def latency_breakdown(report: EvalReport, tolerance: float = 0.10) -> LatencyBreakdown:
    """Verifica se a latência do ensemble é a soma das latências dos membros."""
    if report.mean_latency_ms is None:
        raise ValueError("relatório sem latências registadas")
    member_sum = sum(report.member_latency_ms[m] for m in report.member_ids)
    return LatencyBreakdown(report.mean_latency_ms, member_sum, tolerance)


def columns_by_name(columns: Sequence[Column]) -> dict[str, Column]:
    """Indexa colunas pelo nome; nomes repetidos recebem sufixo #n."""
    indexed: dict[str, Column] = {}
    for column in columns:
        name = column.name
        suffix = 2
        while name in indexed:
            name = f"{column.name}#{suffix}"
            suffix += 1
        indexed[name] = column
    return indexed


def bench(
    columns: Mapping[str, Column],
    spec: EnsembleSpec,
    dataset: Dataset,
    warmup: int = 5,
    limit: Optional[int] = None,
) -> tuple[EvalReport, LatencyBreakdown]:
    """Mede ms/caractere do ensemble e dos membros, depois de um aquecimento."""
    if len(dataset) == 0:
        raise EmptyDatasetError("dataset de benchmark vazio")
    warm = dataset.subset(range(min(warmup, len(dataset))))
    if len(warm):
        evaluate(columns, spec, warm, ks=(1,))
    measured = dataset if limit is None else dataset.subset(range(min(limit, len(dataset))))
    report = evaluate(columns, spec, measured, ks=(1,))
    return report, latency_breakdown(report)
