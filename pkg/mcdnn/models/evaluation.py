"""Modelos de avaliação: scores por classe, ensembles e relatórios."""

import json
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from mcdnn.utils import fmt6


@dataclass(frozen=True, eq=False)
class ClassScores:
    """Vetor de probabilidades sobre C classes."""

    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def is_simplex(self, tol: float = 1e-6) -> bool:
        v = self.values
        return bool(np.all(v >= 0) and np.all(v <= 1) and abs(float(v.sum(dtype=np.float64)) - 1.0) <= tol)


@dataclass(frozen=True)
class EnsembleSpec:
    """Lista ordenada de membros (identificadores de coluna) de um MCDNN."""

    member_ids: tuple[str, ...]
    name: str = "mcdnn"

    def __post_init__(self):
        if not self.member_ids:
            raise ValueError("ensemble sem membros")
        if len(set(self.member_ids)) != len(self.member_ids):
            raise ValueError(f"membros duplicados no ensemble: {list(self.member_ids)}")


@dataclass
class EvalReport:
    """Erros top-1/top-k, latências e metadados de uma avaliação."""

    n_samples: int
    member_ids: list[str]
    topk_counts: dict[int, int] = field(default_factory=dict)
    mean_latency_ms: Optional[float] = None
    member_latency_ms: dict[str, float] = field(default_factory=dict)
    member_topk_counts: dict[str, dict[int, int]] = field(default_factory=dict)
    name: str = "mcdnn"
    metadata: dict = field(default_factory=dict)

    @property
    def ks(self) -> list[int]:
        return sorted(self.topk_counts)

    @property
    def topk_errors(self) -> dict[int, float]:
        return {k: self.topk_counts[k] / self.n_samples for k in self.ks}

    @property
    def top1_error(self) -> float:
        return self.topk_errors[1]

    def member_error(self, member_id: str, k: int = 1) -> float:
        return self.member_topk_counts[member_id][k] / self.n_samples

    @property
    def mean_member_top1(self) -> float:
        return float(np.mean([self.member_error(m) for m in self.member_ids]))

    @property
    def best_member(self) -> str:
        return min(self.member_ids, key=lambda m: (self.member_topk_counts[m][1], self.member_ids.index(m)))

    @property
    def reduction_vs_best(self) -> tuple[float, float]:
        """Redução absoluta e relativa do erro top-1 face ao melhor membro."""
        best = self.member_error(self.best_member)
        absolute = best - self.top1_error
        relative = absolute / best if best > 0 else 0.0
        return absolute, relative

    @property
    def has_member_errors(self) -> bool:
        return bool(self.member_ids) and all(1 in self.member_topk_counts.get(m, {}) for m in self.member_ids)

    def to_dict(self) -> dict:
        data = {
            "name": self.name,
            "n_samples": self.n_samples,
            "member_ids": list(self.member_ids),
            "topk_counts": {str(k): v for k, v in sorted(self.topk_counts.items())},
            "topk_errors": {str(k): v for k, v in self.topk_errors.items()},
            "top1_error": self.top1_error,
            "mean_latency_ms": self.mean_latency_ms,
            "member_latency_ms": dict(self.member_latency_ms),
            "member_topk_counts": {
                m: {str(k): v for k, v in sorted(c.items())} for m, c in self.member_topk_counts.items()
            },
            "metadata": dict(self.metadata),
        }
        if self.has_member_errors:
            absolute, relative = self.reduction_vs_best
            data["best_member"] = self.best_member
            data["reduction_vs_best"] = {"absolute": absolute, "relative": relative}
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        return cls(
            n_samples=data["n_samples"],
            member_ids=list(data["member_ids"]),
            topk_counts={int(k): v for k, v in data.get("topk_counts", {}).items()},
            mean_latency_ms=data.get("mean_latency_ms"),
            member_latency_ms=dict(data.get("member_latency_ms", {})),
            member_topk_counts={
                m: {int(k): v for k, v in c.items()}
                for m, c in data.get("member_topk_counts", {}).items()
            },
            name=data.get("name", "mcdnn"),
            metadata=dict(data.get("metadata", {})),
        )

    def to_text(self, include_timing: bool = True) -> str:
        """Formato linha a linha key=value, com frações exatas e 6 algarismos significativos."""
        lines = [
            f"name={self.name}",
            f"n_samples={self.n_samples}",
            f"members={','.join(self.member_ids)}",
        ]
        for k in self.ks:
            lines.append(f"top{k}_errors={self.topk_counts[k]}/{self.n_samples}")
            lines.append(f"top{k}_error={fmt6(self.topk_errors[k])}")
        for member in self.member_ids:
            counts = self.member_topk_counts.get(member)
            if counts:
                lines.append(f"member.{member}.top1_error={fmt6(counts[1] / self.n_samples)}")
        if self.has_member_errors:
            absolute, relative = self.reduction_vs_best
            lines.append(f"best_member={self.best_member}")
            lines.append(f"reduction_vs_best={fmt6(absolute)}")
            lines.append(f"reduction_vs_best_rel={fmt6(relative)}")
        if include_timing and self.mean_latency_ms is not None:
            lines.append(f"mean_latency_ms={fmt6(self.mean_latency_ms)}")
            for member in self.member_ids:
                if member in self.member_latency_ms:
                    lines.append(f"member.{member}.latency_ms={fmt6(self.member_latency_ms[member])}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class LatencyBreakdown:
    """Comparação entre a latência do ensemble e a soma das latências dos membros."""

    ensemble_ms: float
    member_sum_ms: float
    tolerance: float = 0.10

    @property
    def ratio(self) -> float:
        return self.ensemble_ms / self.member_sum_ms if self.member_sum_ms > 0 else float("nan")

    @property
    def additive(self) -> bool:
        return abs(self.ratio - 1.0) <= self.tolerance

    def to_dict(self) -> dict:
        data = asdict(self)
        data.update(ratio=self.ratio, additive=self.additive)
        return data
