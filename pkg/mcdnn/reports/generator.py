"""Gerador de relatórios de avaliação, de desvio de pré-processamento e de arquiteturas."""

import json
import logging
from pathlib import Path
from typing import Optional, Sequence

from jinja2 import Environment, StrictUndefined
from rich.table import Table

from mcdnn.models.arch import ArchSpec, ShapePlan
from mcdnn.models.evaluation import EvalReport
from mcdnn.models.image import SkewReport
from mcdnn.utils import fmt6

logger = logging.getLogger(__name__)

ROW_LABELS = {1: "First"}

MARKDOWN_TEMPLATE = """# Relatório de avaliação MCDNN

**Amostras:** {{ n_samples }}

| Coluna |{% for r in reports %} {{ r.name }} |{% endfor %}
|--------|{% for r in reports %}------|{% endfor %}
{% for member in members -%}
| {{ member }} |{% for r in reports %} {{ "X" if member in r.member_ids else "" }} |{% endfor %}
{% endfor %}
## Erro [%]

|  |{% for r in reports %} {{ r.name }} |{% endfor %}
|--|{% for r in reports %}------|{% endfor %}
{% for k in ks -%}
| {{ row_label(k) }} |{% for r in reports %} {{ pct(r.topk_errors[k]) }} |{% endfor %}
{% endfor %}
{%- if reductions %}
## Face ao melhor membro

|  |{% for r in reports %} {{ r.name }} |{% endfor %}
|--|{% for r in reports %}------|{% endfor %}
| Melhor membro |{% for r in reports %} {{ r.best_member }} |{% endfor %}
| Redução [%] |{% for r in reports %} {{ pct(r.reduction_vs_best[0]) }} |{% endfor %}
| Redução relativa [%] |{% for r in reports %} {{ pct(r.reduction_vs_best[1]) }} |{% endfor %}
{% endif %}
{%- if timing %}
## Velocidade [ms/caractere]

|  |{% for r in reports %} {{ r.name }} |{% endfor %}
|--|{% for r in reports %}------|{% endfor %}
| ms |{% for r in reports %} {{ fmt(r.mean_latency_ms) }} |{% endfor %}
{% endif %}
"""


def row_label(k: int) -> str:
    return ROW_LABELS.get(k, f"Best {k}")


def pct(fraction: float) -> str:
    return fmt6(100.0 * fraction)


class ReportGenerator:
    """Gera relatórios em diferentes formatos."""

    def __init__(self, reports_dir: str = "data/reports"):
        self.reports_dir = Path(reports_dir)
        self.env = Environment(undefined=StrictUndefined, trim_blocks=False, lstrip_blocks=False)

    @staticmethod
    def _members(reports: Sequence[EvalReport]) -> list[str]:
        members: list[str] = []
        for report in reports:
            for m in report.member_ids:
                if m not in members:
                    members.append(m)
        return members

    def generate_terminal_report(self, reports: Sequence[EvalReport], timing: bool = True) -> str:
        """Tabela ao estilo membros × ensembles, com linhas First/Best k."""
        lines = []
        width = 70
        lines.append("=" * width)
        lines.append("  Avaliação MCDNN")
        lines.append(f"  Amostras: {reports[0].n_samples}")
        lines.append("=" * width)

        members = self._members(reports)
        name_w = max(16, *(len(m) for m in members))
        header = " " * name_w + " | " + " ".join(f"{r.name:>10s}" for r in reports)
        lines.append(header)
        lines.append("-" * len(header))
        for member in members:
            marks = " ".join(f"{'X' if member in r.member_ids else '':>10s}" for r in reports)
            lines.append(f"{member:<{name_w}s} | {marks}")
        lines.append("-" * len(header))

        for k in reports[0].ks:
            values = " ".join(f"{pct(r.topk_errors[k]):>10s}" for r in reports)
            lines.append(f"{row_label(k) + ' [%]':<{name_w}s} | {values}")
        if all(r.has_member_errors for r in reports):
            values = " ".join(f"{r.best_member:>10s}" for r in reports)
            lines.append(f"{'melhor membro':<{name_w}s} | {values}")
            values = " ".join(f"{pct(r.reduction_vs_best[0]):>10s}" for r in reports)
            lines.append(f"{'redução [%]':<{name_w}s} | {values}")
            values = " ".join(f"{pct(r.reduction_vs_best[1]):>10s}" for r in reports)
            lines.append(f"{'redução rel. [%]':<{name_w}s} | {values}")
        if timing and all(r.mean_latency_ms is not None for r in reports):
            values = " ".join(f"{fmt6(r.mean_latency_ms):>10s}" for r in reports)
            lines.append(f"{'ms/caractere':<{name_w}s} | {values}")
        lines.append("=" * width)
        return "\n".join(lines)

    def generate_markdown_report(self, reports: Sequence[EvalReport], timing: bool = True) -> str:
        template = self.env.from_string(MARKDOWN_TEMPLATE)
        return template.render(
            reports=reports,
            members=self._members(reports),
            ks=reports[0].ks,
            n_samples=reports[0].n_samples,
            timing=timing and all(r.mean_latency_ms is not None for r in reports),
            reductions=all(r.has_member_errors for r in reports),
            row_label=row_label,
            pct=pct,
            fmt=fmt6,
        )

    def generate_json_report(self, reports: Sequence[EvalReport], timing: bool = True) -> str:
        data = []
        for report in reports:
            entry = report.to_dict()
            if not timing:
                entry.pop("mean_latency_ms")
                entry.pop("member_latency_ms")
            data.append(entry)
        return json.dumps({"reports": data}, ensure_ascii=False, indent=2, sort_keys=True)

    def generate_text_report(self, reports: Sequence[EvalReport], timing: bool = True) -> str:
        return "\n".join(r.to_text(include_timing=timing) for r in reports)

    def generate_skew_report(self, report: SkewReport) -> str:
        """Formato key=value do relatório de desvio."""
        lines = [
            f"order_a={report.config_a.get('order')}",
            f"order_b={report.config_b.get('order')}",
            f"corpus_size={report.corpus_size}",
            f"identical={report.identical_count}",
            f"mean_diff={fmt6(report.mean_diff)}",
            f"max_diff={fmt6(report.max_diff)}",
            f"max_pixel_diff={report.max_pixel_diff}",
        ]
        return "\n".join(lines) + "\n"

    def shape_table(self, spec: ArchSpec, plan: ShapePlan) -> Table:
        """Tabela rich com forma, parâmetros e madds de cada camada."""
        table = Table(title=f"{spec.input_h}x{spec.input_w} ({len(spec.layers)} camadas)")
        table.add_column("#", justify="right")
        table.add_column("camada")
        table.add_column("saída", justify="right")
        table.add_column("parâmetros", justify="right")
        table.add_column("madds", justify="right")
        table.add_row("0", "input", f"1×{spec.input_h}×{spec.input_w}", "0", "0")
        for index, (layer, shape) in enumerate(zip(spec.layers, plan.layers), start=1):
            table.add_row(
                str(index), repr(layer), f"{shape.maps}×{shape.h}×{shape.w}",
                str(shape.params), str(shape.madds),
            )
        table.add_row("", "total", "", str(plan.total_params), str(plan.total_madds))
        return table

    def save_report(
        self,
        reports: Sequence[EvalReport],
        basename: str,
        formats: Optional[list[str]] = None,
        timing: bool = True,
    ) -> list[str]:
        """Guarda relatórios nos formatos pedidos. Retorna caminhos dos ficheiros."""
        if formats is None:
            formats = ["text", "json"]
        self.reports_dir.mkdir(parents=True, exist_ok=True)
        renderers = {
            "text": (".txt", self.generate_text_report),
            "json": (".json", self.generate_json_report),
            "markdown": (".md", self.generate_markdown_report),
        }
        saved_files = []
        for fmt in formats:
            suffix, render = renderers[fmt]
            path = self.reports_dir / f"{basename}{suffix}"
            path.write_text(render(reports, timing=timing), encoding="utf-8")
            saved_files.append(str(path))
        if saved_files:
            logger.info(f"Relatórios guardados: {', '.join(saved_files)}")
        return saved_files
