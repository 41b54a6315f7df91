import json

import pytest
from rich.console import Console

from mcdnn.arch_dsl import infer_shapes, parse_arch
from mcdnn.models.evaluation import EvalReport
from mcdnn.models.image import SkewReport
from mcdnn.reports.generator import ReportGenerator, pct, row_label


def make_report(name, members, first, best10, latency=None):
    return EvalReport(
        n_samples=1000,
        member_ids=list(members),
        topk_counts={1: first, 10: best10},
        mean_latency_ms=latency,
        member_latency_ms={m: latency / len(members) for m in members} if latency else {},
        member_topk_counts={m: {1: first + 5, 10: best10 + 1} for m in members},
        name=name,
    )


@pytest.fixture
def reports():
    return [
        make_report("0", ["0"], 55, 4, latency=3.03),
        make_report("2", ["0", "1", "2", "3"], 43, 3, latency=12.18),
    ]


@pytest.fixture
def generator(tmp_path):
    return ReportGenerator(reports_dir=str(tmp_path / "reports"))


def test_row_labels():
    assert row_label(1) == "First"
    assert row_label(10) == "Best 10"
    assert pct(0.055) == "5.5"


def test_terminal_report(generator, reports):
    text = generator.generate_terminal_report(reports)
    lines = text.splitlines()
    assert lines[0] == "=" * 70
    member_row = next(line for line in lines if line.startswith("3 "))
    assert member_row.count("X") == 1
    assert any(line.startswith("First [%]") and "5.5" in line and "4.3" in line for line in lines)
    assert any(line.startswith("Best 10 [%]") for line in lines)
    assert "ms/caractere" in text


def test_terminal_report_without_timing(generator, reports):
    assert "ms/caractere" not in generator.generate_terminal_report(reports, timing=False)


def test_markdown_report(generator, reports):
    md = generator.generate_markdown_report(reports)
    assert md.startswith("# Relatório de avaliação MCDNN")
    assert "| First | 5.5 | 4.3 |" in md
    assert "| Best 10 | 0.4 | 0.3 |" in md
    assert "| 1 |  | X |" in md
    assert "Velocidade" in md
    assert "Velocidade" not in generator.generate_markdown_report(reports, timing=False)


def test_json_report(generator, reports):
    data = json.loads(generator.generate_json_report(reports))
    assert [r["name"] for r in data["reports"]] == ["0", "2"]
    assert data["reports"][1]["topk_counts"] == {"1": 43, "10": 3}
    stripped = json.loads(generator.generate_json_report(reports, timing=False))
    assert "mean_latency_ms" not in stripped["reports"][0]


def test_json_report_is_stable(generator, reports):
    assert generator.generate_json_report(reports) == generator.generate_json_report(reports)


def test_text_report(generator, reports):
    text = generator.generate_text_report(reports, timing=False)
    assert "top1_errors=55/1000" in text
    assert "top10_error=0.004" in text
    assert "latency" not in text


def test_skew_report(generator):
    report = SkewReport(
        per_image=[0.0, 2.5],
        mean_diff=1.25,
        max_diff=2.5,
        max_pixel_diff=17,
        identical_count=1,
        corpus_size=2,
        config_a={"order": "contrast-then-scale"},
        config_b={"order": "scale-then-contrast"},
    )
    text = generator.generate_skew_report(report)
    assert text.splitlines() == [
        "order_a=contrast-then-scale",
        "order_b=scale-then-contrast",
        "corpus_size=2",
        "identical=1",
        "mean_diff=1.25",
        "max_diff=2.5",
        "max_pixel_diff=17",
    ]


def test_shape_table(generator):
    spec = parse_arch("8x8-1C1-2N")
    plan = infer_shapes(spec)
    table = generator.shape_table(spec, plan)
    assert table.row_count == 4
    console = Console(record=True, width=120)
    console.print(table)
    rendered = console.export_text()
    assert "total" in rendered and "1×8×8" in rendered


def test_save_report(generator, reports):
    paths = generator.save_report(reports, "eval", formats=["text", "json", "markdown"])
    assert [p.rsplit(".", 1)[1] for p in paths] == ["txt", "json", "md"]
    assert json.loads(open(paths[1], encoding="utf-8").read())["reports"][0]["name"] == "0"


def test_save_report_defaults(generator, reports):
    paths = generator.save_report(reports, "eval")
    assert len(paths) == 2


def three_member_report():
    return EvalReport(
        n_samples=100,
        member_ids=["a", "b", "c"],
        topk_counts={1: 15},
        member_topk_counts={"a": {1: 30}, "b": {1: 20}, "c": {1: 25}},
        name="abc",
    )


def test_reduction_against_best_member():
    report = three_member_report()
    assert report.best_member == "b"
    absolute, relative = report.reduction_vs_best
    assert absolute == pytest.approx(0.05)
    assert relative == pytest.approx(0.25)


def test_best_member_tie_goes_to_first_listed():
    report = three_member_report()
    report.member_topk_counts["c"] = {1: 20}
    assert report.best_member == "b"


def test_reduction_is_rendered(generator):
    reports = [three_member_report()]
    text = generator.generate_text_report(reports)
    assert "best_member=b" in text
    assert "reduction_vs_best=0.05" in text
    assert "reduction_vs_best_rel=0.25" in text

    md = generator.generate_markdown_report(reports)
    assert "| Melhor membro | b |" in md
    assert "| Redução [%] | 5 |" in md
    assert "| Redução relativa [%] | 25 |" in md

    terminal = generator.generate_terminal_report(reports).splitlines()
    assert any(line.startswith("melhor membro") and line.rstrip().endswith("b") for line in terminal)
    assert any(line.startswith("redução rel. [%]") and line.rstrip().endswith("25") for line in terminal)

    data = json.loads(generator.generate_json_report(reports))["reports"][0]
    assert data["best_member"] == "b"
    assert data["reduction_vs_best"]["relative"] == pytest.approx(0.25)


def test_reduction_omitted_without_member_errors(generator):
    report = EvalReport(n_samples=10, member_ids=["a"], topk_counts={1: 2})
    assert "best_member" not in report.to_dict()
    assert "Melhor membro" not in generator.generate_markdown_report([report])
