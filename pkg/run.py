#!/usr/bin/env python3
"""
MCDNN Workbench - CLI Runner

Colunas DNN treinadas de raiz, combinadas em Multi-Column DNN pela média das saídas,
para reconhecimento de caracteres isolados escritos à mão.

Uso:
    python run.py parse-arch 48x48-100C3-MP2-200C2-MP2-300C2-MP2-400C2-MP2-500N-3755N
    python run.py catalog                           # Redes e ensembles publicados
    python run.py preprocess in.pgm out.pgm         # Pipeline de pré-processamento
    python run.py skew-report corpus/ --order-b scale-then-contrast
    python run.py synth-data data/glyphs.mcds --classes 20 --per-class 250
    python run.py split data/glyphs.mcds --train-writers 0-7 --val-writers 8-9 \\
        --train-out data/train.mcds --val-out data/val.mcds
    python run.py train --arch 48x48-10C3-MP2-20C2-MP2-40C2-MP2-80C2-MP2-100N-20N \\
        --train data/train.mcds --val data/val.mcds --seeds 1,2,3,4
    python run.py eval data/models/column_s1.col data/models/column_s2.col --data data/val.mcds
    python run.py bench data/models/column_s1.col --data data/val.mcds
    python run.py experiment ensemble-benefit --draws 10

Códigos de saída: 0 sucesso, 1 erro de utilização, 2 erro de dados, 3 falha numérica.
"""

import argparse
import json
import logging
import sys

from rich.console import Console
from rich.table import Table

from mcdnn.arch_dsl import infer_shapes, parse_arch
from mcdnn.errors import McdnnError, UsageError
from mcdnn.models.image import PipelineOrder
from mcdnn.reports.generator import ReportGenerator
from mcdnn.utils import fmt6, parse_int_list
from mcdnn.workbench import Workbench

logger = logging.getLogger("mcdnn.cli")

ORDERS = [o.value for o in PipelineOrder]
console = Console()


class CliParser(argparse.ArgumentParser):
    """Erros de argumentos saem com código 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: erro: {message}\n")


def setup_logging(verbose: bool = False):
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )


def _paths(values: list[str]) -> list[str]:
    """Aceita caminhos separados por espaço ou por vírgula."""
    return [p for value in values for p in value.split(",") if p]


def _preprocess_config(bench: Workbench, args):
    return bench.preprocess_config(
        order=getattr(args, "order", None),
        box=getattr(args, "box", None),
        canvas=getattr(args, "canvas", None),
        fill=getattr(args, "fill", None),
    )


def cmd_parse_arch(args):
    """Mostra formas, parâmetros e madds por camada."""
    info = Workbench.inspect_arch(args.arch)
    if args.json:
        print(json.dumps(info, ensure_ascii=False, indent=2))
        return 0
    spec = parse_arch(args.arch)
    console.print(ReportGenerator().shape_table(spec, infer_shapes(spec)))
    print(info["trace"])
    return 0


def cmd_catalog(args):
    """Redes e ensembles publicados, com custos e aditividade da velocidade."""
    catalog = Workbench(config_dir=args.config_dir).catalog()
    if args.json:
        print(json.dumps(catalog, ensure_ascii=False, indent=2))
        return 0

    nets = Table(title="Redes publicadas")
    for column in ("#", "traço", "parâmetros", "madds", "rank", "erro [%]", "ms/caractere"):
        nets.add_column(column)
    for row in catalog["networks"]:
        nets.add_row(row["id"], row["trace"], str(row["params"]), str(row["madds"]),
                     str(row["madds_rank"]), fmt6(row["error"]), fmt6(row["speed_ms"]))
    console.print(nets)

    ensembles = Table(title="MCDNN publicados")
    for column in ("#", "membros", "ms", "soma membros", "rácio", "First [%]", "Best 10 [%]"):
        ensembles.add_column(column)
    for row in catalog["ensembles"]:
        ensembles.add_row(row["id"], ",".join(row["members"]), fmt6(row["speed_ms"]),
                          fmt6(row["member_speed_sum"]), fmt6(row["ratio"]),
                          fmt6(row["first"]), fmt6(row["best10"]))
    console.print(ensembles)
    return 0


def cmd_preprocess(args):
    bench = Workbench(config_dir=args.config_dir)
    out = bench.preprocess_file(args.input, args.output, _preprocess_config(bench, args))
    print(f"{args.output}: {out.width}x{out.height}")
    return 0


def cmd_skew_report(args):
    """Compara duas ordens de pré-processamento sobre o mesmo corpus."""
    bench = Workbench(config_dir=args.config_dir)
    report = bench.skew_report(args.source, args.order_a, args.order_b, args.box, args.canvas)
    if args.json:
        print(report.to_json())
    else:
        print(bench.reporter.generate_skew_report(report), end="")
    return 0


def cmd_synth_data(args):
    bench = Workbench(config_dir=args.config_dir)
    ds = bench.synth_data(args.output, args.classes, args.per_class, args.writers, args.seed)
    print(f"{args.output}: {len(ds)} amostras, {ds.class_count} classes, {len(ds.writers)} escritores")
    return 0


def cmd_gnt_convert(args):
    bench = Workbench(config_dir=args.config_dir)
    ds = bench.convert_writer_streams(
        args.inputs, args.codes, args.output, args.writer_start, args.on_unknown
    )
    print(f"{args.output}: {len(ds)} amostras, {ds.class_count} classes")
    return 0


def cmd_split(args):
    bench = Workbench(config_dir=args.config_dir)
    train, val = bench.split(
        args.source,
        parse_int_list(args.train_writers),
        parse_int_list(args.val_writers),
        args.train_out,
        args.val_out,
    )
    print(f"treino={len(train)} validação={len(val)} descartadas={train.metadata['dropped_samples']}")
    return 0


def cmd_train(args):
    """Treina uma coluna por semente."""
    bench = Workbench(config_dir=args.config_dir)
    if args.self_test:
        worst = bench.self_test(args.self_test_seed)
        print(f"self-test: erro relativo máximo {fmt6(worst)}")
    if not args.arch or not args.train:
        if args.self_test:
            return 0
        raise UsageError("train precisa de --arch e --train")

    cfg = _preprocess_config(bench, args)
    hp = bench.hyperparams(
        cfg,
        epochs=args.epochs,
        lr0=args.lr0,
        lr_decay=args.lr_decay,
        eval_every=args.eval_every,
        momentum=args.momentum,
        weight_decay=args.weight_decay,
        no_deform=args.no_deform,
    )
    seeds = parse_int_list(args.seeds) if args.seeds else bench.default_seeds()
    trained = bench.train(
        args.arch, args.train, args.val, seeds, hp, cfg,
        name=args.name, threads=args.threads, preprocessed=args.preprocessed,
    )
    for column in trained:
        print(
            f"{column.name}: {column.path} best_epoch={column.log.best_epoch} "
            f"val_top1={fmt6(column.log.best_val_top1)}"
        )
    return 0


def cmd_eval(args):
    """Avalia um ou mais MCDNN e mostra as linhas First / Best k."""
    bench = Workbench(config_dir=args.config_dir)
    ks = parse_int_list(args.ks) if args.ks else bench.eval_ks()
    ensembles = [_paths([e]) for e in args.ensemble] if args.ensemble else None
    reports = bench.evaluate(
        _paths(args.columns), args.data, ks, _preprocess_config(bench, args),
        ensembles=ensembles, threads=args.threads, preprocessed=args.preprocessed,
    )
    timing = not args.no_timing
    renderers = {
        "terminal": bench.reporter.generate_terminal_report,
        "markdown": bench.reporter.generate_markdown_report,
        "json": bench.reporter.generate_json_report,
        "text": bench.reporter.generate_text_report,
    }
    print(renderers[args.format](reports, timing=timing))
    if args.report:
        formats = bench.settings.get("evaluation", {}).get("formats", ["text", "json"])
        bench.reporter.save_report(reports, args.report, formats, timing=timing)
    return 0


def cmd_bench(args):
    """Mede ms/caractere do ensemble e a soma das latências dos membros."""
    bench = Workbench(config_dir=args.config_dir)
    report, breakdown = bench.bench(
        _paths(args.columns), args.data, _preprocess_config(bench, args),
        warmup=args.warmup, limit=args.limit, preprocessed=args.preprocessed,
    )
    if args.json:
        print(json.dumps({"report": report.to_dict(), "latency": breakdown.to_dict()}, indent=2, sort_keys=True))
        return 0
    print(f"n_samples={report.n_samples}")
    print(f"members={','.join(report.member_ids)}")
    print(f"mean_latency_ms={fmt6(breakdown.ensemble_ms)}")
    print(f"member_sum_ms={fmt6(breakdown.member_sum_ms)}")
    print(f"additivity_ratio={fmt6(breakdown.ratio)}")
    print(f"additive={'yes' if breakdown.additive else 'no'}")
    return 0


def cmd_experiment(args):
    bench = Workbench(config_dir=args.config_dir)
    result = bench.experiment(
        args.name, draws=args.draws, epochs=args.epochs, classes=args.classes,
        train_per_class=args.train_per_class, test_per_class=args.test_per_class,
        base_seed=args.seed, threads=args.threads,
    )
    if args.json:
        print(result.to_json())
    else:
        print(result.to_text(), end="")
    return 0


def _add_preprocess_flags(p, with_fill: bool = False):
    p.add_argument("--order", choices=ORDERS, help="Ordem do pipeline (default: settings.json)")
    p.add_argument("--box", type=int, help="Lado da caixa de escala (default: 40)")
    p.add_argument("--canvas", type=int, help="Lado do canvas (default: 48)")
    if with_fill:
        p.add_argument("--fill", type=int, help="Valor de preenchimento (default: 255)")


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(
        description="MCDNN Workbench",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Exemplos:
  python run.py parse-arch 48x48-150C3-MP2-250C2-MP2-350C2-MP2-450C2-MP2-1000N-3755N
  python run.py synth-data data/glyphs.mcds
  python run.py train --arch ARCH --train data/train.mcds --seeds 1,2,3,4
  python run.py eval data/models/*.col --data data/val.mcds --ks 1,10
        """,
    )
    parser.add_argument("--config-dir", default="config", help="Diretório de configuração")
    parser.add_argument("-v", "--verbose", action="store_true", help="Output detalhado")

    subparsers = parser.add_subparsers(dest="command", help="Comandos disponíveis")

    # parse-arch
    p = subparsers.add_parser("parse-arch", help="Analisar uma string de arquitetura")
    p.add_argument("arch")
    p.add_argument("--json", action="store_true", help="Output estruturado")

    # catalog
    p = subparsers.add_parser("catalog", help="Redes e ensembles publicados")
    p.add_argument("--json", action="store_true")

    # preprocess
    p = subparsers.add_parser("preprocess", help="Pré-processar uma imagem PGM")
    p.add_argument("input")
    p.add_argument("output")
    _add_preprocess_flags(p, with_fill=True)

    # skew-report
    p = subparsers.add_parser("skew-report", help="Comparar duas ordens de pré-processamento")
    p.add_argument("source", help="Pasta de PGM ou contentor de dataset")
    p.add_argument("--order-a", choices=ORDERS, default=PipelineOrder.CONTRAST_THEN_SCALE.value)
    p.add_argument("--order-b", choices=ORDERS, default=PipelineOrder.SCALE_THEN_CONTRAST.value)
    p.add_argument("--box", type=int)
    p.add_argument("--canvas", type=int)
    p.add_argument("--json", action="store_true")

    # synth-data
    p = subparsers.add_parser("synth-data", help="Gerar glifos sintéticos")
    p.add_argument("output")
    p.add_argument("--classes", type=int)
    p.add_argument("--per-class", type=int)
    p.add_argument("--writers", type=int)
    p.add_argument("--seed", type=int)

    # gnt-convert
    p = subparsers.add_parser("gnt-convert", help="Converter ficheiros por escritor num contentor")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--codes", required=True, help="Tabela 'hexcode índice'")
    p.add_argument("--output", required=True)
    p.add_argument("--writer-start", type=int, default=0)
    p.add_argument("--on-unknown", choices=["skip", "error"], default="skip")

    # split
    p = subparsers.add_parser("split", help="Partir um dataset por escritor")
    p.add_argument("source")
    p.add_argument("--train-writers", required=True, help='ex.: "0-239"')
    p.add_argument("--val-writers", required=True, help='ex.: "240-299"')
    p.add_argument("--train-out", required=True)
    p.add_argument("--val-out", required=True)

    # train
    p = subparsers.add_parser("train", help="Treinar colunas")
    p.add_argument("--arch")
    p.add_argument("--train")
    p.add_argument("--val")
    p.add_argument("--seeds", help='ex.: "1,2,3,4" (default: settings.json)')
    p.add_argument("--name", help="Prefixo dos ficheiros (default: tag da arquitetura)")
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr0", type=float)
    p.add_argument("--lr-decay", type=float)
    p.add_argument("--eval-every", type=int)
    p.add_argument("--momentum", type=float)
    p.add_argument("--weight-decay", type=float)
    p.add_argument("--no-deform", action="store_true")
    p.add_argument("--threads", type=int)
    p.add_argument("--preprocessed", action="store_true", help="Dados já pré-processados")
    p.add_argument("--self-test", action="store_true", help="Gradient check antes de treinar")
    p.add_argument("--self-test-seed", type=int, default=0)
    _add_preprocess_flags(p)

    # eval
    p = subparsers.add_parser("eval", help="Avaliar MCDNN")
    p.add_argument("columns", nargs="+", help="Ficheiros de coluna")
    p.add_argument("--data", required=True)
    p.add_argument("--ks", help='ex.: "1,10"')
    p.add_argument("--ensemble", action="append", help="Membros de um ensemble, separados por vírgula")
    p.add_argument("--format", choices=["terminal", "text", "markdown", "json"], default="terminal")
    p.add_argument("--report", help="Nome base dos relatórios a guardar")
    p.add_argument("--no-timing", action="store_true")
    p.add_argument("--threads", type=int)
    p.add_argument("--preprocessed", action="store_true")
    _add_preprocess_flags(p)

    # bench
    p = subparsers.add_parser("bench", help="Medir ms/caractere")
    p.add_argument("columns", nargs="+")
    p.add_argument("--data", required=True)
    p.add_argument("--warmup", type=int)
    p.add_argument("--limit", type=int)
    p.add_argument("--preprocessed", action="store_true")
    p.add_argument("--json", action="store_true")
    _add_preprocess_flags(p)

    # experiment
    p = subparsers.add_parser("experiment", help="Experiências repetidas em dados sintéticos")
    p.add_argument("name", choices=["ensemble-benefit", "skew"])
    p.add_argument("--draws", type=int, default=10)
    p.add_argument("--epochs", type=int)
    p.add_argument("--classes", type=int, default=20)
    p.add_argument("--train-per-class", type=int, default=200)
    p.add_argument("--test-per-class", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int)
    p.add_argument("--json", action="store_true")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    setup_logging(args.verbose)

    if args.command is None:
        parser.print_help()
        return 1

    commands = {
        "parse-arch": cmd_parse_arch,
        "catalog": cmd_catalog,
        "preprocess": cmd_preprocess,
        "skew-report": cmd_skew_report,
        "synth-data": cmd_synth_data,
        "gnt-convert": cmd_gnt_convert,
        "split": cmd_split,
        "train": cmd_train,
        "eval": cmd_eval,
        "bench": cmd_bench,
        "experiment": cmd_experiment,
    }

    try:
        return commands[args.command](args) or 0
    except McdnnError as e:
        logger.error(str(e))
        return e.exit_code
    except (ValueError, KeyError) as e:
        logger.error(str(e))
        return 1


if __name__ == "__main__":
    sys.exit(main())
