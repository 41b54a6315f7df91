"""Coordenador do workbench: configuração, dados, treino, avaliação e relatórios."""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from mcdnn.arch_dsl import feature_trace, infer_shapes, parse_arch, render_arch
from mcdnn.data.container import read_container, write_container
from mcdnn.data.pgm import read_corpus_dir, read_pgm, write_pgm
from mcdnn.data.splits import split_by_writer
from mcdnn.data.synth import synth_glyphs
from mcdnn.data.writer_stream import load_code_table, read_writer_stream
from mcdnn.ensemble import bench, columns_by_name, evaluate_many
from mcdnn.errors import ConfigError, DataError, EmptyDatasetError
from mcdnn.experiments import ExperimentResult, desk_hyperparams, ensemble_benefit, skew_reproduction
from mcdnn.imageprep import preprocess, preprocess_dataset
from mcdnn.models.dataset import Dataset
from mcdnn.models.evaluation import EnsembleSpec, EvalReport, LatencyBreakdown
from mcdnn.models.image import GrayImage, PreprocessConfig, SkewReport
from mcdnn.models.training import DeformParams, Hyperparams, TrainingLog
from mcdnn.nn.gradcheck import self_test
from mcdnn.reports.generator import ReportGenerator
from mcdnn.skew_detector import SkewDetector
from mcdnn.storage import ColumnStorage, load_column
from mcdnn.trainer import train_column, train_columns

logger = logging.getLogger(__name__)


@dataclass
class TrainedColumn:
    name: str
    path: str
    log: TrainingLog


class Workbench:
    """Coordena pré-processamento, treino de colunas, avaliação de ensembles e relatórios."""

    def __init__(self, config_dir: str = "config"):
        self.config_dir = Path(config_dir)
        self.settings = self._load_json("settings.json")
        self.networks = self._load_json("networks.json")

        storage_cfg = self.settings.get("storage", {})
        self.storage = ColumnStorage(
            base_dir=storage_cfg.get("models_dir", "data/models"),
            max_checkpoints=storage_cfg.get("max_checkpoints_per_column", 5),
        )
        self.logs_dir = Path(storage_cfg.get("logs_dir", "data/logs"))
        self.detector = SkewDetector()
        self.reporter = ReportGenerator(
            reports_dir=storage_cfg.get("reports_dir", "data/reports")
        )
        self.threads = self.settings.get("runtime", {}).get("threads", 1)

    def _load_json(self, filename: str) -> dict:
        filepath = self.config_dir / filename
        try:
            with open(filepath, "r", encoding="utf-8") as f:
                return json.load(f)
        except FileNotFoundError:
            raise ConfigError(f"ficheiro de configuração não encontrado: {filepath}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"{filepath}: JSON inválido ({e})") from e

    # --- configuração -----------------------------------------------------

    def preprocess_config(self, **overrides) -> PreprocessConfig:
        """Configuração de `settings.json`; valores None nos overrides são ignorados."""
        data = dict(self.settings.get("preprocessing", {}))
        data.update({k: v for k, v in overrides.items() if v is not None})
        return PreprocessConfig.from_dict(data)

    def hyperparams(self, cfg: Optional[PreprocessConfig] = None, **overrides) -> Hyperparams:
        cfg = cfg or self.preprocess_config()
        deform_data = dict(self.settings.get("deform", {}))
        deform_data.setdefault("max_translate", (cfg.canvas - cfg.box) / 2)
        if overrides.pop("no_deform", False):
            deform_data["enabled"] = False
        data = dict(self.settings.get("training", {}))
        data.update({k: v for k, v in overrides.items() if v is not None})
        return Hyperparams.from_dict(data, deform=DeformParams.from_dict(deform_data))

    def eval_ks(self) -> list[int]:
        return list(self.settings.get("evaluation", {}).get("ks", [1, 10]))

    def default_seeds(self) -> list[int]:
        return list(self.settings.get("training", {}).get("seeds", [1]))

    # --- arquiteturas -----------------------------------------------------

    @staticmethod
    def inspect_arch(text: str) -> dict:
        spec = parse_arch(text)
        plan = infer_shapes(spec)
        return {
            "arch": render_arch(spec),
            "tag": spec.tag,
            "class_count": spec.class_count,
            "trace": feature_trace(spec),
            "plan": plan.to_dict(),
            "params": plan.total_params,
            "madds": plan.total_madds,
        }

    def catalog(self) -> dict:
        """Redes e ensembles publicados, com custos calculados e rácios de aditividade."""
        networks = []
        by_id = {}
        for entry in self.networks.get("networks", []):
            spec = parse_arch(entry["arch"])
            plan = infer_shapes(spec)
            row = {
                "id": entry["id"],
                "arch": entry["arch"],
                "trace": feature_trace(spec),
                "params": plan.total_params,
                "madds": plan.total_madds,
                "error": entry.get("error"),
                "speed_ms": entry.get("speed_ms"),
            }
            networks.append(row)
            by_id[entry["id"]] = row
        for rank, row in enumerate(sorted(networks, key=lambda r: (r["madds"], r["id"])), start=1):
            row["madds_rank"] = rank

        ensembles = []
        for entry in self.networks.get("ensembles", []):
            unknown = [m for m in entry["members"] if m not in by_id]
            if unknown:
                raise ConfigError(f"ensemble {entry['id']}: redes desconhecidas {unknown}")
            member_sum = sum(by_id[m]["speed_ms"] for m in entry["members"])
            ensembles.append({
                "id": entry["id"],
                "members": list(entry["members"]),
                "speed_ms": entry["speed_ms"],
                "member_speed_sum": round(member_sum, 6),
                "ratio": entry["speed_ms"] / member_sum,
                "madds": sum(by_id[m]["madds"] for m in entry["members"]),
                "first": entry.get("first"),
                "best10": entry.get("best10"),
            })
        return {"networks": networks, "ensembles": ensembles}

    # --- pré-processamento ------------------------------------------------

    def preprocess_file(self, in_path: str, out_path: str, cfg: PreprocessConfig) -> GrayImage:
        out = preprocess(read_pgm(in_path), cfg)
        write_pgm(out_path, out)
        logger.info(f"[preprocess] {in_path} -> {out_path} ({cfg.order.value})")
        return out

    def load_corpus(self, source: str) -> list[GrayImage]:
        """Imagens de uma pasta de PGM ou de um contentor de dataset."""
        path = Path(source)
        if path.is_dir():
            return read_corpus_dir(path)
        if path.is_file():
            return [s.image for s in read_container(path).samples]
        raise DataError(f"corpus não encontrado: {source}")

    def skew_report(self, source: str, order_a: str, order_b: str, box=None, canvas=None) -> SkewReport:
        corpus = self.load_corpus(source)
        a = self.preprocess_config(order=order_a, box=box, canvas=canvas)
        b = self.preprocess_config(order=order_b, box=box, canvas=canvas)
        return self.detector.compare(corpus, a, b)

    # --- dados ------------------------------------------------------------

    def read_dataset(self, path: str) -> Dataset:
        if not Path(path).is_file():
            raise DataError(f"dataset não encontrado: {path}")
        return read_container(path)

    def synth_data(self, out_path: str, classes=None, per_class=None, writers=None, seed=None) -> Dataset:
        synth_cfg = self.settings.get("synth", {})
        ds = synth_glyphs(
            class_count=classes if classes is not None else synth_cfg.get("classes", 20),
            per_class=per_class if per_class is not None else synth_cfg.get("per_class", 250),
            writers=writers if writers is not None else synth_cfg.get("writers", 10),
            seed=seed if seed is not None else synth_cfg.get("seed", 0),
        )
        write_container(out_path, ds)
        return ds

    def convert_writer_streams(
        self,
        inputs: Sequence[str],
        code_table_path: str,
        out_path: str,
        writer_start: int = 0,
        on_unknown: str = "skip",
    ) -> Dataset:
        """Um ficheiro por escritor, numerados a partir de `writer_start` pela ordem dada."""
        if not Path(code_table_path).is_file():
            raise DataError(f"tabela de códigos não encontrada: {code_table_path}")
        table = load_code_table(code_table_path)
        if not table:
            raise DataError(f"tabela de códigos vazia: {code_table_path}")
        samples = []
        for offset, path in enumerate(inputs):
            if not Path(path).is_file():
                raise DataError(f"ficheiro não encontrado: {path}")
            writer = writer_start + offset
            samples.extend(read_writer_stream(Path(path).read_bytes(), table, writer, on_unknown))
            logger.info(f"[writer {writer}] {path} lido")
        ds = Dataset(samples, max(table.values()) + 1, metadata={"generator": "writer-stream"})
        write_container(out_path, ds)
        return ds

    def split(self, source: str, train_writers: Sequence[int], val_writers: Sequence[int],
              train_out: str, val_out: str) -> tuple[Dataset, Dataset]:
        train, val = split_by_writer(self.read_dataset(source), train_writers, val_writers)
        write_container(train_out, train)
        write_container(val_out, val)
        logger.info(f"[split] treino {len(train)}, validação {len(val)}")
        return train, val

    # --- treino -----------------------------------------------------------

    def train(
        self,
        arch: str,
        train_path: str,
        val_path: Optional[str],
        seeds: Sequence[int],
        hp: Hyperparams,
        cfg: PreprocessConfig,
        name: Optional[str] = None,
        threads: Optional[int] = None,
        preprocessed: bool = False,
    ) -> list[TrainedColumn]:
        spec = parse_arch(arch)
        train = self.read_dataset(train_path)
        val = self.read_dataset(val_path) if val_path else Dataset([], train.class_count)
        if not preprocessed:
            train, val = preprocess_dataset(train, cfg), preprocess_dataset(val, cfg)
        prefix = name or (spec.tag or "column")
        names = [f"{prefix}_s{seed}" for seed in seeds]
        threads = threads if threads is not None else self.threads

        self.logs_dir.mkdir(parents=True, exist_ok=True)
        log_paths = [self.logs_dir / f"{n}.log" for n in names]
        for path in log_paths:
            path.unlink(missing_ok=True)

        if threads <= 1 or len(seeds) <= 1:
            results = []
            for seed, col_name, log_path in zip(seeds, names, log_paths):
                results.append(train_column(
                    spec, train, val, hp, seed,
                    log_path=str(log_path),
                    on_checkpoint=lambda column, epoch, n=col_name: self.storage.save_checkpoint(column, n, epoch),
                    fill=cfg.fill,
                ))
        else:
            results = train_columns([spec] * len(seeds), seeds, train, val, hp, threads, cfg.fill)
            for result, col_name, log_path in zip(results, names, log_paths):
                log_path.write_text("".join(e.to_line() + "\n" for e in result.log.epochs), encoding="utf-8")
                self.storage.save_checkpoint(result.column, col_name, result.log.best_epoch)

        trained = []
        for result, col_name in zip(results, names):
            path = self.storage.save_column(result.column, col_name)
            trained.append(TrainedColumn(name=col_name, path=path, log=result.log))
        return trained

    def self_test(self, seed: int = 0) -> float:
        arch = self.networks.get("desk", {}).get("self_test_arch")
        return self_test(seed, arch) if arch else self_test(seed)

    # --- avaliação --------------------------------------------------------

    def load_columns(self, paths: Sequence[str]) -> dict:
        columns = []
        for path in paths:
            if not Path(path).is_file():
                raise DataError(f"coluna não encontrada: {path}")
            columns.append(load_column(path))
        return columns_by_name(columns)

    def _eval_dataset(self, path: str, cfg: PreprocessConfig, preprocessed: bool) -> Dataset:
        ds = self.read_dataset(path)
        if len(ds) == 0:
            raise EmptyDatasetError(f"dataset vazio: {path}")
        return ds if preprocessed else preprocess_dataset(ds, cfg)

    def evaluate(
        self,
        column_paths: Sequence[str],
        data_path: str,
        ks: Sequence[int],
        cfg: PreprocessConfig,
        ensembles: Optional[Sequence[Sequence[str]]] = None,
        threads: Optional[int] = None,
        preprocessed: bool = False,
    ) -> list[EvalReport]:
        """Sem `ensembles`, avalia um único MCDNN com todas as colunas."""
        columns = self.load_columns(column_paths)
        if ensembles:
            specs = [EnsembleSpec(tuple(members), name=f"mcdnn{i}") for i, members in enumerate(ensembles)]
        else:
            specs = [EnsembleSpec(tuple(columns), name="mcdnn")]
        dataset = self._eval_dataset(data_path, cfg, preprocessed)
        threads = threads if threads is not None else self.threads
        return evaluate_many(columns, specs, dataset, ks, threads)

    def bench(
        self,
        column_paths: Sequence[str],
        data_path: str,
        cfg: PreprocessConfig,
        warmup: Optional[int] = None,
        limit: Optional[int] = None,
        preprocessed: bool = False,
    ) -> tuple[EvalReport, LatencyBreakdown]:
        columns = self.load_columns(column_paths)
        dataset = self._eval_dataset(data_path, cfg, preprocessed)
        if warmup is None:
            warmup = self.settings.get("evaluation", {}).get("warmup", 5)
        return bench(columns, EnsembleSpec(tuple(columns), name="bench"), dataset, warmup, limit)

    # --- experiências -----------------------------------------------------

    def experiment(self, name: str, draws: int = 10, epochs: Optional[int] = None,
                   classes: int = 20, train_per_class: int = 200, test_per_class: int = 50,
                   base_seed: int = 0, threads: Optional[int] = None) -> ExperimentResult:
        arch = self.networks.get("desk", {}).get("arch")
        hp = desk_hyperparams(**({"epochs": epochs} if epochs else {}))
        common = dict(draws=draws, classes=classes, train_per_class=train_per_class,
                      test_per_class=test_per_class, hp=hp, base_seed=base_seed)
        if arch:
            common["arch"] = arch
        if name == "ensemble-benefit":
            return ensemble_benefit(threads=threads if threads is not None else self.threads, **common)
        if name == "skew":
            return skew_reproduction(**common)
        raise ConfigError(f"experiência desconhecida: {name}")
