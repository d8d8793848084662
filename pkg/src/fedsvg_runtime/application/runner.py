from __future__ import annotations

import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Callable, Optional, Sequence

import pandas as pd

from fedsvg_runtime.application.errors import NonFiniteLossError, SpecValidationError
from fedsvg_runtime.application.paradigms import ParadigmResult, TrainingData
from fedsvg_runtime.application.registry import Registry
from fedsvg_runtime.application.reporting import (
    comparison_table,
    format_table,
    load_run,
    training_curves,
)
from fedsvg_runtime.application.run_config import RunConfig
from fedsvg_runtime.application.run_context import RunContext
from fedsvg_runtime.domain.explain.modality_attention import case_modality_attention
from fedsvg_runtime.domain.explain.protocol import run_protocol
from fedsvg_runtime.domain.model.network import predict
from fedsvg_runtime.domain.supervoxel_graph.pipeline import build_supervoxel_graph
from fedsvg_runtime.domain.tensor_autodiff.checkpoint import read_checkpoint
from fedsvg_runtime.domain.volume_forge.generator import synth_dataset
from fedsvg_runtime.ports.artifact_repository import ArtifactRepository
from fedsvg_runtime.ports.config_provider import ConfigProvider
from fedsvg_runtime.ports.outputs_repository import OutputsRepository

logger = logging.getLogger(__name__)

OutputsFactory = Callable[[Path], OutputsRepository]


class Runner:
    """Runs one CLI command end to end and writes its manifest."""

    def __init__(
        self,
        config_provider: ConfigProvider,
        artifacts: ArtifactRepository,
        outputs_factory: OutputsFactory,
        registry: Registry,
    ) -> None:
        self.config_provider = config_provider
        self.artifacts = artifacts
        self.outputs_factory = outputs_factory
        self.registry = registry

    @property
    def config(self) -> RunConfig:
        return self.config_provider.get_config()

    def _context(self, command: str, seed: int, paradigm: Optional[str] = None) -> RunContext:
        return RunContext.from_args(command, seed, self.config_provider.config_hash(), paradigm)

    def synth(self) -> dict:
        config = self.config
        ctx = self._context("synth", config.synth.seed)
        paths = [Path(self.artifacts.write_volume(v)) for v in synth_dataset(config.synth, config.threads)]
        outputs = self.outputs_factory(Path(config.paths.volumes_dir))
        outputs.write_manifest(ctx.manifest(paths))
        logger.info("synth wrote %d volumes to %s", len(paths), config.paths.volumes_dir)
        return {"command": "synth", "volumes": len(paths), "dir": config.paths.volumes_dir}

    def preprocess(self) -> dict:
        config = self.config
        ctx = self._context("preprocess", config.seed)
        inputs, written, rows = [], [], []
        for case_id in self.artifacts.list_volumes():
            volume = self.artifacts.read_volume(case_id)
            graph, summary = build_supervoxel_graph(volume, config.graph, config.seed)
            inputs.append(Path(self.artifacts.volume_path(case_id)))
            written.append(Path(self.artifacts.write_graph(graph)))
            rows.append(asdict(summary))
            print(
                f"{case_id} nodes={summary.n_retained} edges={summary.n_edges} "
                f"threshold={summary.prune_threshold:.6g}"
            )
        outputs = self.outputs_factory(Path(config.paths.graphs_dir))
        table = outputs.write_table(pd.DataFrame(rows), "preprocess_summary.csv")
        outputs.write_manifest(ctx.manifest(written + [Path(table)], inputs))
        return {"command": "preprocess", "graphs": len(written), "dir": config.paths.graphs_dir}

    def run_dir(self, paradigm: str, seed: int) -> Path:
        return Path(self.config.paths.runs_dir) / paradigm / f"seed{seed}"

    def train(self, paradigm: str) -> list[dict]:
        base = self.config
        fn = self.registry.get(paradigm)
        results = []
        for repeat in range(base.repeats):
            seed = base.seed + repeat
            config = base.model_copy(update={"seed": seed})
            ctx = self._context("train", seed, paradigm)
            data = TrainingData.load(self.artifacts, config)
            outputs = self.outputs_factory(self.run_dir(paradigm, seed))
            try:
                result = fn(data, config, seed)
            except NonFiniteLossError as exc:
                dump = outputs.write_dump("nonfinite_dump.json", {"error": str(exc), **exc.context})
                logger.error("non-finite loss, diagnostic dump at %s", dump)
                raise NonFiniteLossError(str(exc), dump_path=dump, context=exc.context) from exc
            results.append(self._persist(ctx, outputs, result, data))
        return results

    def _persist(
        self, ctx: RunContext, outputs: OutputsRepository, result: ParadigmResult, data: TrainingData
    ) -> dict:
        outputs.write_rounds(result.reports)
        for name, params in result.checkpoints.items():
            outputs.write_checkpoint(params, name)
        outputs.write_summary(result.summary)
        inputs = [Path(self.artifacts.graph_path(c)) for c in sorted(data.cases)]
        outputs.write_manifest(ctx.manifest(list(outputs.written), inputs))
        logger.info(
            "paradigm=%s seed=%d best_round=%d final_dice=%.4f",
            result.paradigm,
            ctx.seed,
            result.summary["best_round"],
            result.summary["final"]["dice"],
        )
        return {
            "command": "train",
            "paradigm": result.paradigm,
            "seed": ctx.seed,
            "run_dir": str(outputs.run_dir),
            "final_dice": result.summary["final"]["dice"],
        }

    def training_seed(self, checkpoint: Path) -> int:
        """Seed the checkpoint was trained with, read from its run manifest.

        The client partition is a function of this seed, so it alone recovers the
        test cases of that run.
        """
        manifest = checkpoint.parent / "run_manifest.json"
        if not manifest.exists():
            logger.warning("no run manifest next to %s, using config seed %d", checkpoint, self.config.seed)
            return self.config.seed
        with manifest.open("r", encoding="utf-8") as f:
            return int(json.load(f)["seed"])

    def explain(self, checkpoint: str, out_dir: Optional[str] = None) -> dict:
        """Capture CLS attention on the pooled test cases and run the statistical protocol."""
        seed = self.training_seed(Path(checkpoint))
        config = self.config.model_copy(update={"seed": seed})
        ctx = self._context("explain", seed)
        params = read_checkpoint(Path(checkpoint)).astype(config.precision)
        data = TrainingData.load(self.artifacts, config)
        cases = data.pooled_test()
        if len(cases) < 2:
            cases = list(data.cases.values())
        if len(cases) < 2:
            raise SpecValidationError("cases", "explain needs at least two cases")
        captured = [
            predict(params, case.graph, case.pe, config.model, capture_attention=True).attention
            for case in cases
        ]
        modality = [case_modality_attention(c) for c in captured]
        report = run_protocol(modality)
        outputs = self.outputs_factory(Path(out_dir) if out_dir else Path(checkpoint).parent / "explain")
        outputs.write_attention(captured)
        outputs.write_modality_attention(modality)
        outputs.write_stat_report(report)
        outputs.write_manifest(ctx.manifest(list(outputs.written), [Path(checkpoint)]))
        logger.info("explain cases=%d trend_p=%s", len(cases), report.trend.p)
        return {"command": "explain", "seed": seed, "cases": len(cases), "dir": str(outputs.run_dir)}

    def report(self, run_dirs: Sequence[str], out_dir: Optional[str] = None) -> dict:
        runs = [load_run(d) for d in run_dirs]
        table = comparison_table(runs)
        outputs = self.outputs_factory(Path(out_dir or Path(self.config.paths.runs_dir) / "report"))
        outputs.write_table(table, "comparison.csv")
        outputs.write_table(training_curves(runs), "curves.csv")
        ctx = self._context("report", self.config.seed)
        summaries = [r.run_dir / "summary.json" for r in runs]
        outputs.write_manifest(ctx.manifest(list(outputs.written), summaries))
        print(format_table(table))
        return {"command": "report", "runs": len(runs), "dir": str(outputs.run_dir)}
