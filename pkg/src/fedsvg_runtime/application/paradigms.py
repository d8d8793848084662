"""Centralized, federated and isolated training loops."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from fedsvg_runtime.application.run_config import RunConfig
from fedsvg_runtime.domain.common.ids import ClientId
from fedsvg_runtime.domain.federation.communication import CommunicationLedger, transfer_size
from fedsvg_runtime.domain.federation.fedavg import fedavg_aggregate
from fedsvg_runtime.domain.federation.local_training import local_train_epoch
from fedsvg_runtime.domain.federation.metrics import CaseEvaluation, evaluate_cases, summarize
from fedsvg_runtime.domain.federation.models import (
    CaseData,
    ClientSplit,
    ClientState,
    EarlyStopper,
    EvalMetrics,
    RoundReport,
)
from fedsvg_runtime.domain.federation.partition import partition_dataset
from fedsvg_runtime.domain.model.init import init_params
from fedsvg_runtime.domain.model.laplacian import laplacian_pe
from fedsvg_runtime.domain.tensor_autodiff.params import ParamStore
from fedsvg_runtime.ports.artifact_repository import ArtifactRepository

logger = logging.getLogger(__name__)

GLOBAL = "global"


@dataclass(frozen=True)
class TrainingData:
    splits: list[ClientSplit]
    cases: dict[str, CaseData]

    @classmethod
    def load(cls, artifacts: ArtifactRepository, config: RunConfig) -> "TrainingData":
        case_ids = artifacts.list_graphs()
        splits = partition_dataset(case_ids, config.partition, config.seed)
        cases: dict[str, CaseData] = {}
        for case_id in case_ids:
            graph = artifacts.read_graph(case_id)
            mask = artifacts.read_volume(case_id).mask.ravel(order="F").astype(bool)
            pe = laplacian_pe(graph.edges, graph.n_nodes, config.model.pe_dim)
            cases[case_id] = CaseData(graph=graph, mask=mask, pe=pe)
        return cls(splits=splits, cases=cases)

    def train_of(self, split: ClientSplit) -> list[CaseData]:
        return [self.cases[c] for c in split.train]

    def test_of(self, split: ClientSplit) -> list[CaseData]:
        return [self.cases[c] for c in split.test]

    def pooled_train(self) -> list[CaseData]:
        return [case for split in self.splits for case in self.train_of(split)]

    def pooled_test(self) -> list[CaseData]:
        return [case for split in self.splits for case in self.test_of(split)]


@dataclass
class ParadigmResult:
    paradigm: str
    reports: list[RoundReport]
    summary: dict
    checkpoints: dict[str, ParamStore] = field(default_factory=dict)


def _metrics_dict(metrics: EvalMetrics) -> dict:
    return {
        "loss": metrics.loss,
        "dice": metrics.dice,
        "precision": metrics.precision,
        "recall": metrics.recall,
        "f1": metrics.f1,
        "n_cases": metrics.n_cases,
    }


def _report(
    paradigm: str,
    client: str,
    round_index: int,
    metrics: EvalMetrics,
    lr: float,
    bytes_fp32: int = 0,
    bytes_half: int = 0,
    wall_time_s: float = 0.0,
) -> RoundReport:
    return RoundReport(
        paradigm=paradigm,
        client=client,
        round=round_index,
        loss=metrics.loss,
        dice=metrics.dice,
        precision=metrics.precision,
        recall=metrics.recall,
        f1=metrics.f1,
        lr=lr,
        bytes_fp32=bytes_fp32,
        bytes_half=bytes_half,
        wall_time_s=wall_time_s,
    )


class _Stopwatch:
    def __init__(self, deterministic: bool, clock: Callable[[], float]) -> None:
        self.deterministic = deterministic
        self.clock = clock
        self.started = clock()

    def elapsed(self) -> float:
        return 0.0 if self.deterministic else round(self.clock() - self.started, 6)


def _initial_params(config: RunConfig, seed: int) -> ParamStore:
    return init_params(config.model, config.patch_features, seed, dtype=np.dtype(config.precision))


def _single_client_loop(
    paradigm: str,
    client: ClientState,
    client_index: int,
    eval_cases: Sequence[CaseData],
    max_rounds: int,
    config: RunConfig,
    seed: int,
    label: str,
    stopwatch: _Stopwatch,
) -> tuple[list[RoundReport], EarlyStopper, int]:
    training = config.training
    stopper = EarlyStopper(patience=training.patience)
    reports: list[RoundReport] = []
    params = client.params
    last_round = -1
    for round_index in range(max_rounds):
        last_round = round_index
        params, epoch = local_train_epoch(
            client, params, training, config.model, round_index, seed, client_index
        )
        if round_index % training.eval_every and round_index != max_rounds - 1:
            continue
        metrics = summarize(evaluate_cases(params, eval_cases, config.model))
        reports.append(
            _report(paradigm, label, round_index, metrics, epoch.lr, wall_time_s=stopwatch.elapsed())
        )
        logger.info(
            "paradigm=%s client=%s round=%d loss=%.5f train_loss=%.5f dice=%.4f lr=%.3g",
            paradigm,
            label,
            round_index,
            metrics.loss,
            epoch.mean_loss,
            metrics.dice,
            epoch.lr,
        )
        if stopper.update(round_index, metrics.dice, params):
            logger.warning(
                "early stop paradigm=%s client=%s round=%d best_round=%d",
                paradigm,
                label,
                round_index,
                stopper.best_round,
            )
            break
    return reports, stopper, last_round


def run_centralized(
    data: TrainingData, config: RunConfig, seed: int, clock: Callable[[], float] = time.perf_counter
) -> ParadigmResult:
    """Plain epochs over the pooled training cases, evaluated on the pooled test cases."""
    params = _initial_params(config, seed)
    client = ClientState(ClientId(0), data.pooled_train(), data.pooled_test(), params)
    stopwatch = _Stopwatch(config.training.deterministic_outputs, clock)
    reports, stopper, last_round = _single_client_loop(
        "centralized",
        client,
        0,
        client.test,
        config.training.epochs,
        config,
        seed,
        GLOBAL,
        stopwatch,
    )
    best = stopper.best_params or client.params
    final = summarize(evaluate_cases(best, client.test, config.model))
    summary = {
        "paradigm": "centralized",
        "seed": seed,
        "stopped_round": last_round,
        "best_round": stopper.best_round,
        "best_dice": stopper.best_metric if stopper.best_round >= 0 else 0.0,
        "final": _metrics_dict(final),
        "n_parameters": params.size,
        "clients": [],
        "communication": None,
    }
    return ParadigmResult("centralized", reports, summary, {"best.ckpt": best, "final.ckpt": client.params})


def _client_rows(
    evaluations: dict[str, CaseEvaluation], splits: Sequence[ClientSplit]
) -> list[tuple[str, EvalMetrics]]:
    return [
        (str(int(split.client_id)), summarize([evaluations[c] for c in split.test]))
        for split in splits
    ]


def run_federated(
    data: TrainingData, config: RunConfig, seed: int, clock: Callable[[], float] = time.perf_counter
) -> ParadigmResult:
    """FedAvg rounds: every client trains one local round from the global model, then aggregation.

    Clients may train on a thread pool; aggregation always runs over the fixed
    client order after all of them have finished.
    """
    training = config.training
    global_params = _initial_params(config, seed)
    clients = [
        ClientState(split.client_id, data.train_of(split), data.test_of(split), global_params)
        for split in data.splits
    ]
    pooled_test = data.pooled_test()
    size = transfer_size(global_params.size)
    ledger = CommunicationLedger()
    stopper = EarlyStopper(patience=training.patience)
    stopwatch = _Stopwatch(training.deterministic_outputs, clock)
    reports: list[RoundReport] = []
    last_round = -1

    def train_client(index: int, snapshot: ParamStore, round_index: int):
        return local_train_epoch(
            clients[index], snapshot, training, config.model, round_index, seed, index
        )

    with ThreadPoolExecutor(max_workers=max(1, config.threads)) as pool:
        for round_index in range(training.rounds):
            last_round = round_index
            snapshot = global_params
            n = len(clients)
            results = list(pool.map(train_client, range(n), [snapshot] * n, [round_index] * n))
            global_params = fedavg_aggregate(
                [params for params, _ in results], [c.n_samples for c in clients]
            )
            ledger.record_round(size, len(clients))
            lr = results[0][1].lr
            logger.info(
                "paradigm=federated round=%d train_loss=%.5f bytes_fp32=%d bytes_half=%d",
                round_index,
                float(np.mean([m.mean_loss for _, m in results])),
                size.bytes_fp32 * len(clients),
                size.bytes_half * len(clients),
            )
            if round_index % training.eval_every and round_index != training.rounds - 1:
                continue
            evaluations = {e.case_id: e for e in evaluate_cases(global_params, pooled_test, config.model)}
            pooled = summarize(list(evaluations.values()))
            wall = stopwatch.elapsed()
            reports.append(
                _report(
                    "federated",
                    GLOBAL,
                    round_index,
                    pooled,
                    lr,
                    size.bytes_fp32 * len(clients),
                    size.bytes_half * len(clients),
                    wall,
                )
            )
            for label, metrics in _client_rows(evaluations, data.splits):
                reports.append(
                    _report(
                        "federated", label, round_index, metrics, lr, size.bytes_fp32, size.bytes_half, wall
                    )
                )
            logger.info("paradigm=federated round=%d dice=%.4f lr=%.3g", round_index, pooled.dice, lr)
            if stopper.update(round_index, pooled.dice, global_params):
                logger.warning(
                    "early stop paradigm=federated round=%d best_round=%d",
                    round_index,
                    stopper.best_round,
                )
                break

    best = stopper.best_params or global_params
    final_evaluations = {e.case_id: e for e in evaluate_cases(best, pooled_test, config.model)}
    summary = {
        "paradigm": "federated",
        "seed": seed,
        "stopped_round": last_round,
        "best_round": stopper.best_round,
        "best_dice": stopper.best_metric if stopper.best_round >= 0 else 0.0,
        "final": _metrics_dict(summarize(list(final_evaluations.values()))),
        "n_parameters": global_params.size,
        "clients": [
            {
                "client": label,
                "n_train": c.n_samples,
                "n_test": len(c.test),
                "final": _metrics_dict(metrics),
            }
            for (label, metrics), c in zip(_client_rows(final_evaluations, data.splits), clients)
        ],
        "communication": {
            "parameters": size.parameters,
            "per_client_round_fp32": size.bytes_fp32,
            "per_client_round_half": size.bytes_half,
            **ledger.as_dict(),
        },
    }
    return ParadigmResult("federated", reports, summary, {"best.ckpt": best, "final.ckpt": global_params})


def run_isolated(
    data: TrainingData, config: RunConfig, seed: int, clock: Callable[[], float] = time.perf_counter
) -> ParadigmResult:
    """Independent training per client on local data only.

    Early stopping watches each client's local test Dice; the final metrics of
    every client's best model are computed on the pooled test cases.
    """
    pooled_test = data.pooled_test()
    stopwatch = _Stopwatch(config.training.deterministic_outputs, clock)

    def run_client(index: int):
        split = data.splits[index]
        params = _initial_params(config, seed)
        client = ClientState(split.client_id, data.train_of(split), data.test_of(split), params)
        label = str(int(split.client_id))
        reports, stopper, last_round = _single_client_loop(
            "isolated",
            client,
            index,
            client.test,
            config.training.rounds,
            config,
            seed,
            label,
            stopwatch,
        )
        best = stopper.best_params or client.params
        return client, reports, stopper, last_round, best

    with ThreadPoolExecutor(max_workers=max(1, config.threads)) as pool:
        outcomes = list(pool.map(run_client, range(len(data.splits))))

    reports: list[RoundReport] = []
    clients_summary = []
    checkpoints: dict[str, ParamStore] = {}
    finals = []
    for client, client_reports, stopper, last_round, best in outcomes:
        reports.extend(client_reports)
        final = summarize(evaluate_cases(best, pooled_test, config.model))
        finals.append(final)
        label = str(int(client.client_id))
        checkpoints[f"best_client{label}.ckpt"] = best
        clients_summary.append(
            {
                "client": label,
                "n_train": client.n_samples,
                "n_test": len(client.test),
                "stopped_round": last_round,
                "best_round": stopper.best_round,
                "best_dice": stopper.best_metric if stopper.best_round >= 0 else 0.0,
                "final": _metrics_dict(final),
            }
        )
    average = EvalMetrics(
        loss=float(np.mean([f.loss for f in finals])),
        dice=float(np.mean([f.dice for f in finals])),
        precision=float(np.mean([f.precision for f in finals])),
        recall=float(np.mean([f.recall for f in finals])),
        f1=float(np.mean([f.f1 for f in finals])),
        n_cases=len(pooled_test),
    )
    summary = {
        "paradigm": "isolated",
        "seed": seed,
        "stopped_round": max(c["stopped_round"] for c in clients_summary),
        "best_round": max(c["best_round"] for c in clients_summary),
        "best_dice": max(c["best_dice"] for c in clients_summary),
        "final": _metrics_dict(average),
        "n_parameters": outcomes[0][4].size,
        "clients": clients_summary,
        "communication": None,
    }
    return ParadigmResult("isolated", reports, summary, checkpoints)
