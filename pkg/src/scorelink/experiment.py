"""Repeated random-subsampling evaluation of the seven transfer models.

Protocol: fit the source score function once on all customer rows; then
for every learning size n and repetition r, draw a learning/test partition
of the non-customer subpopulation, estimate each model on the identical
learning sample, classify the test sample at the cut-off, and aggregate
the three error rates over repetitions.

Repetitions are independent work units and may run in a process pool; raw
records are sorted by (learning size, repetition, model) before any
reduction, so serial and parallel runs emit byte-identical outputs.
Partitions are drawn per (seed, n, repetition) -- independent across
learning sizes, shared across models within a repetition.
"""

from __future__ import annotations

import csv
import json
import multiprocessing
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import LabeledSample, SplitPlan, draw_split
from .evaluation import RocCurve, error_report, roc, write_roc_csv, write_roc_svg, _tally
from .exceptions import NumericalError
from .links import LinkModelKind, TransferFit, estimate_transition, fit_m7
from .logistic import FitConfig, FitReport, LogisticParams, fit_mle, score

ALL_MODELS = tuple(LinkModelKind)
_METRICS = ("test_error", "type_i", "type_ii")

TABLE_FILES = {metric: f"tables_{metric}.csv" for metric in _METRICS}
RAW_FILE = "raw_records.csv"
METADATA_FILE = "metadata.json"
SVG_FILE = "roc_all.svg"


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep settings; the defaults reproduce the published protocol."""

    learning_sizes: tuple[int, ...] = (50, 100, 150, 200)
    repetitions: int = 50
    seed: int = 0
    models: tuple[LinkModelKind, ...] = ALL_MODELS
    threshold: float = 0.5
    fit: FitConfig = field(default_factory=FitConfig)

    def __post_init__(self):
        if not self.learning_sizes:
            raise ValueError("learning_sizes must be non-empty")
        if any(n < 1 for n in self.learning_sizes):
            raise ValueError("learning sizes must be positive")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie strictly in (0, 1)")
        object.__setattr__(self, "learning_sizes", tuple(int(n) for n in self.learning_sizes))
        object.__setattr__(self, "models", tuple(self.models))

    @property
    def roc_learning_size(self) -> int:
        """Size used for the ROC suite: 200 when swept, else the largest."""
        return 200 if 200 in self.learning_sizes else max(self.learning_sizes)


@dataclass(frozen=True)
class RepetitionRecord:
    """One model evaluated on one learning/test partition."""

    learning_size: int
    repetition: int
    model: str
    converged: bool
    log_likelihood: float
    true_positive: int
    false_positive: int
    true_negative: int
    false_negative: int
    test_error: float
    type_i: float
    type_ii: float
    failed: bool = False

    _FIELDS = (
        "learning_size", "repetition", "model", "converged", "log_likelihood",
        "true_positive", "false_positive", "true_negative", "false_negative",
        "test_error", "type_i", "type_ii", "failed",
    )


@dataclass(frozen=True)
class ResultTable:
    """Mean and standard deviation of one metric per (model, learning size)."""

    metric: str
    models: tuple[str, ...]
    learning_sizes: tuple[int, ...]
    means: np.ndarray  # shape (len(models), len(learning_sizes))
    stds: np.ndarray
    repetitions_used: np.ndarray

    def mean(self, model: LinkModelKind | str, learning_size: int) -> float:
        name = model.value if isinstance(model, LinkModelKind) else model
        return float(
            self.means[self.models.index(name), self.learning_sizes.index(learning_size)]
        )

    def std(self, model: LinkModelKind | str, learning_size: int) -> float:
        name = model.value if isinstance(model, LinkModelKind) else model
        return float(
            self.stds[self.models.index(name), self.learning_sizes.index(learning_size)]
        )


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    source_fit: FitReport
    records: tuple[RepetitionRecord, ...]
    tables: dict[str, ResultTable]

    @property
    def failures(self) -> int:
        return sum(r.failed for r in self.records)


def _fit_model(
    kind: LinkModelKind,
    source_sample: LabeledSample,
    source_params: LogisticParams,
    learning: LabeledSample,
    fit_config: FitConfig,
) -> TransferFit:
    if kind is LinkModelKind.M7:
        return fit_m7(source_sample, learning, fit_config)
    return estimate_transition(kind, source_params, learning, fit_config)


def _run_unit(
    source_sample: LabeledSample,
    source_params: LogisticParams,
    target: LabeledSample,
    config: ExperimentConfig,
    learning_size: int,
    repetition: int,
) -> list[RepetitionRecord]:
    plan = SplitPlan(learning_size, config.repetitions, config.seed)
    learning, test = draw_split(target, plan, repetition)
    records = []
    for kind in config.models:
        try:
            fit = _fit_model(kind, source_sample, source_params, learning, config.fit)
            scores = score(fit.target_params, test.features)
            counts = _tally(scores, test.labels, config.threshold)
            report = error_report(counts, config.threshold)
            records.append(
                RepetitionRecord(
                    learning_size=learning_size,
                    repetition=repetition,
                    model=kind.value,
                    converged=fit.converged,
                    log_likelihood=fit.log_likelihood,
                    true_positive=counts.true_positive,
                    false_positive=counts.false_positive,
                    true_negative=counts.true_negative,
                    false_negative=counts.false_negative,
                    test_error=report.test_error,
                    type_i=report.type_i,
                    type_ii=report.type_ii,
                )
            )
        except (NumericalError, np.linalg.LinAlgError):
            records.append(
                RepetitionRecord(
                    learning_size=learning_size,
                    repetition=repetition,
                    model=kind.value,
                    converged=False,
                    log_likelihood=float("nan"),
                    true_positive=0,
                    false_positive=0,
                    true_negative=0,
                    false_negative=0,
                    test_error=float("nan"),
                    type_i=float("nan"),
                    type_ii=float("nan"),
                    failed=True,
                )
            )
    return records


_WORKER_STATE: dict = {}


def _worker_init(source_sample, source_params, target, config) -> None:
    _WORKER_STATE.update(
        source_sample=source_sample,
        source_params=source_params,
        target=target,
        config=config,
    )


def _worker_run(unit: tuple[int, int]) -> list[RepetitionRecord]:
    learning_size, repetition = unit
    return _run_unit(
        _WORKER_STATE["source_sample"],
        _WORKER_STATE["source_params"],
        _WORKER_STATE["target"],
        _WORKER_STATE["config"],
        learning_size,
        repetition,
    )


def run_experiment(
    source: LabeledSample,
    target: LabeledSample,
    config: ExperimentConfig = ExperimentConfig(),
    jobs: int = 1,
) -> ExperimentResult:
    """Run the full sweep; deterministic for a given seed, whatever ``jobs`` is."""
    if max(config.learning_sizes) >= target.n_records:
        raise ValueError(
            f"largest learning size {max(config.learning_sizes)} must be below "
            f"the target size {target.n_records}"
        )
    source_fit = fit_mle(source, config.fit)
    if not source_fit.converged:
        raise NumericalError("source fit did not converge")

    units = [(n, r) for n in config.learning_sizes for r in range(config.repetitions)]
    if jobs > 1:
        with multiprocessing.Pool(
            jobs,
            initializer=_worker_init,
            initargs=(source, source_fit.params, target, config),
        ) as pool:
            batches = pool.map(_worker_run, units)
    else:
        batches = [
            _run_unit(source, source_fit.params, target, config, n, r) for n, r in units
        ]

    model_order = {kind.value: i for i, kind in enumerate(config.models)}
    records = sorted(
        (rec for batch in batches for rec in batch),
        key=lambda r: (r.learning_size, r.repetition, model_order[r.model]),
    )
    tables = _aggregate(records, config)
    return ExperimentResult(config, source_fit, tuple(records), tables)


def _aggregate(records, config: ExperimentConfig) -> dict[str, ResultTable]:
    models = tuple(kind.value for kind in config.models)
    sizes = config.learning_sizes
    tables = {}
    for metric in _METRICS:
        means = np.full((len(models), len(sizes)), np.nan)
        stds = np.full((len(models), len(sizes)), np.nan)
        used = np.zeros((len(models), len(sizes)), dtype=int)
        for i, model in enumerate(models):
            for j, n in enumerate(sizes):
                values = np.array(
                    [
                        getattr(r, metric)
                        for r in records
                        if r.model == model and r.learning_size == n and not r.failed
                    ]
                )
                used[i, j] = values.shape[0]
                if values.shape[0]:
                    means[i, j] = values.mean()
                    stds[i, j] = values.std(ddof=0)
        tables[metric] = ResultTable(metric, models, sizes, means, stds, used)
    return tables


def emit_roc_suite(
    source: LabeledSample,
    target: LabeledSample,
    config: ExperimentConfig = ExperimentConfig(),
    learning_size: int | None = None,
    out_dir: str | Path | None = None,
) -> dict[str, RocCurve]:
    """One ROC curve per model on the repetition-0 split at ``learning_size``.

    When ``out_dir`` is given, writes one ``roc_<model>.csv`` per model and
    the combined ``roc_all.svg``.
    """
    n = config.roc_learning_size if learning_size is None else learning_size
    source_fit = fit_mle(source, config.fit)
    plan = SplitPlan(n, max(config.repetitions, 1), config.seed)
    learning, test = draw_split(target, plan, 0)

    curves = {}
    for kind in config.models:
        fit = _fit_model(kind, source, source_fit.params, learning, config.fit)
        scores = score(fit.target_params, test.features)
        curves[kind.value] = roc(scores, test.labels)

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, curve in curves.items():
            write_roc_csv(curve, out_dir / f"roc_{name}.csv")
        write_roc_svg(curves, out_dir / SVG_FILE)
    return curves


def write_experiment_outputs(
    result: ExperimentResult,
    out_dir: str | Path,
    dataset_sha256: str | None = None,
    extra_metadata: dict | None = None,
) -> None:
    """Write the aggregated tables, raw records, and run metadata."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    for metric, table in result.tables.items():
        with open(out_dir / TABLE_FILES[metric], "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["learning_size", "model", "mean", "std", "repetitions_used"])
            for j, n in enumerate(table.learning_sizes):
                for i, model in enumerate(table.models):
                    writer.writerow(
                        [
                            n,
                            model,
                            _round3(table.means[i, j]),
                            _round3(table.stds[i, j]),
                            int(table.repetitions_used[i, j]),
                        ]
                    )

    with open(out_dir / RAW_FILE, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(RepetitionRecord._FIELDS)
        for rec in result.records:
            writer.writerow([_cell(getattr(rec, name)) for name in RepetitionRecord._FIELDS])

    config = result.config
    metadata = {
        "tool": "scorelink",
        "version": __version__,
        "seed": config.seed,
        "learning_sizes": list(config.learning_sizes),
        "repetitions": config.repetitions,
        "models": [kind.value for kind in config.models],
        "threshold": config.threshold,
        "fit": {
            "max_iterations": config.fit.max_iterations,
            "gradient_tolerance": config.fit.gradient_tolerance,
            "ridge": config.fit.ridge,
        },
        "rng": "numpy Philox (philox4x64) keyed by (seed, learning_size, repetition)",
        "splits_shared_across_sizes": False,
        "failures": result.failures,
    }
    if dataset_sha256 is not None:
        metadata["dataset_sha256"] = dataset_sha256
    if extra_metadata:
        metadata.update(extra_metadata)
    with open(out_dir / METADATA_FILE, "w", encoding="utf-8") as f:
        json.dump(metadata, f, indent=2, sort_keys=True)
        f.write("\n")


def _round3(value: float) -> str:
    return "" if np.isnan(value) else format(value, ".3f")


def _cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return "" if np.isnan(value) else repr(value)
    return str(value)
