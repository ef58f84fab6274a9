import csv
import json
from pathlib import Path

import numpy as np
import pytest

from scorelink import LinkModelKind
from scorelink.experiment import (
    ExperimentConfig,
    emit_roc_suite,
    run_experiment,
    write_experiment_outputs,
)


@pytest.fixture(scope="module")
def small_config():
    return ExperimentConfig(learning_sizes=(50, 100), repetitions=4, seed=202)


@pytest.fixture(scope="module")
def small_result(source, target, small_config):
    return run_experiment(source, target, small_config)


def read_dir(path: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


class TestRunExperiment:
    def test_record_count_and_order(self, small_result, small_config):
        records = small_result.records
        assert len(records) == 2 * 4 * 7
        keys = [(r.learning_size, r.repetition, r.model) for r in records]
        assert keys == sorted(
            keys, key=lambda k: (k[0], k[1], [m.value for m in small_config.models].index(k[2]))
        )

    def test_m1_constant_across_repetitions(self, small_result):
        """M1 ignores the learning sample; its fitted likelihood varies only
        through the sample it is evaluated on, never its parameters. The
        test error varies only through the test split."""
        m1 = [r for r in small_result.records if r.model == "M1"]
        assert len({r.learning_size for r in m1}) == 2
        # classification counts at a fixed test size differ only by split
        for n in (50, 100):
            rows = [r for r in m1 if r.learning_size == n]
            totals = {
                r.true_positive + r.false_positive + r.true_negative + r.false_negative
                for r in rows
            }
            assert totals == {274 - n}

    def test_shared_splits_across_models(self, small_result):
        """All seven models see the identical partition: test-sample class
        totals agree within each (n, repetition)."""
        by_unit = {}
        for r in small_result.records:
            key = (r.learning_size, r.repetition)
            marg = (
                r.true_positive + r.false_negative,  # test positives
                r.false_positive + r.true_negative,  # test negatives
            )
            by_unit.setdefault(key, set()).add(marg)
        assert all(len(margs) == 1 for margs in by_unit.values())

    def test_aggregation_matches_records(self, small_result):
        table = small_result.tables["test_error"]
        for model in table.models:
            for n in table.learning_sizes:
                values = [
                    r.test_error
                    for r in small_result.records
                    if r.model == model and r.learning_size == n and not r.failed
                ]
                np.testing.assert_allclose(table.mean(model, n), np.mean(values), rtol=0, atol=0)
                np.testing.assert_allclose(table.std(model, n), np.std(values), rtol=0, atol=0)

    def test_parallel_equals_serial(self, source, target, small_config, small_result):
        parallel = run_experiment(source, target, small_config, jobs=2)
        assert parallel.records == small_result.records

    def test_learning_size_bound(self, source, target):
        with pytest.raises(ValueError, match="below the target size"):
            run_experiment(source, target, ExperimentConfig(learning_sizes=(274,)))

    def test_model_subset(self, source, target):
        config = ExperimentConfig(
            learning_sizes=(50,), repetitions=2, seed=1, models=(LinkModelKind.M1, LinkModelKind.M3)
        )
        result = run_experiment(source, target, config)
        assert {r.model for r in result.records} == {"M1", "M3"}

    def test_soft_error_trend_for_recalibrated_models(self, source, target):
        """Mean test error of M3/M4 does not get worse with n (0.02 slack)."""
        config = ExperimentConfig(learning_sizes=(50, 200), repetitions=30, seed=9)
        result = run_experiment(source, target, config)
        for model in ("M3", "M4"):
            t = result.tables["test_error"]
            assert t.mean(model, 200) <= t.mean(model, 50) + 0.02


class TestOutputs:
    def test_file_set(self, small_result, source, target, small_config, tmp_path):
        out = tmp_path / "results"
        write_experiment_outputs(small_result, out, dataset_sha256="abc123")
        emit_roc_suite(source, target, small_config, out_dir=out)
        names = {p.name for p in out.iterdir()}
        expected = {
            "tables_test_error.csv",
            "tables_type_i.csv",
            "tables_type_ii.csv",
            "raw_records.csv",
            "metadata.json",
            "roc_all.svg",
        } | {f"roc_M{k}.csv" for k in range(1, 8)}
        assert names == expected

    def test_tables_recomputable_from_raw(self, small_result, tmp_path):
        out = tmp_path / "results"
        write_experiment_outputs(small_result, out)
        with open(out / "raw_records.csv", newline="") as f:
            raw = list(csv.DictReader(f))
        with open(out / "tables_test_error.csv", newline="") as f:
            table = list(csv.DictReader(f))
        for row in table:
            values = [
                float(r["test_error"])
                for r in raw
                if r["model"] == row["model"]
                and r["learning_size"] == row["learning_size"]
                and r["failed"] == "0"
            ]
            assert f"{np.mean(values):.3f}" == row["mean"]
            assert len(values) == int(row["repetitions_used"])

    def test_metadata_contents(self, small_result, tmp_path):
        out = tmp_path / "results"
        write_experiment_outputs(small_result, out, dataset_sha256="deadbeef")
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["seed"] == 202
        assert meta["learning_sizes"] == [50, 100]
        assert meta["repetitions"] == 4
        assert meta["dataset_sha256"] == "deadbeef"
        assert meta["threshold"] == 0.5
        assert "Philox" in meta["rng"]
        assert meta["splits_shared_across_sizes"] is False

    def test_identical_bytes_across_job_counts(self, source, target, small_config, tmp_path):
        outs = []
        for jobs, name in ((1, "serial"), (3, "parallel")):
            out = tmp_path / name
            result = run_experiment(source, target, small_config, jobs=jobs)
            write_experiment_outputs(result, out, dataset_sha256="x")
            emit_roc_suite(source, target, small_config, out_dir=out)
            outs.append(read_dir(out))
        assert outs[0] == outs[1]


class TestRocSuite:
    def test_one_curve_per_model(self, source, target, small_config):
        curves = emit_roc_suite(source, target, small_config, learning_size=100)
        assert set(curves) == {f"M{k}" for k in range(1, 8)}

    def test_default_size_prefers_200(self, source, target):
        assert ExperimentConfig().roc_learning_size == 200
        assert ExperimentConfig(learning_sizes=(50, 100)).roc_learning_size == 100

    def test_m1_curve_fixed_for_fixed_split(self, source, target, small_config):
        a = emit_roc_suite(source, target, small_config, learning_size=100)
        b = emit_roc_suite(source, target, small_config, learning_size=100)
        np.testing.assert_array_equal(a["M1"].miss_rate, b["M1"].miss_rate)
        assert a["M1"].auc == b["M1"].auc
