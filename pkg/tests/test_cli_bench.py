import json
import subprocess
import sys

import numpy as np
import pytest

from pscluster import AllocationBudgetExceeded, gen_circles
from pscluster.bench import (
    allocation_guard,
    dataset_fingerprint,
    measure_phase,
    memory_scaling,
    run_psc_bench,
    run_sc_bench,
)
from pscluster.cli import main


class TestMeasurePhase:
    def test_hundred_megabyte_phase(self):
        def phase():
            return np.ones(100 * 1024 * 1024 // 8)

        _, elapsed, probe = measure_phase(phase)
        assert probe.allocator_peak_bytes >= 100 * 1024 * 1024
        assert probe.allocator_peak_bytes < 110 * 1024 * 1024
        assert elapsed >= 0.0

    def test_empty_phase(self):
        _, elapsed, probe = measure_phase(lambda: None)
        assert elapsed >= 0.0
        assert probe.allocator_peak_bytes < 1024 * 1024

    def test_sc_allocates_at_least_two_dense_matrices(self):
        from pscluster import ScConfig, gen_blobs, spectral_cluster

        n = 400
        X, _ = gen_blobs(n, 10, 3, spread=1.0, seed=2)
        cfg = ScConfig(k=3, seed=0)
        _, _, probe = measure_phase(lambda: spectral_cluster(X, cfg))
        assert probe.allocator_peak_bytes >= 2 * 8 * n * n

    def test_untraced_mode_skips_allocator(self):
        _, _, probe = measure_phase(lambda: None, trace_memory=False)
        assert probe.allocator_peak_bytes is None
        assert probe.mode == "process-peak-rss"


class TestAllocationGuard:
    def test_passes_under_budget(self):
        with allocation_guard(50 * 1024 * 1024):
            np.ones(1024)

    def test_raises_over_budget(self):
        with pytest.raises(AllocationBudgetExceeded):
            with allocation_guard(1024 * 1024):
                np.ones(4 * 1024 * 1024 // 8)


class TestBenchRunners:
    @pytest.fixture(scope="class")
    def tiny_blobs(self):
        from pscluster import gen_blobs

        return gen_blobs(150, 4, 3, spread=1.0, seed=4)

    def test_sc_report_structure_and_reproducibility(self, tiny_blobs):
        X, y = tiny_blobs
        r1 = run_sc_bench(X, y, k=3, trials=2, base_seed=5)
        r2 = run_sc_bench(X, y, k=3, trials=2, base_seed=5)
        assert r1.labels_sha256 == r2.labels_sha256  # config echo re-run parity
        assert r1.trials == 2
        assert r1.quality.cluster_acc.mean > 0.5
        assert set(r1.phases) == {"total"}
        d = r1.to_dict()
        assert d["dataset"] == dataset_fingerprint(X)
        json.dumps(d)  # serializable

    def test_psc_report_has_both_phases(self, tiny_blobs):
        from pscluster import TrainHyperparams

        X, y = tiny_blobs
        rep = run_psc_bench(X, y, k=3, rate=0.5, trials=2, base_seed=5,
                            sigma=1.0, scale_features=True,
                            hp=TrainHyperparams(epochs=30))
        assert set(rep.phases) == {"training", "inference"}
        assert rep.phases["training"].seconds.mean > 0
        assert rep.phases["inference"].allocator_peak_bytes.mean > 0
        assert len(rep.labels_sha256) == 2

    def test_memory_scaling_shape(self):
        result = memory_scaling("sc", [100, 200])
        assert len(result["peak_bytes"]) == 2
        assert result["peak_bytes"][1] > result["peak_bytes"][0]
        with pytest.raises(ValueError):
            memory_scaling("nope", [100])


def read_labels(path):
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "cluster"
    return [int(v) for v in lines[1:]]


class TestCli:
    def test_gen_and_sc_end_to_end(self, tmp_path):
        data = tmp_path / "circles.csv"
        labels = tmp_path / "labels.csv"
        report = tmp_path / "report.json"
        assert main(["gen", "--dataset", "circles", "--n", "300",
                     "--noise", "0.05", "--seed", "7", "--out", str(data)]) == 0
        assert main(["sc", "--input", str(data), "--label-column", "label",
                     "--k", "2", "--sigma", "0.5", "--seed", "1",
                     "--out", str(labels), "--report", str(report)]) == 0
        got = read_labels(labels)
        assert len(got) == 300
        rep = json.loads(report.read_text())
        assert rep["quality"]["cluster_acc"] >= 0.99
        assert rep["dataset"]["rows"] == 300

    def test_sc_on_iris_reproduces_reference_quality(self, tmp_path):
        from conftest import DATA_DIR

        labels = tmp_path / "labels.csv"
        report = tmp_path / "report.json"
        assert main(["sc", "--input", str(DATA_DIR / "iris.csv"),
                     "--label-column", "label", "--k", "3", "--p", "3",
                     "--seed", "1", "--out", str(labels),
                     "--report", str(report)]) == 0
        assert len(read_labels(labels)) == 150
        rep = json.loads(report.read_text())
        assert abs(rep["quality"]["cluster_acc"] - 0.889) <= 0.05

    def test_psc_train_predict_deterministic(self, tmp_path):
        data = tmp_path / "blobs.csv"
        model = tmp_path / "m.psc"
        out1, out2 = tmp_path / "l1.csv", tmp_path / "l2.csv"
        assert main(["gen", "--dataset", "blobs", "--n", "200", "--d", "4",
                     "--k", "3", "--seed", "3", "--out", str(data)]) == 0
        assert main(["psc-train", "--input", str(data), "--label-column",
                     "label", "--rate", "0.5", "--p", "3", "--sigma", "1.0",
                     "--standardize", "--hidden", "16,32,16", "--epochs", "60",
                     "--seed", "1", "--model", str(model)]) == 0
        for out in (out1, out2):
            assert main(["psc-predict", "--model", str(model), "--input",
                         str(data), "--label-column", "label", "--k", "3",
                         "--seed", "2", "--out", str(out)]) == 0
        assert read_labels(out1) == read_labels(out2)

    def test_psc_extend_matches_predict_on_concatenation(self, tmp_path):
        base = tmp_path / "base.csv"
        new = tmp_path / "new.csv"
        both = tmp_path / "both.csv"
        model = tmp_path / "m.psc"
        assert main(["gen", "--dataset", "blobs", "--n", "120", "--d", "4",
                     "--k", "2", "--seed", "5", "--out", str(base)]) == 0
        assert main(["gen", "--dataset", "blobs", "--n", "80", "--d", "4",
                     "--k", "2", "--seed", "6", "--out", str(new)]) == 0
        base_lines = base.read_text().splitlines()
        new_lines = new.read_text().splitlines()
        both.write_text("\n".join(base_lines + new_lines[1:]) + "\n")

        assert main(["psc-train", "--input", str(base), "--label-column",
                     "label", "--rate", "1.0", "--p", "2", "--sigma", "1.0",
                     "--standardize", "--epochs", "60", "--seed", "1",
                     "--model", str(model)]) == 0
        ext_out = tmp_path / "ext.csv"
        pred_out = tmp_path / "pred.csv"
        assert main(["psc-extend", "--model", str(model), "--base", str(base),
                     "--new", str(new), "--label-column", "label", "--k", "2",
                     "--seed", "9", "--out", str(ext_out)]) == 0
        assert main(["psc-predict", "--model", str(model), "--input",
                     str(both), "--label-column", "label", "--k", "2",
                     "--seed", "9", "--out", str(pred_out)]) == 0
        assert read_labels(ext_out) == read_labels(pred_out)

    def test_eval_outputs_three_scores(self, tmp_path, capsys):
        t = tmp_path / "true.csv"
        p = tmp_path / "pred.csv"
        t.write_text("cluster\n0\n0\n1\n1\n")
        p.write_text("cluster\n1\n1\n0\n0\n")
        assert main(["eval", "--true", str(t), "--pred", str(p)]) == 0
        scores = json.loads(capsys.readouterr().out)
        assert scores["cluster_acc"] == 1.0
        assert scores["ari"] == 1.0
        assert abs(scores["ami"] - 1.0) < 1e-10

    def test_bench_report_structure(self, tmp_path):
        report = tmp_path / "bench.json"
        assert main(["bench", "--dataset", "blobs", "--n", "150", "--d", "4",
                     "--k", "3", "--methods", "sc,psc", "--rate", "0.5",
                     "--trials", "2", "--seed", "1", "--sigma", "1.0",
                     "--standardize", "--epochs", "30",
                     "--report", str(report)]) == 0
        payload = json.loads(report.read_text())
        assert set(payload["reports"]) == {"sc", "psc"}
        sc = payload["reports"]["sc"]
        assert sc["trials"] == 2
        assert "mean" in sc["quality"]["cluster_acc"]
        assert "std" in sc["quality"]["cluster_acc"]
        psc = payload["reports"]["psc"]
        assert "training" in psc["phases"] and "inference" in psc["phases"]

    def test_missing_input_exits_nonzero(self, tmp_path, capsys):
        code = main(["sc", "--input", str(tmp_path / "nope.csv"), "--k", "2",
                     "--out", str(tmp_path / "o.csv")])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_unknown_subcommand_rejected(self):
        with pytest.raises(SystemExit):
            main(["frobnicate"])

    def test_console_script_installed(self, tmp_path):
        # the TS frontend drives this exact entry point
        proc = subprocess.run(
            [sys.executable, "-m", "pscluster.cli", "--help"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert "psc-train" in proc.stdout


def test_main_module_entrypoint():
    from pscluster import cli

    assert callable(cli.main)
