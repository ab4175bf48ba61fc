import json

import numpy as np
import pytest

from oodgen import RandomStream, gen_gaussian
from oodgen.cli import main
from oodgen.dataio import read_csv, read_labels_csv, read_manifest, write_csv


@pytest.fixture(scope="module")
def id_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "id.csv"
    write_csv(path, gen_gaussian(80, 2, RandomStream(11)))
    return path


def run(*argv) -> int:
    return main([str(a) for a in argv])


class TestTopLevel:
    def test_version_exits_zero(self, capsys):
        assert run("--version") == 0
        assert "oodgen" in capsys.readouterr().out

    def test_no_command_is_usage_error(self, capsys):
        assert run() == 1

    def test_unknown_flag_is_usage_error(self, tmp_path, capsys):
        assert run("synth", "--kind", "moons", "--n", "10",
                   "--out", tmp_path / "x.csv", "--frobnicate") == 1

    def test_missing_input_file(self, tmp_path, capsys):
        code = run("sample", "--method", "gho", "--id", tmp_path / "absent.csv",
                   "--n", "5", "--mu", "3", "--sigma", "0.5", "--out", tmp_path / "o.csv")
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_garbage_csv(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("definitely,not\na,csv\n")
        assert run("sample", "--method", "gho", "--id", bad, "--n", "5",
                   "--mu", "3", "--sigma", "0.5", "--out", tmp_path / "o.csv") == 1


class TestSynth:
    def test_moons_writes_csv_manifest_figure(self, tmp_path, capsys):
        out = tmp_path / "moons.csv"
        assert run("synth", "--kind", "moons", "--n", "30", "--noise", "0.05",
                   "--seed", "3", "--out", out) == 0
        data = read_csv(out)
        assert data.shape == (30, 2)
        manifest = read_manifest(tmp_path / "moons.manifest.json")
        assert manifest.method == "moons" and manifest.seed == 3
        assert (tmp_path / "moons.png").exists()
        assert not (tmp_path / "moons.labels.csv").exists()  # unlabeled kind

    def test_no_figures(self, tmp_path, capsys):
        out = tmp_path / "g.csv"
        assert run("synth", "--kind", "gaussian", "--n", "20", "--dim", "3",
                   "--out", out, "--no-figures") == 0
        assert not (tmp_path / "g.png").exists()

    def test_gaussian_dim_1_skips_scatter(self, tmp_path, capsys):
        out = tmp_path / "g1.csv"
        assert run("synth", "--kind", "gaussian", "--n", "20", "--dim", "1",
                   "--out", out) == 0
        assert read_csv(out).shape == (20, 1)
        assert not (tmp_path / "g1.png").exists()

    def test_sine_id_writes_labels(self, tmp_path, capsys):
        out = tmp_path / "sine.csv"
        assert run("synth", "--kind", "sine-id", "--n", "12", "--t-len", "20",
                   "--seed", "1", "--out", out) == 0
        assert read_csv(out).shape == (12, 20)
        labels = read_labels_csv(tmp_path / "sine.labels.csv")
        assert np.array_equal(labels, np.zeros(12, dtype=int))

    def test_sine_o3d_labels_are_one(self, tmp_path, capsys):
        out = tmp_path / "tail.csv"
        assert run("synth", "--kind", "sine-o3d", "--n", "8", "--t-len", "20",
                   "--seed", "1", "--out", out, "--no-figures") == 0
        assert read_labels_csv(tmp_path / "tail.labels.csv").sum() == 8

    def test_seed_changes_output(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run("synth", "--kind", "moons", "--n", "30", "--noise", "0.1",
            "--seed", "0", "--out", a, "--no-figures")
        run("synth", "--kind", "moons", "--n", "30", "--noise", "0.1",
            "--seed", "1", "--out", b, "--no-figures")
        assert a.read_bytes() != b.read_bytes()

    def test_env_seed_fallback(self, tmp_path, capsys, monkeypatch):
        explicit, via_env = tmp_path / "e.csv", tmp_path / "v.csv"
        run("synth", "--kind", "moons", "--n", "25", "--noise", "0.1",
            "--seed", "42", "--out", explicit, "--no-figures")
        monkeypatch.setenv("OODGEN_SEED", "42")
        run("synth", "--kind", "moons", "--n", "25", "--noise", "0.1",
            "--out", via_env, "--no-figures")
        assert explicit.read_bytes() == via_env.read_bytes()

    def test_bad_env_seed(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("OODGEN_SEED", "not-a-number")
        assert run("synth", "--kind", "moons", "--n", "10",
                   "--out", tmp_path / "x.csv", "--no-figures") == 1

    def test_invalid_params_exit_one(self, tmp_path, capsys):
        assert run("synth", "--kind", "moons", "--n", "0",
                   "--out", tmp_path / "x.csv") == 1


class TestSample:
    def test_gho_full_file_set(self, tmp_path, id_csv, capsys):
        out = tmp_path / "gho.csv"
        assert run("sample", "--method", "gho", "--id", id_csv, "--n", "40",
                   "--mu", "4", "--sigma", "0.5", "--seed", "2", "--out", out) == 0
        samples = read_csv(out)
        assert samples.shape == (40, 2)
        assert np.all(read_labels_csv(tmp_path / "gho.labels.csv") == 1)
        manifest = read_manifest(tmp_path / "gho.manifest.json")  # verifies checksum
        assert manifest.method == "gho"
        assert manifest.source["path"].endswith("id.csv")
        assert (tmp_path / "gho.png").exists()

    def test_hbo_respects_target_distance(self, tmp_path, id_csv, capsys):
        out = tmp_path / "hbo.csv"
        assert run("sample", "--method", "hbo", "--id", id_csv, "--n", "25",
                   "--d-min", "1.5", "--d-off", "0.4", "--seed", "2",
                   "--out", out, "--no-figures") == 0
        from oodgen import build_index

        d = build_index(read_csv(id_csv)).min_distances(read_csv(out))
        assert np.all(d >= 1.5)

    def test_gho_missing_params(self, tmp_path, id_csv, capsys):
        assert run("sample", "--method", "gho", "--id", id_csv, "--n", "5",
                   "--out", tmp_path / "o.csv") == 1

    def test_sbo_missing_distances(self, tmp_path, id_csv, capsys):
        assert run("sample", "--method", "sbo", "--id", id_csv, "--n", "5",
                   "--out", tmp_path / "o.csv") == 1

    def test_hbo_rejects_nonzero_softness(self, tmp_path, id_csv, capsys):
        assert run("sample", "--method", "hbo", "--id", id_csv, "--n", "5",
                   "--d-min", "1", "--d-off", "1", "--softness", "0.5",
                   "--out", tmp_path / "o.csv") == 1

    def test_exhausted_walk_exits_two(self, tmp_path, id_csv, capsys):
        code = run("sample", "--method", "hbo", "--id", id_csv, "--n", "1",
                   "--d-min", "1e6", "--d-off", "1e-6", "--max-steps", "5",
                   "--out", tmp_path / "o.csv")
        assert code == 2
        assert "sample 0" in capsys.readouterr().err

    def test_workers_do_not_change_bytes(self, tmp_path, id_csv, capsys):
        args = ["sample", "--method", "sbo", "--id", id_csv, "--n", "30",
                "--d-min", "1", "--d-off", "0.5", "--seed", "7"]
        one, four = tmp_path / "w1", tmp_path / "w4"
        assert run(*args, "--workers", "1", "--out", one / "out.csv") == 0
        assert run(*args, "--workers", "4", "--out", four / "out.csv") == 0
        for name in ("out.csv", "out.labels.csv", "out.manifest.json", "out.png"):
            assert (one / name).read_bytes() == (four / name).read_bytes()


class TestEncodeDecode:
    def test_fit_encode_decode_round_trip(self, tmp_path, capsys):
        data_csv = tmp_path / "data.csv"
        write_csv(data_csv, gen_gaussian(60, 5, RandomStream(4)))
        model = tmp_path / "pca.txt"
        latent = tmp_path / "latent.csv"
        assert run("encode", "--model", model, "--fit", "--k", "5",
                   "--in", data_csv, "--out", latent) == 0
        assert read_csv(latent).shape == (60, 5)
        decoded = tmp_path / "decoded.csv"
        assert run("decode", "--model", model, "--in", latent, "--out", decoded) == 0
        assert np.allclose(read_csv(decoded), read_csv(data_csv), atol=1e-10)

    def test_encode_with_existing_model(self, tmp_path, capsys):
        data_csv = tmp_path / "data.csv"
        write_csv(data_csv, gen_gaussian(40, 4, RandomStream(5)))
        model = tmp_path / "pca.txt"
        first = tmp_path / "first.csv"
        run("encode", "--model", model, "--fit", "--k", "2",
            "--in", data_csv, "--out", first)
        again = tmp_path / "again.csv"
        assert run("encode", "--model", model, "--in", data_csv, "--out", again) == 0
        assert first.read_bytes() == again.read_bytes()

    def test_fit_requires_k(self, tmp_path, capsys):
        data_csv = tmp_path / "data.csv"
        write_csv(data_csv, gen_gaussian(20, 3, RandomStream(6)))
        assert run("encode", "--model", tmp_path / "m.txt", "--fit",
                   "--in", data_csv, "--out", tmp_path / "l.csv") == 1


class TestEvalDist:
    def test_writes_table_json_and_heatmap(self, tmp_path, id_csv, capsys):
        other = tmp_path / "other.csv"
        write_csv(other, gen_gaussian(50, 2, RandomStream(12)) + 4.0)
        out = tmp_path / "dist"
        assert run("eval-dist", "--datasets", id_csv, other, "--metric", "euclidean",
                   "--subsample", "30", "--out", out) == 0
        payload = json.loads((out / "distance.json").read_text())
        assert payload["dataset_ids"] == ["id", "other"]
        assert payload["matrix"][0][0] == 0.0
        assert payload["matrix"][0][1] > 0.0
        assert payload["normalized"][0][1] == 1.0
        assert (out / "distance.csv").exists()
        assert (out / "distance_normalized.csv").exists()
        assert (out / "distance.png").exists()

    def test_duplicate_stems_stay_distinct(self, tmp_path, capsys):
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        a_dir.mkdir(), b_dir.mkdir()
        for d in (a_dir, b_dir):
            write_csv(d / "set.csv", gen_gaussian(20, 2, RandomStream(13)))
        out = tmp_path / "dist"
        with pytest.warns(UserWarning, match="all pairwise distances are zero"):
            code = run("eval-dist", "--datasets", a_dir / "set.csv", b_dir / "set.csv",
                       "--metric", "euclidean", "--out", out, "--no-figures")
        assert code == 0
        payload = json.loads((out / "distance.json").read_text())
        assert payload["dataset_ids"] == ["set", "set_2"]
        assert payload["degenerate"] is True

    def test_needs_two_datasets(self, tmp_path, id_csv, capsys):
        assert run("eval-dist", "--datasets", id_csv, "--out", tmp_path / "d") == 1


class TestTrainEval:
    def test_quick_run(self, tmp_path, id_csv, capsys):
        ood = tmp_path / "ood.csv"
        write_csv(ood, read_csv(id_csv) + 6.0)
        out = tmp_path / "te"
        assert run("train-eval", "--id", id_csv, "--ood", ood,
                   "--baseline-ood", ood, "--seeds", "2", "--epochs", "2",
                   "--out", out) == 0
        lines = (out / "train_eval.csv").read_text().splitlines()
        assert lines[0] == "seed,f1,auroc,baseline_f1,f1_hat"
        assert len(lines) == 3
        summary = json.loads((out / "train_eval.json").read_text())
        assert summary["seeds"] == 2
        assert set(summary) == {"seeds", "mean_f1", "mean_auroc",
                                "mean_baseline_f1", "mean_f1_hat"}
        roc = (out / "roc.csv").read_text().splitlines()
        assert roc[0] == "detector,fpr,tpr,threshold"
        assert (out / "roc.png").exists()

    def test_without_baseline(self, tmp_path, id_csv, capsys):
        ood = tmp_path / "ood.csv"
        write_csv(ood, read_csv(id_csv) + 6.0)
        out = tmp_path / "te"
        assert run("train-eval", "--id", id_csv, "--ood", ood, "--seeds", "1",
                   "--epochs", "2", "--out", out, "--no-figures") == 0
        lines = (out / "train_eval.csv").read_text().splitlines()
        assert lines[0] == "seed,f1,auroc"


class TestCalibrateRho:
    def test_quick_sweep(self, tmp_path, id_csv, capsys):
        out = tmp_path / "rho"
        assert run("calibrate-rho", "--id", id_csv, "--softness-grid", "0,1",
                   "--rho-form", "as_printed", "--d-min", "1", "--d-off", "0.5",
                   "--n", "40", "--bins", "10", "--seed", "5", "--out", out) == 0
        summary = json.loads((out / "rho_summary.json").read_text())
        assert len(summary["runs"]) == 2
        hard = next(r for r in summary["runs"] if r["softness"] == 0.0)
        assert hard["fraction_below_target"] == 0.0
        assert (out / "rho_as_printed_s0.csv").exists()
        assert (out / "rho_as_printed_s1.csv").exists()
        assert (out / "rho_hist.png").exists()

    def test_both_forms(self, tmp_path, id_csv, capsys):
        out = tmp_path / "rho2"
        assert run("calibrate-rho", "--id", id_csv, "--softness-grid", "1",
                   "--d-min", "1", "--d-off", "0.5", "--n", "25",
                   "--out", out, "--no-figures") == 0
        summary = json.loads((out / "rho_summary.json").read_text())
        assert sorted(r["form"] for r in summary["runs"]) == ["as_printed", "text_consistent"]

    def test_bad_grid(self, tmp_path, id_csv, capsys):
        assert run("calibrate-rho", "--id", id_csv, "--softness-grid", "a,b",
                   "--out", tmp_path / "r") == 1


# Small enough for seconds-long runs, but trained long enough that the
# baseline detector's F1 is positive (f1_hat rejects a zero baseline).
SMALL_REPRODUCE = {
    "seed": 0,
    "id": {"n": 60, "t_len": 16},
    "latent_k": 3,
    "ood_count": 25,
    "distance": {"subsample": 12},
    "train": {"seeds": 1, "epochs": 15},
}


class TestReproduce:
    def test_small_run_produces_the_flat_file_set(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps(SMALL_REPRODUCE))
        out = tmp_path / "run"
        assert run("reproduce", "--config", config, "--out", out) == 0
        expected = {
            "config.json", "summary.json", "pca.txt", "id_latent.csv",
            "distance.csv", "distance_normalized.csv", "distance.json",
            "train_eval.csv", "roc.csv",
            "id.csv", "id.labels.csv", "id.manifest.json",
            "o3d.csv", "o3d.labels.csv", "o3d.manifest.json",
        }
        for method in ("gho", "sbo", "hbo"):
            expected |= {f"{method}.csv", f"{method}.labels.csv",
                         f"{method}.manifest.json", f"{method}_latent.csv"}
        names = {p.name for p in out.iterdir()}
        assert expected <= names
        pngs = {n for n in names if n.endswith(".png")}
        assert {"id.png", "o3d.png", "gho.png", "sbo.png", "hbo.png",
                "latent.png", "distance.png", "roc.png"} == pngs
        summary = json.loads((out / "summary.json").read_text())
        assert set(summary["train"]) == {"o3d", "gho", "sbo", "hbo"}
        assert "w_id_sbo_gt_w_id_o3d" in summary["distance"]
        out_text = capsys.readouterr().out
        assert "[info] W(id, sbo)" in out_text

    def test_every_manifest_validates(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps(SMALL_REPRODUCE))
        out = tmp_path / "run"
        assert run("reproduce", "--config", config, "--out", out,
                   "--no-figures") == 0
        manifests = sorted(out.glob("*.manifest.json"))
        assert len(manifests) == 5
        for path in manifests:
            read_manifest(path)  # checksum and schema must hold

    def test_unknown_config_key(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"surprise": 1}))
        assert run("reproduce", "--config", config, "--out", tmp_path / "r") == 1
        assert "surprise" in capsys.readouterr().err

    def test_unknown_nested_key(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"train": {"optimizer": "sgd"}}))
        assert run("reproduce", "--config", config, "--out", tmp_path / "r") == 1

    def test_bad_schema_version(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"schema_version": 9}))
        assert run("reproduce", "--config", config, "--out", tmp_path / "r") == 1

    def test_invalid_json_config(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text("{broken")
        assert run("reproduce", "--config", config, "--out", tmp_path / "r") == 1

    def test_seed_flag_overrides_config(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps(SMALL_REPRODUCE))
        a, b = tmp_path / "a", tmp_path / "b"
        assert run("reproduce", "--config", config, "--out", a, "--no-figures") == 0
        assert run("reproduce", "--config", config, "--seed", "1", "--out", b,
                   "--no-figures") == 0
        assert (a / "id.csv").read_bytes() != (b / "id.csv").read_bytes()
        assert json.loads((b / "config.json").read_text())["seed"] == 1
