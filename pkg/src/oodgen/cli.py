"""Command-line interface.

Subcommands cover the whole workflow: synthesize benchmark data, draw
out-of-distribution samples around an in-distribution file, encode and
decode through a fitted linear representation, compare sets with
normalized Wasserstein tables, train and score detectors, sweep the
soft-boundary likelihood, and reproduce the entire desk-scale experiment
from one config. Report paths write delimited data first and render a
companion PNG next to it (suppress with --no-figures).

Exit codes: 0 success, 1 usage or validation problem, 2 runtime failure
(a sampler or trainer gave up). Every command takes an explicit --seed;
unset, it falls back to the OODGEN_SEED environment variable, then 0.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, dataio
from .detector import TrainConfig, train_detector
from .errors import (
    GenerationError,
    ManifestError,
    ParseError,
    TrainingError,
    ValidationError,
)
from .features import pca_decode, pca_encode, pca_fit
from .geometry import RandomStream
from .metrics import normalized_distance_report, roc_points
from .neighbors import build_index
from .sampling import RHO_FORMS, GhoConfig, SboConfig, gho_generate, sbo_generate
from .synth import SineConfig, gen_gaussian, gen_moons, gen_sine_id, gen_sine_o3d

ENV_SEED = "OODGEN_SEED"

SYNTH_KINDS = ("gaussian", "moons", "sine-id", "sine-o3d")
SAMPLE_METHODS = ("gho", "hbo", "sbo")

# Fixed stream offsets per pipeline stage; per-sample substreams stay
# well below 2**32, so stages never collide.
_STAGE_STREAM = {"id": 0, "o3d": 1 << 32, "gho": 2 << 32, "sbo": 3 << 32, "hbo": 4 << 32}

DEFAULT_REPRODUCE_CONFIG = {
    "schema_version": 1,
    "seed": 0,
    "id": {"n": 2000, "t_len": 126, "f_param": 35.0, "noise_param": 0.1,
           "param_convention": "variance"},
    "o3d": {"tail_k": 2.0},
    "latent_k": 20,
    "ood_count": 2000,
    "methods": {
        "gho": {"mu": 9.0, "sigma": 0.8},
        "sbo": {"d_minus": 2.0, "d_plus": 2.0, "softness": 1.0, "kappa": 7.0,
                "rho_form": "as_printed"},
        "hbo": {"d_minus": 2.0, "d_plus": 2.0},
    },
    "distance": {"metric": "dtw", "subsample": 128, "subsample_seed": 0},
    "train": {"seeds": 10, "base_seed": 0, "epochs": 100},
}


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the contract here is 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _resolve_seed(value):
    if value is not None:
        return int(value)
    raw = os.environ.get(ENV_SEED)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"{ENV_SEED} must be an integer, got {raw!r}") from None


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _companions(out_path):
    """Paths of the files written alongside a data CSV."""
    base = str(out_path)
    if base.endswith(".csv"):
        base = base[:-4]
    return {
        "labels": Path(base + ".labels.csv"),
        "manifest": Path(base + ".manifest.json"),
        "figure": Path(base + ".png"),
    }


def _write_dataset(out_path, data, *, labels=None, manifest=None, figure=None):
    """Write data plus any companions; returns the companion path map."""
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    side = _companions(out_path)
    dataio.write_csv(out_path, data)
    if labels is not None:
        dataio.write_labels_csv(side["labels"], labels)
    if manifest is not None:
        dataio.write_manifest(side["manifest"], manifest)
    if figure is not None:
        figure(side["figure"])
    return side


# ---------------------------------------------------------------------------
# synth


def cmd_synth(args) -> int:
    from . import plots

    seed = _resolve_seed(args.seed)
    stream = RandomStream(seed)
    labels = None
    if args.kind == "gaussian":
        data = gen_gaussian(args.n, args.dim, stream)
        params = {"kind": args.kind, "n": args.n, "dim": args.dim}
    elif args.kind == "moons":
        data = gen_moons(args.n, args.noise, stream)
        params = {"kind": args.kind, "n": args.n, "noise": args.noise}
    else:
        config = SineConfig(n=args.n, t_len=args.t_len, f_param=args.f_param,
                            noise_param=args.noise_param,
                            param_convention=args.param_convention,
                            tail_k=args.tail_k)
        generate = gen_sine_id if args.kind == "sine-id" else gen_sine_o3d
        ts = generate(config, stream)
        data, labels = ts.series, ts.labels
        params = {"kind": args.kind, "n": args.n, "t_len": args.t_len,
                  "f_param": args.f_param, "noise_param": args.noise_param,
                  "param_convention": args.param_convention}
        if args.kind == "sine-o3d":
            params["tail_k"] = args.tail_k

    manifest = dataio.Manifest(seed=seed, method=args.kind, parameters=params,
                               counts={"rows": int(data.shape[0])})
    figure = None
    if not args.no_figures:
        if args.kind in ("sine-id", "sine-o3d"):
            figure = lambda p: plots.save_series_preview(p, [(args.kind, data)], title=args.kind)
        elif data.shape[1] >= 2:
            figure = lambda p: plots.save_scatter(p, [(args.kind, data)], title=args.kind)
    _write_dataset(args.out, data, labels=labels, manifest=manifest, figure=figure)
    print(f"wrote {args.out} ({data.shape[0]} rows, dim {data.shape[1]}, seed {seed})")
    return 0


# ---------------------------------------------------------------------------
# sample


def _sample_config(args):
    if args.method == "gho":
        if args.mu is None or args.sigma is None:
            raise ValidationError("gho requires --mu and --sigma")
        return GhoConfig(mu=args.mu, sigma=args.sigma)
    if args.d_min is None or args.d_off is None:
        raise ValidationError(f"{args.method} requires --d-min and --d-off")
    if args.method == "hbo":
        if args.softness not in (None, 0.0):
            raise ValidationError("hbo is the softness-0 sampler; use sbo for softness > 0")
        softness = 0.0
    else:
        softness = 1.0 if args.softness is None else args.softness
    return SboConfig(d_minus=args.d_min, d_plus=args.d_off, softness=softness,
                     kappa=args.kappa, rho_form=args.rho_form, max_steps=args.max_steps)


def cmd_sample(args) -> int:
    from . import plots

    seed = _resolve_seed(args.seed)
    id_points = dataio.read_csv(args.id)
    config = _sample_config(args)
    stream = RandomStream(seed)
    if args.method == "gho":
        samples = gho_generate(id_points, config, args.n, stream, workers=args.workers)
        params = {"mu": config.mu, "sigma": config.sigma}
    else:
        samples = sbo_generate(id_points, config, args.n, stream, workers=args.workers)
        params = {"d_minus": config.d_minus, "d_plus": config.d_plus,
                  "softness": config.softness, "kappa": config.kappa,
                  "rho_form": config.rho_form, "max_steps": config.max_steps}

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    manifest = dataio.Manifest(
        seed=seed, method=args.method, parameters=params,
        counts={"rows": int(args.n)},
        source=dataio.source_record(args.id, out.parent),
    )
    figure = None
    if not args.no_figures and samples.shape[1] >= 2:
        figure = lambda p: plots.save_scatter(
            p, [("id", id_points), (args.method, samples)], title=args.method)
    _write_dataset(out, samples, labels=np.ones(args.n, dtype=int),
                   manifest=manifest, figure=figure)
    print(f"wrote {out} ({args.n} samples, method {args.method}, seed {seed})")
    return 0


# ---------------------------------------------------------------------------
# encode / decode


def cmd_encode(args) -> int:
    data = dataio.read_csv(args.input)
    if args.fit:
        if args.k is None:
            raise ValidationError("--fit requires --k")
        model = pca_fit(data, args.k)
        Path(args.model).parent.mkdir(parents=True, exist_ok=True)
        dataio.write_pca_model(args.model, model)
        print(f"fitted {args.model} (dim {model.dim} -> k {model.k})")
    else:
        model = dataio.read_pca_model(args.model)
    latent = pca_encode(model, data)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    dataio.write_csv(out, latent)
    print(f"wrote {out} ({latent.shape[0]} rows, k {latent.shape[1]})")
    return 0


def cmd_decode(args) -> int:
    model = dataio.read_pca_model(args.model)
    latent = dataio.read_csv(args.input)
    decoded = pca_decode(model, latent)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    dataio.write_csv(out, decoded)
    print(f"wrote {out} ({decoded.shape[0]} rows, dim {decoded.shape[1]})")
    return 0


# ---------------------------------------------------------------------------
# eval-dist


def _unique_stems(paths):
    names = []
    for p in paths:
        stem = Path(p).stem
        name = stem
        k = 2
        while name in names:
            name = f"{stem}_{k}"
            k += 1
        names.append(name)
    return names


def _write_matrix_csv(path, ids, matrix):
    lines = ["dataset," + ",".join(ids)]
    for name, row in zip(ids, matrix):
        lines.append(name + "," + ",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_distance_outputs(out_dir, report, figures: bool = True):
    """Write the distance table as CSVs, a JSON report, and a heatmap."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ids = list(report.dataset_ids)
    _write_matrix_csv(out_dir / "distance.csv", ids, report.matrix)
    _write_matrix_csv(out_dir / "distance_normalized.csv", ids, report.normalized)
    payload = {
        "dataset_ids": ids,
        "metric": report.metric,
        "matrix": [[v for v in row] for row in report.matrix.tolist()],
        "normalized": report.normalized.tolist(),
        "degenerate": report.degenerate,
        "subsample_size": report.subsample_size,
        "subsample_seed": report.subsample_seed,
    }
    (out_dir / "distance.json").write_text(dataio.canonical_json(payload), encoding="utf-8")
    if figures:
        from . import plots

        plots.save_matrix_heatmap(out_dir / "distance.png", report.normalized, ids,
                                  title=f"normalized {report.metric} distance")
    return out_dir / "distance.json"


def cmd_eval_dist(args) -> int:
    if len(args.datasets) < 2:
        raise ValidationError("eval-dist needs at least two --datasets")
    datasets = [dataio.read_csv(p) for p in args.datasets]
    ids = _unique_stems(args.datasets)
    report = normalized_distance_report(
        datasets, metric=args.metric, dataset_ids=ids,
        subsample_size=args.subsample, subsample_seed=_resolve_seed(args.subsample_seed),
    )
    write_distance_outputs(args.out, report, figures=not args.no_figures)
    peak = report.matrix.max()
    print(f"wrote {Path(args.out) / 'distance.csv'} "
          f"({len(ids)} sets, metric {report.metric}, peak {_fmt(peak)})")
    return 0


# ---------------------------------------------------------------------------
# train-eval


def _train_rows(id_data, ood_data):
    X = np.vstack([id_data, ood_data])
    y = np.concatenate([np.zeros(id_data.shape[0], dtype=int),
                        np.ones(ood_data.shape[0], dtype=int)])
    return X, y


def run_train_eval(id_data, ood_data, baseline_ood=None, seeds: int = 10,
                   base_seed: int = 0, epochs: int = 100, log=None):
    """Train detectors over a seed range; returns a list of row dicts.

    Each row holds the candidate detector's held-out F1 and AUROC for
    one seed, plus the relative F1 against a detector trained the same
    way on `baseline_ood` when that is given.
    """
    from .metrics import f1_hat

    if seeds < 1:
        raise ValidationError(f"seeds must be >= 1, got {seeds}")
    rows = []
    curves = {}
    for j in range(seeds):
        seed = base_seed + j
        config = TrainConfig(seed=seed, epochs=epochs)
        _, m = train_detector(*_train_rows(id_data, ood_data), config)
        row = {"seed": seed, "f1": m["f1_test"], "auroc": m["auroc_test"]}
        if j == 0:
            curves["candidate"] = roc_points(m["test_scores"], m["test_labels"])
        if baseline_ood is not None:
            _, mb = train_detector(*_train_rows(id_data, baseline_ood), config)
            row["baseline_f1"] = mb["f1_test"]
            row["f1_hat"] = f1_hat(m["f1_test"], mb["f1_test"])
            if j == 0:
                curves["baseline"] = roc_points(mb["test_scores"], mb["test_labels"])
        rows.append(row)
        if log is not None:
            log(f"  seed {seed}: f1 {row['f1']:.4f} auroc {row['auroc']:.4f}"
                + (f" f1_hat {row['f1_hat']:+.4f}" if "f1_hat" in row else ""))
    return rows, curves


def _write_train_eval_outputs(out_dir, rows, curves, figures: bool):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    columns = ["seed", "f1", "auroc"] + (["baseline_f1", "f1_hat"] if "f1_hat" in rows[0] else [])
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(
            str(row[c]) if c == "seed" else _fmt(row[c]) for c in columns))
    (out_dir / "train_eval.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    summary = {"seeds": len(rows)}
    for c in columns[1:]:
        summary[f"mean_{c}"] = float(np.mean([row[c] for row in rows]))
    (out_dir / "train_eval.json").write_text(dataio.canonical_json(summary), encoding="utf-8")

    roc_lines = ["detector,fpr,tpr,threshold"]
    for name in sorted(curves):
        fpr, tpr, thr = curves[name]
        for f, t, h in zip(fpr, tpr, thr):
            roc_lines.append(f"{name},{_fmt(f)},{_fmt(t)},{_fmt(h)}")
    (out_dir / "roc.csv").write_text("\n".join(roc_lines) + "\n", encoding="utf-8")
    if figures:
        from . import plots

        plots.save_roc(out_dir / "roc.png",
                       [(name,) + curves[name][:2] for name in sorted(curves)],
                       title="held-out ROC (first seed)")
    return summary


def cmd_train_eval(args) -> int:
    id_data = dataio.read_csv(args.id)
    ood_data = dataio.read_csv(args.ood)
    baseline = dataio.read_csv(args.baseline_ood) if args.baseline_ood else None
    rows, curves = run_train_eval(
        id_data, ood_data, baseline_ood=baseline, seeds=args.seeds,
        base_seed=_resolve_seed(args.base_seed), epochs=args.epochs, log=print,
    )
    summary = _write_train_eval_outputs(args.out, rows, curves, figures=not args.no_figures)
    mean_bits = " ".join(f"mean_{k.split('_', 1)[1]} {v:.4f}" for k, v in sorted(summary.items())
                         if k.startswith("mean_"))
    print(f"wrote {Path(args.out) / 'train_eval.csv'} ({mean_bits})")
    return 0


# ---------------------------------------------------------------------------
# calibrate-rho


def cmd_calibrate_rho(args) -> int:
    id_points = dataio.read_csv(args.id)
    try:
        grid = [float(v) for v in args.softness_grid.split(",") if v.strip() != ""]
    except ValueError:
        raise ValidationError(f"--softness-grid must be comma-separated numbers, "
                              f"got {args.softness_grid!r}") from None
    if not grid:
        raise ValidationError("--softness-grid is empty")
    forms = list(RHO_FORMS) if args.rho_form == "both" else [args.rho_form]
    seed = _resolve_seed(args.seed)
    index = build_index(id_points)

    runs = []
    for fi, form in enumerate(forms):
        for si, softness in enumerate(grid):
            config = SboConfig(d_minus=args.d_min, d_plus=args.d_off,
                               softness=softness, kappa=args.kappa, rho_form=form)
            stream = RandomStream(seed, (fi * len(grid) + si) << 32)
            samples = sbo_generate(id_points, config, args.n, stream, workers=args.workers)
            d_star = index.min_distances(samples)
            runs.append((form, softness, d_star))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    top = max(float(d[2].max()) for d in runs)
    edges = np.linspace(0.0, top, args.bins + 1)
    entries = []
    summary = {"d_minus": args.d_min, "d_plus": args.d_off, "n": args.n,
               "seed": seed, "bins": args.bins, "runs": []}
    for form, softness, d_star in runs:
        counts, _ = np.histogram(d_star, bins=edges)
        name = f"rho_{form}_s{softness:g}"
        lines = ["bin_lo,bin_hi,count,fraction"]
        for lo, hi, c in zip(edges[:-1], edges[1:], counts):
            lines.append(f"{_fmt(lo)},{_fmt(hi)},{int(c)},{_fmt(c / args.n)}")
        (out_dir / f"{name}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        below = float(np.mean(d_star < args.d_min))
        summary["runs"].append({
            "form": form, "softness": softness,
            "fraction_below_target": below,
            "mean_d_star": float(d_star.mean()),
            "min_d_star": float(d_star.min()),
            "max_d_star": float(d_star.max()),
        })
        entries.append((f"{form} s={softness:g}", edges, counts))
        print(f"  {form} softness {softness:g}: {below:.3f} below d_min, "
              f"mean d* {d_star.mean():.3f}")
    (out_dir / "rho_summary.json").write_text(dataio.canonical_json(summary), encoding="utf-8")
    if not args.no_figures:
        from . import plots

        plots.save_histograms(out_dir / "rho_hist.png", entries, marker=args.d_min,
                              xlabel="achieved min distance", title="soft boundary sweep")
    print(f"wrote {out_dir / 'rho_summary.json'}")
    return 0


# ---------------------------------------------------------------------------
# reproduce


def _merge_config(base: dict, override: dict, path: str = "config") -> dict:
    merged = {}
    unknown = sorted(set(override) - set(base))
    if unknown:
        raise ValidationError(f"{path}: unknown key(s) {unknown}")
    for key, value in base.items():
        if key not in override:
            merged[key] = value
        elif isinstance(value, dict):
            if not isinstance(override[key], dict):
                raise ValidationError(f"{path}.{key}: expected an object")
            merged[key] = _merge_config(value, override[key], f"{path}.{key}")
        else:
            merged[key] = override[key]
    return merged


def load_reproduce_config(path=None) -> dict:
    """The effective pipeline config: file values over built-in defaults."""
    if path is None:
        return dict(DEFAULT_REPRODUCE_CONFIG)
    import json

    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: config must be a JSON object")
    config = _merge_config(DEFAULT_REPRODUCE_CONFIG, raw)
    if config["schema_version"] != 1:
        raise ValidationError(
            f"{path}: schema_version {config['schema_version']} not supported")
    return config


def run_reproduce(config: dict, out_dir, workers: int = 1, figures: bool = True,
                  log=print) -> dict:
    """Run the whole experiment into out_dir; returns the summary dict.

    Stages: synthesize the sine benchmark, fit the linear representation,
    draw every sampler's output in the latent space, decode, build the
    normalized distance table, then train per-seed detectors for every
    sampler against the tail-frequency baseline. All artifacts (delimited
    data, manifests, JSON reports, figures) land flat in out_dir and are
    byte-identical for a fixed config regardless of `workers`.
    """
    from . import plots

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = int(config["seed"])
    (out_dir / "config.json").write_text(dataio.canonical_json(config), encoding="utf-8")

    # synthetic benchmark
    id_cfg = dict(config["id"])
    sine_id = SineConfig(**id_cfg)
    sine_o3d = SineConfig(**id_cfg, tail_k=config["o3d"]["tail_k"])
    log(f"[1/5] sine benchmark: {id_cfg['n']} series of length {id_cfg['t_len']}")
    ts_id = gen_sine_id(sine_id, RandomStream(seed, _STAGE_STREAM["id"]))
    ts_o3d = gen_sine_o3d(sine_o3d, RandomStream(seed, _STAGE_STREAM["o3d"]))
    for name, ts, params in (("id", ts_id, {"kind": "sine-id", **id_cfg}),
                             ("o3d", ts_o3d, {"kind": "sine-o3d", **id_cfg,
                                              "tail_k": config["o3d"]["tail_k"]})):
        manifest = dataio.Manifest(seed=seed, method=params["kind"], parameters=params,
                                   counts={"rows": len(ts)})
        figure = None
        if figures:
            figure = (lambda series: lambda p: plots.save_series_preview(
                p, [(name, series)], title=name))(ts.series)
        _write_dataset(out_dir / f"{name}.csv", ts.series, labels=ts.labels,
                       manifest=manifest, figure=figure)

    # linear representation
    k = int(config["latent_k"])
    log(f"[2/5] linear representation: k={k}")
    model = pca_fit(ts_id, k)
    dataio.write_pca_model(out_dir / "pca.txt", model)
    id_latent = pca_encode(model, ts_id)
    dataio.write_csv(out_dir / "id_latent.csv", id_latent)

    # samplers in the latent space
    count = int(config["ood_count"])
    decoded = {}
    latents = {}
    for method in ("gho", "sbo", "hbo"):
        params = dict(config["methods"][method])
        stream = RandomStream(seed, _STAGE_STREAM[method])
        log(f"[3/5] {method}: {count} samples ({params})")
        if method == "gho":
            samples = gho_generate(id_latent, GhoConfig(**params), count, stream,
                                   workers=workers)
        else:
            if method == "hbo":
                params.setdefault("softness", 0.0)
            samples = sbo_generate(id_latent, SboConfig(**params), count, stream,
                                   workers=workers)
        latents[method] = samples
        dataio.write_csv(out_dir / f"{method}_latent.csv", samples)
        dec = pca_decode(model, samples)
        decoded[method] = dec
        manifest = dataio.Manifest(
            seed=seed, method=method,
            parameters={**config["methods"][method], "latent_k": k},
            counts={"rows": count},
            source=dataio.source_record(out_dir / "id_latent.csv", out_dir),
        )
        figure = None
        if figures:
            figure = (lambda series, nm: lambda p: plots.save_series_preview(
                p, [("id", ts_id.series), (nm, series)], title=nm))(dec, method)
        _write_dataset(out_dir / f"{method}.csv", dec,
                       labels=np.ones(count, dtype=int), manifest=manifest,
                       figure=figure)
    if figures:
        plots.save_scatter(out_dir / "latent.png",
                           [("id", id_latent)] + [(m, latents[m]) for m in ("gho", "sbo", "hbo")],
                           title="latent space (first two components)",
                           xlabel="z0", ylabel="z1")

    # distance table
    dist_cfg = config["distance"]
    log(f"[4/5] distance table: metric {dist_cfg['metric']}, "
        f"subsample {dist_cfg['subsample']}")
    names = ["id", "o3d", "gho", "sbo", "hbo"]
    sets = [ts_id.series, ts_o3d.series] + [decoded[m] for m in ("gho", "sbo", "hbo")]
    report = normalized_distance_report(
        sets, metric=dist_cfg["metric"], dataset_ids=names,
        subsample_size=dist_cfg["subsample"], subsample_seed=dist_cfg["subsample_seed"],
    )
    write_distance_outputs(out_dir, report, figures=figures)
    w_id_sbo = float(report.matrix[names.index("id"), names.index("sbo")])
    w_id_o3d = float(report.matrix[names.index("id"), names.index("o3d")])
    ordering_holds = bool(w_id_sbo > w_id_o3d)
    log(f"[info] W(id, sbo) = {w_id_sbo:.3f} {'>' if ordering_holds else '<='} "
        f"W(id, o3d) = {w_id_o3d:.3f} (expected >; informational)")

    # detectors
    train_cfg = config["train"]
    seeds, base_seed, epochs = (int(train_cfg["seeds"]), int(train_cfg["base_seed"]),
                                int(train_cfg["epochs"]))
    log(f"[5/5] detectors: {seeds} seeds x {len(decoded) + 1} trainings")
    from .metrics import f1_hat

    per_method = {m: [] for m in ("o3d", "gho", "sbo", "hbo")}
    curves = {}
    for j in range(seeds):
        train_seed = base_seed + j
        tc = TrainConfig(seed=train_seed, epochs=epochs)
        _, mb = train_detector(*_train_rows(ts_id.series, ts_o3d.series), tc)
        per_method["o3d"].append({"seed": train_seed, "f1": mb["f1_test"],
                                  "auroc": mb["auroc_test"],
                                  "f1_hat": f1_hat(mb["f1_test"], mb["f1_test"])})
        if j == 0:
            curves["o3d"] = roc_points(mb["test_scores"], mb["test_labels"])
        for method in ("gho", "sbo", "hbo"):
            _, m = train_detector(*_train_rows(ts_id.series, decoded[method]), tc)
            per_method[method].append({"seed": train_seed, "f1": m["f1_test"],
                                       "auroc": m["auroc_test"],
                                       "f1_hat": f1_hat(m["f1_test"], mb["f1_test"])})
            if j == 0:
                curves[method] = roc_points(m["test_scores"], m["test_labels"])
        log(f"  seed {train_seed}: " + " ".join(
            f"{m} f1_hat {per_method[m][-1]['f1_hat']:+.3f}" for m in ("gho", "sbo", "hbo")))

    lines = ["method,seed,f1,auroc,f1_hat"]
    for method in ("o3d", "gho", "sbo", "hbo"):
        for row in per_method[method]:
            lines.append(f"{method},{row['seed']},{_fmt(row['f1'])},"
                         f"{_fmt(row['auroc'])},{_fmt(row['f1_hat'])}")
    (out_dir / "train_eval.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    roc_lines = ["detector,fpr,tpr,threshold"]
    for name in names[1:]:
        fpr, tpr, thr = curves[name]
        for f, t, h in zip(fpr, tpr, thr):
            roc_lines.append(f"{name},{_fmt(f)},{_fmt(t)},{_fmt(h)}")
    (out_dir / "roc.csv").write_text("\n".join(roc_lines) + "\n", encoding="utf-8")
    if figures:
        plots.save_roc(out_dir / "roc.png",
                       [(name,) + curves[name][:2] for name in names[1:]],
                       title="held-out ROC (first seed)")

    summary = {
        "seed": seed,
        "latent_k": k,
        "counts": {"id": len(ts_id), "o3d": len(ts_o3d), "ood": count},
        "distance": {
            "metric": dist_cfg["metric"],
            "w_id_sbo": w_id_sbo,
            "w_id_o3d": w_id_o3d,
            "w_id_sbo_gt_w_id_o3d": ordering_holds,
            "degenerate": report.degenerate,
        },
        "train": {
            method: {
                "mean_f1": float(np.mean([r["f1"] for r in rows])),
                "mean_auroc": float(np.mean([r["auroc"] for r in rows])),
                "mean_f1_hat": float(np.mean([r["f1_hat"] for r in rows])),
            }
            for method, rows in per_method.items()
        },
    }
    (out_dir / "summary.json").write_text(dataio.canonical_json(summary), encoding="utf-8")
    log(f"summary: " + " ".join(
        f"{m} f1_hat {summary['train'][m]['mean_f1_hat']:+.3f}" for m in ("gho", "sbo", "hbo")))
    return summary


def cmd_reproduce(args) -> int:
    config = load_reproduce_config(args.config)
    if args.seed is not None:
        config["seed"] = int(args.seed)
    run_reproduce(config, args.out, workers=args.workers,
                  figures=not args.no_figures, log=print)
    print(f"wrote {Path(args.out) / 'summary.json'}")
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common(sub, seed_help="random seed (default: $OODGEN_SEED or 0)"):
    sub.add_argument("--seed", type=int, default=None, help=seed_help)
    sub.add_argument("--no-figures", action="store_true",
                     help="skip the companion PNG output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oodgen",
                     description="generate and evaluate out-of-distribution samples")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth",
                       help="synthesize a benchmark data set")
    p.add_argument("--kind", required=True, choices=SYNTH_KINDS)
    p.add_argument("--n", required=True, type=int, help="number of rows")
    p.add_argument("--dim", type=int, default=2, help="dimension (gaussian)")
    p.add_argument("--noise", type=float, default=0.0, help="jitter scale (moons)")
    p.add_argument("--t-len", type=int, default=126, help="samples per series (sine)")
    p.add_argument("--f-param", type=float, default=35.0,
                   help="second parameter of the frequency law (sine)")
    p.add_argument("--noise-param", type=float, default=0.1,
                   help="second parameter of the noise law (sine)")
    p.add_argument("--param-convention", choices=("variance", "stddev"),
                   default="variance", help="how to read the law parameters")
    p.add_argument("--tail-k", type=float, default=2.0,
                   help="tail threshold in frequency stddevs (sine-o3d)")
    p.add_argument("--out", required=True, help="output CSV path")
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("sample",
                       help="draw OOD samples around an ID data set")
    p.add_argument("--method", required=True, choices=SAMPLE_METHODS)
    p.add_argument("--id", required=True, help="ID data CSV")
    p.add_argument("--n", required=True, type=int, help="number of samples")
    p.add_argument("--mu", type=float, default=None, help="shell distance (gho)")
    p.add_argument("--sigma", type=float, default=None, help="shell spread (gho)")
    p.add_argument("--d-min", type=float, default=None,
                   help="target minimum distance (sbo/hbo)")
    p.add_argument("--d-off", type=float, default=None, help="step magnitude (sbo/hbo)")
    p.add_argument("--softness", type=float, default=None,
                   help="boundary softness in [0, 1] (sbo; default 1)")
    p.add_argument("--kappa", type=float, default=7.0,
                   help="early-stop sharpness (sbo)")
    p.add_argument("--rho-form", choices=RHO_FORMS, default="as_printed",
                   help="which form of the stop likelihood to use")
    p.add_argument("--max-steps", type=int, default=10_000,
                   help="walk steps allowed per sample")
    p.add_argument("--workers", type=int, default=1,
                   help="worker threads (never changes the output bytes)")
    p.add_argument("--out", required=True, help="output CSV path")
    _add_common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("encode",
                       help="project data through a linear representation")
    p.add_argument("--model", required=True, help="model file (read, or written with --fit)")
    p.add_argument("--fit", action="store_true", help="fit the model on the input first")
    p.add_argument("--k", type=int, default=None, help="number of components (with --fit)")
    p.add_argument("--in", dest="input", required=True, help="input CSV")
    p.add_argument("--out", required=True, help="latent CSV")
    p.set_defaults(func=cmd_encode, no_figures=True)

    p = sub.add_parser("decode",
                       help="map latent rows back to the data space")
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--in", dest="input", required=True, help="latent CSV")
    p.add_argument("--out", required=True, help="decoded CSV")
    p.set_defaults(func=cmd_decode, no_figures=True)

    p = sub.add_parser("eval-dist",
                       help="normalized pairwise Wasserstein distance table")
    p.add_argument("--datasets", required=True, nargs="+", help="two or more CSVs")
    p.add_argument("--metric", choices=("dtw", "euclidean"), default="dtw")
    p.add_argument("--subsample", type=int, default=None,
                   help="cap the common per-set size")
    p.add_argument("--subsample-seed", type=int, default=None,
                   help="seed of the subsampling draw (default: $OODGEN_SEED or 0)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-figures", action="store_true",
                   help="skip the companion PNG output")
    p.set_defaults(func=cmd_eval_dist)

    p = sub.add_parser("train-eval",
                       help="train detectors and score them on a held-out split")
    p.add_argument("--id", required=True, help="ID data CSV (label 0)")
    p.add_argument("--ood", required=True, help="OOD data CSV (label 1)")
    p.add_argument("--baseline-ood", default=None,
                   help="reference OOD CSV for the relative F1")
    p.add_argument("--seeds", type=int, default=10, help="number of seeds to run")
    p.add_argument("--base-seed", type=int, default=None,
                   help="first seed (default: $OODGEN_SEED or 0)")
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-figures", action="store_true",
                   help="skip the companion PNG output")
    p.set_defaults(func=cmd_train_eval)

    p = sub.add_parser("calibrate-rho",
                       help="sweep the soft-boundary likelihood over softness values")
    p.add_argument("--id", required=True, help="ID data CSV")
    p.add_argument("--softness-grid", default="0,0.5,1",
                   help="comma-separated softness values")
    p.add_argument("--rho-form", choices=RHO_FORMS + ("both",), default="both")
    p.add_argument("--d-min", type=float, default=2.0)
    p.add_argument("--d-off", type=float, default=2.0)
    p.add_argument("--kappa", type=float, default=7.0)
    p.add_argument("--n", type=int, default=500, help="samples per configuration")
    p.add_argument("--bins", type=int, default=40, help="histogram bins")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")
    _add_common(p)
    p.set_defaults(func=cmd_calibrate_rho)

    p = sub.add_parser("reproduce",
                       help="run the whole experiment from one config")
    p.add_argument("--config", default=None, help="JSON config (defaults built in)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--workers", type=int, default=1,
                   help="worker threads (never changes the output bytes)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-figures", action="store_true",
                   help="skip all PNG outputs")
    p.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 1
    try:
        return args.func(args)
    except (ValidationError, ParseError, ManifestError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (GenerationError, TrainingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
