"""File formats: delimited data sets, model files, and run manifests.

Everything here is plain text, newline "\n", UTF-8, with floats printed
through repr-faithful %.17g so write -> read -> write is byte-identical.
No file contains timestamps, hostnames, or other ambient state; two runs
with the same inputs produce the same bytes. Manifests are strict: the
schema is versioned, unknown fields are rejected rather than ignored,
and the recorded checksum of the source data is verified on load.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .detector import DetectorModel
from .errors import ManifestError, ParseError, ValidationError
from .features import PcaModel
from .points import as_labels, as_point_set

SCHEMA_VERSION = 1

_PCA_MAGIC = "oodgen-pca v1"
_DETECTOR_MAGIC = "oodgen-detector v1"


def _fmt(x: float) -> str:
    # 17 significant digits round-trip any double exactly.
    return f"{x:.17g}"


# ---------------------------------------------------------------------------
# delimited data


def write_csv(path, data) -> None:
    """Write a (count, dim) array as c0,c1,... columns."""
    arr = as_point_set(data, name="data")
    header = ",".join(f"c{i}" for i in range(arr.shape[1]))
    lines = [header]
    for row in arr:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path) -> np.ndarray:
    """Read a c0,c1,... delimited file back into a (count, dim) array.

    Malformed content raises ParseError carrying the 1-based line
    number; an empty or header-only file raises ValidationError.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise ValidationError(f"{path}: empty file")
    header = lines[0].split(",")
    expected = [f"c{i}" for i in range(len(header))]
    if header != expected:
        raise ParseError(f"{path}: header must be {','.join(expected[:3])},..., got {lines[0]!r}", line=1)
    width = len(header)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != width:
            raise ParseError(
                f"{path}: expected {width} fields, got {len(fields)}", line=lineno
            )
        try:
            rows.append([float(v) for v in fields])
        except ValueError:
            raise ParseError(f"{path}: non-numeric field in {line!r}", line=lineno) from None
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    arr = np.array(rows, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{path}: data must be finite")
    return arr


def write_labels_csv(path, labels) -> None:
    """Write 0/1 labels as a single `label` column aligned by row index."""
    y = as_labels(labels)
    lines = ["label"] + [str(int(v)) for v in y]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_labels_csv(path) -> np.ndarray:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "label":
        raise ParseError(f"{path}: expected single-column header 'label'", line=1)
    values = []
    for lineno, line in enumerate(lines[1:], start=2):
        if line not in ("0", "1"):
            raise ParseError(f"{path}: labels must be 0 or 1, got {line!r}", line=lineno)
        values.append(int(line))
    if not values:
        raise ValidationError(f"{path}: no data rows")
    return np.array(values, dtype=int)


# ---------------------------------------------------------------------------
# manifests


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass(frozen=True)
class Manifest:
    """Everything needed to regenerate one output file exactly."""

    seed: int
    method: str  # generator or sampler that produced the data
    parameters: dict  # that method's full parameter set
    counts: dict  # row counts of the produced file(s)
    source: dict | None = None  # {"path": relative input, "sha256": its digest}
    schema_version: int = SCHEMA_VERSION
    tool: str = "oodgen"
    tool_version: str = __version__


_REQUIRED_FIELDS = ("seed", "method", "parameters", "counts", "schema_version", "tool", "tool_version")
_KNOWN_FIELDS = set(_REQUIRED_FIELDS) | {"source"}


def source_record(data_path, relative_to) -> dict:
    """Source entry for a manifest: path relative to the manifest dir."""
    # os.path.relpath, not Path.relative_to: the source may live outside
    # the manifest directory, which needs ".." segments.
    rel = os.path.relpath(data_path, start=relative_to)
    return {"path": Path(rel).as_posix(), "sha256": sha256_file(data_path)}


def manifest_to_json(manifest: Manifest) -> str:
    payload = asdict(manifest)
    if payload["source"] is None:
        del payload["source"]
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_manifest(path, manifest: Manifest) -> None:
    Path(path).write_text(manifest_to_json(manifest), encoding="utf-8")


def read_manifest(path, verify_checksum: bool = True) -> Manifest:
    """Load and validate a manifest.

    Rejects unknown fields, missing fields, and schema version
    mismatches. When the manifest names a source file, its checksum is
    recomputed (relative to the manifest's directory) and compared
    unless verify_checksum is False.
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(payload, dict):
        raise ManifestError(f"{path}: manifest must be a JSON object")
    unknown = sorted(set(payload) - _KNOWN_FIELDS)
    if unknown:
        raise ManifestError(f"{path}: unknown field(s) {unknown}")
    missing = sorted(set(_REQUIRED_FIELDS) - set(payload))
    if missing:
        raise ManifestError(f"{path}: missing required field(s) {missing}")
    if payload["schema_version"] != SCHEMA_VERSION:
        raise ManifestError(
            f"{path}: schema_version {payload['schema_version']} not supported "
            f"(expected {SCHEMA_VERSION})"
        )
    manifest = Manifest(**payload)
    source = manifest.source
    if source is not None:
        if set(source) != {"path", "sha256"}:
            raise ManifestError(f"{path}: source must have exactly 'path' and 'sha256'")
        if verify_checksum:
            data_path = path.parent / source["path"]
            if not data_path.exists():
                raise ManifestError(f"{path}: source file {source['path']} not found")
            actual = sha256_file(data_path)
            if actual != source["sha256"]:
                raise ManifestError(
                    f"{path}: checksum mismatch for {source['path']} "
                    f"(recorded {source['sha256'][:12]}..., actual {actual[:12]}...)"
                )
    return manifest


# ---------------------------------------------------------------------------
# model files


def write_pca_model(path, model: PcaModel) -> None:
    lines = [_PCA_MAGIC, f"{model.dim} {model.k}"]
    lines.append(" ".join(_fmt(v) for v in model.mean))
    for row in model.components:
        lines.append(" ".join(_fmt(v) for v in row))
    lines.append(" ".join(_fmt(v) for v in model.explained_variance))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_pca_model(path) -> PcaModel:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != _PCA_MAGIC:
        raise ParseError(f"{path}: not a '{_PCA_MAGIC}' file", line=1)
    try:
        dim, k = (int(v) for v in lines[1].split())
    except (IndexError, ValueError):
        raise ParseError(f"{path}: expected 'dim k' on line 2", line=2) from None
    expected_lines = 2 + 1 + k + 1
    if len(lines) != expected_lines:
        raise ParseError(f"{path}: expected {expected_lines} lines, got {len(lines)}")

    def parse_row(lineno, width):
        fields = lines[lineno - 1].split()
        if len(fields) != width:
            raise ParseError(f"{path}: expected {width} values", line=lineno)
        try:
            return np.array([float(v) for v in fields])
        except ValueError:
            raise ParseError(f"{path}: non-numeric value", line=lineno) from None

    mean = parse_row(3, dim)
    components = np.vstack([parse_row(4 + i, dim) for i in range(k)])
    explained = parse_row(3 + k + 1, k)
    return PcaModel(mean=mean, components=components, explained_variance=explained)


def write_detector_model(path, model: DetectorModel) -> None:
    lines = [_DETECTOR_MAGIC, " ".join(str(s) for s in model.layer_sizes)]
    for W, b in zip(model.weights, model.biases):
        for row in W:
            lines.append(" ".join(_fmt(v) for v in row))
        lines.append(" ".join(_fmt(v) for v in b))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_detector_model(path) -> DetectorModel:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != _DETECTOR_MAGIC:
        raise ParseError(f"{path}: not a '{_DETECTOR_MAGIC}' file", line=1)
    try:
        sizes = tuple(int(v) for v in lines[1].split())
    except ValueError:
        raise ParseError(f"{path}: expected layer sizes on line 2", line=2) from None
    if len(sizes) < 2 or sizes[-1] != 1 or any(s < 1 for s in sizes):
        raise ParseError(f"{path}: bad layer sizes {sizes}", line=2)
    lineno = 3
    weights, biases = [], []

    def parse_row(width):
        nonlocal lineno
        if lineno > len(lines):
            raise ParseError(f"{path}: file truncated", line=lineno)
        fields = lines[lineno - 1].split()
        if len(fields) != width:
            raise ParseError(f"{path}: expected {width} values, got {len(fields)}", line=lineno)
        try:
            row = np.array([float(v) for v in fields])
        except ValueError:
            raise ParseError(f"{path}: non-numeric value", line=lineno) from None
        lineno += 1
        return row

    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        weights.append(np.vstack([parse_row(fan_out) for _ in range(fan_in)]))
        biases.append(parse_row(fan_out))
    if lineno - 1 != len(lines):
        raise ParseError(f"{path}: trailing content", line=lineno)
    return DetectorModel(layer_sizes=sizes, weights=weights, biases=biases)


def canonical_json(payload) -> str:
    """Sorted-keys JSON with a trailing newline; byte-stable for dicts."""
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
