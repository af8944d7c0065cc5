"""UCR-format loading, synthetic fixtures and result files."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .dataset import TimeSeriesDataset
from .errors import ConfigError, DomainError, ParseError, RClustError, VariableLengthError
from .randkit import RandomStream

__all__ = [
    "DatasetSource",
    "ResultRecord",
    "RESULT_COLUMNS",
    "load_ucr_tsv",
    "read_ucr_file",
    "write_ucr_tsv",
    "synth_dataset",
    "write_results",
    "read_results",
]

MERGE_POLICIES = ("merge", "train-only", "test-only")
RESULT_COLUMNS = ("dataset", "config", "seed", "runs", "ari_runs", "best_ari",
                  "wall_ms", "retained_dims")


@dataclass(frozen=True)
class DatasetSource:
    train_path: str | None = None
    test_path: str | None = None
    merge_policy: str = "merge"
    name: str | None = None

    def __post_init__(self):
        if self.merge_policy not in MERGE_POLICIES:
            raise ConfigError(f"merge_policy must be one of {MERGE_POLICIES}")

    def paths(self) -> list:
        wanted = {
            "merge": [self.train_path, self.test_path],
            "train-only": [self.train_path],
            "test-only": [self.test_path],
        }[self.merge_policy]
        return [p for p in wanted if p]


def _parse_float(token, path, line, column):
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"cannot parse {token!r} as a number", path, line, column) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {token!r}", path, line, column)
    return value


def read_ucr_file(path):
    """Parse one UCR TSV file into ``(raw_labels, values)``."""
    path = Path(path)
    if not path.is_file():
        raise ParseError("no such file", path)
    raw_labels, rows, width = [], [], None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            tokens = line.split("\t") if "\t" in line else line.split(",")
            if len(tokens) < 2:
                raise ParseError("row needs a label and at least one value", path, lineno)
            if width is None:
                width = len(tokens)
            elif len(tokens) != width:
                raise VariableLengthError(
                    f"row has {len(tokens)} columns, expected {width}; "
                    "variable-length series are not supported", path, lineno)
            raw_labels.append(_parse_float(tokens[0], path, lineno, 1))
            rows.append([_parse_float(t, path, lineno, c)
                         for c, t in enumerate(tokens[1:], start=2)])
    if not rows:
        raise ParseError("empty file", path)
    return np.asarray(raw_labels), np.asarray(rows, dtype=np.float64)


def _znorm(values):
    mu = values.mean(axis=1, keepdims=True)
    sd = values.std(axis=1, keepdims=True)
    sd[sd == 0.0] = 1.0
    return (values - mu) / sd


def load_ucr_tsv(source, znormalize: bool = False, name: str | None = None) -> TimeSeriesDataset:
    """Load a UCR dataset.

    ``source`` is a :class:`DatasetSource` or a single path. Labels are
    densified to ``0..C-1`` in sorted order of the original values, so
    labels ``{2, 5, 9}`` always become ``{0, 1, 2}``.
    """
    if not isinstance(source, DatasetSource):
        source = DatasetSource(train_path=str(source), merge_policy="train-only")
    paths = source.paths()
    if not paths:
        raise ConfigError(f"no file selected by merge policy {source.merge_policy!r}")
    parts = [read_ucr_file(p) for p in paths]
    widths = {v.shape[1] for _, v in parts}
    if len(widths) != 1:
        raise VariableLengthError(
            f"files have different series lengths {sorted(widths)}", paths[-1])
    raw = np.concatenate([lab for lab, _ in parts])
    values = np.vstack([v for _, v in parts])
    _, labels = np.unique(raw, return_inverse=True)
    if znormalize:
        values = _znorm(values)
    if name is None:
        name = source.name or Path(paths[0]).stem.replace("_TRAIN", "").replace("_TEST", "")
    return TimeSeriesDataset(name, values, labels)


def write_ucr_tsv(dataset: TimeSeriesDataset, path) -> None:
    """Write in UCR layout; ``repr`` of a float round-trips exactly."""
    labels = dataset.labels if dataset.labels is not None else np.zeros(dataset.n_series, int)
    with open(path, "w") as fh:
        for lab, row in zip(labels, dataset.values):
            fh.write("\t".join([str(int(lab))] + [repr(float(v)) for v in row]) + "\n")


def synth_dataset(kind: str, n: int, length: int, classes: int, stream: RandomStream,
                  noise: float = 0.2, name: str | None = None) -> TimeSeriesDataset:
    """Synthetic fixtures.

    ``blobs-sine``: series of class ``c`` is ``sin(2 pi f_c t / length + phase)``
    with ``f_c = 3 + 4c`` cycles, a uniformly random phase per series and
    Gaussian noise of standard deviation ``noise`` (relative to unit
    amplitude). Classes are assigned round-robin. ``white-noise``: iid
    standard Gaussian values, all labelled 0.
    """
    if classes < 1 or n < classes:
        raise DomainError(f"need n >= classes >= 1, got n={n}, classes={classes}")
    g = stream.generator
    if kind == "white-noise":
        values = g.standard_normal((n, length))
        labels = np.zeros(n, dtype=np.int64)
    elif kind == "blobs-sine":
        labels = np.arange(n) % classes
        freqs = 3.0 + 4.0 * labels
        phase = g.uniform(0.0, 2.0 * np.pi, size=n)
        t = np.arange(length) / length
        values = np.sin(2.0 * np.pi * freqs[:, None] * t[None, :] + phase[:, None])
        values = values + noise * g.standard_normal((n, length))
    else:
        raise ConfigError(f"unknown synthetic dataset kind {kind!r}")
    return TimeSeriesDataset(name or f"{kind}-{n}x{length}", values, labels)


@dataclass
class ResultRecord:
    """One protocol run of one configuration on one dataset."""

    dataset: str
    config: str
    seed: int
    runs: int
    ari_runs: list = field(default_factory=list)
    best_ari: float | None = None
    wall_ms: float = 0.0
    retained_dims: int | None = None

    def __post_init__(self):
        if self.best_ari is None and self.ari_runs:
            self.best_ari = max(self.ari_runs)


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, list):
        return ";".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _records_markdown(records) -> str:
    lines = ["| " + " | ".join(RESULT_COLUMNS) + " |",
             "|" + "---|" * len(RESULT_COLUMNS)]
    for r in records:
        d = asdict(r)
        cells = []
        for col in RESULT_COLUMNS:
            v = d[col]
            if col == "ari_runs":
                cells.append(", ".join(f"{x:.3f}" for x in v))
            elif isinstance(v, float):
                cells.append(f"{v:.3f}" if col != "wall_ms" else f"{v:.1f}")
            else:
                cells.append("" if v is None else str(v))
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def format_results(records, fmt: str = "csv") -> str:
    if fmt == "json":
        return json.dumps([asdict(r) for r in records], indent=2) + "\n"
    if fmt == "markdown":
        return _records_markdown(records)
    if fmt != "csv":
        raise ConfigError(f"unknown results format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for r in records:
        d = asdict(r)
        writer.writerow([_csv_cell(d[c]) for c in RESULT_COLUMNS])
    return buf.getvalue()


def write_results(records, path, fmt: str = "csv") -> None:
    """Serialize result records.

    CSV columns are :data:`RESULT_COLUMNS`; ``ari_runs`` is a ``;``-joined
    list. JSON is a top-level array of objects with the same keys.
    """
    text = format_results(list(records), fmt)
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise RClustError(f"cannot write results to {path}: {exc}") from exc


def read_results(path, fmt: str | None = None) -> list:
    path = Path(path)
    fmt = fmt or ("json" if path.suffix == ".json" else "csv")
    if fmt == "json":
        return [ResultRecord(**d) for d in json.loads(path.read_text())]
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(ResultRecord(
                dataset=row["dataset"],
                config=row["config"],
                seed=int(row["seed"]),
                runs=int(row["runs"]),
                ari_runs=[float(v) for v in row["ari_runs"].split(";") if v],
                best_ari=float(row["best_ari"]) if row["best_ari"] else None,
                wall_ms=float(row["wall_ms"]),
                retained_dims=int(row["retained_dims"]) if row["retained_dims"] else None,
            ))
    return out
