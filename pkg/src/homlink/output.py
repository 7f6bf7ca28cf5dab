"""Deterministic file emission for result bundles.

File names embed preset and seed.  Every run writes the echoed effective
config and a line-delimited summary; histograms and curve tables go to CSV
with a small metadata header block.  No timestamps anywhere: identical
(config, seed) must produce byte-identical files.
"""

from __future__ import annotations

import json
import os

from .detection import CoincidenceHistogram
from .experiments import ResultBundle, Table


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".10g")
    return str(v)


def _write(path: str, text: str, written: list[str]) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"failed writing {path}: {exc}") from exc
    written.append(path)


def _histogram_csv(hist: CoincidenceHistogram) -> str:
    lines = []
    for key in sorted(hist.metadata):
        lines.append(f"# {key}: {hist.metadata[key]}")
    lines.append(f"# bin_width_ps: {_fmt(hist.bin_width_ps)}")
    lines.append(f"# delay_range_ps: {_fmt(hist.delay_range_ps)}")
    lines.append(f"# total_pairs: {hist.total_pairs}")
    lines.append(f"# overflow: {hist.overflow}")
    lines.append("bin_center_ps,counts")
    for center, count in zip(hist.bin_centers, hist.counts):
        lines.append(f"{_fmt(float(center))},{int(count)}")
    return "\n".join(lines) + "\n"


def _table_csv(table: Table) -> str:
    lines = [",".join(table.columns)]
    for row in table.rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def emit_outputs(bundle: ResultBundle, directory: str) -> list[str]:
    """Write config echo, summary records, histograms and tables.

    Returns the list of written paths (deterministic order).
    """
    os.makedirs(directory, exist_ok=True)
    prefix = f"{bundle.preset.replace('-', '_')}_seed{bundle.seed}"
    written: list[str] = []

    _write(os.path.join(directory, f"{prefix}_config.ini"),
           bundle.effective_config, written)

    if not (bundle.summary or bundle.histograms or bundle.tables):
        return written   # empty bundle: config echo only

    lines = []
    for rec in bundle.summary:
        lines.append(json.dumps(rec, sort_keys=True, default=_fmt))
    _write(os.path.join(directory, f"{prefix}_summary.jsonl"),
           "\n".join(lines) + ("\n" if lines else ""), written)

    for name in sorted(bundle.histograms):
        _write(os.path.join(directory, f"{prefix}_{name}.csv"),
               _histogram_csv(bundle.histograms[name]), written)
    for name in sorted(bundle.tables):
        _write(os.path.join(directory, f"{prefix}_{name}.csv"),
               _table_csv(bundle.tables[name]), written)
    return written
