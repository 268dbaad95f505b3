"""Plot-ready exports of a relation table: probability matrix, intensity
rows, per-discourse rankings, and diagnostics.

Coloring and figure layout are left to external tooling; these files only
carry the numbers.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from .ingest import FORMAT_VERSION, atomic_write_text, stable_dumps
from .relations import RelationEntry, RelationTable
from .vocab import Discourse


def _emotion_cell(emotions: FrozenSet[str]) -> str:
    """Row label in quoted-tuple style, e.g. ('annoyance', 'disapproval')."""
    return repr(tuple(sorted(emotions)))


def probability_table_text(table: RelationTable) -> str:
    """CSV matrix of conditional probabilities.

    Rows are emotion sets in table order, columns the realized discourse
    combinations; a trailing column and row carry the sums as diagnostics.
    """
    columns = table.discourse_keys()
    rows = table.emotion_keys()
    cells: Dict[Tuple[str, str], float] = {}
    labels: Dict[str, str] = {}
    for entry in table.entries:
        cells[(entry.emotion_key, entry.discourse_key)] = entry.prob
        labels.setdefault(entry.emotion_key, _emotion_cell(entry.emotions))

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["emotion_set", *columns, "row_sum"])
    column_sums = {key: 0.0 for key in columns}
    for row_key in rows:
        values = [cells.get((row_key, col), 0.0) for col in columns]
        for col, value in zip(columns, values):
            column_sums[col] += value
        writer.writerow([labels[row_key], *[repr(v) for v in values],
                         repr(sum(values))])
    writer.writerow(["column_sum", *[repr(column_sums[c]) for c in columns],
                     repr(sum(column_sums.values()))])
    return buffer.getvalue()


def export_probability_table(table: RelationTable, sink: Union[str, Path]) -> None:
    atomic_write_text(sink, probability_table_text(table))


def heatmap_rows(
    table: RelationTable, top_k: Optional[int] = None
) -> List[RelationEntry]:
    """Entries of the intensity matrix, optionally limited per emotion set.

    With ``top_k`` set, each emotion set keeps its k strongest entries by
    intensity (ties broken by discourse key); survivors stay in table order.
    """
    if top_k is None:
        return list(table.entries)
    keep = set()
    by_emotions: Dict[FrozenSet[str], List[RelationEntry]] = {}
    for entry in table.entries:
        by_emotions.setdefault(entry.emotions, []).append(entry)
    for entries in by_emotions.values():
        ranked = sorted(entries, key=lambda e: (-e.ri, e.discourse_key))
        keep.update(id(e) for e in ranked[:top_k])
    return [entry for entry in table.entries if id(entry) in keep]


def heatmap_csv_text(table: RelationTable, top_k: Optional[int] = None) -> str:
    """Long-format CSV of relation intensities, rounded to 2 decimals."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["emotion_set", "discourse_set", "ri"])
    for entry in heatmap_rows(table, top_k):
        writer.writerow([
            _emotion_cell(entry.emotions),
            entry.discourse_key,
            f"{entry.ri:.2f}",
        ])
    return buffer.getvalue()


def heatmap_json_dict(table: RelationTable, top_k: Optional[int] = None) -> dict:
    """Full-precision JSON counterpart of the heat-map CSV."""
    return {
        "version": FORMAT_VERSION,
        "kind": "heatmap",
        "config": table.config.to_dict(),
        "top_k": top_k,
        "rows": [
            {
                "emotions": sorted(entry.emotions),
                "discourses": sorted(d.code for d in entry.discourses),
                "ri": entry.ri,
            }
            for entry in heatmap_rows(table, top_k)
        ],
    }


def export_heatmap(
    table: RelationTable,
    csv_sink: Optional[Union[str, Path]] = None,
    json_sink: Optional[Union[str, Path]] = None,
    top_k: Optional[int] = None,
) -> None:
    if csv_sink is not None:
        atomic_write_text(csv_sink, heatmap_csv_text(table, top_k))
    if json_sink is not None:
        atomic_write_text(json_sink, stable_dumps(heatmap_json_dict(table, top_k)))


def top_for_discourse(
    table: RelationTable,
    discourses: Sequence[Discourse],
    k: int,
) -> List[Tuple[FrozenSet[str], float]]:
    """The k emotion sets most intensely related to this exact discourse set."""
    target = frozenset(discourses)
    matches = [entry for entry in table.entries if entry.discourses == target]
    matches.sort(key=lambda e: (-e.ri, e.emotion_key))
    return [(entry.emotions, entry.ri) for entry in matches[:k]]


def diagnostics(table: RelationTable) -> dict:
    """Row/column sums, per-size-class maxima, support, multi-hit rows."""
    row_sums: Dict[str, float] = {}
    column_sums: Dict[str, float] = {}
    nonzero_ri_per_row: Dict[str, int] = {}
    class_max: Dict[str, float] = {}
    total_support = 0
    for entry in table.entries:
        row_sums[entry.emotion_key] = row_sums.get(entry.emotion_key, 0.0) + entry.prob
        column_sums[entry.discourse_key] = (
            column_sums.get(entry.discourse_key, 0.0) + entry.prob
        )
        if entry.ri > 0.0:
            nonzero_ri_per_row[entry.emotion_key] = (
                nonzero_ri_per_row.get(entry.emotion_key, 0) + 1
            )
        klass = f"n={len(entry.discourses)},l={len(entry.emotions)}"
        class_max[klass] = max(class_max.get(klass, 0.0), entry.relation)
        total_support += entry.support
    return {
        "entries": len(table.entries),
        "emotion_sets": len(table.emotion_keys()),
        "discourse_sets": len(table.discourse_keys()),
        "total_support": total_support,
        "row_sums": dict(sorted(row_sums.items())),
        "column_sums": dict(sorted(column_sums.items())),
        "class_relation_max": dict(sorted(class_max.items())),
        "rows_with_multiple_nonzero_ri": sum(
            1 for count in nonzero_ri_per_row.values() if count > 1
        ),
    }


def diagnostics_text(table: RelationTable) -> str:
    report = diagnostics(table)
    lines = [
        f"entries: {report['entries']}",
        f"emotion sets: {report['emotion_sets']}",
        f"discourse sets: {report['discourse_sets']}",
        f"total support: {report['total_support']}",
        f"rows with multiple nonzero intensities: "
        f"{report['rows_with_multiple_nonzero_ri']}",
        "row sums (should each be 1):",
    ]
    for key, value in report["row_sums"].items():
        lines.append(f"  {key}: {value:.9f}")
    lines.append("column sums (diagnostic only):")
    for key, value in report["column_sums"].items():
        lines.append(f"  {key}: {value:.9f}")
    lines.append("best relation per size class:")
    for key, value in report["class_relation_max"].items():
        lines.append(f"  {key}: {value!r}")
    return "\n".join(lines) + "\n"
