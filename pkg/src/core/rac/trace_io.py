"""Trace persistence: versioned JSONL written by the tool, JSONL or header-free CSV ingested from outside.

A JSONL trace may start with a header record ``{"format_version": 1, "seed":
..., "model_tag": ...}``; every other line is one round with the fields
``t, a0, a1, y, m, b, x, kept``. CSV logs carry the same fields in that
column order. Ingestion checks every record (bits, ``x == [b == a_y]``,
contiguous ``t``) and reports failures by line.
"""
import os
from typing import Dict, List, Optional

import numpy as np

from src.core.base.errors import ConfigValidationError
from src.core.file_io.utils import iter_csv_rows, iter_jsonl, write_jsonl
from src.core.logging.setup import get_logger
from src.core.rac.trial import TRACE_COLUMNS, Trace, success
from src.core.schemas.validator import TRACE_HEADER_SCHEMA, TRACE_RECORD_SCHEMA, SchemaValidator

logger = get_logger(__name__)

TRACE_FORMAT_VERSION = 1
MAX_DIAGNOSTICS = 20


def trace_header(trace: Trace) -> Dict:
    return {"format_version": TRACE_FORMAT_VERSION, "seed": trace.seed, "model_tag": trace.model_tag}


def write_trace_jsonl(filepath: str, trace: Trace):
    """Writes the header record followed by one record per round."""
    columns = [np.arange(1, len(trace) + 1)] + [getattr(trace, name) for name in TRACE_COLUMNS[1:]]
    rows = (dict(zip(TRACE_COLUMNS, values)) for values in zip(*(column.tolist() for column in columns)))
    write_jsonl(filepath, [trace_header(trace), *rows])
    logger.debug(f"Wrote {len(trace)} rounds to {filepath}")


class _TraceBuilder:
    """Accumulates validated round records and collects per-line diagnostics."""

    def __init__(self, source: str):
        self.source = source
        self.columns: Dict[str, List[int]] = {name: [] for name in TRACE_COLUMNS}
        self.diagnostics: List[str] = []

    def add(self, line_number: int, record: Dict[str, int]):
        expected_t = len(self.columns["t"]) + 1
        where = f"line {line_number}"
        if record["t"] != expected_t:
            self.diagnostics.append(f"{where}: t must be {expected_t} (contiguous from 1), got {record['t']}")
        if record["x"] != success(record["a0"], record["a1"], record["y"], record["b"]):
            self.diagnostics.append(f"{where}: x={record['x']} disagrees with b == a_y")
        for name in TRACE_COLUMNS:
            self.columns[name].append(record[name])

    def fail(self, message: str):
        self.diagnostics.append(message)

    def build(self, seed: Optional[int], model_tag: str) -> Trace:
        if not self.columns["t"] and not self.diagnostics:
            self.diagnostics.append("<file>: no round records")
        if self.diagnostics:
            shown = self.diagnostics[:MAX_DIAGNOSTICS]
            if len(self.diagnostics) > MAX_DIAGNOSTICS:
                shown.append(f"... {len(self.diagnostics) - MAX_DIAGNOSTICS} more")
            raise ConfigValidationError(shown, self.source)
        kept = np.asarray(self.columns["kept"], dtype=np.int8)
        return Trace(**{name: self.columns[name] for name in TRACE_COLUMNS[1:]},
                     seed=seed, model_tag=model_tag, selected=bool(kept.min() == 0))


def read_trace_jsonl(filepath: str, validator: Optional[SchemaValidator] = None) -> Trace:
    validator = validator or SchemaValidator()
    builder = _TraceBuilder(filepath)
    seed, model_tag = None, ""
    try:
        for index, (line_number, record) in enumerate(iter_jsonl(filepath)):
            where = f"line {line_number}"
            if index == 0 and isinstance(record, dict) and "format_version" in record:
                header_errors = validator.validate_with_jsonschema(record, TRACE_HEADER_SCHEMA)
                if header_errors:
                    builder.diagnostics.extend(f"{where}: {message}" for message in header_errors)
                else:
                    seed, model_tag = record.get("seed"), record.get("model_tag", "")
                continue
            errors = validator.validate_with_jsonschema(record, TRACE_RECORD_SCHEMA)
            if errors:
                builder.diagnostics.extend(f"{where}: {message}" for message in errors)
                continue
            builder.add(line_number, record)
    except ValueError as e:
        builder.fail(str(e))
    return builder.build(seed, model_tag)


def read_trace_csv(filepath: str) -> Trace:
    builder = _TraceBuilder(filepath)
    for line_number, cells in iter_csv_rows(filepath):
        where = f"line {line_number}"
        cells = [cell.strip() for cell in cells]
        if line_number == 1 and tuple(cells) == TRACE_COLUMNS:
            continue
        if len(cells) != len(TRACE_COLUMNS):
            builder.fail(f"{where}: expected {len(TRACE_COLUMNS)} columns {','.join(TRACE_COLUMNS)}, got {len(cells)}")
            continue
        try:
            values = [int(cell) for cell in cells]
        except ValueError:
            builder.fail(f"{where}: non-integer value in {cells}")
            continue
        bad = [name for name, value in zip(TRACE_COLUMNS[1:], values[1:]) if value not in (0, 1)]
        if bad:
            builder.fail(f"{where}: {', '.join(bad)} must be 0 or 1")
            continue
        builder.add(line_number, dict(zip(TRACE_COLUMNS, values)))
    return builder.build(None, os.path.basename(filepath))


def read_trace(filepath: str, validator: Optional[SchemaValidator] = None) -> Trace:
    """Ingests a trace file, dispatching on the extension (``.csv`` or JSONL otherwise).

    Raises:
        ConfigValidationError: With line-numbered diagnostics for invalid records.
    """
    if filepath.lower().endswith(".csv"):
        trace = read_trace_csv(filepath)
    else:
        trace = read_trace_jsonl(filepath, validator)
    logger.info(f"Ingested {len(trace)} rounds ({trace.n_kept} kept) from {filepath}")
    return trace
