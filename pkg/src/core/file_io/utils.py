import csv
import json
import os
from typing import Any, Dict, Iterable, Iterator, List, Sequence, Tuple

import yaml

from src.core.logging.setup import get_logger

logger = get_logger(__name__)


def _ensure_parent(filepath: str) -> None:
    dirpath = os.path.dirname(filepath)
    if dirpath:  # files in the current directory have no parent to create
        os.makedirs(dirpath, exist_ok=True)


def read_file(filepath: str) -> str:
    """Reads the content of a file.

    Args:
        filepath: Path to the file.

    Returns:
        The content of the file as a string.

    Raises:
        FileNotFoundError: If the file does not exist.
        IOError: If there's an error reading the file.
    """
    try:
        with open(filepath, 'r', encoding='utf-8') as f:
            return f.read()
    except FileNotFoundError:
        logger.error(f"File not found at {filepath}")
        raise
    except IOError as e:
        logger.error(f"Error reading file {filepath}: {e}")
        raise


def write_file(filepath: str, content: str):
    """Writes content to a file, creating directories if necessary.

    Raises:
        IOError: If there's an error writing the file.
    """
    try:
        _ensure_parent(filepath)
        # newline='' keeps output byte-identical across platforms
        with open(filepath, 'w', encoding='utf-8', newline='') as f:
            f.write(content)
    except IOError as e:
        logger.error(f"Error writing to file {filepath}: {e}")
        raise


def read_yaml(filepath: str) -> Any:
    """Parses a YAML document; an empty file yields an empty dict."""
    data = yaml.safe_load(read_file(filepath))
    return {} if data is None else data


def dumps_json(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def write_json(filepath: str, data: Any):
    write_file(filepath, dumps_json(data))


def read_json(filepath: str) -> Any:
    return json.loads(read_file(filepath))


def write_jsonl(filepath: str, records: Iterable[Dict[str, Any]]):
    """Writes one compact JSON object per line."""
    write_file(filepath, "".join(json.dumps(record, separators=(",", ":")) + "\n" for record in records))


def iter_jsonl(filepath: str) -> Iterator[Tuple[int, Any]]:
    """Yields ``(line_number, parsed_object)`` for every non-blank line.

    Raises:
        ValueError: On a malformed line, naming the line number.
    """
    with open(filepath, 'r', encoding='utf-8') as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ValueError(f"line {line_number}: invalid JSON ({e.msg})") from None
            yield line_number, record


def write_csv(filepath: str, columns: Sequence[str], rows: Iterable[Dict[str, Any]]):
    """Writes rows as CSV with a header; missing values become empty cells."""
    _ensure_parent(filepath)
    with open(filepath, 'w', encoding='utf-8', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: ("" if row.get(key) is None else row.get(key)) for key in columns})


def iter_csv_rows(filepath: str) -> Iterator[Tuple[int, List[str]]]:
    """Yields ``(line_number, cells)`` for every non-blank CSV line."""
    with open(filepath, 'r', encoding='utf-8', newline='') as f:
        for line_number, cells in enumerate(csv.reader(f), start=1):
            if cells and any(cell.strip() for cell in cells):
                yield line_number, cells
