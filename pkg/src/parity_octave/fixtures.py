"""Locating the bundled reference tables and writing files atomically."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from contextlib import contextmanager
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Sequence, TextIO

TABLE1 = "table1.csv"
TABLE2 = "table2.csv"
TABLE_A1 = "table_a1.csv"
TABLE_A2 = "table_a2.csv"
TABLE_B1_SPOT = "table_b1_spot.csv"


class FixtureError(ValueError):
    """A fixture file is missing or does not match its schema."""


def fixture_path(name: str, fixture_dir: str | os.PathLike[str] | None = None) -> Path:
    if fixture_dir is not None:
        path = Path(fixture_dir) / name
    else:
        path = Path(str(resources.files("parity_octave") / "data" / name))
    if not path.is_file():
        raise FixtureError(f"fixture not found: {path}")
    return path


def read_csv(path: str | os.PathLike[str], header: Sequence[str] | None = None) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if header is not None and list(reader.fieldnames or []) != list(header):
            raise FixtureError(
                f"{path}: header mismatch\n  expected {','.join(header)}\n  found    {','.join(reader.fieldnames or [])}"
            )
        return list(reader)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


@contextmanager
def open_atomic(path: str | os.PathLike[str]) -> Iterator[TextIO]:
    """Text handle on a temp file in the target's directory, renamed over it on success."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent.resolve())
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            yield f
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_atomic(path: str | os.PathLike[str], text: str) -> Path:
    with open_atomic(path) as f:
        f.write(text)
    return Path(path)
