"""Flat key-value config files and deterministic CSV output."""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping, Sequence


class DataError(Exception):
    """Input or output files are missing, unreadable or malformed."""


def parse_kv(text: str, source: str = "<config>") -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"{source}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def read_kv(path) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_kv(text, str(path))


def format_kv(items: Mapping[str, object]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in items.items())


def fmt(x) -> str:
    """Integers verbatim, floats to 9 significant digits."""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return f"{x:.9g}"
    if hasattr(x, "item"):
        return fmt(x.item())
    return str(x)


def format_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt(x) for x in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_text(path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}") from exc


def write_plot_data(payload, path) -> None:
    """Write a series or a distance matrix as CSV.

    A sequence of numbers becomes ``index,value`` rows (with a ``t,value``
    header); a mapping of column name to equal-length sequences becomes one
    column per key in insertion order; anything with ``to_csv()`` writes itself.
    """
    if hasattr(payload, "to_csv"):
        text = payload.to_csv()
    elif isinstance(payload, Mapping):
        if not payload:
            raise ValueError("nothing to write")
        cols = list(payload)
        lengths = {len(payload[c]) for c in cols}
        if len(lengths) != 1 or 0 in lengths:
            raise ValueError("columns must be nonempty and of equal length")
        text = format_csv(cols, zip(*(payload[c] for c in cols)))
    else:
        values = list(payload)
        if not values:
            raise ValueError("nothing to write")
        text = format_csv(["t", "value"], enumerate(values))
    write_text(path, text)
