"""Plain-text file formats: distributions, sequences, plans and CSV output."""

from __future__ import annotations

import hashlib
import math
from pathlib import Path
from typing import Iterable, Iterator

from .model import Alphabet, Distribution, InputError, Sequence


def _content_lines(path: Path) -> Iterator[tuple[int, str]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror or exc})") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def read_distributions(path: Path) -> list[Distribution]:
    """One distribution per line; all lines must have the same number of columns."""
    out: list[Distribution] = []
    width = None
    for lineno, line in _content_lines(path):
        try:
            values = [float(tok) for tok in line.split()]
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise InputError(f"{path}:{lineno}: expected {width} probabilities, got {len(values)}")
        try:
            out.append(Distribution(values))
        except InputError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
    if not out:
        raise InputError(f"{path}: no distributions found")
    return out


def write_distributions(path: Path, dists: Iterable[Distribution]) -> None:
    # repr gives the shortest string that reads back to the same double
    lines = [" ".join(repr(float(x)) for x in d.mass) for d in dists]
    Path(path).write_text("\n".join(lines) + "\n")


def read_sequences(path: Path, alphabet: Alphabet | None = None) -> list[Sequence]:
    """One sequence per line of whitespace-separated non-negative integers."""
    out: list[Sequence] = []
    for lineno, line in _content_lines(path):
        try:
            symbols = [int(tok) for tok in line.split()]
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: symbols must be integers ({exc})") from exc
        if min(symbols) < 0:
            raise InputError(f"{path}:{lineno}: negative symbol")
        seq = Sequence(symbols)
        if alphabet is not None:
            try:
                seq.check_alphabet(alphabet)
            except InputError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from exc
        out.append(seq)
    if not out:
        raise InputError(f"{path}: no sequences found")
    return out


def read_key_values(path: Path, allowed: Iterable[str]) -> dict[str, tuple[int, str]]:
    """``key = value`` lines; returns key -> (line number, raw value)."""
    allowed = set(allowed)
    out: dict[str, tuple[int, str]] = {}
    for lineno, line in _content_lines(path):
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in allowed:
            raise InputError(f"{path}:{lineno}: unknown key {key!r}")
        if key in out:
            raise InputError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = (lineno, value)
    return out


def file_sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def fmt(x) -> str:
    """CSV cell: integers as-is, reals with 9 significant digits."""
    if isinstance(x, str):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".9g")


def csv_text(header: list[str], rows: Iterable[Iterable], comments: Iterable[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"
