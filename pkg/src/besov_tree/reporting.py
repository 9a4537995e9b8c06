"""Report containers and CSV emission.

Floats are serialized with ``repr`` (shortest round-trip form), which makes
reports byte-deterministic for a fixed seed and lossless to re-read.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


def fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class EnergyReport:
    """Per-level contributions plus the total of an energy or norm."""

    per_level: tuple[tuple[int, float], ...]
    total: float
    params: object | None = None

    def to_csv_text(self) -> str:
        lines = ["level,contribution"]
        for lvl, contrib in self.per_level:
            lines.append(f"{lvl},{fmt(contrib)}")
        lines.append(f"total,{fmt(self.total)}")
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        _write_text(path, self.to_csv_text())


def _write_text(path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def csv_text(header: Sequence[str], rows: Iterable[Sequence], summary: Sequence[tuple[str, object]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    for key, value in summary:
        lines.append(f"# {key} = {fmt(value)}")
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows, summary) -> None:
    _write_text(path, csv_text(header, rows, summary))
