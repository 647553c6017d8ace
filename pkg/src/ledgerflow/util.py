"""Shared helpers: exact decimal sums, seed mixing, serialization."""

from __future__ import annotations

import json
from decimal import Decimal, localcontext
from pathlib import Path
from typing import Iterable

# High enough that additions of any realistic ledger volume are exact;
# the default context (28 digits) would already cover national-scale sums.
_SUM_PRECISION = 60

_MASK64 = (1 << 64) - 1


def dsum(values: Iterable[Decimal]) -> Decimal:
    """Sum decimals exactly, independent of iteration order."""
    with localcontext() as ctx:
        ctx.prec = _SUM_PRECISION
        total = Decimal(0)
        for value in values:
            total += value
    return total


def mix64(a: int, b: int) -> int:
    """Mix two integers into one 64-bit seed.

    SplitMix64 finalizer over a golden-ratio-weighted combination. Pure
    integer arithmetic, so the result is identical on every platform.
    """
    z = ((a & _MASK64) + 0x9E3779B97F4A7C15 * ((b & _MASK64) + 1)) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def format_duration(seconds: float) -> str:
    """Render a span in seconds as e.g. '1d 21h 0m 3s'."""
    total = int(round(seconds))
    days, rest = divmod(total, 86_400)
    hours, rest = divmod(rest, 3_600)
    minutes, secs = divmod(rest, 60)
    parts = []
    if days:
        parts.append(f"{days}d")
    if hours or parts:
        parts.append(f"{hours}h")
    if minutes or parts:
        parts.append(f"{minutes}m")
    parts.append(f"{secs}s")
    return " ".join(parts)


class _Encoder(json.JSONEncoder):
    # Decimals become strings so no precision is lost in transit.
    def default(self, o):
        if isinstance(o, Decimal):
            return str(o)
        if isinstance(o, (set, frozenset)):
            return sorted(o)
        return super().default(o)


def to_json(obj) -> str:
    return json.dumps(obj, cls=_Encoder, indent=2, sort_keys=True) + "\n"


def write_json(path: Path, obj) -> None:
    Path(path).write_text(to_json(obj), encoding="utf-8")


def write_csv(path: Path, header: Iterable[str], rows: Iterable[Iterable]) -> None:
    """Write a CSV deterministically ('' for None, str() for everything else)."""
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow(["" if cell is None else str(cell) for cell in row])
