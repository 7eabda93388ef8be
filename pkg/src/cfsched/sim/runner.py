"""Ordered execution of independent work units."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence


def run_units(fn: Callable, units: Sequence, workers: int = 1) -> list:
    """Apply ``fn`` to every unit and return results in unit order.

    With ``workers > 1`` units run in a process pool; ``fn`` and the units
    must then be picklable.  Results never depend on the worker count
    because each unit seeds its own streams.
    """
    units = list(units)
    if workers <= 1 or len(units) <= 1:
        return [fn(u) for u in units]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, units, chunksize=max(1, len(units) // (4 * workers))))


def blocks(n: int, size: int) -> Iterable[tuple[int, int]]:
    """Fixed ``[start, stop)`` trial blocks; independent of the worker count."""
    for start in range(0, n, size):
        yield start, min(n, start + size)
