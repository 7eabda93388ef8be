"""Result rows and their CSV serialisation."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path

from ..errors import NumericError

__all__ = ["HEADER", "ResultRow", "format_float", "rows_to_csv", "write_csv"]

HEADER = "experiment,L,M,P,k,metric,value,trials,seed"


def format_float(x: float) -> str:
    return "%.17g" % float(x)


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    L: int
    M: int
    P: float
    k: int | None
    metric: str
    value: float
    trials: int
    seed: int

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise NumericError(f"non-finite value for {self.metric} at L={self.L}, P={self.P}")

    def to_csv(self) -> str:
        k = "" if self.k is None else str(self.k)
        return ",".join(
            [
                self.experiment,
                str(self.L),
                str(self.M),
                format_float(self.P),
                k,
                self.metric,
                format_float(self.value),
                str(self.trials),
                str(self.seed),
            ]
        )


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(HEADER + "\n")
    for r in rows:
        buf.write(r.to_csv() + "\n")
    return buf.getvalue()


def write_csv(rows, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(rows_to_csv(rows))
