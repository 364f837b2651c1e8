"""Column-ordered result tables with byte-stable CSV serialization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Table"]


def _format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))  # shortest round-trip decimal
    return str(value)


@dataclass
class Table:
    """Rows of scalar cells under a fixed header, written deterministically."""

    columns: list
    rows: list = field(default_factory=list)

    def append(self, **cells):
        missing = set(self.columns) - set(cells)
        extra = set(cells) - set(self.columns)
        if missing or extra:
            raise ValueError(f"row mismatch: missing {missing}, extra {extra}")
        self.rows.append(tuple(cells[c] for c in self.columns))

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(_format_cell(c) for c in row))
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        with open(path, "w", newline="") as f:
            f.write(self.to_csv())
