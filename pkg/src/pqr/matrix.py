"""The in-memory QR symbol: a square dark/light module grid plus a function-module map."""

from __future__ import annotations

import numpy as np


class ModuleMatrix:
    """Square module grid. `modules[r, c]` is True for dark; `function_map[r, c]`
    is True where the cell belongs to a function pattern (or a stamped distracter
    region) rather than the data stream."""

    __slots__ = ("side", "modules", "function_map")

    def __init__(self, modules: np.ndarray, function_map: np.ndarray):
        modules = np.asarray(modules, dtype=bool)
        function_map = np.asarray(function_map, dtype=bool)
        if modules.ndim != 2 or modules.shape[0] != modules.shape[1]:
            raise ValueError("modules must be a square 2-D array")
        if function_map.shape != modules.shape:
            raise ValueError("function_map shape must match modules")
        self.side = modules.shape[0]
        self.modules = modules
        self.function_map = function_map

    def copy(self) -> "ModuleMatrix":
        return ModuleMatrix(self.modules.copy(), self.function_map.copy())

    def dark_count(self) -> int:
        return int(self.modules.sum())

    def same_modules(self, other: "ModuleMatrix") -> bool:
        return self.side == other.side and bool(np.array_equal(self.modules, other.modules))

    # Text form shared with the CLI: one line per row, '#' dark, '.' light,
    # linefeed-terminated, no quiet zone. Function information is not carried.
    def to_text(self) -> str:
        rows = ["".join("#" if v else "." for v in row) for row in self.modules]
        return "\n".join(rows) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ModuleMatrix":
        lines = [ln for ln in text.split("\n") if ln]
        side = len(lines)
        if side == 0 or any(len(ln) != side for ln in lines):
            raise ValueError("matrix text rows must be equal length and square")
        bad = set("".join(lines)) - {"#", "."}
        if bad:
            raise ValueError(f"matrix text contains invalid characters: {sorted(bad)}")
        modules = np.array([[ch == "#" for ch in ln] for ln in lines], dtype=bool)
        return cls(modules, np.zeros_like(modules))
