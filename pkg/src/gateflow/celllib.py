"""Standard-cell library: small functional cells with area and delay.

Area is kept in gate equivalents, normalized so one NAND2 is exactly
1.0 GE (the loader renormalizes if needed). Delay is one pin-to-output
number per cell; no slew or load dependence. The shipped default values
are shaped loosely like a 130 nm library, and nothing in the test suite
depends on their absolute magnitudes, only on comparisons.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .tt import TruthTable


@dataclass(frozen=True)
class LibCell:
    name: str
    k: int
    tt: TruthTable | None  # None for the sequential DFF
    area: float            # gate equivalents
    delay: float           # ns, pin to output
    seq: bool = False


REQUIRED = ("INV", "NAND2", "NOR2", "AND2", "OR2", "XOR2", "XNOR2", "MUX2",
            "DFF")


class CellLibrary:
    def __init__(self, cells: list[LibCell]):
        self.cells = list(cells)
        self.by_name = {c.name: c for c in self.cells}
        missing = [n for n in REQUIRED if n not in self.by_name]
        if missing:
            raise ValueError(f"library lacks required cells: {missing}")
        nand = self.by_name["NAND2"]
        if nand.area <= 0:
            raise ValueError("NAND2 area must be positive")
        if abs(nand.area - 1.0) > 1e-12:
            scale = 1.0 / nand.area
            self.cells = [
                LibCell(c.name, c.k, c.tt, c.area * scale, c.delay, c.seq)
                for c in self.cells
            ]
            self.by_name = {c.name: c for c in self.cells}
        for c in self.cells:
            if not c.seq:
                if c.tt is None or c.tt.k != c.k:
                    raise ValueError(f"cell {c.name}: table arity mismatch")
                if c.delay <= 0:
                    raise ValueError(f"cell {c.name}: delay must be positive")
            if c.k > 4:
                raise ValueError(f"cell {c.name}: more than 4 inputs")

    def comb_cells(self) -> list[LibCell]:
        return [c for c in self.cells if not c.seq]

    @property
    def inv(self) -> LibCell:
        return self.by_name["INV"]

    @property
    def dff(self) -> LibCell:
        return self.by_name["DFF"]


def default_library() -> CellLibrary:
    t = TruthTable
    cells = [
        LibCell("INV", 1, t(1, 0x1), 0.5, 0.05),
        LibCell("NAND2", 2, t(2, 0x7), 1.0, 0.07),
        LibCell("NOR2", 2, t(2, 0x1), 1.0, 0.08),
        LibCell("AND2", 2, t(2, 0x8), 1.25, 0.10),
        LibCell("OR2", 2, t(2, 0xE), 1.25, 0.10),
        LibCell("XOR2", 2, t(2, 0x6), 2.25, 0.14),
        LibCell("XNOR2", 2, t(2, 0x9), 2.25, 0.14),
        LibCell("MUX2", 3, t(3, 0xCA), 2.5, 0.12),  # pins (s, a, b)
        LibCell("DFF", 1, None, 4.5, 0.0, seq=True),
    ]
    return CellLibrary(cells)


def save_library(lib: CellLibrary) -> str:
    rows = []
    for c in lib.cells:
        digits = max(1, (1 << c.k) // 4)
        rows.append({
            "name": c.name,
            "k": c.k,
            "tt": None if c.tt is None else f"{c.tt.bits:0{digits}x}",
            "area_ge": c.area,
            "delay_ns": c.delay,
            "seq": c.seq,
        })
    return json.dumps({"cells": rows}, indent=2, sort_keys=False) + "\n"


def load_library(text: str) -> CellLibrary:
    data = json.loads(text)
    cells = []
    for row in data["cells"]:
        extra = set(row) - {"name", "k", "tt", "area_ge", "delay_ns", "seq"}
        if extra:
            raise ValueError(f"unknown library keys: {sorted(extra)}")
        tt = None if row["tt"] is None else TruthTable(row["k"],
                                                       int(row["tt"], 16))
        cells.append(
            LibCell(row["name"], row["k"], tt, float(row["area_ge"]),
                    float(row["delay_ns"]), bool(row.get("seq", False)))
        )
    return CellLibrary(cells)
