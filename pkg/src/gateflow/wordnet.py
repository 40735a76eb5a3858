"""Word-level netlist: multi-bit nets driven by coarse cells.

Cell semantics (two-valued, all arithmetic mod 2^width of the output):

    CONST   value attr                      NOT/AND/OR/XOR  bitwise
    MUX     (s, a, b), s one bit, s=1 -> a
    ADD/SUB (a, b) operands extended to the output width
    MUL     (a, b) full product of extended operands, mod 2^wy
    FMA     (a, b, c) = a*b + c, mod 2^wy
    EQ/LT   (a, b) one-bit result; LT honors the signed attr
    SHL/SHR (a, sh) zero fill; SHR replicates the sign when signed
    SHIFTX  (data, sh) = data[sh +: wy], zero beyond the data range
    CONCAT  parts, LSB-first input list
    SLICE   bits [lo+wy-1 : lo] of the input
    DFF     d -> q, reset state 0, single implicit clock

Out-of-range SHIFTX reads yield zeros rather than X: the pipeline is
fully two-valued.
"""

from __future__ import annotations

from dataclasses import dataclass, field

CELL_KINDS = {
    "NOT", "AND", "OR", "XOR", "MUX", "SHIFTX", "SHL", "SHR", "ADD", "SUB",
    "MUL", "FMA", "EQ", "LT", "CONCAT", "SLICE", "CONST", "DFF",
}

# pure wiring: free after bit blasting, excluded from logic cell counts
WIRING_KINDS = {"CONST", "SLICE", "CONCAT"}


class NetlistError(ValueError):
    pass


@dataclass
class Cell:
    kind: str
    inputs: list[int]
    output: int
    attrs: dict = field(default_factory=dict)


class WordNetlist:
    def __init__(self, name: str = "top"):
        self.name = name
        self.widths: list[int] = []
        self.net_names: dict[int, str] = {}
        self.cells: list[Cell] = []
        self.inputs: list[tuple[str, int]] = []
        self.outputs: list[tuple[str, int]] = []
        self.clock: str | None = None

    def new_net(self, width: int, name: str | None = None) -> int:
        if width < 1:
            raise NetlistError(f"net width {width} < 1")
        self.widths.append(width)
        nid = len(self.widths) - 1
        if name:
            self.net_names[nid] = name
        return nid

    def add_cell(self, kind: str, inputs: list[int], output: int,
                 **attrs) -> Cell:
        if kind not in CELL_KINDS:
            raise NetlistError(f"unknown cell kind {kind}")
        cell = Cell(kind, list(inputs), output, attrs)
        self.cells.append(cell)
        return cell

    def width(self, net: int) -> int:
        return self.widths[net]

    def logic_cell_count(self) -> int:
        return sum(1 for c in self.cells if c.kind not in WIRING_KINDS)

    # -- convenience constructors --------------------------------------

    def const(self, value: int, width: int) -> int:
        net = self.new_net(width)
        self.add_cell("CONST", [], net, value=value & ((1 << width) - 1))
        return net

    def op(self, kind: str, inputs: list[int], width: int, **attrs) -> int:
        net = self.new_net(width)
        self.add_cell(kind, inputs, net, **attrs)
        return net

    # -- validation -----------------------------------------------------

    def drivers(self) -> dict[int, Cell]:
        drv: dict[int, Cell] = {}
        for c in self.cells:
            if c.output in drv:
                raise NetlistError(
                    f"net {self.net_names.get(c.output, c.output)} has "
                    f"multiple drivers"
                )
            drv[c.output] = c
        for name, net in self.inputs:
            if net in drv:
                raise NetlistError(f"input port {name} drives a driven net")
        return drv

    def validate(self):
        drv = self.drivers()
        driven = set(drv)
        for name, net in self.inputs:
            driven.add(net)
        for c in self.cells:
            for i in c.inputs:
                if i not in driven:
                    raise NetlistError(
                        f"{c.kind} reads undriven net "
                        f"{self.net_names.get(i, i)}"
                    )
            self._check_widths(c)
        for name, net in self.outputs:
            if net not in driven:
                raise NetlistError(f"output {name} undriven")
        self.topo_cells()  # raises on combinational cycles

    def _check_widths(self, c: Cell):
        w = self.width
        wy = w(c.output)
        kind = c.kind
        if kind in ("NOT", "DFF"):
            if w(c.inputs[0]) != wy:
                raise NetlistError(f"{kind} width mismatch")
        elif kind in ("AND", "OR", "XOR"):
            if any(w(i) != wy for i in c.inputs):
                raise NetlistError(f"{kind} width mismatch")
        elif kind == "MUX":
            s, a, b = c.inputs
            if w(s) != 1 or w(a) != wy or w(b) != wy:
                raise NetlistError("MUX width mismatch")
        elif kind in ("EQ", "LT"):
            if wy != 1 or w(c.inputs[0]) != w(c.inputs[1]):
                raise NetlistError(f"{kind} width mismatch")
        elif kind in ("SHL", "SHR"):
            if w(c.inputs[0]) != wy:
                raise NetlistError(f"{kind} width mismatch")
        elif kind == "CONCAT":
            if sum(w(i) for i in c.inputs) != wy:
                raise NetlistError("CONCAT width mismatch")
        elif kind == "SLICE":
            lo = c.attrs["lo"]
            if lo < 0 or lo + wy > w(c.inputs[0]):
                raise NetlistError("SLICE out of range")
        elif kind == "CONST":
            if c.attrs["value"] >> wy:
                raise NetlistError("CONST value exceeds width")

    def topo_cells(self) -> list[Cell]:
        """Cells in dependency order; DFFs break the ordering (their
        outputs count as sources). Raises on combinational cycles."""
        drv = {}
        for c in self.cells:
            drv[c.output] = c
        order: list[Cell] = []
        state: dict[int, int] = {}  # cell id -> 0 visiting / 1 done

        def visit(c: Cell, trail: list[int]):
            cid = id(c)
            st = state.get(cid)
            if st == 1:
                return
            if st == 0:
                names = [self.net_names.get(n, str(n)) for n in trail]
                raise NetlistError("combinational cycle: " + " -> ".join(names))
            state[cid] = 0
            if c.kind != "DFF":
                for i in c.inputs:
                    d = drv.get(i)
                    if d is not None and d.kind != "DFF":
                        visit(d, trail + [d.output])
            state[cid] = 1
            order.append(c)

        for c in self.cells:
            visit(c, [c.output])
        return order

    # -- reference evaluation -------------------------------------------

    def simulator(self) -> "WordSim":
        return WordSim(self)

    # -- structural dump (debug aid) --------------------------------------

    def dump_verilog(self) -> str:
        def nm(net: int) -> str:
            base = self.net_names.get(net, f"n{net}")
            return base.replace(".", "__").replace("[", "_").replace("]", "")

        lines = [f"module {self.name}("]
        ports = [f"  input [{self.width(n)-1}:0] {nm(n)}" for _, n in self.inputs]
        ports += [f"  output [{self.width(n)-1}:0] {nm(n)}" for _, n in self.outputs]
        lines.append(",\n".join(ports))
        lines.append(");")
        declared = {n for _, n in self.inputs} | {n for _, n in self.outputs}
        for c in self.cells:
            if c.output not in declared:
                lines.append(f"  wire [{self.width(c.output)-1}:0] {nm(c.output)};")
                declared.add(c.output)
        for c in self.cells:
            y = nm(c.output)
            ins = [nm(i) for i in c.inputs]
            if c.kind == "CONST":
                lines.append(f"  assign {y} = {self.width(c.output)}'d{c.attrs['value']};")
            elif c.kind == "NOT":
                lines.append(f"  assign {y} = ~{ins[0]};")
            elif c.kind in ("AND", "OR", "XOR"):
                op = {"AND": "&", "OR": "|", "XOR": "^"}[c.kind]
                lines.append(f"  assign {y} = {ins[0]} {op} {ins[1]};")
            elif c.kind == "MUX":
                lines.append(f"  assign {y} = {ins[0]} ? {ins[1]} : {ins[2]};")
            elif c.kind == "SLICE":
                lo = c.attrs["lo"]
                hi = lo + self.width(c.output) - 1
                lines.append(f"  assign {y} = {ins[0]}[{hi}:{lo}];")
            elif c.kind == "CONCAT":
                parts = ", ".join(reversed(ins))
                lines.append(f"  assign {y} = {{{parts}}};")
            elif c.kind == "DFF":
                lines.append(f"  // dff {y} <= {ins[0]}")
            elif c.kind == "SHIFTX":
                lines.append(f"  assign {y} = {ins[0]}[{ins[1]} +: {self.width(c.output)}];")
            elif c.kind == "FMA":
                lines.append(f"  assign {y} = {ins[0]} * {ins[1]} + {ins[2]};")
            else:
                op = {"ADD": "+", "SUB": "-", "MUL": "*", "EQ": "==", "LT": "<",
                      "SHL": "<<", "SHR": ">>"}[c.kind]
                lines.append(f"  assign {y} = {ins[0]} {op} {ins[1]};")
        lines.append("endmodule")
        return "\n".join(lines) + "\n"


def _mask(w: int) -> int:
    return (1 << w) - 1


def _to_signed(v: int, w: int) -> int:
    return v - (1 << w) if v >> (w - 1) else v


def eval_cell(c: Cell, w_in: list[int], wy: int, vals: list[int]) -> int:
    """Pure evaluation of one cell over already-masked input values."""
    m = _mask(wy)
    kind = c.kind
    signed = c.attrs.get("signed", False)

    def ext(v: int, w: int) -> int:
        if signed and w > 0 and (v >> (w - 1)) & 1:
            return v | (~0 << w)
        return v

    if kind == "CONST":
        return c.attrs["value"] & m
    if kind == "NOT":
        return ~vals[0] & m
    if kind == "AND":
        return vals[0] & vals[1]
    if kind == "OR":
        return vals[0] | vals[1]
    if kind == "XOR":
        return vals[0] ^ vals[1]
    if kind == "MUX":
        return vals[1] if vals[0] else vals[2]
    if kind == "ADD":
        return (ext(vals[0], w_in[0]) + ext(vals[1], w_in[1])) & m
    if kind == "SUB":
        return (ext(vals[0], w_in[0]) - ext(vals[1], w_in[1])) & m
    if kind == "MUL":
        return (ext(vals[0], w_in[0]) * ext(vals[1], w_in[1])) & m
    if kind == "FMA":
        return (
            ext(vals[0], w_in[0]) * ext(vals[1], w_in[1]) + ext(vals[2], w_in[2])
        ) & m
    if kind == "EQ":
        return int(vals[0] == vals[1])
    if kind == "LT":
        if signed:
            return int(_to_signed(vals[0], w_in[0]) < _to_signed(vals[1], w_in[1]))
        return int(vals[0] < vals[1])
    if kind == "SHL":
        return (vals[0] << vals[1]) & m if vals[1] < wy else 0
    if kind == "SHR":
        sh = vals[1]
        v = ext(vals[0], w_in[0]) if signed else vals[0]
        if sh >= w_in[0]:
            sh = w_in[0]
        return (v >> sh) & m
    if kind == "SHIFTX":
        return (vals[0] >> vals[1]) & m if vals[1] <= w_in[0] else 0
    if kind == "CONCAT":
        out = 0
        pos = 0
        for v, w in zip(vals, w_in):
            out |= v << pos
            pos += w
        return out & m
    if kind == "SLICE":
        return (vals[0] >> c.attrs["lo"]) & m
    raise NetlistError(f"eval of {kind}")


class WordSim:
    """Cycle-accurate two-valued simulator; registers reset to 0."""

    def __init__(self, wn: WordNetlist):
        wn.validate()
        self.wn = wn
        self.order = wn.topo_cells()
        self.state: dict[int, int] = {
            c.output: 0 for c in wn.cells if c.kind == "DFF"
        }
        self.ports_in = [(n, wn.width(net)) for n, net in wn.inputs]
        self.ports_out = [(n, wn.width(net)) for n, net in wn.outputs]
        self.is_sequential = bool(self.state)

    def reset(self):
        for k in self.state:
            self.state[k] = 0

    def step(self, inputs: dict[str, int]) -> dict[str, int]:
        wn = self.wn
        vals: dict[int, int] = {}
        for name, net in wn.inputs:
            vals[net] = inputs[name] & _mask(wn.width(net))
        vals.update(self.state)
        for c in self.order:
            if c.kind == "DFF":
                continue
            ins = [vals[i] for i in c.inputs]
            w_in = [wn.width(i) for i in c.inputs]
            vals[c.output] = eval_cell(c, w_in, wn.width(c.output), ins)
        out = {name: vals[net] for name, net in wn.outputs}
        nxt = {}
        for c in self.order:
            if c.kind == "DFF":
                nxt[c.output] = vals[c.inputs[0]]
        self.state.update(nxt)
        return out


def remove_dead(wn: WordNetlist) -> WordNetlist:
    """Drop cells that cannot reach an output."""
    drv = {c.output: c for c in wn.cells}
    live: set[int] = set()
    stack = [net for _, net in wn.outputs]
    while stack:
        n = stack.pop()
        if n in live:
            continue
        live.add(n)
        c = drv.get(n)
        if c is not None:
            stack.extend(c.inputs)
    wn.cells = [c for c in wn.cells if c.output in live]
    return wn


# -- constant folding ---------------------------------------------------


def const_fold(wn: WordNetlist) -> WordNetlist:
    """Evaluate cells with constant inputs, collapse constant-select
    muxes and annihilator/identity patterns. Never increases the logic
    cell count; repeated to a fixpoint."""
    while True:
        changed = _fold_pass(wn)
        if not changed:
            return wn


def _fold_pass(wn: WordNetlist) -> bool:
    drv = {c.output: c for c in wn.cells}

    def const_of(net: int):
        c = drv.get(net)
        if c is not None and c.kind == "CONST":
            return c.attrs["value"]
        return None

    alias: dict[int, int] = {}
    new_cells: list[Cell] = []
    changed = False

    def resolve(net: int) -> int:
        while net in alias:
            net = alias[net]
        return net

    for c in wn.cells:
        c.inputs = [resolve(i) for i in c.inputs]
        kind = c.kind
        wy = wn.width(c.output)
        ins = c.inputs
        cvals = [const_of(i) for i in ins]
        if kind != "DFF" and kind != "CONST" and all(v is not None for v in cvals):
            w_in = [wn.width(i) for i in ins]
            value = eval_cell(c, w_in, wy, cvals)
            new_cells.append(Cell("CONST", [], c.output, {"value": value}))
            drv[c.output] = new_cells[-1]
            changed = True
            continue
        if kind == "MUX" and cvals[0] is not None:
            src = ins[1] if cvals[0] else ins[2]
            alias[c.output] = src
            changed = True
            continue
        if kind == "AND":
            if 0 in cvals:
                new_cells.append(Cell("CONST", [], c.output, {"value": 0}))
                drv[c.output] = new_cells[-1]
                changed = True
                continue
            full = _mask(wy)
            if full in cvals:
                alias[c.output] = ins[1 - cvals.index(full)]
                changed = True
                continue
        if kind == "OR":
            full = _mask(wy)
            if full in cvals:
                new_cells.append(Cell("CONST", [], c.output, {"value": full}))
                drv[c.output] = new_cells[-1]
                changed = True
                continue
            if 0 in cvals:
                alias[c.output] = ins[1 - cvals.index(0)]
                changed = True
                continue
        if kind == "XOR" and 0 in cvals:
            alias[c.output] = ins[1 - cvals.index(0)]
            changed = True
            continue
        if kind == "SHIFTX" and cvals[1] is not None:
            sh = cvals[1]
            wd = wn.width(ins[0])
            if sh >= wd:
                new_cells.append(Cell("CONST", [], c.output, {"value": 0}))
                drv[c.output] = new_cells[-1]
            elif sh + wy <= wd:
                new_cells.append(Cell("SLICE", [ins[0]], c.output, {"lo": sh}))
                drv[c.output] = new_cells[-1]
            else:
                keep = wd - sh
                part = wn.new_net(keep)
                zero = wn.new_net(wy - keep)
                new_cells.append(Cell("SLICE", [ins[0]], part, {"lo": sh}))
                new_cells.append(Cell("CONST", [], zero, {"value": 0}))
                new_cells.append(Cell("CONCAT", [part, zero], c.output, {}))
                drv[c.output] = new_cells[-1]
            changed = True
            continue
        if kind == "SLICE" and wy == wn.width(ins[0]):
            alias[c.output] = ins[0]
            changed = True
            continue
        new_cells.append(c)

    if not changed:
        return False
    wn.cells = new_cells
    for c in wn.cells:
        c.inputs = [resolve(i) for i in c.inputs]
    wn.outputs = [(n, resolve(net)) for n, net in wn.outputs]
    return True
