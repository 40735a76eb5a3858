"""Bit-blast a word netlist into a structurally hashed AIG.

Arithmetic cells expand through the unit library: adders per the
architecture selection, multipliers and fused multiply-adds through the
Booth/Dadda path with the selected final adder. Everything else is
direct per-bit logic; wiring cells cost nothing.
"""

from __future__ import annotations

from .aig import Aig
from .arith import ArithSelection, emit_adder, emit_multiplier
from .wordnet import Cell, NetlistError, WordNetlist


def _ext(bits: list[int], width: int, signed: bool) -> list[int]:
    if len(bits) >= width:
        return bits[:width]
    fill = bits[-1] if signed and bits else 0
    return bits + [fill] * (width - len(bits))


def bitblast(wn: WordNetlist, sel: ArithSelection | None = None) -> Aig:
    sel = sel or ArithSelection()
    wn.validate()
    g = Aig(wn.name)
    bits: dict[int, list[int]] = {}

    def port_bit_name(name: str, i: int, width: int) -> str:
        return f"{name}[{i}]" if width > 1 else name

    for name, net in wn.inputs:
        w = wn.width(net)
        lits = [g.pi(port_bit_name(name, i, w)) for i in range(w)]
        bits[net] = lits
        g.in_words.append((name, lits))

    latch_of: dict[int, list[int]] = {}
    for c in wn.cells:
        if c.kind == "DFF":
            w = wn.width(c.output)
            qname = wn.net_names.get(c.output, f"n{c.output}")
            qs = []
            for i in range(w):
                lit, li = g.latch(port_bit_name(qname, i, w))
                qs.append((lit, li))
            bits[c.output] = [q for q, _ in qs]
            latch_of[c.output] = [li for _, li in qs]

    cell_idx = {id(c): i for i, c in enumerate(wn.cells)}
    order = wn.topo_cells()
    for c in order:
        if c.kind == "DFF":
            continue
        ins = [bits[i] for i in c.inputs]
        bits[c.output] = _blast_cell(g, wn, c, ins, sel, cell_idx[id(c)])
    for c in order:
        if c.kind == "DFF":
            d = bits[c.inputs[0]]
            for i, li in enumerate(latch_of[c.output]):
                g.set_latch_next(li, d[i])

    for name, net in wn.outputs:
        w = wn.width(net)
        lits = bits[net]
        for i in range(w):
            g.po(port_bit_name(name, i, w), lits[i])
        g.out_words.append((name, list(lits)))
    return g


def _blast_cell(g: Aig, wn: WordNetlist, c: Cell, ins: list[list[int]],
                sel: ArithSelection, cell_idx: int) -> list[int]:
    kind = c.kind
    wy = wn.width(c.output)
    signed = c.attrs.get("signed", False)
    arch = sel.adder_for(cell_idx)

    if kind == "CONST":
        v = c.attrs["value"]
        return [(v >> i) & 1 for i in range(wy)]
    if kind == "NOT":
        return [b ^ 1 for b in ins[0]]
    if kind in ("AND", "OR", "XOR"):
        fn = {"AND": g.and_, "OR": g.or_, "XOR": g.xor_}[kind]
        return [fn(a, b) for a, b in zip(ins[0], ins[1])]
    if kind == "MUX":
        s = ins[0][0]
        return [g.mux(s, a, b) for a, b in zip(ins[1], ins[2])]
    if kind == "EQ":
        t = 1
        for a, b in zip(ins[0], ins[1]):
            t = g.and_(t, g.xor_(a, b) ^ 1)
        return [t]
    if kind == "LT":
        a = ins[0] + [ins[0][-1] if signed else 0]
        b = ins[1] + [ins[1][-1] if signed else 0]
        diff, _ = emit_adder(g, a, [x ^ 1 for x in b], 1, "ripple")
        return [diff[-1]]
    if kind == "ADD":
        a = _ext(ins[0], wy, signed)
        b = _ext(ins[1], wy, signed)
        s, _ = emit_adder(g, a, b, 0, arch)
        return s
    if kind == "SUB":
        a = _ext(ins[0], wy, signed)
        b = _ext(ins[1], wy, signed)
        s, _ = emit_adder(g, a, [x ^ 1 for x in b], 1, arch)
        return s
    if kind == "MUL":
        return emit_multiplier(g, ins[0], ins[1], signed, wy,
                               final_adder=arch)
    if kind == "FMA":
        return emit_multiplier(g, ins[0], ins[1], signed, wy,
                               final_adder=arch, addend=ins[2],
                               addend_signed=signed)
    if kind == "SHL":
        return _barrel(g, ins[0], ins[1], wy, left=True, fill=0)
    if kind == "SHR":
        fill = ins[0][-1] if signed else 0
        return _barrel(g, ins[0], ins[1], wy, left=False, fill=fill)
    if kind == "SHIFTX":
        data = ins[0]
        res = _barrel(g, data, ins[1], len(data), left=False, fill=0)
        return res[:wy] + [0] * max(0, wy - len(res))
    if kind == "CONCAT":
        out: list[int] = []
        for lits in ins:
            out.extend(lits)
        return out[:wy]
    if kind == "SLICE":
        lo = c.attrs["lo"]
        return ins[0][lo:lo + wy]
    raise NetlistError(f"cannot bit-blast {kind}")


def _barrel(g: Aig, data: list[int], sh: list[int], width: int, left: bool,
            fill: int) -> list[int]:
    res = list(data[:width])
    res += [fill] * (width - len(res))
    for k, sbit in enumerate(sh):
        if sbit == 0:
            continue
        amt = 1 << k
        if amt >= width:
            shifted = [fill] * width
        elif left:
            shifted = [fill] * amt + res[: width - amt]
        else:
            shifted = res[amt:] + [fill] * amt
        if sbit == 1:
            res = shifted
        else:
            res = [g.mux(sbit, s, r) for s, r in zip(shifted, res)]
    return res
