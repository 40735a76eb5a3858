"""Constant-stride part-select optimization.

Generic indexed part-selects lower to SHIFTX cells driven by an index
expression; when that shift amount is a constant stride times an index
(a multiply, a constant left shift, or an index concatenated above zero
bits), the implied blocks are padded to a power of two and the shift
amount becomes a plain constant shift of the index. Downstream constant
folding then collapses the generic shifter into a block-multiplexer
tree. Padding bits are constant zero; a stride narrower than the read
width is left untouched (blocks would no longer be contiguous).
"""

from __future__ import annotations

from dataclasses import dataclass

from .wordnet import Cell, WordNetlist


@dataclass(frozen=True)
class StrideMatch:
    cell_index: int
    index_net: int
    index_width: int
    stride: int
    block_width: int  # read width
    block_count: int


def _const_value(wn: WordNetlist, drv: dict[int, Cell], net: int) -> int | None:
    c = drv.get(net)
    if c is not None and c.kind == "CONST":
        return c.attrs["value"]
    return None


def _zext_core(wn: WordNetlist, drv: dict[int, Cell], net: int) -> int:
    """Follow an explicit zero extension down to its core net."""
    c = drv.get(net)
    if c is not None and c.kind == "CONCAT" and len(c.inputs) == 2:
        if _const_value(wn, drv, c.inputs[1]) == 0:
            return _zext_core(wn, drv, c.inputs[0])
    return net


def detect(wn: WordNetlist) -> list[StrideMatch]:
    drv = {c.output: c for c in wn.cells}
    out = []
    for i, c in enumerate(wn.cells):
        if c.kind != "SHIFTX":
            continue
        data, shamt = c.inputs
        sh = drv.get(shamt)
        if sh is None:
            continue
        stride = None
        index_net = None
        if sh.kind == "MUL":
            for a, b in ((sh.inputs[0], sh.inputs[1]),
                         (sh.inputs[1], sh.inputs[0])):
                k = _const_value(wn, drv, b)
                if k is not None and k >= 1:
                    stride = k
                    index_net = _zext_core(wn, drv, a)
                    break
        elif sh.kind == "SHL":
            k = _const_value(wn, drv, sh.inputs[1])
            if k is not None:
                stride = 1 << k
                index_net = _zext_core(wn, drv, sh.inputs[0])
        elif sh.kind == "CONCAT" and len(sh.inputs) == 2:
            zeros = _const_value(wn, drv, sh.inputs[0])
            if zeros == 0:
                stride = 1 << wn.width(sh.inputs[0])
                index_net = sh.inputs[1]
        if stride is None or index_net is None:
            continue
        iw = wn.width(index_net)
        if ((1 << iw) - 1) * stride >= (1 << wn.width(shamt)):
            continue  # the original shift amount could wrap; not a clean stride
        w = wn.width(c.output)
        if w > stride:
            continue  # reads would straddle the padded block boundary
        dw = wn.width(data)
        n = max(1, -(-dw // stride))
        out.append(StrideMatch(i, index_net, iw, stride, w, n))
    return out


def _next_pow2(x: int) -> int:
    return 1 << (x - 1).bit_length()


def pad_and_rewrite(wn: WordNetlist, m: StrideMatch):
    cell = wn.cells[m.cell_index]
    assert cell.kind == "SHIFTX"
    data = cell.inputs[0]
    dw = wn.width(data)
    s = m.stride
    p = _next_pow2(s)
    log2p = p.bit_length() - 1

    if p == s:
        new_data = data
    else:
        parts = []
        for k in range(m.block_count):
            lo = k * s
            take = min(s, dw - lo)
            blk = wn.new_net(take)
            wn.add_cell("SLICE", [data], blk, lo=lo)
            parts.append(blk)
            if take < p:
                parts.append(wn.const(0, p - take))
        new_data = wn.new_net(m.block_count * p)
        wn.add_cell("CONCAT", parts, new_data)

    # shift amount: index zero-extended then shifted left by log2 p
    if log2p == 0:
        new_shamt = m.index_net
    else:
        ext_w = m.index_width + log2p
        ext = wn.new_net(ext_w)
        wn.add_cell("CONCAT", [m.index_net, wn.const(0, log2p)], ext)
        new_shamt = wn.new_net(ext_w)
        wn.add_cell("SHL", [ext, wn.const(log2p, max(1, log2p.bit_length()))],
                    new_shamt)
    cell.inputs = [new_data, new_shamt]


def run(wn: WordNetlist) -> tuple[WordNetlist, int]:
    """Detect and rewrite every constant-stride shift in one sweep."""
    matches = detect(wn)
    for m in matches:
        pad_and_rewrite(wn, m)
    return wn, len(matches)
