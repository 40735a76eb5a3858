"""Arithmetic unit generators and the MAC fusion pass.

Adders come in four selectable architectures (ripple plus three parallel
prefix shapes). Multipliers use radix-4 Booth recoding over the
sign-extended operand with one appended zero LSB; unsigned inputs are
zero-extended by one bit and multiplied signed. Partial products are
reduced by a Dadda-scheduled 3:2 compressor tree, and MAC fusion injects
the addend as one more tree row instead of a trailing adder.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .aig import Aig
from .wordnet import Cell, WordNetlist

ADDER_ARCHS = ("ripple", "sklansky", "kogge_stone", "brent_kung")


@dataclass
class ArithSelection:
    default_adder: str = "ripple"
    overrides: dict[int, str] = field(default_factory=dict)  # cell idx -> arch
    multiplier: str = "booth_r4"
    fuse_fma: bool = True

    def adder_for(self, cell_idx: int) -> str:
        return self.overrides.get(cell_idx, self.default_adder)


# -- prefix networks ----------------------------------------------------


def prefix_network(arch: str, width: int) -> list[list[tuple[int, int]]]:
    """Levels of (hi, lo) combines; position i accumulates the group
    (G, P) over bits [i..0] once all levels ran."""
    if arch == "kogge_stone":
        levels = []
        d = 1
        while d < width:
            levels.append([(i, i - d) for i in range(d, width)])
            d *= 2
        return levels
    if arch == "sklansky":
        levels = []
        d = 1
        while d < width:
            lvl = []
            for i in range(width):
                if i & d:
                    lvl.append((i, (i & ~(2 * d - 1)) + d - 1))
            levels.append(lvl)
            d *= 2
        return levels
    if arch == "brent_kung":
        levels = []
        d = 1
        while d < width:
            lvl = [(i, i - d) for i in range(2 * d - 1, width, 2 * d)]
            if lvl:
                levels.append(lvl)
            d *= 2
        d //= 2
        while d >= 1:
            lvl = [(i, i - d) for i in range(3 * d - 1, width, 2 * d)]
            if lvl:
                levels.append(lvl)
            d //= 2
        return levels
    raise ValueError(f"unknown prefix architecture {arch!r}")


def check_prefix_network(arch: str, width: int):
    """Every combine must join adjacent spans (levels act in parallel on
    pre-level values) and every bit must end up covering [i..0]; used by
    the test suite as a structural oracle."""
    spans = [(i, i) for i in range(width)]
    for lvl in prefix_network(arch, width):
        updates = {}
        for hi, lo in lvl:
            assert hi not in updates, f"{arch}: double write at {hi}"
            sh, sl = spans[hi]
            oh, ol = spans[lo]
            assert sl == oh + 1, f"{arch}: non-adjacent combine at {hi},{lo}"
            updates[hi] = (sh, ol)
        spans_new = list(spans)
        for hi, sp in updates.items():
            spans_new[hi] = sp
        spans = spans_new
    for i in range(width):
        assert spans[i] == (i, 0), f"{arch}: bit {i} span {spans[i]}"


# -- adder emission -----------------------------------------------------


def emit_adder(g: Aig, a: list[int], b: list[int], cin: int,
               arch: str) -> tuple[list[int], int]:
    """Sum bits and carry-out of a + b + cin."""
    if len(a) != len(b):
        raise ValueError("adder operand widths differ")
    if arch == "ripple":
        s_bits = []
        c = cin
        for ai, bi in zip(a, b):
            p = g.xor_(ai, bi)
            s_bits.append(g.xor_(p, c))
            c = g.or_(g.and_(ai, bi), g.and_(c, p))
        return s_bits, c
    if arch not in ADDER_ARCHS:
        raise ValueError(f"unknown adder architecture {arch!r}")
    w = len(a)
    p = [g.xor_(ai, bi) for ai, bi in zip(a, b)]
    gen = [g.and_(ai, bi) for ai, bi in zip(a, b)]
    G = list(gen)
    P = list(p)
    for lvl in prefix_network(arch, w):
        updates = {}
        for hi, lo in lvl:
            updates[hi] = (
                g.or_(G[hi], g.and_(P[hi], G[lo])),
                g.and_(P[hi], P[lo]),
            )
        for hi, (ng, np_) in updates.items():
            G[hi], P[hi] = ng, np_
    carries = [cin]
    for i in range(w):
        carries.append(g.or_(G[i], g.and_(P[i], cin)))
    s_bits = [g.xor_(p[i], carries[i]) for i in range(w)]
    return s_bits, carries[w]


def gen_adder(width: int, arch: str, carry_in: bool = False) -> Aig:
    """Standalone adder: a + b (+ cin) with sum and carry-out ports."""
    g = Aig(f"add{width}_{arch}")
    a = [g.pi(f"a[{i}]") for i in range(width)]
    b = [g.pi(f"b[{i}]") for i in range(width)]
    cin = g.pi("cin") if carry_in else 0
    s, cout = emit_adder(g, a, b, cin, arch)
    for i, lit in enumerate(s):
        g.po(f"s[{i}]", lit)
    g.po("cout", cout)
    g.in_words = [("a", a), ("b", b)] + ([("cin", [cin])] if carry_in else [])
    g.out_words = [("s", s), ("cout", [cout])]
    return g


# -- Dadda compressor tree ---------------------------------------------


def dadda_targets(max_height: int) -> list[int]:
    """Descending Dadda heights strictly below max_height."""
    seq = [2]
    while seq[-1] < max_height:
        seq.append(seq[-1] * 3 // 2)
    return [d for d in reversed(seq) if d < max_height]


def dadda_stage_count(max_height: int) -> int:
    return len(dadda_targets(max_height))


def emit_csa_tree(g: Aig, addends: list[tuple[int, list[int]]], width: int,
                  extra_bits: list[tuple[int, int]] | None = None
                  ) -> tuple[list[int], list[int], int]:
    """Reduce rows (offset, bits) plus loose (column, lit) bits to two
    rows of `width` using 3:2/2:2 compressors on the Dadda schedule.
    Returns (sum_row, carry_row, stages)."""
    cols: list[list[int]] = [[] for _ in range(width)]
    for offset, bits in addends:
        for i, lit in enumerate(bits):
            c = offset + i
            if c < width and lit != 0:
                cols[c].append(lit)
    for c, lit in extra_bits or ():
        if c < width and lit != 0:
            cols[c].append(lit)

    stages = 0
    while max((len(col) for col in cols), default=0) > 2:
        h = max(len(col) for col in cols)
        target = dadda_targets(h)[0]
        stages += 1
        carries: list[int] = []
        for c in range(width):
            items = cols[c] + carries
            carries = []
            while len(items) > target:
                if len(items) == target + 1:
                    x, y = items[0], items[1]
                    items = items[2:] + [g.xor_(x, y)]
                    carries.append(g.and_(x, y))
                else:
                    x, y, z = items[0], items[1], items[2]
                    p = g.xor_(x, y)
                    items = items[3:] + [g.xor_(p, z)]
                    carries.append(g.or_(g.and_(x, y), g.and_(z, p)))
            cols[c] = items
        # carries off the top column fall outside the result width
    srow = [cols[c][0] if len(cols[c]) > 0 else 0 for c in range(width)]
    crow = [cols[c][1] if len(cols[c]) > 1 else 0 for c in range(width)]
    return srow, crow, stages


def gen_csa_tree(addends: list[tuple[int, int]], width: int) -> Aig:
    """Standalone tree over fresh inputs; addends are (width, offset)."""
    g = Aig(f"csa{len(addends)}x{width}")
    rows = []
    for idx, (aw, off) in enumerate(addends):
        bits = [g.pi(f"a{idx}[{i}]") for i in range(aw)]
        g.in_words.append((f"a{idx}", bits))
        rows.append((off, bits))
    srow, crow, stages = emit_csa_tree(g, rows, width)
    for i, lit in enumerate(srow):
        g.po(f"s[{i}]", lit)
    for i, lit in enumerate(crow):
        g.po(f"c[{i}]", lit)
    g.out_words = [("s", srow), ("c", crow)]
    g.csa_stages = stages
    return g


# -- radix-4 Booth multiplier -------------------------------------------


def booth_row_count(wb: int, signed: bool) -> int:
    """Partial-product rows: recoding runs over the sign-extended
    multiplier with one appended zero LSB (zero-extension first when
    unsigned)."""
    b_eff = wb if signed else wb + 1
    return (b_eff + 2) // 2


def emit_booth_rows(g: Aig, a: list[int], b: list[int], signed: bool,
                    width: int):
    """Partial-product rows (offset 0, full-width bit lists) plus the
    two's-complement correction bits as (column, lit)."""
    if not signed:
        a = a + [0]
        b = b + [0]
    A = len(a)
    B = len(b)
    a_ext = a + [a[-1]]  # room for the x2 digit

    def bbit(i: int) -> int:
        if i < 0:
            return 0
        if i >= B:
            return b[B - 1]
        return b[i]

    rows: list[tuple[int, list[int]]] = []
    corrections: list[tuple[int, int]] = []
    n_rows = (B + 2) // 2
    for j in range(n_rows):
        h = bbit(2 * j + 1)
        mid = bbit(2 * j)
        lo = bbit(2 * j - 1)
        one = g.xor_(mid, lo)
        two = g.and_(g.xor_(h, mid), g.xor_(mid, lo) ^ 1)
        neg = h
        pre: list[int] = []
        for i in range(A + 1):
            below = a_ext[i - 1] if i >= 1 else 0
            v = g.or_(g.and_(one, a_ext[i]), g.and_(two, below))
            pre.append(g.xor_(v, neg))
        off = 2 * j
        if off >= width:
            break
        bits = list(pre)
        sign = pre[-1]
        while off + len(bits) < width:
            bits.append(sign)
        rows.append((off, bits[: width - off]))
        corrections.append((off, neg))
    return rows, corrections


def emit_multiplier(g: Aig, a: list[int], b: list[int], signed: bool,
                    width: int, final_adder: str = "ripple",
                    addend: list[int] | None = None,
                    addend_signed: bool | None = None) -> list[int]:
    """Booth rows -> Dadda tree -> one final adder; an optional addend
    row turns the multiplier into a fused multiply-add."""
    rows, corr = emit_booth_rows(g, a, b, signed, width)
    if addend is not None:
        asag = addend_signed if addend_signed is not None else signed
        bits = list(addend)
        sign = bits[-1] if asag else 0
        while len(bits) < width:
            bits.append(sign)
        rows.append((0, bits[:width]))
    srow, crow, _ = emit_csa_tree(g, rows, width, corr)
    s_bits, _ = emit_adder(g, srow, crow, 0, final_adder)
    return s_bits


def gen_booth_multiplier(wa: int, wb: int, signed: bool,
                         final_adder: str = "ripple") -> Aig:
    g = Aig(f"mul{wa}x{wb}{'s' if signed else 'u'}")
    a = [g.pi(f"a[{i}]") for i in range(wa)]
    b = [g.pi(f"b[{i}]") for i in range(wb)]
    p = emit_multiplier(g, a, b, signed, wa + wb, final_adder)
    for i, lit in enumerate(p):
        g.po(f"p[{i}]", lit)
    g.in_words = [("a", a), ("b", b)]
    g.out_words = [("p", p)]
    return g


def gen_fma(wa: int, wb: int, wc: int, width: int, signed: bool,
            final_adder: str = "ripple") -> Aig:
    g = Aig(f"fma{wa}x{wb}p{wc}")
    a = [g.pi(f"a[{i}]") for i in range(wa)]
    b = [g.pi(f"b[{i}]") for i in range(wb)]
    c = [g.pi(f"c[{i}]") for i in range(wc)]
    y = emit_multiplier(g, a, b, signed, width, final_adder, addend=c)
    for i, lit in enumerate(y):
        g.po(f"y[{i}]", lit)
    g.in_words = [("a", a), ("b", b), ("c", c)]
    g.out_words = [("y", y)]
    return g


# -- word-level passes ---------------------------------------------------


def fuse_mac(wn: WordNetlist, sel: ArithSelection) -> tuple[WordNetlist, int]:
    """Merge ADD(c, MUL(a,b)) into FMA(a,b,c) when the product has no
    other reader and the widths are compatible. Leftmost multiplier wins
    when both addends qualify."""
    if not sel.fuse_fma:
        return wn, 0
    drv = {c.output: c for c in wn.cells}
    readers: dict[int, int] = {}
    for c in wn.cells:
        for i in c.inputs:
            readers[i] = readers.get(i, 0) + 1
    for _, net in wn.outputs:
        readers[net] = readers.get(net, 0) + 1

    fused = 0
    out_cells: list[Cell] = []
    dropped: set[int] = set()
    for c in wn.cells:
        if c.kind != "ADD":
            out_cells.append(c)
            continue
        pick = None
        for side in (0, 1):
            m = drv.get(c.inputs[side])
            if m is None or m.kind != "MUL":
                continue
            if readers.get(m.output, 0) != 1:
                continue
            if m.attrs.get("signed", False) != c.attrs.get("signed", False):
                continue
            wa = wn.width(m.inputs[0])
            wb = wn.width(m.inputs[1])
            other = c.inputs[1 - side]
            if wn.width(other) > wa + wb:
                continue
            pick = (m, other)
            break
        if pick is None:
            out_cells.append(c)
            continue
        m, other = pick
        dropped.add(id(m))
        out_cells.append(
            Cell("FMA", [m.inputs[0], m.inputs[1], other], c.output,
                 dict(c.attrs))
        )
        fused += 1
    wn.cells = [c for c in out_cells if id(c) not in dropped]
    return wn, fused


def select_arch(wn: WordNetlist, policy: str,
                threshold: int = 16) -> ArithSelection:
    """min_area -> ripple everywhere, min_delay -> kogge_stone, balanced
    -> ripple below the threshold width and brent_kung at or above."""
    if policy == "min_area":
        return ArithSelection(default_adder="ripple")
    if policy == "min_delay":
        return ArithSelection(default_adder="kogge_stone")
    if policy == "balanced":
        sel = ArithSelection(default_adder="ripple")
        for idx, c in enumerate(wn.cells):
            if c.kind in ("ADD", "SUB", "MUL", "FMA"):
                if wn.width(c.output) >= threshold:
                    sel.overrides[idx] = "brent_kung"
        return sel
    raise ValueError(f"unknown adder policy {policy!r}")
