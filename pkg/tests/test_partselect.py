import random

from gateflow.bitblast import bitblast
from gateflow.equiv import AigSim, equiv_exhaustive, equiv_random
from gateflow.partselect import detect, pad_and_rewrite, run
from gateflow.wordnet import WordNetlist, const_fold, remove_dead


def shiftx_netlist(data_w, out_w, idx_w, shamt_builder):
    wn = WordNetlist("t")
    data = wn.new_net(data_w, "data")
    idx = wn.new_net(idx_w, "idx")
    wn.inputs = [("data", data), ("idx", idx)]
    shamt = shamt_builder(wn, idx)
    y = wn.op("SHIFTX", [data, shamt], out_w)
    wn.outputs = [("y", y)]
    return wn


def mul_shamt(stride, width=32):
    def build(wn, idx):
        ext = wn.op("CONCAT", [idx, wn.const(0, width - wn.width(idx))], width)
        k = wn.const(stride, width)
        return wn.op("MUL", [ext, k], width)
    return build


def test_detect_mul_stride():
    wn = shiftx_netlist(96, 24, 2, mul_shamt(24))
    ms = detect(wn)
    assert len(ms) == 1
    assert ms[0].stride == 24
    assert ms[0].block_count == 4
    assert ms[0].block_width == 24


def test_detect_concat_zero_pad():
    def build(wn, idx):
        return wn.op("CONCAT", [wn.const(0, 3), idx], 3 + wn.width(idx))
    wn = shiftx_netlist(32, 8, 2, build)
    ms = detect(wn)
    assert len(ms) == 1
    assert ms[0].stride == 8


def test_detect_shl_stride():
    def build(wn, idx):
        ext = wn.op("CONCAT", [idx, wn.const(0, 6)], 8)
        return wn.op("SHL", [ext, wn.const(2, 2)], 8)
    wn = shiftx_netlist(16, 4, 2, build)
    ms = detect(wn)
    assert len(ms) == 1
    assert ms[0].stride == 4


def test_detect_rejects_add_shamt():
    def build(wn, idx):
        ext = wn.op("CONCAT", [idx, wn.const(0, 6)], 8)
        return wn.op("ADD", [ext, wn.const(3, 8)], 8)
    wn = shiftx_netlist(32, 8, 2, build)
    assert detect(wn) == []


def test_detect_rejects_wide_reads():
    # a 16-bit read with stride 8 straddles blocks; must not match
    wn = shiftx_netlist(64, 16, 2, mul_shamt(8))
    assert detect(wn) == []


def test_pad_geometry_96_to_128():
    wn = shiftx_netlist(96, 24, 2, mul_shamt(24))
    m = detect(wn)[0]
    pad_and_rewrite(wn, m)
    sx = next(c for c in wn.cells if c.kind == "SHIFTX")
    assert wn.width(sx.inputs[0]) == 128  # 4 blocks of 32
    drv = {c.output: c for c in wn.cells}
    sh = drv[sx.inputs[1]]
    assert sh.kind == "SHL"
    k = drv[sh.inputs[1]]
    assert k.kind == "CONST" and k.attrs["value"] == 5  # log2(32)


def test_pow2_stride_identity_padding():
    wn = shiftx_netlist(32, 8, 2, mul_shamt(8))
    m = detect(wn)[0]
    data_before = wn.cells[-1].inputs[0] if False else None
    sx = next(c for c in wn.cells if c.kind == "SHIFTX")
    old_data = sx.inputs[0]
    pad_and_rewrite(wn, m)
    assert sx.inputs[0] == old_data  # no repacking
    drv = {c.output: c for c in wn.cells}
    assert drv[sx.inputs[1]].kind == "SHL"
    _ = data_before


def run_equiv(wn_factory):
    wn1 = wn_factory()
    wn2 = wn_factory()
    run(wn2)
    const_fold(wn2)
    remove_dead(wn2)
    g1 = bitblast(const_fold(wn1))
    g2 = bitblast(wn2)
    s1, s2 = AigSim(g1), AigSim(g2)
    if sum(w for _, w in s1.ports_in) <= 20:
        res = equiv_exhaustive(s1, s2, cap=20)
    else:
        res = equiv_random(s1, s2, 10**5, seed=77)
    assert res.verdict == "equivalent", res.cex_text()
    return g1, g2


def test_rewrite_preserves_function_including_oob():
    # 3 blocks but a 2-bit index: index 3 reads out of range (zeros)
    for stride in (3, 5, 8):
        g1, g2 = run_equiv(
            lambda s=stride: shiftx_netlist(3 * s, s, 2, mul_shamt(s)))
        assert g2.num_ands() <= g1.num_ands()


def test_run_no_shiftx_is_identity():
    wn = WordNetlist("p")
    a = wn.new_net(4, "a")
    wn.inputs = [("a", a)]
    y = wn.op("NOT", [a], 4)
    wn.outputs = [("y", y)]
    before = [(c.kind, list(c.inputs), c.output) for c in wn.cells]
    _, n = run(wn)
    assert n == 0
    assert [(c.kind, list(c.inputs), c.output) for c in wn.cells] == before


def test_run_rewrites_independent_matches_in_one_sweep():
    wn = WordNetlist("two")
    d1 = wn.new_net(36, "d1")
    d2 = wn.new_net(40, "d2")
    i1 = wn.new_net(2, "i1")
    i2 = wn.new_net(2, "i2")
    wn.inputs = [("d1", d1), ("d2", d2), ("i1", i1), ("i2", i2)]
    sh1 = mul_shamt(12)(wn, i1)
    sh2 = mul_shamt(10)(wn, i2)
    y1 = wn.op("SHIFTX", [d1, sh1], 12)
    y2 = wn.op("SHIFTX", [d2, sh2], 10)
    wn.outputs = [("y1", y1), ("y2", y2)]
    _, n = run(wn)
    assert n == 2


def test_variable_stride_untouched_others_rewritten():
    wn = WordNetlist("mix")
    d = wn.new_net(24, "d")
    i = wn.new_net(2, "i")
    j = wn.new_net(3, "j")
    wn.inputs = [("d", d), ("i", i), ("j", j)]
    sh_const = mul_shamt(6)(wn, i)
    ext_i = wn.op("CONCAT", [i, wn.const(0, 3)], 5)
    ext_j = wn.op("CONCAT", [j, wn.const(0, 2)], 5)
    sh_var = wn.op("MUL", [ext_i, ext_j], 5)
    y1 = wn.op("SHIFTX", [d, sh_const], 6)
    y2 = wn.op("SHIFTX", [d, sh_var], 6)
    wn.outputs = [("y1", y1), ("y2", y2)]
    matches = detect(wn)
    assert len(matches) == 1
    _, n = run(wn)
    assert n == 1
    sx2 = [c for c in wn.cells if c.kind == "SHIFTX"][1]
    assert sx2.inputs[1] == sh_var
