import random

import pytest

from gateflow.aig import Aig, CutError, read_aiger, write_aiger
from gateflow.cuts import enumerate_cuts


def build_mux():
    g = Aig()
    s = g.pi("s")
    a = g.pi("a")
    b = g.pi("b")
    y = g.mux(s, a, b)
    g.po("y", y)
    return g, (s, a, b, y)


def test_and_is_one_node():
    g = Aig()
    a = g.pi("a")
    b = g.pi("b")
    g.po("y", g.and_(a, b))
    assert g.num_ands() == 1


def test_xor_is_three_nodes():
    g = Aig()
    a = g.pi("a")
    b = g.pi("b")
    g.po("y", g.xor_(a, b))
    assert g.num_ands() == 3


def test_strash_dedupes_and_folds():
    g = Aig()
    a = g.pi("a")
    b = g.pi("b")
    n1 = g.and_(a, b)
    n2 = g.and_(b, a)
    assert n1 == n2
    assert g.and_(a, 0) == 0
    assert g.and_(a, 1) == a
    assert g.and_(a, a) == a
    assert g.and_(a, a ^ 1) == 0
    g.check()


def test_sim_batched():
    g, (s, a, b, y) = build_mux()
    # 8 vectors: all (s,a,b) combos; vector i has s=bit2, a=bit1, b=bit0
    sm = am = bm = 0
    for i in range(8):
        sm |= ((i >> 2) & 1) << i
        am |= ((i >> 1) & 1) << i
        bm |= (i & 1) << i
    val = g.sim([sm, am, bm], None, 0xFF)
    out = Aig.lit_value(val, y, 0xFF)
    for i in range(8):
        sv, av, bv = (i >> 2) & 1, (i >> 1) & 1, i & 1
        assert (out >> i) & 1 == (av if sv else bv)


def test_cut_function_examples():
    g = Aig()
    a = g.pi("a")
    b = g.pi("b")
    y = g.and_(a, b)
    assert g.cut_function(y, (a >> 1, b >> 1)).bits == 0x8
    assert g.cut_function(a, (a >> 1,)).bits == 0x2

    g2, (s, a2, b2, y2) = build_mux()
    tt = g2.cut_function(y2, (s >> 1, a2 >> 1, b2 >> 1))
    assert tt.bits == 0xCA


def test_cut_function_not_a_cut():
    g, (s, a, b, y) = build_mux()
    with pytest.raises(CutError):
        g.cut_function(y, (s >> 1, a >> 1))


def test_enumerate_cuts_basic():
    g = Aig()
    a = g.pi("a")
    b = g.pi("b")
    y = g.and_(a, b)
    g.po("y", y)
    cuts = enumerate_cuts(g, k=6, limit_per_node=8)
    got = {leaves for leaves, _ in cuts[y >> 1]}
    assert got == {(y >> 1,), tuple(sorted((a >> 1, b >> 1)))}


def test_enumerate_cuts_caps():
    rng = random.Random(0)
    g = Aig()
    lits = [g.pi(f"i{i}") for i in range(10)]
    for _ in range(120):
        x = rng.choice(lits)
        y = rng.choice(lits)
        if x != y:
            lits.append(g.and_(x ^ rng.getrandbits(1), y ^ rng.getrandbits(1)))
    cuts = enumerate_cuts(g, k=6, limit_per_node=8)
    for cs in cuts.values():
        assert len(cs) <= 8
        for leaves, _ in cs:
            assert len(leaves) <= 6


def test_latch_roundtrip_aiger():
    g = Aig()
    d = g.pi("d")
    q, li = g.latch("q")
    g.set_latch_next(li, d)
    g.po("out", q ^ 1)
    text = write_aiger(g)
    g2 = read_aiger(text)
    assert write_aiger(g2) == text
    assert g2.num_ands() == 0
    assert len(g2.latch_ids) == 1


def test_aiger_roundtrip_comb():
    g, _ = build_mux()
    text = write_aiger(g)
    g2 = read_aiger(text)
    assert write_aiger(g2) == text
    # behavior identical on all 8 vectors
    mask = 0xFF
    ins = []
    for j in range(3):
        m = 0
        for i in range(8):
            m |= ((i >> (2 - j)) & 1) << i
        ins.append(m)
    v1 = g.sim(ins, None, mask)
    v2 = g2.sim(ins, None, mask)
    o1 = Aig.lit_value(v1, g.pos[0][1], mask)
    o2 = Aig.lit_value(v2, g2.pos[0][1], mask)
    assert o1 == o2


def test_replace_and_compact():
    g = Aig()
    a = g.pi("a")
    b = g.pi("b")
    s = g.pi("s")
    # verbose mux: 4 nodes via two ANDs + OR on uncomplemented selector nets
    n1 = g.and_(s, a)
    sbar = g.and_(s ^ 1, s ^ 1)  # silly but legal single node? no: a&a folds
    n2 = g.and_(s ^ 1, b)
    y = g.or_(n1, n2)
    g.po("y", y)
    before = g.num_ands()
    g.prepare_mutation()
    # replace y's node with an equivalent fresh construction
    z = g.and_tracked(n1 ^ 1, n2 ^ 1)
    g.replace(y >> 1, z ^ 1)
    c = g.compact()
    c.check()
    assert c.num_ands() <= before
    _ = sbar


def test_mffc():
    g = Aig()
    a = g.pi("a")
    b = g.pi("b")
    c = g.pi("c")
    n1 = g.and_(a, b)
    n2 = g.and_(n1, c)
    g.po("y", n2)
    g.prepare_mutation()
    # n1 used only by n2: replacing n2 frees both
    assert g.mffc_size(n2 >> 1, (a >> 1, b >> 1, c >> 1)) == 2
    # with an extra user of n1 only n2 is freed
    g2 = Aig()
    a = g2.pi("a")
    b = g2.pi("b")
    c = g2.pi("c")
    n1 = g2.and_(a, b)
    n2 = g2.and_(n1, c)
    g2.po("y", n2)
    g2.po("z", n1)
    g2.prepare_mutation()
    assert g2.mffc_size(n2 >> 1, (a >> 1, b >> 1, c >> 1)) == 1
