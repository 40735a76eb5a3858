import random

import pytest

from gateflow.aig import Aig
from gateflow.arith import gen_adder, gen_booth_multiplier
from gateflow.celllib import default_library, load_library, save_library
from gateflow.equiv import AigSim, equiv_exhaustive
from gateflow.techmap import MappedSim, area, map_aig, sta

LIB = default_library()


def mux_aig():
    g = Aig("mx")
    s = g.pi("s")
    a = g.pi("a")
    b = g.pi("b")
    g.in_words = [("s", [s]), ("a", [a]), ("b", [b])]
    y = g.mux(s, a, b)
    g.po("y", y)
    g.out_words = [("y", [y])]
    return g


def test_library_roundtrip_and_normalization():
    text = save_library(LIB)
    lib2 = load_library(text)
    assert save_library(lib2) == text
    assert LIB.by_name["NAND2"].area == 1.0


def test_single_and_maps_to_and2():
    g = Aig("a2")
    a = g.pi("a")
    b = g.pi("b")
    g.in_words = [("a", [a]), ("b", [b])]
    y = g.and_(a, b)
    g.po("y", y)
    g.out_words = [("y", [y])]
    mn = map_aig(g, LIB, "area")
    assert [i.cell for i in mn.instances] == ["AND2"]


def test_xor_cone_maps_to_xor2():
    g = Aig("x2")
    a = g.pi("a")
    b = g.pi("b")
    g.in_words = [("a", [a]), ("b", [b])]
    y = g.xor_(a, b)
    g.po("y", y)
    g.out_words = [("y", [y])]
    mn = map_aig(g, LIB, "area")
    assert [i.cell for i in mn.instances] == ["XOR2"]
    rep = area(mn, LIB)
    assert rep.total_ge == 2.25


def test_empty_aig_maps_empty():
    g = Aig("e")
    mn = map_aig(g, LIB, "area")
    assert mn.instances == []
    assert area(mn, LIB).total_ge == 0.0
    rep = sta(mn, LIB)
    assert rep.critical_path_ns == 0.0
    assert rep.fmax_mhz is None


def test_mux_maps_to_single_mux2():
    mn = map_aig(mux_aig(), LIB, "area")
    counts = area(mn, LIB).cells
    assert counts == {"MUX2": 1}


def test_map_preserves_function_exhaustive():
    rng = random.Random(31)
    for trial in range(6):
        g = Aig(f"r{trial}")
        lits = []
        for i in range(5):
            lit = g.pi(f"i{i}")
            lits.append(lit)
            g.in_words.append((f"i{i}", [lit]))
        for _ in range(30):
            x = rng.choice(lits) ^ rng.getrandbits(1)
            y = rng.choice(lits) ^ rng.getrandbits(1)
            lits.append(g.and_(x, y))
        g.po("y", lits[-1])
        g.out_words = [("y", [lits[-1]])]
        mn = map_aig(g, LIB, "area")
        r = equiv_exhaustive(AigSim(g), MappedSim(mn, LIB))
        assert r.verdict == "equivalent"


def test_area_objective_not_worse_than_fallback():
    from gateflow.techmap import _Mapper

    rng = random.Random(8)
    for trial in range(5):
        g = Aig(f"f{trial}")
        lits = []
        for i in range(4):
            lit = g.pi(f"i{i}")
            lits.append(lit)
            g.in_words.append((f"i{i}", [lit]))
        for _ in range(25):
            x = rng.choice(lits) ^ rng.getrandbits(1)
            y = rng.choice(lits) ^ rng.getrandbits(1)
            lits.append(g.and_(x, y))
        g.po("y", lits[-1])
        g.out_words = [("y", [lits[-1]])]
        chosen = map_aig(g, LIB, "area")
        fb = _Mapper(g.compact(), LIB, "area", restrict={"NAND2", "INV"}).run()
        assert area(chosen, LIB).total_ge <= area(fb, LIB).total_ge


def test_delay_objective_not_slower_than_area():
    g = gen_booth_multiplier(6, 6, False)
    mn_a = map_aig(g, LIB, "area")
    mn_d = map_aig(g, LIB, "delay")
    assert sta(mn_d, LIB).critical_path_ns <= sta(mn_a, LIB).critical_path_ns


def test_sta_chain_of_inverters():
    g = Aig("chain")
    a = g.pi("a")
    g.in_words = [("a", [a])]
    # ten INV in the mapped result: build x, ~x alternating usage via
    # explicit mapping is awkward; check the additive model instead
    y = a
    for _ in range(4):
        y = g.and_(y, a)  # folds, keep simple
    mn = map_aig(g, LIB, "area") if False else None
    _ = mn
    from gateflow.techmap import MInst, MappedNetlist

    mn = MappedNetlist("c")
    n0 = mn.new_net()
    mn.inputs = [("a", [n0])]
    cur = n0
    for i in range(10):
        nxt = mn.new_net()
        mn.instances.append(MInst(f"g{i}", "INV", [cur], nxt))
        cur = nxt
    mn.outputs = [("y", [cur])]
    rep = sta(mn, LIB)
    assert rep.critical_path_ns == pytest.approx(0.5)
    assert rep.fmax_mhz == pytest.approx(2000.0)
    assert rep.path == [f"g{i}" for i in range(10)]
    assert rep.endpoint_slack["y"] == 0.0


def test_sta_path_sums_and_registers():
    g = Aig("seq")
    d = g.pi("d")
    g.in_words = [("d", [d])]
    q, li = g.latch("q")
    x = g.and_(q, d)
    g.set_latch_next(li, x)
    g.po("y", q ^ 1)
    g.out_words = [("y", [q ^ 1])]
    mn = map_aig(g, LIB, "area")
    rep = sta(mn, LIB)
    assert any(k.endswith(".D") for k in rep.endpoint_slack)
    assert rep.critical_path_ns > 0
    a = area(mn, LIB)
    assert a.cells.get("DFF", 0) == 1


def test_sequential_mapped_sim_agrees():
    g = Aig("seq2")
    d = g.pi("d")
    g.in_words = [("d", [d])]
    q, li = g.latch("q")
    g.set_latch_next(li, g.xor_(q, d))
    g.po("y", q)
    g.out_words = [("y", [q])]
    mn = map_aig(g, LIB, "area")
    s1 = AigSim(g)
    s2 = MappedSim(mn, LIB)
    rng = random.Random(2)
    for _ in range(50):
        ins = {"d": rng.getrandbits(1)}
        assert s1.step(ins) == s2.step(ins)


def test_adder_maps_and_checks():
    g = gen_adder(4, "ripple", carry_in=False)
    mn = map_aig(g, LIB, "area")
    r = equiv_exhaustive(AigSim(g), MappedSim(mn, LIB))
    assert r.verdict == "equivalent"
    counts = area(mn, LIB).cells
    assert counts.get("XOR2", 0) >= 3
