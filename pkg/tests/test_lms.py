import random

import pytest

from gateflow.aig import Aig
from gateflow.exact_synth import (
    EffortConfig,
    best_fragment,
    heuristic_fragment,
    isop_cubes,
    shannon_fragment,
    sop_fragment,
    synthesize_exact,
)
from gateflow.lms import (
    DbFormatError,
    LmsDb,
    LmsEntry,
    build_database,
    harvest,
    load_db,
    rewrite,
    save_db,
)
from gateflow.npn import npn_canonicalize
from gateflow.tt import TruthTable, table_mask

XOR3 = 0x96  # parity over (a, b, c)
MAJ3 = 0xE8
MUX3 = 0xCA


def exhaustive_tables(k):
    for bits in range(1 << (1 << k)):
        yield TruthTable(k, bits)


def test_exact_trivial_targets():
    assert synthesize_exact(TruthTable(2, 0x0), 4).n_nodes == 0
    assert synthesize_exact(TruthTable(2, 0xF), 4).n_nodes == 0
    assert synthesize_exact(TruthTable(2, 0xC), 4).n_nodes == 0  # projection
    frag = synthesize_exact(TruthTable(2, 0x8), 4)
    assert frag.n_nodes == 1
    assert frag.simulate().bits == 0x8


def test_exact_known_sizes():
    mux = synthesize_exact(TruthTable(3, MUX3), 6)
    assert mux.n_nodes == 3
    assert mux.simulate().bits == MUX3
    maj = synthesize_exact(TruthTable(3, MAJ3), 6)
    assert maj.n_nodes == 4
    assert maj.simulate().bits == MAJ3
    xor2 = synthesize_exact(TruthTable(2, 0x6), 6)
    assert xor2.n_nodes == 3


def test_exact_xor3_vs_cascade_bound():
    xor3 = synthesize_exact(TruthTable(3, XOR3), 8)
    assert xor3.simulate().bits == XOR3
    assert xor3.n_nodes <= 6  # cascade decomposition bound
    cascade = shannon_fragment(TruthTable(3, XOR3))
    assert cascade.simulate().bits == XOR3
    assert cascade.n_nodes <= 6
    assert xor3.n_nodes <= cascade.n_nodes


def test_heuristics_reproduce_function():
    rng = random.Random(9)
    for k in (2, 3, 4, 5):
        for _ in range(25):
            f = TruthTable(k, rng.getrandbits(1 << k))
            for frag in (shannon_fragment(f), sop_fragment(f)):
                assert frag.simulate() == f


def test_isop_covers_function():
    rng = random.Random(4)
    for k in (2, 3, 4):
        for _ in range(30):
            f = TruthTable(k, rng.getrandbits(1 << k))
            cubes = isop_cubes(f)
            got = 0
            for m in range(1 << k):
                vals = [(m >> (k - 1 - i)) & 1 for i in range(k)]
                for cube in cubes:
                    if all(vals[i] != neg for i, neg in cube):
                        got |= 1 << m
                        break
            assert got == f.bits


def test_exact_beats_or_ties_heuristics_k3():
    effort = EffortConfig()
    for bits in (XOR3, MAJ3, MUX3, 0x1B, 0x6A):
        f = TruthTable(3, bits)
        exact = synthesize_exact(f, 8)
        heur = heuristic_fragment(f)
        assert exact.n_nodes <= heur.n_nodes
        best = best_fragment(f, effort)
        assert best.n_nodes == exact.n_nodes


def test_database_k_le_3_exhaustive():
    funcs = []
    for k in (1, 2, 3):
        funcs.extend(exhaustive_tables(k))
    db = build_database(funcs)
    hist = db.histogram()
    assert hist == {1: 2, 2: 4, 3: 14}
    for entry in db.entries.values():
        entry.validate()
    # the constant class has a zero-node implementation
    zero = db.get(npn_canonicalize(TruthTable(1, 0))[0])
    assert zero is not None and zero.n_nodes == 0
    mux = db.get(npn_canonicalize(TruthTable(3, MUX3))[0])
    assert mux.n_nodes == 3


def test_db_roundtrip_byte_identical():
    funcs = list(exhaustive_tables(2))
    db = build_database(funcs)
    text = save_db(db)
    db2 = load_db(text)
    assert save_db(db2) == text


def test_db_load_error_reports_line():
    funcs = list(exhaustive_tables(1))
    text = save_db(build_database(funcs))
    bad = text.rstrip("\n") + "\ntt=zz k=9 nodes=0 depth=0 impl=0;\n"
    with pytest.raises(DbFormatError) as e:
        load_db(bad)
    assert "line" in str(e.value)


def test_harvest_single_and():
    g = Aig()
    a = g.pi("a")
    b = g.pi("b")
    g.po("y", g.and_(a, b))
    got = {(t.k, t.bits) for t in harvest(g)}
    ident = npn_canonicalize(TruthTable(1, 0x2))[0]
    and2 = npn_canonicalize(TruthTable(2, 0x8))[0]
    assert (ident.k, ident.bits) in got
    assert (and2.k, and2.bits) in got


def test_harvest_empty_design():
    g = Aig()
    g.pi("a")
    assert list(harvest(g)) == []


def build_ripple(width):
    g = Aig()
    a = [g.pi(f"a{i}") for i in range(width)]
    b = [g.pi(f"b{i}") for i in range(width)]
    c = 0
    for i in range(width):
        s = g.xor_(g.xor_(a[i], b[i]), c)
        c = g.or_(g.and_(a[i], b[i]), g.and_(c, g.xor_(a[i], b[i])))
        g.po(f"s{i}", s)
    g.po("cout", c)
    return g


def test_harvest_ripple_has_fa_classes():
    g = build_ripple(8)
    got = {(t.k, t.bits) for t in harvest(g)}
    fa_sum = npn_canonicalize(TruthTable(3, XOR3))[0]
    fa_carry = npn_canonicalize(TruthTable(3, MAJ3))[0]
    assert (fa_sum.k, fa_sum.bits) in got
    assert (fa_carry.k, fa_carry.bits) in got


def default_db():
    funcs = []
    for k in (1, 2, 3):
        funcs.extend(exhaustive_tables(k))
    return build_database(funcs)


DB = None


def get_db():
    global DB
    if DB is None:
        DB = default_db()
    return DB


def sim_all(g):
    n = len(g.pi_ids)
    mask = (1 << (1 << n)) - 1
    ins = []
    for j in range(n):
        m = 0
        for v in range(1 << n):
            m |= ((v >> j) & 1) << v
        ins.append(m)
    val = g.sim(ins, None, mask)
    return [Aig.lit_value(val, lit, mask) for _, lit in g.pos]


def test_rewrite_shrinks_redundant_mux():
    g = Aig()
    s = g.pi("s")
    a = g.pi("a")
    b = g.pi("b")
    t1 = g.and_(s, a)
    t2 = g.and_(s ^ 1, b)
    t3 = g.and_(a, b)  # consensus term, redundant
    y = g.or_(g.or_(t1, t2), t3)
    g.po("y", y)
    assert g.num_ands() == 5
    before = sim_all(g)
    out, stats = rewrite(g, get_db(), objective="area")
    assert out.num_ands() == 3
    assert stats.applied >= 1
    assert sim_all(out) == before
    out.check()


def test_rewrite_constant_cone():
    g = Aig()
    a = g.pi("a")
    b = g.pi("b")
    y = g.or_(g.and_(a, b), g.and_(a, b ^ 1))  # equals a
    z = g.or_(y, a ^ 1)  # tautology
    g.po("z", z)
    before = sim_all(g)
    out, _ = rewrite(g, get_db())
    assert sim_all(out) == before
    assert out.num_ands() == 0


def test_rewrite_fixpoint_on_optimal():
    g = Aig()
    s = g.pi("s")
    a = g.pi("a")
    b = g.pi("b")
    g.po("y", g.mux(s, a, b))
    out, _ = rewrite(g, get_db())
    assert out.num_ands() == 3


def test_rewrite_random_preserves_function_and_area():
    rng = random.Random(17)
    for trial in range(15):
        g = Aig()
        lits = [g.pi(f"i{i}") for i in range(6)]
        for _ in range(40):
            x = rng.choice(lits) ^ rng.getrandbits(1)
            y = rng.choice(lits) ^ rng.getrandbits(1)
            lits.append(g.and_(x, y))
        g.po("y0", lits[-1])
        g.po("y1", lits[len(lits) // 2])
        before_n = g.compact().num_ands()
        before = sim_all(g)
        out, _ = rewrite(g, get_db())
        out.check()
        assert out.num_ands() <= before_n
        assert sim_all(out) == before


def test_rewrite_depth_objective_never_worse():
    rng = random.Random(23)
    for trial in range(8):
        g = Aig()
        lits = [g.pi(f"i{i}") for i in range(5)]
        for _ in range(30):
            x = rng.choice(lits) ^ rng.getrandbits(1)
            y = rng.choice(lits) ^ rng.getrandbits(1)
            lits.append(g.and_(x, y))
        g.po("y", lits[-1])
        base = g.compact()
        before = sim_all(base)
        out, _ = rewrite(g, get_db(), objective="depth")
        assert out.depth() <= base.depth()
        assert sim_all(out) == before
