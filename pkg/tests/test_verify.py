import pytest

from gateflow.aig import Aig
from gateflow.bitblast import bitblast
from gateflow.elaborate import elaborate
from gateflow.equiv import (
    AigSim, SignatureError, equiv_exhaustive, equiv_random,
)
from gateflow.interp import AstSim, InterpError, interpret
from gateflow.lower import lower_words
from gateflow.parser import parse_text


def aig_gate(fn_name):
    g = Aig(fn_name)
    a = g.pi("a")
    b = g.pi("b")
    g.in_words = [("a", [a]), ("b", [b])]
    y = g.and_(a, b) if fn_name == "and" else g.or_(a, b)
    g.po("y", y)
    g.out_words = [("y", [y])]
    return AigSim(g)


def test_interpret_trace_inverter():
    d = parse_text(
        "module m(input logic x, output logic y); assign y = ~x; endmodule",
        "m")
    trace = interpret(AstSim(d, "m"), {"x": 1})
    assert trace == [{"y": 0}]


def test_interpret_trace_dff_chain():
    src = """
module m(input logic clk, input logic d, output logic q);
  logic q1;
  always_ff @(posedge clk) q1 <= d;
  always_ff @(posedge clk) q <= q1;
endmodule
"""
    sim = AstSim(parse_text(src, "m"), "m")
    trace = interpret(sim, [{"d": 1}, {"d": 0}, {"d": 0}, {"d": 0}])
    assert [t["q"] for t in trace] == [0, 0, 1, 0]


def test_interpret_width_mismatch_errors():
    d = parse_text(
        "module m(input logic x, output logic y); assign y = x; endmodule",
        "m")
    with pytest.raises(InterpError):
        interpret(AstSim(d, "m"), [{"nope": 1}])


def test_adder_netlist_300_mod_256():
    src = """
module m(input logic [7:0] a, b, output logic [7:0] s, output logic co);
  logic [8:0] wide;
  assign wide = {1'b0, a} + {1'b0, b};
  assign s = wide[7:0];
  assign co = wide[8];
endmodule
"""
    design = parse_text(src, "m")
    out, _ = elaborate(design, "m")
    wn = lower_words(out, "m")
    trace = interpret(wn.simulator(), [{"a": 200, "b": 100}])
    assert trace == [{"s": 44, "co": 1}]


def test_equiv_reflexive():
    s = aig_gate("and")
    assert equiv_exhaustive(s, aig_gate("and")).verdict == "equivalent"


def test_and_vs_or_counterexample():
    res = equiv_exhaustive(aig_gate("and"), aig_gate("or"))
    assert res.verdict == "counterexample"
    cex = res.counterexample[0]
    assert cex["a"] != cex["b"]  # any single-set input distinguishes them
    assert "cycle 0" in res.cex_text()


def test_over_cap_inconclusive():
    g = Aig("wide")
    lits = [g.pi(f"i{j}") for j in range(23)]
    for j, lit in enumerate(lits):
        g.in_words.append((f"i{j}", [lit]))
    y = lits[0]
    for lit in lits[1:]:
        y = g.and_(y, lit)
    g.po("y", y)
    g.out_words = [("y", [y])]
    res = equiv_exhaustive(AigSim(g), AigSim(g), cap=22)
    assert res.verdict == "inconclusive"
    assert "22" in res.message


def test_signature_mismatch_raises():
    g = Aig("one")
    a = g.pi("a")
    g.in_words = [("a", [a])]
    g.po("y", a)
    g.out_words = [("y", [a])]
    with pytest.raises(SignatureError):
        equiv_exhaustive(AigSim(g), aig_gate("and"))


def test_random_seed_determinism_and_cex_reproduction():
    s1, s2 = aig_gate("and"), aig_gate("or")
    r1 = equiv_random(s1, s2, 10**4, seed=99)
    r2 = equiv_random(aig_gate("and"), aig_gate("or"), 10**4, seed=99)
    assert r1.verdict == r2.verdict == "counterexample"
    assert r1.counterexample == r2.counterexample
    assert r1.vectors_tried == r2.vectors_tried
    # the stored counterexample really distinguishes the designs
    cex = r1.counterexample[0]
    assert s1.step(cex) != s2.step(cex)


def test_random_agreement_reports_vector_count():
    r = equiv_random(aig_gate("and"), aig_gate("and"), 1234, seed=5)
    assert r.verdict == "equivalent"
    assert r.vectors_tried == 1234


def test_sequential_bounded_equivalence():
    src_a = """
module m(input logic clk, input logic d, output logic q);
  logic [1:0] sr;
  always_ff @(posedge clk) sr <= {sr[0], d};
  assign q = sr[1];
endmodule
"""
    src_b = """
module m(input logic clk, input logic d, output logic q);
  logic s0, s1;
  always_ff @(posedge clk) begin
    s0 <= d;
    s1 <= s0;
  end
  assign q = s1;
endmodule
"""
    s1 = AstSim(parse_text(src_a, "m"), "m")
    s2 = AstSim(parse_text(src_b, "m"), "m")
    res = equiv_exhaustive(s1, s2, cap=10, cycles=8)
    assert res.verdict == "equivalent"
    assert res.vectors_tried == 256  # 2^(1 input x 8 cycles)
    r2 = equiv_random(s1, s2, 200, seed=3)
    assert r2.verdict == "equivalent"


def test_sequential_counterexample_found():
    src_a = """
module m(input logic clk, input logic d, output logic q);
  always_ff @(posedge clk) q <= d;
endmodule
"""
    src_b = """
module m(input logic clk, input logic d, output logic q);
  always_ff @(posedge clk) q <= ~d;
endmodule
"""
    s1 = AstSim(parse_text(src_a, "m"), "m")
    s2 = AstSim(parse_text(src_b, "m"), "m")
    res = equiv_exhaustive(s1, s2, cap=8, cycles=2)
    assert res.verdict == "counterexample"


def test_word_and_aig_sims_agree_with_interp():
    src = """
module m(input logic clk, input logic [3:0] x, output logic [3:0] acc);
  always_ff @(posedge clk) acc <= acc ^ x;
endmodule
"""
    design = parse_text(src, "m")
    out, _ = elaborate(design, "m")
    wn = lower_words(out, "m")
    sims = [AstSim(design, "m"), wn.simulator(), AigSim(bitblast(wn))]
    seq = [{"x": v} for v in (3, 5, 15, 0, 9)]
    traces = [interpret(s, seq) for s in sims]
    assert traces[0] == traces[1] == traces[2]
