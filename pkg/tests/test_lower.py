import random

import pytest

from gateflow.bitblast import bitblast
from gateflow.diagnostics import DiagnosticError
from gateflow.elaborate import elaborate
from gateflow.equiv import AigSim, equiv_exhaustive, equiv_random
from gateflow.interp import AstSim
from gateflow.lower import lower_words
from gateflow.parser import parse_text
from gateflow.wordnet import NetlistError, const_fold


def to_netlist(src, top):
    d = parse_text(src, top)
    e, _ = elaborate(d, top)
    return lower_words(e, top), d


def cross_check(src, top, vectors=200, seed=1):
    wn, d = to_netlist(src, top)
    ast = AstSim(d, top)
    word = wn.simulator()
    aig = AigSim(bitblast(wn))
    assert ast.ports_in == word.ports_in == aig.ports_in
    assert ast.ports_out == word.ports_out == aig.ports_out
    rng = random.Random(seed)
    for sim in (ast, word, aig):
        sim.reset()
    for _ in range(vectors):
        ins = {n: rng.getrandbits(w) for n, w in ast.ports_in}
        o_ast = ast.step(ins)
        o_word = word.step(ins)
        o_aig = aig.step(ins)
        assert o_ast == o_word == o_aig, (ins, o_ast, o_word, o_aig)
    return wn


def test_lowering_rule_examples():
    src = """
module m(input logic [1:0] i, input logic [31:0] d, output logic [7:0] y);
  assign y = d[i*8 +: 8];
endmodule
"""
    wn, _ = to_netlist(src, "m")
    kinds = [c.kind for c in wn.cells]
    assert "SHIFTX" in kinds
    assert "MUL" in kinds

    src2 = """
module m(input logic s, input logic [3:0] a, b, output logic [3:0] y);
  assign y = s ? a : b;
endmodule
"""
    wn2, _ = to_netlist(src2, "m")
    assert any(c.kind == "MUX" for c in wn2.cells)

    src3 = """
module m(input logic [3:0] a, b, c, output logic [7:0] y);
  assign y = a + b * c;
endmodule
"""
    wn3, _ = to_netlist(src3, "m")
    kinds3 = [c.kind for c in wn3.cells]
    assert "ADD" in kinds3 and "MUL" in kinds3


def test_cross_sim_comb_ops():
    src = """
module m(input logic [7:0] a, b, input logic [2:0] s,
         output logic [7:0] y0, y1, y2, y3, output logic f0, f1, f2);
  assign y0 = a + b;
  assign y1 = (a - b) ^ (a & b) | (a >> s);
  assign y2 = s[0] ? a << 2 : {b[3:0], a[7:4]};
  assign y3 = {2{a[1:0], b[1:0]}};
  assign f0 = (a == b) || (a[0] && b[7]);
  assign f1 = ^a & |b;
  assign f2 = a < b;
endmodule
"""
    cross_check(src, "m")


def test_cross_sim_signed():
    src = """
module m(input logic signed [7:0] a, b, output logic [7:0] y0, y1,
         output logic lt);
  assign y0 = a >>> 2;
  assign y1 = a * b;
  assign lt = a < b;
endmodule
"""
    cross_check(src, "m")


def test_cross_sim_sequential_counter():
    src = """
module m(input logic clk, input logic en, input logic [3:0] lim,
         output logic [3:0] cnt, output logic hit);
  always_ff @(posedge clk) begin
    if (en) begin
      if (cnt == lim)
        cnt <= '0;
      else
        cnt <= cnt + 1;
    end
  end
  assign hit = cnt == lim;
endmodule
"""
    cross_check(src, "m", vectors=100)


def test_cross_sim_case_and_partial_writes():
    src = """
module m(input logic clk, input logic [1:0] op, input logic [7:0] a,
         output logic [7:0] r);
  logic [7:0] nxt;
  always_comb begin
    nxt = r;
    case (op)
      2'd0: nxt = r + a;
      2'd1: nxt = r - a;
      2'd2: nxt[3:0] = a[7:4];
      default: nxt = a;
    endcase
  end
  always_ff @(posedge clk) r <= nxt;
endmodule
"""
    cross_check(src, "m", vectors=150)


def test_cross_sim_hierarchy_generate():
    src = """
module bitrev #(parameter W = 8) (input logic [W-1:0] x,
                                  output logic [W-1:0] y);
  for (genvar i = 0; i < W; i++) begin : g
    assign y[i] = x[W-1-i];
  end
endmodule

module m(input logic [7:0] d, output logic [7:0] q, output logic [3:0] h);
  logic [7:0] rev;
  bitrev #(.W(8)) u (.x(d), .y(rev));
  bitrev #(.W(4)) v (.x(d[3:0]), .y(h));
  assign q = rev ^ 8'h5A;
endmodule
"""
    cross_check(src, "m")


def test_cross_sim_ff_partial_and_feedback():
    src = """
module m(input logic clk, input logic [1:0] i, input logic b,
         output logic [3:0] q);
  always_ff @(posedge clk) begin
    q[i] <= b;
  end
endmodule
"""
    cross_check(src, "m", vectors=100)


def test_const_fold_examples():
    src = """
module m(input logic [7:0] a, output logic [7:0] y0, y1, y2);
  assign y0 = 1'b1 ? a : 8'd5;
  assign y1 = a & 8'h00;
  assign y2 = 8'hA5 >> 2;
endmodule
"""
    wn, d = to_netlist(src, "m")
    before = wn.logic_cell_count()
    const_fold(wn)
    after = wn.logic_cell_count()
    assert after <= before
    assert not any(c.kind == "MUX" for c in wn.cells)
    ast = AstSim(d, "m")
    aig = AigSim(bitblast(wn))
    rng = random.Random(3)
    for _ in range(50):
        ins = {"a": rng.getrandbits(8)}
        assert ast.step(ins) == aig.step(ins)


def test_lower_rejects_undriven_output():
    src = "module m(input logic a, output logic y, z); assign y = a; endmodule"
    with pytest.raises((DiagnosticError, NetlistError)):
        to_netlist(src, "m")


def test_lower_rejects_latch():
    src = """
module m(input logic s, input logic [3:0] a, output logic [3:0] y);
  always_comb begin
    if (s) y = a;
  end
endmodule
"""
    with pytest.raises(DiagnosticError):
        to_netlist(src, "m")


def test_lower_combinational_cycle():
    src = """
module m(input logic a, output logic y);
  logic t;
  assign t = y & a;
  assign y = t | a;
endmodule
"""
    with pytest.raises((DiagnosticError, NetlistError)) as e:
        to_netlist(src, "m")
    assert "cycle" in str(e.value)


def test_equiv_oracles_on_lowered_designs():
    src = """
module m(input logic [3:0] a, b, output logic [3:0] y);
  assign y = (a & b) | (a ^ b);
endmodule
"""
    wn, _ = to_netlist(src, "m")
    g1 = AigSim(bitblast(wn))
    g2 = AigSim(bitblast(wn))
    r = equiv_exhaustive(g1, g2)
    assert r.verdict == "equivalent"
    assert r.vectors_tried == 256

    src_bad = """
module m(input logic [3:0] a, b, output logic [3:0] y);
  assign y = (a & b) | (a ^ ~b);
endmodule
"""
    wn_bad, _ = to_netlist(src_bad, "m")
    g3 = AigSim(bitblast(wn_bad))
    r2 = equiv_exhaustive(g1, g3)
    assert r2.verdict == "counterexample"
    assert r2.counterexample is not None
    r3 = equiv_random(g1, g3, 10**4, seed=5)
    assert r3.verdict == "counterexample"
    r4 = equiv_random(g1, g2, 1000, seed=5)
    assert r4.verdict == "equivalent"
    assert r4.vectors_tried == 1000
    assert equiv_random(g1, g2, 0, seed=1).verdict == "inconclusive"
