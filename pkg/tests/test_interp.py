import random

import pytest

from gateflow.diagnostics import DiagnosticError
from gateflow.elaborate import elaborate
from gateflow.emit import emit_v2005
from gateflow.interp import AstSim
from gateflow.parser import parse_text


def sim(src, top, **kw):
    return AstSim(parse_text(src, top), top, **kw)


def test_inverter():
    s = sim("module m(input logic x, output logic y); assign y = ~x; endmodule", "m")
    assert s.step({"x": 1})["y"] == 0
    assert s.step({"x": 0})["y"] == 1
    assert not s.is_sequential


def test_adder_example():
    src = """
module m(input logic [7:0] a, b, output logic [7:0] s, output logic co);
  logic [8:0] t;
  assign t = {1'b0, a} + {1'b0, b};
  assign s = t[7:0];
  assign co = t[8];
endmodule
"""
    s = sim(src, "m")
    out = s.step({"a": 200, "b": 100})
    assert out["s"] == 44
    assert out["co"] == 1


def test_dff_chain_impulse():
    src = """
module m(input logic clk, input logic d, output logic q);
  logic q1;
  always_ff @(posedge clk) q1 <= d;
  always_ff @(posedge clk) q <= q1;
endmodule
"""
    s = sim(src, "m")
    assert s.is_sequential
    assert s.clock_name == "clk"
    trace = []
    trace.append(s.step({"d": 1})["q"])
    trace.append(s.step({"d": 0})["q"])
    trace.append(s.step({"d": 0})["q"])
    trace.append(s.step({"d": 0})["q"])
    assert trace == [0, 0, 1, 0]


def test_counter_with_case_fsm():
    src = """
typedef enum logic [1:0] { IDLE, RUN, HOLD } st_e;

module m(input logic clk, input logic go, output logic [3:0] cnt);
  st_e st;
  always_ff @(posedge clk) begin
    case (st)
      IDLE: if (go) st <= RUN;
      RUN: st <= HOLD;
      default: st <= IDLE;
    endcase
  end
  always_ff @(posedge clk) begin
    if (st == RUN)
      cnt <= cnt + 1;
  end
endmodule
"""
    s = sim(src, "m")
    outs = [s.step({"go": 1})["cnt"] for _ in range(6)]
    assert outs[0] == 0
    assert max(outs) >= 1


def test_hierarchy_with_params():
    src = """
module inv #(parameter W = 1) (input logic [W-1:0] x, output logic [W-1:0] y);
  assign y = ~x;
endmodule

module m(input logic [3:0] a, output logic [3:0] b);
  inv #(.W(4)) u (.x(a), .y(b));
endmodule
"""
    s = sim(src, "m")
    assert s.step({"a": 0b1010})["b"] == 0b0101


def test_partial_continuous_assigns():
    src = """
module m(input logic [3:0] a, output logic [3:0] y);
  assign y[1:0] = a[3:2];
  assign y[3:2] = a[1:0];
endmodule
"""
    s = sim(src, "m")
    assert s.step({"a": 0b1101})["y"] == 0b0111


def test_overlapping_drivers_rejected():
    src = """
module m(input logic [3:0] a, output logic [3:0] y);
  assign y[2:0] = a[2:0];
  assign y[3:1] = a[3:1];
endmodule
"""
    with pytest.raises(DiagnosticError) as e:
        sim(src, "m")
    assert "overlapping" in str(e.value)


def test_comb_cycle_rejected():
    src = """
module m(input logic a, output logic y);
  logic t;
  assign t = y ^ a;
  assign y = t;
endmodule
"""
    with pytest.raises(DiagnosticError) as e:
        sim(src, "m")
    assert "combinational cycle" in str(e.value)


def test_default_then_override_comb():
    src = """
module m(input logic [1:0] sel, input logic [3:0] a, b, output logic [3:0] y);
  always_comb begin
    y = '0;
    if (sel == 2'd1) y = a;
    if (sel == 2'd2) y = b;
  end
endmodule
"""
    s = sim(src, "m")
    assert s.step({"sel": 0, "a": 5, "b": 9})["y"] == 0
    assert s.step({"sel": 1, "a": 5, "b": 9})["y"] == 5
    assert s.step({"sel": 2, "a": 5, "b": 9})["y"] == 9


def test_indexed_select_rw():
    src = """
module m(input logic [1:0] i, input logic [31:0] d, output logic [7:0] y);
  assign y = d[i*8 +: 8];
endmodule
"""
    s = sim(src, "m")
    d = 0xAABBCCDD
    assert s.step({"i": 0, "d": d})["y"] == 0xDD
    assert s.step({"i": 1, "d": d})["y"] == 0xCC
    assert s.step({"i": 3, "d": d})["y"] == 0xAA


def test_signed_compare_and_shift():
    src = """
module m(input logic signed [3:0] a, b, output logic lt, output logic [3:0] sr);
  assign lt = a < b;
  assign sr = a >>> 1;
endmodule
"""
    s = sim(src, "m")
    out = s.step({"a": 0b1000, "b": 0b0001})  # -8 < 1
    assert out["lt"] == 1
    assert out["sr"] == 0b1100  # arithmetic shift keeps sign


def rand_inputs(rng, ports):
    return {name: rng.getrandbits(w) for name, w in ports}


ELAB_EQ_SOURCES = [
    (
        """
module leaf #(parameter W = 2) (input logic [W-1:0] x, output logic [W-1:0] y);
  assign y = x ^ {W{1'b1}};
endmodule

module top #(parameter N = 2) (
  input logic clk,
  input logic [2*N-1:0] d,
  output logic [2*N-1:0] q
);
  logic [2*N-1:0] t;
  leaf #(.W(2*N)) u (.x(d), .y(t));
  always_ff @(posedge clk) q <= t;
endmodule
""",
        "top",
    ),
    (
        """
module top(input logic clk, input logic [7:0] a, b, output logic [7:0] acc);
  logic [7:0] nxt;
  always_comb begin
    nxt = acc + (a ^ b);
  end
  always_ff @(posedge clk) acc <= nxt;
endmodule
""",
        "top",
    ),
    (
        """
module top #(parameter W = 6) (
  input logic [W-1:0] x,
  output logic [W-1:0] y
);
  for (genvar i = 0; i < W; i += 2) begin : pairs
    assign y[i] = x[i] ^ x[(i+1) % W];
    if (i + 1 < W) begin
      assign y[i+1] = ~x[i+1];
    end
  end
endmodule
""",
        "top",
    ),
]


@pytest.mark.parametrize("src,top", ELAB_EQ_SOURCES)
def test_interp_agrees_pre_and_post_elaboration(src, top):
    d = parse_text(src, top)
    out, _ = elaborate(d, top)
    text = emit_v2005(out)
    d2 = parse_text(text, top)
    s1 = AstSim(d, top)
    s2 = AstSim(d2, top)
    assert s1.ports_in == s2.ports_in
    assert s1.ports_out == s2.ports_out
    rng = random.Random(42)
    for _ in range(50):
        ins = rand_inputs(rng, s1.ports_in)
        assert s1.step(ins) == s2.step(ins)
