import pytest

from gateflow.diagnostics import DiagnosticError
from gateflow.elaborate import elaborate
from gateflow.emit import emit_v2005
from gateflow.parser import parse_text
from gateflow.svast import (
    Assign, AlwaysFF, GenFor, GenIf, Instance, NetDecl, Num, ParamDecl,
)


def elab_src(src, top, overrides=None):
    d = parse_text(src, top)
    return elaborate(d, top, overrides)


PARAM_CHAIN = """
module m #(parameter W = 8) (
  input  logic [W-1:0] a,
  output logic [W-1:0] y
);
  localparam H = W / 2;
  assign y = a + H;
endmodule
"""


def test_localparam_literalized_and_override():
    out, side = elab_src(PARAM_CHAIN, "m", {"W": 16})
    m = out.modules[0]
    lp = {it.name: it for it in m.items if isinstance(it, ParamDecl)}
    assert all(it.kind == "localparam" for it in lp.values())
    assert lp["W"].value.value == 16
    assert lp["H"].value.value == 8
    assert side["m"]["params"] == {"W": 16}
    # no identifier references to params remain in expressions
    text = emit_v2005(out)
    assert "W - 1" not in text


def test_clog2_in_parameter():
    src = """
module m #(parameter N = 9) (
  output logic [$clog2(N)-1:0] y
);
  localparam A = $clog2(N);
  assign y = '0;
endmodule
"""
    out, _ = elab_src(src, "m")
    m = out.modules[0]
    lp = {it.name: it for it in m.items if isinstance(it, ParamDecl)}
    assert lp["A"].value.value == 4
    assert m.ports[0].range_[0].value == 3


def test_uniquification_two_widths():
    src = """
module a #(parameter W = 4) (input logic [W-1:0] x, output logic [W-1:0] y);
  assign y = ~x;
endmodule

module top(input logic [3:0] p, input logic [7:0] q,
           output logic [3:0] u, output logic [7:0] v);
  a #(.W(4)) u1 (.x(p), .y(u));
  a #(.W(8)) u2 (.x(q), .y(v));
endmodule
"""
    out, side = elab_src(src, "top")
    names = out.module_names()
    assert "top" in names
    uniq = [n for n in names if n.startswith("a__P")]
    assert len(uniq) == 2
    insts = [it for it in out.module("top").items if isinstance(it, Instance)]
    assert insts[0].module != insts[1].module
    assert all(not i.params for i in insts)
    for n in uniq:
        assert side[n]["module"] == "a"
    ws = sorted(side[n]["params"]["W"] for n in uniq)
    assert ws == [4, 8]


def test_same_key_shares_definition():
    src = """
module a #(parameter W = 4) (input logic [W-1:0] x, output logic [W-1:0] y);
  assign y = ~x;
endmodule

module top(input logic [3:0] p, q, output logic [3:0] u, v);
  a #(.W(4)) u1 (.x(p), .y(u));
  a #(.W(2+2)) u2 (.x(q), .y(v));
endmodule
"""
    out, _ = elab_src(src, "top")
    uniq = [n for n in out.module_names() if n.startswith("a__P")]
    assert len(uniq) == 1


def test_generate_for_unroll():
    src = """
module m(input logic [2:0] x, output logic [2:0] y);
  for (genvar i = 0; i < 3; i++) begin : blk
    assign y[i] = x[i];
  end
endmodule
"""
    out, _ = elab_src(src, "m")
    m = out.modules[0]
    assigns = [it for it in m.items if isinstance(it, Assign)]
    assert len(assigns) == 3
    idx = sorted(a.lhs.idx.value for a in assigns)
    assert idx == [0, 1, 2]
    assert not any(isinstance(it, GenFor) for it in m.items)


def test_generate_if_dead_branch():
    src = """
module m #(parameter USE = 0) (input logic a, output logic y);
  if (USE) begin
    assign y = a;
  end else begin
    assign y = ~a;
  end
endmodule
"""
    out, _ = elab_src(src, "m")
    m = out.modules[0]
    assigns = [it for it in m.items if isinstance(it, Assign)]
    assert len(assigns) == 1
    assert not any(isinstance(it, GenIf) for it in m.items)


def test_nested_generate_names():
    src = """
module m(input logic [3:0] x, output logic [3:0] y);
  for (genvar i = 0; i < 2; i++) begin : o
    for (genvar j = 0; j < 2; j++) begin : n
      wire t;
      assign t = x[2*i+j];
      assign y[2*i+j] = ~t;
    end
  end
endmodule
"""
    out, _ = elab_src(src, "m")
    m = out.modules[0]
    wires = [it.name for it in m.items if isinstance(it, NetDecl)]
    assert wires == ["o__0__n__0__t", "o__0__n__1__t",
                     "o__1__n__0__t", "o__1__n__1__t"]


def test_hierarchical_propagation_three_levels():
    src = """
module leaf #(parameter W = 2) (input logic [W-1:0] x, output logic [W-1:0] y);
  assign y = x + 1;
endmodule

module mid #(parameter W = 2) (input logic [2*W-1:0] x, output logic [2*W-1:0] y);
  leaf #(.W(2*W)) l (.x(x), .y(y));
endmodule

module top #(parameter BASE = 3) (
  input logic [4*BASE-1:0] x, output logic [4*BASE-1:0] y
);
  mid #(.W(2*BASE)) m (.x(x), .y(y));
endmodule
"""
    out, side = elab_src(src, "top")
    leafs = [n for n in out.module_names() if n.startswith("leaf__P")]
    assert len(leafs) == 1
    assert side[leafs[0]]["params"]["W"] == 12
    with_override, side2 = elab_src(src, "top", {"BASE": 2})
    leafs2 = [n for n in with_override.module_names() if n.startswith("leaf__P")]
    assert side2[leafs2[0]]["params"]["W"] == 8


def test_emitted_verilog_has_no_sv_constructs():
    src = """
module m #(parameter W = 4) (
  input logic clk,
  input logic [W-1:0] d,
  output logic [W-1:0] q
);
  always_ff @(posedge clk) q <= d;
endmodule
"""
    out, _ = elab_src(src, "m")
    text = emit_v2005(out)
    assert "logic" not in text
    assert "always_ff" not in text
    assert "always @(posedge clk)" in text
    assert "generate" not in text
    assert "parameter" not in text.replace("localparam", "")
    d2 = parse_text(text, "m")
    assert any(isinstance(it, AlwaysFF) for it in d2.modules[0].items)


def test_elaborate_idempotent():
    for src, top in ((PARAM_CHAIN, "m"),):
        out1, _ = elab_src(src, top)
        text = emit_v2005(out1)
        d2 = parse_text(text, top)
        out2, _ = elaborate(d2, top)
        assert out1 == out2


def test_override_unknown_parameter_errors():
    with pytest.raises(DiagnosticError) as e:
        elab_src(PARAM_CHAIN, "m", {"NOPE": 1})
    assert "nonexistent parameter" in str(e.value)


def test_parameter_self_reference_errors():
    src = """
module m #(parameter A = B + 1, parameter B = A + 1) (output logic y);
  assign y = '0;
endmodule
"""
    with pytest.raises(DiagnosticError) as e:
        elab_src(src, "m")
    assert "unresolvable parameter" in str(e.value)


def test_nonconstant_generate_bound_errors():
    src = """
module m(input logic [3:0] n, output logic y);
  for (genvar i = 0; i < n; i++) begin
    assign y = '0;
  end
endmodule
"""
    with pytest.raises(DiagnosticError):
        elab_src(src, "m")


def test_unroll_limit():
    src = """
module m(output logic y);
  for (genvar i = 0; i < 200000; i++) begin
    wire t;
  end
  assign y = '0;
endmodule
"""
    with pytest.raises(DiagnosticError) as e:
        elab_src(src, "m")
    assert "unroll limit" in str(e.value)
