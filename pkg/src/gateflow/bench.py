"""Parametric benchmark designs used by tests, the sweep harness, and
the acceptance suite."""

from __future__ import annotations

from .semantics import clog2


def partselect_case(stride: int, nblocks: int) -> tuple[str, str]:
    """Indexed part-select read of one of nblocks stride-wide fields."""
    assert stride >= 1 and nblocks >= 2
    dw = stride * nblocks
    iw = max(1, clog2(nblocks))
    name = f"ps_s{stride}_n{nblocks}"
    src = f"""
module {name}(
  input  logic [{dw - 1}:0] data,
  input  logic [{iw - 1}:0] idx,
  output logic [{stride - 1}:0] y
);
  assign y = data[idx*{stride} +: {stride}];
endmodule
"""
    return name, src


def partselect_blockmux_case(stride: int, nblocks: int) -> tuple[str, str]:
    """Same function written as an explicit block-multiplexer tree, the
    alternative representation the padding pass competes with."""
    dw = stride * nblocks
    iw = max(1, clog2(nblocks))
    name = f"bm_s{stride}_n{nblocks}"
    lines = [f"""
module {name}(
  input  logic [{dw - 1}:0] data,
  input  logic [{iw - 1}:0] idx,
  output logic [{stride - 1}:0] y
);
  always_comb begin
    case (idx)"""]
    for k in range(nblocks):
        lines.append(
            f"      {iw}'d{k}: y = data[{k * stride + stride - 1}:"
            f"{k * stride}];")
    lines.append(f"      default: y = {stride}'d0;")
    lines.append("    endcase\n  end\nendmodule\n")
    return name, "\n".join(lines)


def mac_case(wa: int = 16, wb: int = 16, wc: int = 32) -> tuple[str, str]:
    wy = wa + wb
    assert wc <= wy
    name = f"mac{wa}x{wb}p{wc}"
    src = f"""
module {name}(
  input  logic [{wa - 1}:0] a,
  input  logic [{wb - 1}:0] b,
  input  logic [{wc - 1}:0] c,
  output logic [{wy - 1}:0] y
);
  assign y = a * b + c;
endmodule
"""
    return name, src


def naive_mux_case(width: int = 4) -> tuple[str, str]:
    """4:1 word mux written as a flat sum of products."""
    name = f"nmux4_w{width}"
    src = f"""
module {name}(
  input  logic [1:0] s,
  input  logic [{width - 1}:0] d0, d1, d2, d3,
  output logic [{width - 1}:0] y
);
  assign y = ({{{width}{{~s[1] & ~s[0]}}}} & d0)
           | ({{{width}{{~s[1] &  s[0]}}}} & d1)
           | ({{{width}{{ s[1] & ~s[0]}}}} & d2)
           | ({{{width}{{ s[1] &  s[0]}}}} & d3);
endmodule
"""
    return name, src


def naive_parity_case(n: int = 4) -> tuple[str, str]:
    """Parity as a flat minterm sum instead of an xor tree."""
    assert 2 <= n <= 5
    name = f"nparity{n}"
    terms = []
    for m in range(1 << n):
        if bin(m).count("1") % 2 == 1:
            lits = []
            for i in range(n):
                bit = (m >> i) & 1
                lits.append(f"{'' if bit else '~'}x[{i}]")
            terms.append("(" + " & ".join(lits) + ")")
    body = "\n           | ".join(terms)
    src = f"""
module {name}(
  input  logic [{n - 1}:0] x,
  output logic y
);
  assign y = {body};
endmodule
"""
    return name, src


def naive_majority_case(width: int = 8) -> tuple[str, str]:
    name = f"nmaj_w{width}"
    src = f"""
module {name}(
  input  logic [{width - 1}:0] a, b, c,
  output logic [{width - 1}:0] y
);
  assign y = (a & b) | (a & c) | (b & c);
endmodule
"""
    return name, src


def naive_decoder_case(n: int = 3) -> tuple[str, str]:
    """One-hot decoder with an enable, written product by product."""
    name = f"ndec{n}"
    outs = 1 << n
    lines = [f"""
module {name}(
  input  logic [{n - 1}:0] a,
  input  logic en,
  output logic [{outs - 1}:0] y
);"""]
    for m in range(outs):
        lits = ["en"]
        for i in range(n):
            bit = (m >> i) & 1
            lits.append(f"{'' if bit else '~'}a[{i}]")
        lines.append(f"  assign y[{m}] = " + " & ".join(lits) + ";")
    lines.append("endmodule\n")
    return name, "\n".join(lines)


def naive_addmux_case(width: int = 6) -> tuple[str, str]:
    """Add/sub selected through sum-of-products mux logic."""
    name = f"naddmux_w{width}"
    src = f"""
module {name}(
  input  logic sel,
  input  logic [{width - 1}:0] a, b,
  output logic [{width - 1}:0] y
);
  logic [{width - 1}:0] s, d;
  assign s = a + b;
  assign d = a - b;
  assign y = ({{{width}{{sel}}}} & s) | ({{{width}{{~sel}}}} & d);
endmodule
"""
    return name, src


PARTSELECT_CORPUS = [
    (3, 8), (4, 16), (5, 12), (6, 10), (7, 9),
    (8, 8), (10, 6), (12, 5), (20, 4), (24, 3),
]

LMS_CORPUS = (
    naive_mux_case, naive_parity_case, naive_majority_case,
    naive_decoder_case, naive_addmux_case,
)


def lms_corpus() -> list[tuple[str, str]]:
    return [gen() for gen in LMS_CORPUS]
