"""Shared helpers for corpus-driven tests."""

import random
from pathlib import Path

from gateflow.elaborate import elaborate
from gateflow.emit import emit_v2005
from gateflow.interp import AstSim
from gateflow.parser import parse_text

ROOT = Path(__file__).resolve().parent.parent
CONFORMANCE = ROOT / "corpus" / "conformance"


def conformance_designs():
    out = []
    for path in sorted(CONFORMANCE.glob("*.sv")):
        out.append((path.stem, path.read_text()))
    assert len(out) >= 15
    return out


def elaborated_verilog(src: str, top: str) -> str:
    design = parse_text(src, top)
    out, _ = elaborate(design, top)
    return emit_v2005(out)


def sim_equivalent(src: str, top: str, vectors: int, cycles: int,
                   seed: int) -> bool:
    """Interpret the original source and its elaborated Verilog on the
    same seeded stimulus; inputs change every cycle."""
    d1 = parse_text(src, top)
    text = elaborated_verilog(src, top)
    d2 = parse_text(text, top)
    s1 = AstSim(d1, top)
    s2 = AstSim(d2, top)
    assert s1.ports_in == s2.ports_in and s1.ports_out == s2.ports_out
    rng = random.Random(seed)
    n_cycles = cycles if s1.is_sequential else 1
    runs = max(1, vectors // n_cycles) if s1.is_sequential else vectors
    for _ in range(runs):
        s1.reset()
        s2.reset()
        for _ in range(n_cycles):
            ins = {n: rng.getrandbits(w) for n, w in s1.ports_in}
            if s1.step(ins) != s2.step(ins):
                return False
    return True
