"""Equivalence oracles: exhaustive and seeded-random simulation.

All design forms (AST interpreter, word netlist, AIG, mapped netlist)
expose the same adapter protocol: ports_in / ports_out (clock excluded),
is_sequential, reset(), step(inputs) -> outputs. AIG adapters also
support bit-parallel batches, which the checkers exploit when both
sides provide them. Registers reset to zero; sequential equivalence is
bounded unrolling from that state.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .aig import Aig


@dataclass
class EquivResult:
    verdict: str  # "equivalent" | "counterexample" | "inconclusive"
    vectors_tried: int
    counterexample: list[dict] | None = None
    message: str = ""

    def cex_text(self) -> str:
        if not self.counterexample:
            return ""
        lines = []
        for t, ins in enumerate(self.counterexample):
            kv = " ".join(f"{k}={v}" for k, v in sorted(ins.items()))
            lines.append(f"cycle {t}: {kv}")
        return "\n".join(lines)


class SignatureError(ValueError):
    pass


class AigSim:
    """Adapter over an Aig with word-port metadata."""

    def __init__(self, aig: Aig):
        self.aig = aig
        self.ports_in = [(n, len(lits)) for n, lits in aig.in_words]
        self.ports_out = [(n, len(lits)) for n, lits in aig.out_words]
        self.is_sequential = bool(aig.latch_ids)
        self.state = [0] * len(aig.latch_ids)

    def reset(self):
        self.state = [0] * len(self.aig.latch_ids)

    def step(self, inputs: dict[str, int]) -> dict[str, int]:
        masks = {}
        for name, w in self.ports_in:
            masks[name] = [(inputs.get(name, 0) >> i) & 1 for i in range(w)]
        out, nxt = self.eval_masks(masks, [[s] for s in self.state], 1)
        self.state = [m[0] & 1 for m in nxt]
        return {n: sum(((m[i] & 1) << i) for i in range(len(m)))
                for n, m in out.items()}

    def eval_masks(self, in_masks: dict[str, list[int]],
                   state_masks: list[list[int]] | None, batch: int):
        """in_masks: per input word, per-bit vector masks. Returns
        (out word -> per-bit masks, next-state per-latch masks)."""
        g = self.aig
        bmask = (1 << batch) - 1
        pi_vals: dict[int, int] = {}
        for name, lits in g.in_words:
            ms = in_masks.get(name)
            for i, lit in enumerate(lits):
                pi_vals[lit >> 1] = (ms[i] if ms else 0) & bmask
        pis = [pi_vals.get(nid, 0) for nid in g.pi_ids]
        st = None
        if g.latch_ids:
            st = [state_masks[i][0] if state_masks else 0
                  for i in range(len(g.latch_ids))]
        val = g.sim(pis, st, bmask)
        outs = {
            name: [Aig.lit_value(val, lit, bmask) for lit in lits]
            for name, lits in g.out_words
        }
        nxt = [[Aig.lit_value(val, lit, bmask)] for lit in g.latch_next]
        return outs, nxt


def check_signatures(d1, d2):
    if d1.ports_in != d2.ports_in or d1.ports_out != d2.ports_out:
        raise SignatureError(
            f"port signatures differ: {d1.ports_in}/{d1.ports_out} vs "
            f"{d2.ports_in}/{d2.ports_out}"
        )


def _run_sequence(d, seq: list[dict]) -> list[dict]:
    d.reset()
    return [d.step(ins) for ins in seq]


def _confirm(d1, d2, seq: list[dict]) -> bool:
    return _run_sequence(d1, seq) != _run_sequence(d2, seq)


def _decode(bitsval: int, ports) -> dict:
    out = {}
    pos = 0
    for name, w in ports:
        out[name] = (bitsval >> pos) & ((1 << w) - 1)
        pos += w
    return out


def equiv_exhaustive(d1, d2, cap: int = 22, cycles: int = 8) -> EquivResult:
    check_signatures(d1, d2)
    in_bits = sum(w for _, w in d1.ports_in)
    seq = d1.is_sequential or d2.is_sequential
    n_cycles = cycles if seq else 1
    total = in_bits * n_cycles
    if total > cap:
        return EquivResult(
            "inconclusive", 0,
            message=f"{total} input bits exceed the exhaustive cap ({cap})",
        )
    if not seq and isinstance(d1, AigSim) and isinstance(d2, AigSim):
        return _exhaustive_batch(d1, d2, in_bits)
    tried = 0
    for v in range(1 << total):
        seqv = [
            _decode((v >> (c * in_bits)) & ((1 << in_bits) - 1), d1.ports_in)
            for c in range(n_cycles)
        ]
        o1 = _run_sequence(d1, seqv)
        o2 = _run_sequence(d2, seqv)
        tried += 1
        if o1 != o2:
            assert _confirm(d1, d2, seqv)
            return EquivResult("counterexample", tried, seqv)
    return EquivResult("equivalent", tried)


def _exhaustive_batch(d1: AigSim, d2: AigSim, in_bits: int) -> EquivResult:
    from .aig import input_patterns

    total = 1 << in_bits
    pats = input_patterns(in_bits)
    masks: dict[str, list[int]] = {}
    pos = 0
    for name, w in d1.ports_in:
        masks[name] = pats[pos:pos + w]
        pos += w
    o1, _ = d1.eval_masks(masks, None, total)
    o2, _ = d2.eval_masks(masks, None, total)
    for name, m1 in o1.items():
        m2 = o2[name]
        for i, (a, b) in enumerate(zip(m1, m2)):
            if a != b:
                v = (a ^ b) & -(a ^ b)
                idx = v.bit_length() - 1
                cex = [_decode(idx, d1.ports_in)]
                assert _confirm(d1, d2, cex)
                return EquivResult("counterexample", total, cex)
    return EquivResult("equivalent", total)


def equiv_random(d1, d2, vectors: int, seed: int,
                 cycles: int = 8) -> EquivResult:
    check_signatures(d1, d2)
    if vectors <= 0:
        return EquivResult("inconclusive", 0, message="no vectors requested")
    rng = random.Random(seed)
    seq = d1.is_sequential or d2.is_sequential
    if not seq and isinstance(d1, AigSim) and isinstance(d2, AigSim):
        return _random_batch(d1, d2, vectors, rng)
    tried = 0
    n_cycles = cycles if seq else 1
    while tried < vectors:
        seqv = [
            {name: rng.getrandbits(w) for name, w in d1.ports_in}
            for _ in range(n_cycles)
        ]
        o1 = _run_sequence(d1, seqv)
        o2 = _run_sequence(d2, seqv)
        tried += n_cycles
        if o1 != o2:
            assert _confirm(d1, d2, seqv)
            return EquivResult("counterexample", tried, seqv)
    return EquivResult("equivalent", tried)


def _random_batch(d1: AigSim, d2: AigSim, vectors: int,
                  rng: random.Random) -> EquivResult:
    batch = 4096
    tried = 0
    while tried < vectors:
        b = min(batch, vectors - tried)
        masks = {
            name: [rng.getrandbits(b) for _ in range(w)]
            for name, w in d1.ports_in
        }
        o1, _ = d1.eval_masks(masks, None, b)
        o2, _ = d2.eval_masks(masks, None, b)
        tried += b
        for name, m1 in o1.items():
            m2 = o2[name]
            for i, (x, y) in enumerate(zip(m1, m2)):
                if x != y:
                    v = (x ^ y) & -(x ^ y)
                    idx = v.bit_length() - 1
                    cex = [{
                        name2: sum((((masks[name2][j] >> idx) & 1) << j)
                                   for j in range(w2))
                        for name2, w2 in d1.ports_in
                    }]
                    assert _confirm(d1, d2, cex)
                    return EquivResult("counterexample", tried, cex)
    return EquivResult("equivalent", tried)
