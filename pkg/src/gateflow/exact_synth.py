"""Minimal AIG structures for small functions.

Exact search: iterative deepening over the node count, exploring sets of
computed node tables (a minimal single-output chain never contains two
nodes with equal-or-complement tables, so the table set is a faithful
search state). Heuristic fallbacks: Shannon cascade decomposition and a
factored irredundant sum-of-products.

Fragments use a private literal numbering: 0/1 are the constants,
2*(1+i)+c is leaf i, 2*(1+k+j)+c is internal node j.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .tt import (
    TruthTable,
    cofactor_expand,
    depends_on,
    table_mask,
    var_table,
)


@dataclass(frozen=True)
class Fragment:
    k: int
    nodes: tuple[tuple[int, int], ...]
    out: int

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def node_lit(self, j: int) -> int:
        return 2 * (1 + self.k + j)

    def simulate(self) -> TruthTable:
        k = self.k
        mask = table_mask(k)
        vals = [0] + [var_table(k, i).bits for i in range(k)]
        for a, b in self.nodes:
            va = vals[a >> 1] ^ (mask if a & 1 else 0)
            vb = vals[b >> 1] ^ (mask if b & 1 else 0)
            vals.append(va & vb)
        out = vals[self.out >> 1]
        if self.out & 1:
            out ^= mask
        return TruthTable(k, out)

    def depth(self) -> int:
        dep = [0] * (1 + self.k)
        for a, b in self.nodes:
            dep.append(1 + max(dep[a >> 1], dep[b >> 1]))
        return dep[self.out >> 1]


@dataclass
class EffortConfig:
    """Search budget for database construction."""

    exact_inputs: int = 3          # exact synthesis always attempted up to here
    exact_max_nodes: int = 8
    exact_timeout_s: float = 20.0  # per-function wall clock cap (k > exact_inputs)
    extended_exact_inputs: int = 4


class _Timeout(Exception):
    pass


def synthesize_exact(target: TruthTable, max_nodes: int,
                     deadline: float | None = None) -> Fragment | None:
    """Node-count-minimal fragment for `target`, or None if no chain of
    at most max_nodes nodes exists (or the deadline passes)."""
    k = target.k
    mask = table_mask(k)
    tbits = target.bits
    if tbits == 0:
        return Fragment(k, (), 0)
    if tbits == mask:
        return Fragment(k, (), 1)
    for i in range(k):
        v = var_table(k, i).bits
        if tbits == v:
            return Fragment(k, (), 2 * (1 + i))
        if tbits == (v ^ mask):
            return Fragment(k, (), 2 * (1 + i) + 1)

    base_sources = [(var_table(k, i).bits, 2 * (1 + i)) for i in range(k)]
    base_forbidden = frozenset(min(b, b ^ mask) for b, _ in base_sources)

    for n in range(1, max_nodes + 1):
        try:
            frag = _search(k, mask, tbits, base_sources, base_forbidden, n, deadline)
        except _Timeout:
            return None
        if frag is not None:
            return frag
    return None


def _search(k, mask, target, base_sources, base_forbidden, n, deadline):
    memo: set[tuple[frozenset, int]] = set()
    tneg = target ^ mask
    path: list[tuple[int, int, int]] = []  # (fa, fb, table)

    def sources():
        out = list(base_sources)
        for j, (_, _, tb) in enumerate(path):
            out.append((tb, 2 * (1 + k + j)))
        return out

    def finish(fa, fb, tbl):
        nodes = tuple((a, b) if a >= b else (b, a) for a, b, _ in path) + (
            ((fa, fb) if fa >= fb else (fb, fa)),
        )
        out = 2 * (1 + k + len(path))
        if tbl == tneg:
            out ^= 1
        return Fragment(k, nodes, out)

    def dfs(state: frozenset, budget: int):
        if deadline is not None and time.monotonic() > deadline:
            raise _Timeout
        src = sources()
        if budget == 1:
            for ia in range(len(src)):
                ta, la = src[ia]
                for ib in range(ia + 1, len(src)):
                    tb, lb = src[ib]
                    for pa in (0, 1):
                        va = ta ^ (mask if pa else 0)
                        for pb in (0, 1):
                            vb = tb ^ (mask if pb else 0)
                            t = va & vb
                            if t == target or t == tneg:
                                return finish(la ^ pa, lb ^ pb, t)
            return None
        key = (state, budget)
        if key in memo:
            return None
        # unused nodes can be consumed at most two per remaining node
        unused = _count_unused(k, path)
        if unused > budget + 1:
            memo.add(key)
            return None
        for ia in range(len(src)):
            ta, la = src[ia]
            for ib in range(ia + 1, len(src)):
                tb, lb = src[ib]
                for pa in (0, 1):
                    va = ta ^ (mask if pa else 0)
                    for pb in (0, 1):
                        vb = tb ^ (mask if pb else 0)
                        t = va & vb
                        if t == 0 or t == mask:
                            continue
                        tc = min(t, t ^ mask)
                        if tc in state:
                            continue
                        if t == target or t == tneg:
                            return finish(la ^ pa, lb ^ pb, t)
                        path.append((la ^ pa, lb ^ pb, t))
                        got = dfs(state | {tc}, budget - 1)
                        path.pop()
                        if got is not None:
                            return got
        memo.add(key)
        return None

    return dfs(base_forbidden, n)


def _count_unused(k, path):
    used = set()
    for a, b, _ in path:
        used.add(a >> 1)
        used.add(b >> 1)
    n = 0
    for j in range(len(path)):
        if 1 + k + j not in used:
            n += 1
    return n


# -- heuristic builders ------------------------------------------------


class _MiniAig:
    """Tiny strashed builder used only for fragment construction."""

    def __init__(self, k: int):
        self.k = k
        self.nodes: list[tuple[int, int]] = []
        self.strash: dict[tuple[int, int], int] = {}

    def and_(self, a: int, b: int) -> int:
        if a == 0 or b == 0 or a == (b ^ 1):
            return 0
        if a == 1:
            return b
        if b == 1:
            return a
        if a == b:
            return a
        if a < b:
            a, b = b, a
        nid = self.strash.get((a, b))
        if nid is None:
            self.nodes.append((a, b))
            nid = len(self.nodes) - 1
            self.strash[(a, b)] = nid
        return 2 * (1 + self.k + nid)

    def or_(self, a, b):
        return self.and_(a ^ 1, b ^ 1) ^ 1

    def mux(self, s, a, b):
        return self.or_(self.and_(s, a), self.and_(s ^ 1, b))

    def leaf(self, i):
        return 2 * (1 + i)

    def extract(self, out: int) -> Fragment:
        # keep only the cone of `out`, renumbered
        keep: list[int] = []
        seen = set()

        def walk(lit):
            idx = (lit >> 1) - 1 - self.k
            if idx < 0 or idx in seen:
                return
            seen.add(idx)
            a, b = self.nodes[idx]
            walk(a)
            walk(b)
            keep.append(idx)

        walk(out)
        remap = {}
        nodes = []
        for new_j, idx in enumerate(keep):
            remap[idx] = new_j
            a, b = self.nodes[idx]
            nodes.append((self._m(a, remap), self._m(b, remap)))
        return Fragment(self.k, tuple(nodes), self._m(out, remap))

    def _m(self, lit, remap):
        idx = (lit >> 1) - 1 - self.k
        if idx < 0:
            return lit
        return 2 * (1 + self.k + remap[idx]) + (lit & 1)


def shannon_fragment(target: TruthTable) -> Fragment:
    """Mux cascade by recursive cofactoring, with structural sharing."""
    k = target.k
    mask = table_mask(k)
    g = _MiniAig(k)
    vars_ = [var_table(k, i).bits for i in range(k)]
    memo: dict[int, int] = {0: 0, mask: 1}
    for i, v in enumerate(vars_):
        memo[v] = g.leaf(i)
        memo[v ^ mask] = g.leaf(i) ^ 1

    def build(bits: int) -> int:
        got = memo.get(bits)
        if got is not None:
            return got
        got = memo.get(bits ^ mask)
        if got is not None:
            return got ^ 1
        # split on the dependent input with the most skewed cofactors
        best_i = -1
        best_score = None
        for i in range(k):
            c1 = cofactor_expand(k, bits, i, 1)
            c0 = cofactor_expand(k, bits, i, 0)
            if c1 == c0:
                continue
            score = min(c1.bit_count(), (c1 ^ mask).bit_count()) + min(
                c0.bit_count(), (c0 ^ mask).bit_count()
            )
            if best_score is None or score < best_score:
                best_score = score
                best_i = i
        hi = build(cofactor_expand(k, bits, best_i, 1))
        lo = build(cofactor_expand(k, bits, best_i, 0))
        lit = g.mux(g.leaf(best_i), hi, lo)
        memo[bits] = lit
        return lit

    return g.extract(build(target.bits))


def isop_cubes(target: TruthTable) -> list[frozenset[tuple[int, int]]]:
    """Irredundant sum-of-products (Minato-Morreale); cubes are sets of
    (input, negated) literals."""
    k = target.k
    mask = table_mask(k)

    def rec(lb: int, ub: int, i: int):
        if lb == 0:
            return [], 0
        if ub == mask:
            return [frozenset()], mask
        while i < k and not (depends_on(k, lb, i) or depends_on(k, ub, i)):
            i += 1
        assert i < k, "inconsistent bounds"
        lb0 = cofactor_expand(k, lb, i, 0)
        lb1 = cofactor_expand(k, lb, i, 1)
        ub0 = cofactor_expand(k, ub, i, 0)
        ub1 = cofactor_expand(k, ub, i, 1)
        c0, f0 = rec(lb0 & (ub1 ^ mask), ub0, i + 1)
        c1, f1 = rec(lb1 & (ub0 ^ mask), ub1, i + 1)
        lnew = (lb0 & (f0 ^ mask)) | (lb1 & (f1 ^ mask))
        cs, fs = rec(lnew, ub0 & ub1, i + 1)
        var = var_table(k, i).bits
        cubes = (
            [c | {(i, 1)} for c in c0]
            + [c | {(i, 0)} for c in c1]
            + cs
        )
        f = (f0 & (var ^ mask)) | (f1 & var) | fs
        return cubes, f

    cubes, f = rec(target.bits, target.bits, 0)
    assert f == target.bits
    return [frozenset(c) for c in cubes]


def sop_fragment(target: TruthTable) -> Fragment:
    """Factored SOP: pull out the most shared literal recursively, with
    balanced AND/OR trees at the leaves."""
    k = target.k
    g = _MiniAig(k)

    def lit_of(iv: tuple[int, int]) -> int:
        i, neg = iv
        return g.leaf(i) ^ neg

    def tree(lits: list[int], op) -> int:
        if not lits:
            return 1 if op is g.and_ else 0
        while len(lits) > 1:
            nxt = [op(lits[j], lits[j + 1]) for j in range(0, len(lits) - 1, 2)]
            if len(lits) % 2:
                nxt.append(lits[-1])
            lits = nxt
        return lits[0]

    def build(cubes: list[frozenset]) -> int:
        if not cubes:
            return 0
        if any(len(c) == 0 for c in cubes):
            return 1
        counts: dict[tuple[int, int], int] = {}
        for c in cubes:
            for iv in c:
                counts[iv] = counts.get(iv, 0) + 1
        best = max(sorted(counts), key=lambda iv: counts[iv])
        if counts[best] <= 1:
            terms = [
                tree(sorted(lit_of(iv) for iv in c), g.and_) for c in cubes
            ]
            return tree(sorted(terms), g.or_)
        with_l = [c - {best} for c in cubes if best in c]
        without = [c for c in cubes if best not in c]
        factored = g.and_(lit_of(best), build(with_l))
        return g.or_(factored, build(without))

    cubes = isop_cubes(target)
    positive = build(cubes)
    return g.extract(positive)


def heuristic_fragment(target: TruthTable) -> Fragment:
    cands = [shannon_fragment(target), sop_fragment(target)]
    return min(cands, key=lambda f: (f.n_nodes, f.depth()))


def best_fragment(target: TruthTable, effort: EffortConfig) -> Fragment:
    """Exact when small or when the bounded search closes, else the best
    heuristic structure."""
    heur = heuristic_fragment(target)
    k = target.k
    if k <= effort.exact_inputs:
        frag = synthesize_exact(target, max_nodes=max(effort.exact_max_nodes,
                                                      heur.n_nodes))
        assert frag is not None
        return frag if (frag.n_nodes, frag.depth()) <= (heur.n_nodes, heur.depth()) else frag
    if k <= effort.extended_exact_inputs and effort.exact_timeout_s > 0:
        deadline = time.monotonic() + effort.exact_timeout_s
        frag = synthesize_exact(
            target, max_nodes=min(effort.exact_max_nodes, heur.n_nodes - 1),
            deadline=deadline,
        )
        if frag is not None:
            return frag
    return heur
