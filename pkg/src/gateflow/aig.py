"""And-inverter graphs.

Literals are 2*node_id + complement; literal 0 is constant false and 1
constant true. AND nodes store fanins with f0 >= f1 and are structurally
hashed at creation, so fanins always reference lower node ids. Registers
appear as latch nodes: their outputs act like primary inputs, their next
state is a literal set after construction (reset value is 0).
"""

from __future__ import annotations

from .tt import TruthTable, const_table, table_mask, var_table

KIND_CONST = 0
KIND_PI = 1
KIND_LATCH = 2
KIND_AND = 3


class CutError(ValueError):
    pass


class Aig:
    def __init__(self, name: str = "aig"):
        self.name = name
        self.kind = [KIND_CONST]
        self.f0 = [0]
        self.f1 = [0]
        self.pi_ids: list[int] = []
        self.latch_ids: list[int] = []
        self.latch_next: list[int] = []
        self.pos: list[tuple[str, int]] = []
        self.names: dict[int, str] = {}
        self.strash: dict[tuple[int, int], int] = {}
        # word-level port grouping (name, [bit literals] LSB first)
        self.in_words: list[tuple[str, list[int]]] = []
        self.out_words: list[tuple[str, list[int]]] = []
        # mutation support (enabled on demand by rewriting passes)
        self.refs: list[int] | None = None
        self.dead: set[int] = set()

    # -- construction -------------------------------------------------

    def pi(self, name: str | None = None) -> int:
        nid = self._new_node(KIND_PI, 0, 0)
        self.pi_ids.append(nid)
        if name:
            self.names[nid] = name
        return 2 * nid

    def latch(self, name: str | None = None) -> tuple[int, int]:
        """Returns (q literal, latch index); set the next state later."""
        nid = self._new_node(KIND_LATCH, 0, 0)
        self.latch_ids.append(nid)
        self.latch_next.append(0)
        if name:
            self.names[nid] = name
        return 2 * nid, len(self.latch_ids) - 1

    def set_latch_next(self, index: int, lit: int):
        self.latch_next[index] = lit

    def po(self, name: str, lit: int):
        self.pos.append((name, lit))

    def _new_node(self, kind: int, f0: int, f1: int) -> int:
        self.kind.append(kind)
        self.f0.append(f0)
        self.f1.append(f1)
        if self.refs is not None:
            self.refs.append(0)
        return len(self.kind) - 1

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
        if nid is not None and nid not in self.dead:
            return 2 * nid
        nid = self._new_node(KIND_AND, a, b)
        self.strash[(a, b)] = nid
        return 2 * nid

    def not_(self, a: int) -> int:
        return a ^ 1

    def or_(self, a: int, b: int) -> int:
        return self.and_(a ^ 1, b ^ 1) ^ 1

    def xor_(self, a: int, b: int) -> int:
        n1 = self.and_(a, b ^ 1)
        n2 = self.and_(a ^ 1, b)
        return self.or_(n1, n2)

    def mux(self, s: int, a: int, b: int) -> int:
        """s=1 selects a."""
        return self.or_(self.and_(s, a), self.and_(s ^ 1, b))

    # -- queries ------------------------------------------------------

    def __len__(self):
        return len(self.kind)

    def is_and(self, nid: int) -> bool:
        return self.kind[nid] == KIND_AND

    def num_ands(self) -> int:
        return sum(
            1
            for nid in range(len(self.kind))
            if self.kind[nid] == KIND_AND and nid not in self.dead
        )

    def node_ids(self):
        for nid in range(1, len(self.kind)):
            if nid not in self.dead:
                yield nid

    def check(self):
        """Structural invariants: topological fanins, strash uniqueness."""
        seen = set()
        for nid in self.node_ids():
            if self.kind[nid] != KIND_AND:
                continue
            a, b = self.f0[nid], self.f1[nid]
            assert a >= b, f"node {nid}: fanins unordered"
            assert (a >> 1) < nid and (b >> 1) < nid, f"node {nid}: not topological"
            assert (a, b) not in seen, f"duplicate structure {(a, b)}"
            seen.add((a, b))

    def levels(self) -> list[int]:
        lv = [0] * len(self.kind)
        for nid in range(1, len(self.kind)):
            if self.kind[nid] == KIND_AND and nid not in self.dead:
                lv[nid] = 1 + max(lv[self.f0[nid] >> 1], lv[self.f1[nid] >> 1])
        return lv

    def depth(self) -> int:
        lv = self.levels()
        ends = [lit >> 1 for _, lit in self.pos] + [l >> 1 for l in self.latch_next]
        return max((lv[n] for n in ends), default=0)

    # -- simulation ---------------------------------------------------

    def sim(self, pi_masks: list[int], state_masks: list[int] | None,
            batch_mask: int) -> list[int]:
        """Bit-parallel evaluation: each value is a mask over vectors.

        pi_masks aligned with pi_ids, state_masks with latch_ids. Returns
        the per-node value array; use lit_value to read literals.
        """
        val = [0] * len(self.kind)
        for nid, m in zip(self.pi_ids, pi_masks):
            val[nid] = m & batch_mask
        if state_masks is not None:
            for nid, m in zip(self.latch_ids, state_masks):
                val[nid] = m & batch_mask
        kind, f0, f1 = self.kind, self.f0, self.f1
        for nid in range(1, len(kind)):
            if kind[nid] == KIND_AND:
                a, b = f0[nid], f1[nid]
                va = val[a >> 1] ^ (batch_mask if a & 1 else 0)
                vb = val[b >> 1] ^ (batch_mask if b & 1 else 0)
                val[nid] = va & vb
        return val

    @staticmethod
    def lit_value(val: list[int], lit: int, batch_mask: int) -> int:
        v = val[lit >> 1]
        return v ^ batch_mask if lit & 1 else v

    # -- cut functions ------------------------------------------------

    def cut_function(self, root_lit: int, leaves: tuple[int, ...]) -> TruthTable:
        """Truth table of the literal `root_lit` over the given leaf
        nodes, computed by evaluating the cone with leaf projections."""
        k = len(leaves)
        if k > 6:
            raise CutError("more than 6 leaves")
        mask = table_mask(k)
        memo: dict[int, int] = {0: 0}
        for j, leaf in enumerate(leaves):
            memo[leaf] = var_table(k, j).bits

        def ev(nid: int) -> int:
            v = memo.get(nid)
            if v is not None:
                return v
            if self.kind[nid] != KIND_AND:
                raise CutError(f"leaf set does not cut the cone at node {nid}")
            a, b = self.f0[nid], self.f1[nid]
            va = ev(a >> 1) ^ (mask if a & 1 else 0)
            vb = ev(b >> 1) ^ (mask if b & 1 else 0)
            v = va & vb
            memo[nid] = v
            return v

        bits = ev(root_lit >> 1)
        if root_lit & 1:
            bits ^= mask
        return TruthTable(k, bits)

    def cone_nodes(self, root: int, leaves: tuple[int, ...]) -> list[int]:
        """AND nodes strictly inside the cut cone, root included."""
        stop = set(leaves)
        out = []
        stack = [root]
        seen = set()
        while stack:
            nid = stack.pop()
            if nid in seen or nid in stop or self.kind[nid] != KIND_AND:
                continue
            seen.add(nid)
            out.append(nid)
            stack.append(self.f0[nid] >> 1)
            stack.append(self.f1[nid] >> 1)
        return out

    # -- mutation (used by rewriting) ----------------------------------

    def prepare_mutation(self):
        refs = [0] * len(self.kind)
        for nid in self.node_ids():
            if self.kind[nid] == KIND_AND:
                refs[self.f0[nid] >> 1] += 1
                refs[self.f1[nid] >> 1] += 1
        for _, lit in self.pos:
            refs[lit >> 1] += 1
        for lit in self.latch_next:
            refs[lit >> 1] += 1
        self.refs = refs
        self._fanouts: dict[int, list[int]] = {}
        for nid in self.node_ids():
            if self.kind[nid] == KIND_AND:
                self._fanouts.setdefault(self.f0[nid] >> 1, []).append(nid)
                self._fanouts.setdefault(self.f1[nid] >> 1, []).append(nid)

    def _kill(self, nid: int):
        if nid in self.dead or self.kind[nid] != KIND_AND:
            return
        self.dead.add(nid)
        a, b = self.f0[nid], self.f1[nid]
        self.strash.pop((a, b), None)
        for f in (a >> 1, b >> 1):
            self.refs[f] -= 1
            if self.refs[f] == 0:
                self._kill(f)

    def replace(self, old: int, new_lit: int):
        """Redirect every use of node `old` to new_lit, killing the cone
        that becomes unreferenced. Strash keys of rewritten users go stale
        and are restored by compact()."""
        assert self.refs is not None, "prepare_mutation() first"
        if (new_lit >> 1) == old:
            return
        for u in list(self._fanouts.get(old, ())):
            if u in self.dead:
                continue
            changed = False
            for arr in (self.f0, self.f1):
                if (arr[u] >> 1) == old:
                    arr[u] = new_lit ^ (arr[u] & 1)
                    changed = True
            if changed:
                if self.f0[u] < self.f1[u]:
                    self.f0[u], self.f1[u] = self.f1[u], self.f0[u]
                n_new = new_lit >> 1
                self._fanouts.setdefault(n_new, []).append(u)
                self.refs[n_new] += self._use_count(u, old)
                self.refs[old] -= self._use_count(u, old)
        self._fanouts[old] = []
        for i, (pname, lit) in enumerate(self.pos):
            if (lit >> 1) == old:
                self.pos[i] = (pname, new_lit ^ (lit & 1))
                self.refs[new_lit >> 1] += 1
                self.refs[old] -= 1
        for i, lit in enumerate(self.latch_next):
            if (lit >> 1) == old:
                self.latch_next[i] = new_lit ^ (lit & 1)
                self.refs[new_lit >> 1] += 1
                self.refs[old] -= 1
        if self.refs[old] == 0:
            self._kill(old)

    def _use_count(self, user: int, nid: int) -> int:
        n = 0
        if (self.f0[user] >> 1) == nid:
            n += 1
        if (self.f1[user] >> 1) == nid:
            n += 1
        return n

    def and_tracked(self, a: int, b: int) -> int:
        """and_ that keeps refs/fanouts coherent for new nodes."""
        before = len(self.kind)
        lit = self.and_(a, b)
        nid = lit >> 1
        if nid >= before:
            for f in (self.f0[nid] >> 1, self.f1[nid] >> 1):
                self.refs[f] += 1
                self._fanouts.setdefault(f, []).append(nid)
        return lit

    def and_forced(self, f0: int, f1: int) -> int:
        """Create an AND node without structural-hash reuse (fanins must
        be pre-folded and ordered); refs/fanouts stay coherent."""
        assert f0 >= f1
        nid = self._new_node(KIND_AND, f0, f1)
        self.strash[(f0, f1)] = nid
        for f in (f0 >> 1, f1 >> 1):
            self.refs[f] += 1
            self._fanouts.setdefault(f, []).append(nid)
        return nid

    def mffc_nodes(self, root: int, leaves: tuple[int, ...]) -> set[int]:
        """Nodes freed if `root` were replaced: the cone part used
        nowhere outside, computed by trial dereferencing."""
        stop = set(leaves)
        freed: list[int] = []

        def deref(nid):
            freed.append(nid)
            for f in (self.f0[nid] >> 1, self.f1[nid] >> 1):
                if f in stop or self.kind[f] != KIND_AND:
                    continue
                self.refs[f] -= 1
                if self.refs[f] == 0:
                    deref(f)

        def reref(nid):
            for f in (self.f0[nid] >> 1, self.f1[nid] >> 1):
                if f in stop or self.kind[f] != KIND_AND:
                    continue
                self.refs[f] += 1

        deref(root)
        for nid in freed:
            reref(nid)
        return set(freed)

    def mffc_size(self, root: int, leaves: tuple[int, ...]) -> int:
        return len(self.mffc_nodes(root, leaves))

    # -- compaction -----------------------------------------------------

    def compact(self) -> "Aig":
        """Fresh structurally-hashed copy reachable from outputs; keeps
        every PI and latch so port signatures are stable."""
        out = Aig(self.name)
        lmap = {0: 0}
        for nid in self.pi_ids:
            lit = out.pi(self.names.get(nid))
            lmap[nid] = lit
        latch_idx = {}
        for i, nid in enumerate(self.latch_ids):
            lit, li = out.latch(self.names.get(nid))
            lmap[nid] = lit
            latch_idx[i] = li

        def walk(lit: int) -> int:
            nid = lit >> 1
            m = lmap.get(nid)
            if m is None:
                a = walk(self.f0[nid])
                b = walk(self.f1[nid])
                m = out.and_(a, b)
                lmap[nid] = m
            return m ^ (lit & 1)

        for name, lit in self.pos:
            out.po(name, walk(lit))
        for i, lit in enumerate(self.latch_next):
            out.set_latch_next(latch_idx[i], walk(lit))
        out.in_words = [
            (n, [lmap[l >> 1] ^ (l & 1) for l in w]) for n, w in self.in_words
        ]
        out.out_words = [(n, [walk(l) for l in w]) for n, w in self.out_words]
        return out


def input_patterns(n: int) -> list[int]:
    """Bit-parallel exhaustive stimulus: pattern j has bit v equal to
    bit j of the vector index v, over all 2^n vectors."""
    total = 1 << n
    out = []
    for j in range(n):
        step = 1 << j
        block = ((1 << step) - 1) << step  # one period: step zeros, step ones
        repunit = ((1 << total) - 1) // ((1 << (2 * step)) - 1)
        out.append(block * repunit)
    return out


# -- ASCII AIGER ------------------------------------------------------


def write_aiger(aig: Aig) -> str:
    ids = [n for n in aig.node_ids()]
    order = {0: 0}
    for nid in aig.pi_ids:
        order[nid] = len(order)
    for nid in aig.latch_ids:
        order[nid] = len(order)
    ands = [n for n in ids if aig.kind[n] == KIND_AND]
    for nid in ands:
        order[nid] = len(order)

    def L(lit):
        return 2 * order[lit >> 1] + (lit & 1)

    lines = []
    m = len(order) - 1
    lines.append(
        f"aag {m} {len(aig.pi_ids)} {len(aig.latch_ids)} {len(aig.pos)} {len(ands)}"
    )
    for nid in aig.pi_ids:
        lines.append(str(2 * order[nid]))
    for i, nid in enumerate(aig.latch_ids):
        lines.append(f"{2 * order[nid]} {L(aig.latch_next[i])}")
    for _, lit in aig.pos:
        lines.append(str(L(lit)))
    for nid in ands:
        lines.append(f"{2 * order[nid]} {L(aig.f0[nid])} {L(aig.f1[nid])}")
    for i, nid in enumerate(aig.pi_ids):
        if nid in aig.names:
            lines.append(f"i{i} {aig.names[nid]}")
    for i, nid in enumerate(aig.latch_ids):
        if nid in aig.names:
            lines.append(f"l{i} {aig.names[nid]}")
    for i, (name, _) in enumerate(aig.pos):
        lines.append(f"o{i} {name}")
    return "\n".join(lines) + "\n"


def read_aiger(text: str) -> Aig:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "aag":
        raise ValueError("expected ascii AIGER header")
    ni, nl, no, na = (int(x) for x in head[2:6])
    aig = Aig()
    lit_map: dict[int, int] = {0: 0, 1: 1}

    def map_lit(ext: int) -> int:
        base = lit_map.get(ext & ~1)
        if base is None:
            raise ValueError(f"undefined literal {ext}")
        return base ^ (ext & 1)

    idx = 1
    for _ in range(ni):
        ext = int(lines[idx]); idx += 1
        lit_map[ext] = aig.pi()
    latch_rows = []
    for _ in range(nl):
        q, nxt = map(int, lines[idx].split()); idx += 1
        lit, li = aig.latch()
        lit_map[q] = lit
        latch_rows.append((li, nxt))
    po_rows = []
    for _ in range(no):
        po_rows.append(int(lines[idx])); idx += 1
    for _ in range(na):
        lhs, r0, r1 = map(int, lines[idx].split()); idx += 1
        lit_map[lhs] = aig.and_(map_lit(r0), map_lit(r1))
    for li, nxt in latch_rows:
        aig.set_latch_next(li, map_lit(nxt))
    po_names = {}
    for ln in lines[idx:]:
        if ln[0] in "ilo" and " " in ln:
            tag, name = ln.split(" ", 1)
            pos_i = int(tag[1:])
            if tag[0] == "i":
                aig.names[aig.pi_ids[pos_i]] = name
            elif tag[0] == "l":
                aig.names[aig.latch_ids[pos_i]] = name
            else:
                po_names[pos_i] = name
    for i, lit in enumerate(po_rows):
        aig.po(po_names.get(i, f"po{i}"), map_lit(lit))
    return aig
