"""Table-driven rewriting of and-inverter graphs.

Best-known implementations of small functions are precomputed once into
a database keyed by NPN-canonical truth table. At synthesis time cuts of
up to six leaves are enumerated, their functions canonicalized and
probed against the database, and cones are replaced whenever the stored
structure wins after fanout-aware accounting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .aig import KIND_AND, Aig
from .cuts import enumerate_cuts
from .exact_synth import EffortConfig, Fragment, best_fragment
from .npn import NpnTransform, invert_transform, npn_canonicalize
from .tt import TruthTable, compress_support, table_mask, var_table


@dataclass(frozen=True)
class LmsEntry:
    tt: TruthTable
    impl: Fragment
    n_nodes: int
    depth: int

    def validate(self):
        if self.impl.simulate() != self.tt:
            raise ValueError("implementation does not reproduce its table")
        if self.impl.n_nodes != self.n_nodes or self.impl.depth() != self.depth:
            raise ValueError("stored characteristics disagree with fragment")


@dataclass
class LmsDb:
    version: str = "1"
    k_max: int = 6
    entries: dict[tuple[int, int], LmsEntry] = field(default_factory=dict)

    def add(self, entry: LmsEntry) -> bool:
        """Keep only strict improvements (fewer nodes, then lower depth)."""
        key = (entry.tt.k, entry.tt.bits)
        old = self.entries.get(key)
        if old is not None and (old.n_nodes, old.depth) <= (
            entry.n_nodes,
            entry.depth,
        ):
            return False
        self.entries[key] = entry
        return True

    def get(self, tt: TruthTable) -> LmsEntry | None:
        return self.entries.get((tt.k, tt.bits))

    def histogram(self) -> dict[int, int]:
        h: dict[int, int] = {}
        for k, _ in sorted(self.entries):
            h[k] = h.get(k, 0) + 1
        return h


# -- persistence -------------------------------------------------------


def _impl_str(frag: Fragment) -> str:
    nodes = ",".join(f"{a}.{b}" for a, b in frag.nodes)
    return f"{frag.out};{nodes}"


def _impl_parse(k: int, text: str) -> Fragment:
    head, _, rest = text.partition(";")
    nodes = []
    if rest:
        for part in rest.split(","):
            a, _, b = part.partition(".")
            nodes.append((int(a), int(b)))
    return Fragment(k, tuple(nodes), int(head))


def save_db(db: LmsDb) -> str:
    lines = [f"lmsdb v{db.version} kmax={db.k_max}"]
    for k, bits in sorted(db.entries):
        e = db.entries[(k, bits)]
        digits = max(1, (1 << k) // 4)
        lines.append(
            f"tt={bits:0{digits}x} k={k} nodes={e.n_nodes} depth={e.depth} "
            f"impl={_impl_str(e.impl)}"
        )
    return "\n".join(lines) + "\n"


class DbFormatError(ValueError):
    def __init__(self, line_no: int, msg: str):
        super().__init__(f"line {line_no}: {msg}")
        self.line_no = line_no


def load_db(text: str) -> LmsDb:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("lmsdb v"):
        raise DbFormatError(1, "missing lmsdb header")
    head = lines[0].split()
    version = head[1][1:]
    k_max = int(head[2].split("=")[1])
    db = LmsDb(version=version, k_max=k_max)
    for no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            fields = dict(part.split("=", 1) for part in line.split())
            k = int(fields["k"])
            bits = int(fields["tt"], 16)
            impl = _impl_parse(k, fields["impl"])
            entry = LmsEntry(
                tt=TruthTable(k, bits),
                impl=impl,
                n_nodes=int(fields["nodes"]),
                depth=int(fields["depth"]),
            )
            entry.validate()
        except DbFormatError:
            raise
        except Exception as exc:
            raise DbFormatError(no, str(exc)) from exc
        key = (k, bits)
        if key in db.entries:
            raise DbFormatError(no, "duplicate entry")
        db.entries[key] = entry
    return db


# -- database construction ---------------------------------------------


def build_database(functions, effort: EffortConfig | None = None) -> LmsDb:
    """Synthesize one implementation per NPN class of the given tables."""
    effort = effort or EffortConfig()
    db = LmsDb()
    seen: set[tuple[int, int]] = set()
    for f in functions:
        canon, _ = npn_canonicalize(f)
        key = (canon.k, canon.bits)
        if key in seen:
            continue
        seen.add(key)
        frag = best_fragment(canon, effort)
        db.add(
            LmsEntry(tt=canon, impl=frag, n_nodes=frag.n_nodes,
                     depth=frag.depth())
        )
    return db


def harvest(aig: Aig, k: int = 6, limit_per_node: int = 8):
    """Canonical cut functions of a design, deduplicated, in first-seen
    order; vacuous cut inputs are dropped before canonicalization."""
    cuts = enumerate_cuts(aig, k=k, limit_per_node=limit_per_node,
                          include_support=True)
    seen: set[tuple[int, int]] = set()
    memo: dict[tuple[int, int], TruthTable] = {}
    for nid in aig.node_ids():
        if aig.kind[nid] != KIND_AND:
            continue
        for leaves, _ in cuts[nid]:
            if len(leaves) < 1:
                continue
            tt = aig.cut_function(2 * nid, leaves)
            tt, _ = compress_support(tt)
            key = (tt.k, tt.bits)
            canon = memo.get(key)
            if canon is None:
                canon, _t = npn_canonicalize(tt)
                memo[key] = canon
            ckey = (canon.k, canon.bits)
            if ckey in seen or canon.is_const() or canon.k == 0:
                continue
            seen.add(ckey)
            yield canon


# -- rewriting ----------------------------------------------------------


@dataclass
class RewriteStats:
    considered: int = 0
    applied: int = 0
    nodes_before: int = 0
    nodes_after: int = 0


def _fold_and(a: int, b: int):
    if a == 0 or b == 0 or a == (b ^ 1):
        return 0
    if a == 1:
        return b
    if b == 1:
        return a
    if a == b:
        return a
    return None


class _FragmentInstancer:
    """Instantiates a db fragment over concrete leaf literals, either
    counting what a build would add (dry) or building for real."""

    def __init__(self, aig: Aig, root: int, n_original: int,
                 forbid: set[int]):
        self.aig = aig
        self.root = root
        self.n_original = n_original
        self.forbid = forbid

    def _strash_ok(self, nid: int) -> bool:
        # reuse is safe only when the hit's cone cannot contain the root
        # (original nodes below it, or nodes created after rewriting
        # began) and the hit is not slated to be freed by the rewrite --
        # reusing a to-be-freed node would falsify the gain accounting
        if nid in self.forbid:
            return False
        return nid < self.root or nid >= self.n_original

    def run(self, frag: Fragment, leaf_lits: list[int], out_neg: int,
            dry: bool):
        aig = self.aig
        vals: dict[int, int] = {0: 0}
        for i, lit in enumerate(leaf_lits):
            vals[2 * (1 + i)] = lit
        added = 0
        created: list[int] = []
        fake = 1 << 40

        def resolve(flit: int) -> int:
            return vals[flit & ~1] ^ (flit & 1)

        for j, (a, b) in enumerate(frag.nodes):
            ra, rb = resolve(a), resolve(b)
            lit = _fold_and(ra, rb)
            if lit is None:
                x, y = (ra, rb) if ra >= rb else (rb, ra)
                hit = aig.strash.get((x, y))
                if (
                    hit is not None
                    and hit not in aig.dead
                    and self._strash_ok(hit)
                ):
                    lit = 2 * hit
                else:
                    added += 1
                    if dry:
                        lit = 2 * (fake + j)
                    else:
                        nid = aig.and_forced(x, y)
                        created.append(nid)
                        lit = 2 * nid
            vals[2 * (1 + frag.k + j)] = lit
        out = resolve(frag.out) ^ out_neg
        if not dry and (out >> 1) == self.root:
            self._rollback(created)
            return None, added
        return out, added

    def _rollback(self, created: list[int]):
        for nid in reversed(created):
            if self.aig.refs[nid] == 0:
                self.aig._kill(nid)


def _binding(transform: NpnTransform, leaf_lits: list[int]):
    """Wire fragment inputs so that the instantiated canonical structure
    computes the original cut function."""
    inv = invert_transform(transform)
    k = len(leaf_lits)
    frag_inputs = [0] * k
    for i in range(k):
        frag_inputs[inv.perm[i]] = leaf_lits[i] ^ ((inv.phase >> i) & 1)
    return frag_inputs, inv.out


def rewrite(aig: Aig, db: LmsDb, objective: str = "area"
            ) -> tuple[Aig, RewriteStats]:
    """One topological replacement sweep. Never increases the objective:
    area mode requires strictly positive node gain, depth mode a strictly
    shorter cone at no node-count increase."""
    if objective not in ("area", "depth"):
        raise ValueError(f"unknown objective {objective!r}")
    g = aig.compact()
    stats = RewriteStats(nodes_before=g.num_ands())
    g.prepare_mutation()
    n_original = len(g.kind)
    cut_limit = 8
    cuts_cache: dict[int, list] = {}
    canon_memo: dict[tuple[int, int], tuple[TruthTable, NpnTransform]] = {}

    supp_cache: dict[int, frozenset | None] = {}

    def supp_of(nid: int) -> frozenset | None:
        got = supp_cache.get(nid, "?")
        if got != "?":
            return got
        if g.kind[nid] != KIND_AND:
            s = frozenset((nid,))
        else:
            s0 = supp_of(g.f0[nid] >> 1)
            s1 = supp_of(g.f1[nid] >> 1)
            s = None
            if s0 is not None and s1 is not None and len(s0 | s1) <= 6:
                s = s0 | s1
        supp_cache[nid] = s
        return s

    def cuts_of(nid: int):
        got = cuts_cache.get(nid)
        if got is not None:
            return got
        if g.kind[nid] != KIND_AND:
            res = [((nid,), 0)]
        else:
            merged: dict[tuple[int, ...], int] = {}
            for l0, v0 in cuts_of(g.f0[nid] >> 1):
                for l1, v1 in cuts_of(g.f1[nid] >> 1):
                    u = set(l0)
                    u.update(l1)
                    if len(u) > 6:
                        continue
                    t = tuple(sorted(u))
                    v = v0 + v1 + 1
                    if t not in merged or v < merged[t]:
                        merged[t] = v
            ranked = sorted(merged.items(),
                            key=lambda it: (len(it[0]), it[1], it[0]))
            res = [((nid,), 0)] + ranked[: cut_limit - 1]
            # the full-support cut enables deep cone replacements that
            # smallest-first pruning would otherwise starve out
            s = supp_of(nid)
            if s is not None:
                sleaves = tuple(sorted(s))
                if sleaves not in [l for l, _ in res]:
                    res.append((sleaves, len(s)))
        cuts_cache[nid] = res
        return res

    depth_mode = objective == "depth"

    def node_level(nid: int, memo: dict) -> int:
        got = memo.get(nid)
        if got is not None:
            return got
        if g.kind[nid] != KIND_AND:
            memo[nid] = 0
            return 0
        lv = 1 + max(
            node_level(g.f0[nid] >> 1, memo), node_level(g.f1[nid] >> 1, memo)
        )
        memo[nid] = lv
        return lv

    level_memo: dict[int, int] = {}

    for nid in range(1, n_original):
        if nid in g.dead or g.kind[nid] != KIND_AND:
            continue
        best = None  # (metric, entry, frag_inputs, out_neg, leaves)
        for leaves, _vol in cuts_of(nid):
            if len(leaves) < 2:
                continue
            stats.considered += 1
            tt = g.cut_function(2 * nid, leaves)
            ctt, cl = compress_support(tt, leaves)
            if ctt.k == 0:
                # constant cone collapses outright
                const_lit = 1 if ctt.bits else 0
                best = (None, None, None, const_lit, ())
                break
            key = (ctt.k, ctt.bits)
            pair = canon_memo.get(key)
            if pair is None:
                pair = npn_canonicalize(ctt)
                canon_memo[key] = pair
            canon, tr = pair
            entry = db.get(canon)
            if entry is None:
                continue
            leaf_lits = [2 * n for n in cl]
            frag_inputs, out_neg = _binding(tr, leaf_lits)
            mffc = g.mffc_nodes(nid, cl)
            inst = _FragmentInstancer(g, nid, n_original, mffc)
            _, added = inst.run(entry.impl, frag_inputs, out_neg, dry=True)
            gain = len(mffc) - added
            if depth_mode:
                frag_dep = entry.depth
                leaf_levels = [node_level(n, level_memo) for n in cl]
                base = max(leaf_levels, default=0)
                new_level = base + frag_dep
                cur_level = node_level(nid, level_memo)
                if new_level < cur_level and gain >= 0:
                    metric = (cur_level - new_level, gain)
                    if best is None or metric > best[0]:
                        best = (metric, entry, frag_inputs, out_neg, cl)
            else:
                if gain > 0:
                    metric = (gain,)
                    if best is None or metric > best[0]:
                        best = (metric, entry, frag_inputs, out_neg, cl)
        if best is None:
            continue
        _, entry, frag_inputs, out_neg, leaves = best
        if entry is None:
            g.replace(nid, out_neg)  # constant fold
            stats.applied += 1
            level_memo.clear()
            continue
        mffc = g.mffc_nodes(nid, leaves)
        inst = _FragmentInstancer(g, nid, n_original, mffc)
        out, _ = inst.run(entry.impl, frag_inputs, out_neg, dry=False)
        if out is None:
            continue
        g.replace(nid, out)
        stats.applied += 1
        if depth_mode:
            level_memo.clear()

    result = g.compact()
    stats.nodes_after = result.num_ands()
    return result, stats
