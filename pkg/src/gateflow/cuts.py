"""Bottom-up k-feasible cut enumeration."""

from __future__ import annotations

from .aig import KIND_AND, KIND_CONST, Aig

Cut = tuple[tuple[int, ...], int]  # (sorted leaf node ids, cone volume)


def leaf_signature(leaves: tuple[int, ...]) -> int:
    """64-bit hash of the leaf set, for cheap filtering."""
    sig = 0
    for n in leaves:
        sig |= 1 << (n & 63)
    return sig


def enumerate_cuts(aig: Aig, k: int = 6, limit_per_node: int = 8,
                   include_support: bool = False) -> dict[int, list[Cut]]:
    """Per-node cut sets: the trivial cut plus merged fanin cuts with at
    most k leaves, pruned to limit_per_node by (fewer leaves, smaller
    cone volume). With include_support the full source-support cut is
    kept as an extra candidate when it fits in k leaves; deep cones lose
    it to the pruning otherwise."""
    cuts: dict[int, list[Cut]] = {}
    supp: dict[int, frozenset | None] = {}
    vols: dict[int, int] = {}
    for nid in aig.node_ids():
        kind = aig.kind[nid]
        if kind == KIND_CONST:
            cuts[nid] = [((), 0)]
            supp[nid] = frozenset()
            vols[nid] = 0
        elif kind != KIND_AND:
            cuts[nid] = [((nid,), 0)]
            supp[nid] = frozenset((nid,))
            vols[nid] = 0
        else:
            n0 = aig.f0[nid] >> 1
            n1 = aig.f1[nid] >> 1
            best: dict[tuple[int, ...], int] = {}
            for l0, v0 in cuts.get(n0, [((n0,), 0)]):
                for l1, v1 in cuts.get(n1, [((n1,), 0)]):
                    merged = set(l0)
                    merged.update(l1)
                    if len(merged) > k:
                        continue
                    leaves = tuple(sorted(merged))
                    vol = v0 + v1 + 1
                    old = best.get(leaves)
                    if old is None or vol < old:
                        best[leaves] = vol
            s0, s1 = supp.get(n0), supp.get(n1)
            if s0 is None or s1 is None or len(s0 | s1) > k:
                supp[nid] = None
                vols[nid] = 0
            else:
                supp[nid] = s0 | s1
                vols[nid] = vols[n0] + vols[n1] + 1
                if include_support:
                    leaves = tuple(sorted(supp[nid]))
                    best.setdefault(leaves, vols[nid])
            ranked = sorted(best.items(), key=lambda it: (len(it[0]), it[1], it[0]))
            ranked = _drop_dominated(ranked)
            result = [((nid,), 0)] + ranked[:limit_per_node - 1]
            if include_support and supp[nid] is not None:
                sleaves = tuple(sorted(supp[nid]))
                if sleaves not in [l for l, _ in result]:
                    result.append((sleaves, best[sleaves]))
            cuts[nid] = result
    return cuts


def _drop_dominated(ranked: list[Cut]) -> list[Cut]:
    # a cut whose leaves are a superset of an earlier (smaller) cut adds
    # nothing; lists are short so the quadratic scan is fine
    kept: list[Cut] = []
    kept_sets: list[frozenset[int]] = []
    for leaves, vol in ranked:
        s = frozenset(leaves)
        if any(ks <= s for ks in kept_sets):
            continue
        kept.append((leaves, vol))
        kept_sets.append(s)
    return kept
