"""NPN canonicalization of small truth tables.

A transform (perm, phase, out) acts on a k-input table f as

    h(x_0..x_{k-1}) = f(y) ^ out,   y[perm[i]] = x_i ^ phase_i

i.e. slot i of the result reads original input perm[i], complemented
when phase bit i is set. Canonical form is the lexicographic minimum
table (as an unsigned 2^k-bit integer) over transforms: exhaustive for
k <= 4, a deterministic signature-guided fixpoint search for k in {5, 6}
(equal tables always map to equal keys; NPN-equivalent tables usually,
but not provably, collide).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .tt import (
    TruthTable,
    cofactor_counts,
    flip_input_bits,
    gray_flips,
    perm_swap_schedule,
    swap_adjacent_bits,
    table_mask,
)

# cap on candidate transforms evaluated per refinement pass at k in {5,6};
# only highly symmetric functions ever hit it
SEMI_CANDIDATE_CAP = 1024


@dataclass(frozen=True)
class NpnTransform:
    perm: tuple[int, ...]
    phase: int
    out: int

    @property
    def k(self) -> int:
        return len(self.perm)


def identity_transform(k: int) -> NpnTransform:
    return NpnTransform(tuple(range(k)), 0, 0)


def _apply_raw(k: int, bits: int, perm, phase: int, out: int) -> int:
    # input flips first (phase bit i belongs to original input perm[i]),
    # then reorder inputs by bubbling, then the output complement
    for i in range(k):
        if (phase >> i) & 1:
            bits = flip_input_bits(k, bits, perm[i])
    labels = list(range(k))
    for i in range(k):
        j = labels.index(perm[i], i)
        while j > i:
            bits = swap_adjacent_bits(k, bits, j - 1)
            labels[j - 1], labels[j] = labels[j], labels[j - 1]
            j -= 1
    if out:
        bits ^= table_mask(k)
    return bits


def apply_transform(t: NpnTransform, f: TruthTable) -> TruthTable:
    if t.k != f.k:
        raise ValueError("transform arity mismatch")
    return TruthTable(f.k, _apply_raw(f.k, f.bits, t.perm, t.phase, t.out))


def invert_transform(t: NpnTransform) -> NpnTransform:
    k = t.k
    perm = [0] * k
    phase = 0
    for i in range(k):
        perm[t.perm[i]] = i
        phase |= ((t.phase >> i) & 1) << t.perm[i]
    return NpnTransform(tuple(perm), phase, t.out)


def compose(t2: NpnTransform, t1: NpnTransform) -> NpnTransform:
    """Transform equivalent to applying t1 first, then t2."""
    k = t1.k
    perm = tuple(t1.perm[t2.perm[i]] for i in range(k))
    phase = 0
    for i in range(k):
        b = ((t2.phase >> i) & 1) ^ ((t1.phase >> t2.perm[i]) & 1)
        phase |= b << i
    return NpnTransform(perm, phase, t2.out ^ t1.out)


def _walk_all(k: int, bits: int):
    """Yield (table, perm, phase) for every perm x input-phase combo,
    stepping by single flips/swaps (output complement not included)."""
    swaps = perm_swap_schedule(k)
    flips = gray_flips(k)
    perm = list(range(k))
    phase = 0
    T = bits
    si = 0
    while True:
        yield T, perm, phase
        for i in flips:
            T = flip_input_bits(k, T, i)
            phase ^= 1 << i
            yield T, perm, phase
        ph = phase
        while ph:
            i = (ph & -ph).bit_length() - 1
            T = flip_input_bits(k, T, i)
            ph &= ph - 1
        phase = 0
        if si == len(swaps):
            return
        s = swaps[si]
        si += 1
        T = swap_adjacent_bits(k, T, s)
        perm[s], perm[s + 1] = perm[s + 1], perm[s]


def _canon_exact(f: TruthTable) -> tuple[TruthTable, NpnTransform]:
    k = f.k
    mask = table_mask(k)
    best = None
    best_t = None
    for T, perm, phase in _walk_all(k, f.bits):
        if best is None or T < best:
            best = T
            best_t = NpnTransform(tuple(perm), phase, 0)
        Tc = T ^ mask
        if Tc < best:
            best = Tc
            best_t = NpnTransform(tuple(perm), phase, 1)
    return TruthTable(k, best), best_t


def _semi_candidates(k: int, bits: int, cap: int):
    mask = table_mask(k)
    n1 = bits.bit_count()
    n0 = (bits ^ mask).bit_count()
    outs = (0,) if n1 < n0 else (1,) if n0 < n1 else (0, 1)
    emitted = 0
    for out in outs:
        T = bits ^ (mask if out else 0)
        sig = []
        phase_opts = []
        for i in range(k):
            c1, c0 = cofactor_counts(k, T, i)
            if c1 < c0:
                phase_opts.append((0,))
                sig.append(c1)
            elif c0 < c1:
                phase_opts.append((1,))
                sig.append(c0)
            else:
                phase_opts.append((0, 1))
                sig.append(c1)
        groups: dict[int, list[int]] = {}
        for i in range(k):
            groups.setdefault(sig[i], []).append(i)
        group_orders = [
            list(itertools.permutations(groups[s])) for s in sorted(groups)
        ]
        for combo in itertools.product(*group_orders):
            perm = tuple(x for g in combo for x in g)
            for choice in itertools.product(*[phase_opts[p] for p in perm]):
                phase = 0
                for slot, b in enumerate(choice):
                    phase |= b << slot
                yield NpnTransform(perm, phase, out)
                emitted += 1
                if emitted >= cap:
                    return


def _canon_semi(f: TruthTable) -> tuple[TruthTable, NpnTransform]:
    k = f.k
    cur = f.bits
    total = identity_transform(k)
    while True:
        best = cur
        best_t = None
        for t in _semi_candidates(k, cur, SEMI_CANDIDATE_CAP):
            h = _apply_raw(k, cur, t.perm, t.phase, t.out)
            if h < best:
                best = h
                best_t = t
        if best_t is None:
            return TruthTable(k, cur), total
        total = compose(best_t, total)
        cur = best


def npn_canonicalize(f: TruthTable) -> tuple[TruthTable, NpnTransform]:
    """Canonical table plus the transform t with apply_transform(t, f)
    equal to the canonical table. Idempotent."""
    if f.k <= 4:
        return _canon_exact(f)
    return _canon_semi(f)


def npn_class_leaders(k: int) -> list[int]:
    """Canonical representative (orbit minimum) of every NPN class of
    k-input functions, by exhaustive orbit marking. k <= 4."""
    if k > 4:
        raise ValueError("class enumeration is exhaustive only up to k=4")
    n = 1 << (1 << k)
    mask = table_mask(k)
    seen = bytearray(n)
    leaders = []
    for f in range(n):
        if seen[f]:
            continue
        orbit = set()
        for T, _, _ in _walk_all(k, f):
            orbit.add(T)
            orbit.add(T ^ mask)
        for g in orbit:
            seen[g] = 1
        leaders.append(min(orbit))
    leaders.sort()
    return leaders
