"""Truth tables for small Boolean functions (up to six inputs).

Convention: input 0 is the *most significant* bit of the minterm index,
so a table over inputs (a, b) stores f(a, b) at bit position 2*a + b.
A 2-input AND is 0x8, a 2:1 mux ite(s, a, b) over (s, a, b) is 0xCA.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


def table_mask(k: int) -> int:
    return (1 << (1 << k)) - 1


@lru_cache(maxsize=None)
def _pos_masks(k: int, pos: int) -> tuple[int, int]:
    """(hi, lo) masks over the 2^k table bits: hi selects minterms where
    index bit `pos` is 1, lo where it is 0."""
    lo = 0
    bit = 1
    for m in range(1 << k):
        if not (m >> pos) & 1:
            lo |= bit
        bit <<= 1
    return table_mask(k) & ~lo, lo


def _input_pos(k: int, i: int) -> int:
    # input i occupies index-bit position k-1-i (input 0 = MSB)
    return k - 1 - i


@dataclass(frozen=True)
class TruthTable:
    k: int
    bits: int

    def __post_init__(self):
        if not 0 <= self.k <= 6:
            raise ValueError(f"k={self.k} out of range (0..6)")
        if self.bits & ~table_mask(self.k):
            raise ValueError("bits exceed 2^k-bit range")

    @property
    def mask(self) -> int:
        return table_mask(self.k)

    def invert(self) -> "TruthTable":
        return TruthTable(self.k, self.bits ^ self.mask)

    def is_const(self) -> bool:
        return self.bits == 0 or self.bits == self.mask

    def eval(self, values) -> int:
        """values: iterable of 0/1 per input, input 0 first."""
        m = 0
        for v in values:
            m = (m << 1) | (v & 1)
        return (self.bits >> m) & 1

    def __repr__(self):
        digits = max(1, (1 << self.k) // 4)
        return f"TruthTable(k={self.k}, bits=0x{self.bits:0{digits}x})"


def var_table(k: int, i: int) -> TruthTable:
    hi, _ = _pos_masks(k, _input_pos(k, i))
    return TruthTable(k, hi)


def const_table(k: int, value: int) -> TruthTable:
    return TruthTable(k, table_mask(k) if value else 0)


def flip_input_bits(k: int, bits: int, i: int) -> int:
    """Table of f with input i complemented."""
    pos = _input_pos(k, i)
    hi, lo = _pos_masks(k, pos)
    s = 1 << pos
    return ((bits & hi) >> s) | ((bits & lo) << s)


def swap_adjacent_bits(k: int, bits: int, i: int) -> int:
    """Table of f with inputs i and i+1 exchanged."""
    p_lo = _input_pos(k, i + 1)  # input i sits one position above input i+1
    s = 1 << p_lo
    hi_hi, _ = _pos_masks(k, p_lo + 1)
    hi_lo, _ = _pos_masks(k, p_lo)
    m10 = hi_hi & ~hi_lo
    m01 = hi_lo & ~hi_hi
    keep = table_mask(k) & ~(m10 | m01)
    return (bits & keep) | ((bits & m01) << s) | ((bits & m10) >> s)


def cofactor_counts(k: int, bits: int, i: int) -> tuple[int, int]:
    """(ones of f with input i = 1, ones with input i = 0)."""
    hi, lo = _pos_masks(k, _input_pos(k, i))
    return (bits & hi).bit_count(), (bits & lo).bit_count()


def cofactor_expand(k: int, bits: int, i: int, c: int) -> int:
    """Table of f with input i fixed to c, still over k inputs (the
    result no longer depends on input i)."""
    pos = _input_pos(k, i)
    hi, lo = _pos_masks(k, pos)
    s = 1 << pos
    if c:
        d = bits & hi
        return d | (d >> s)
    d = bits & lo
    return d | (d << s)


def depends_on(k: int, bits: int, i: int) -> bool:
    return cofactor_expand(k, bits, i, 0) != cofactor_expand(k, bits, i, 1)


def drop_input(k: int, bits: int, i: int) -> int:
    """Remove input i from the table (it must be vacuous)."""
    pos = _input_pos(k, i)
    out = 0
    for m in range(1 << (k - 1)):
        lo = m & ((1 << pos) - 1)
        hi = m >> pos
        src = (hi << (pos + 1)) | lo
        if (bits >> src) & 1:
            out |= 1 << m
    return out


def support(k: int, bits: int) -> list[int]:
    return [i for i in range(k) if depends_on(k, bits, i)]


def compress_support(tt: "TruthTable", aux: tuple | None = None):
    """Drop vacuous inputs; aux (for example a leaf tuple) is filtered
    alongside when given."""
    sup = support(tt.k, tt.bits)
    if len(sup) == tt.k:
        return tt, aux
    bits = tt.bits
    k = tt.k
    for i in reversed(range(k)):
        if i not in sup:
            bits = drop_input(k, bits, i)
            k -= 1
    new_aux = tuple(aux[i] for i in sup) if aux is not None else None
    return TruthTable(k, bits), new_aux


def _plain_changes(n: int) -> list[int]:
    # Steinhaus-Johnson-Trotter: adjacent swap positions visiting all n!
    # permutations; the largest item sweeps back and forth.
    if n <= 1:
        return []
    sub = _plain_changes(n - 1)
    out: list[int] = []
    sweep_left = True
    for s in sub + [None]:
        if sweep_left:
            out.extend(range(n - 2, -1, -1))
        else:
            out.extend(range(0, n - 1))
        if s is not None:
            # after a left sweep the largest item occupies slot 0
            out.append(s + 1 if sweep_left else s)
        sweep_left = not sweep_left
    return out


@lru_cache(maxsize=None)
def perm_swap_schedule(k: int) -> tuple[int, ...]:
    """Adjacent-swap positions enumerating all k! input orders."""
    return tuple(_plain_changes(k))


@lru_cache(maxsize=None)
def gray_flips(k: int) -> tuple[int, ...]:
    """Input index flipped at each step of a 2^k reflected Gray walk."""
    return tuple((t & -t).bit_length() - 1 for t in range(1, 1 << k))
