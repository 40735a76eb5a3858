"""Expression sizing and evaluation for the supported subset.

One engine serves parameter evaluation, the reference interpreter, and
the width inference used by lowering, so all three agree on semantics:

  - context-determined operands (arithmetic, bitwise, ternary branches)
    evaluate at the final expression width, which is max(assignment
    target width, self-determined width of the expression);
  - shift amounts, concat/replication parts, indices, and comparison
    operands are self-determined;
  - comparisons evaluate both operands at their common self width and
    are signed only when both operands are signed;
  - everything is two-valued; out-of-range bit reads yield zero.

Parameter math additionally caps widths at 64 bits (two's complement),
truncating at assignment.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import DiagnosticError, Loc, err
from .svast import (
    Binary, Call, Concat, Fill, Ident, Index, IndexedSel, Num, RangeSel,
    Repl, Ternary, Unary,
)


@dataclass(frozen=True)
class Value:
    val: int  # unsigned representation, masked to width
    width: int
    signed: bool = False

    def as_int(self) -> int:
        if self.signed and self.width and (self.val >> (self.width - 1)) & 1:
            return self.val - (1 << self.width)
        return self.val


def _mask(w: int) -> int:
    return (1 << w) - 1


class EvalError(DiagnosticError):
    def __init__(self, loc: Loc, msg: str):
        super().__init__([err(loc, msg, "eval")])


class Scope:
    """Name -> Value lookup; interpreter and const evaluator supply one."""

    def lookup(self, name: str, loc: Loc) -> Value:
        raise NotImplementedError


class ConstScope(Scope):
    def __init__(self, bindings: dict[str, Value] | None = None):
        self.bindings = dict(bindings or {})

    def lookup(self, name: str, loc: Loc) -> Value:
        v = self.bindings.get(name)
        if v is None:
            raise EvalError(loc, f"unresolved identifier {name!r} in constant "
                                 f"expression")
        return v


def clog2(x: int) -> int:
    if x <= 1:
        return 0
    return (x - 1).bit_length()


def self_size(e, scope: Scope) -> tuple[int, bool]:
    """Self-determined (width, signed) of an expression."""
    if isinstance(e, Num):
        return (e.width or 32, e.signed)
    if isinstance(e, Fill):
        return (1, False)
    if isinstance(e, Ident):
        v = scope.lookup(e.name, e.loc)
        return (v.width, v.signed)
    if isinstance(e, Index):
        return (1, False)
    if isinstance(e, RangeSel):
        msb = eval_expr(e.msb, scope, None).as_int()
        lsb = eval_expr(e.lsb, scope, None).as_int()
        if msb < lsb:
            raise EvalError(e.loc, f"reversed part-select [{msb}:{lsb}]")
        return (msb - lsb + 1, False)
    if isinstance(e, IndexedSel):
        w = eval_expr(e.width, scope, None).as_int()
        if w < 1:
            raise EvalError(e.loc, "part-select width must be positive")
        return (w, False)
    if isinstance(e, Unary):
        if e.op in ("~", "-", "+"):
            return self_size(e.a, scope)
        return (1, False)
    if isinstance(e, Binary):
        if e.op in ("+", "-", "*", "/", "%", "&", "|", "^", "~^", "^~"):
            wa, sa = self_size(e.a, scope)
            wb, sb = self_size(e.b, scope)
            return (max(wa, wb), sa and sb)
        if e.op in ("<<", ">>", "<<<", ">>>", "**"):
            return self_size(e.a, scope)
        return (1, False)  # comparisons, logical
    if isinstance(e, Ternary):
        wa, sa = self_size(e.then, scope)
        wb, sb = self_size(e.els, scope)
        return (max(wa, wb), sa and sb)
    if isinstance(e, Concat):
        return (sum(self_size(p, scope)[0] for p in e.parts), False)
    if isinstance(e, Repl):
        n = eval_expr(e.count, scope, None).as_int()
        if n < 0:
            raise EvalError(e.loc, "negative replication count")
        return (n * self_size(e.part, scope)[0], False)
    if isinstance(e, Call):
        return (32, True)
    raise EvalError(getattr(e, "loc", Loc()), f"cannot size {type(e).__name__}")


def eval_expr(e, scope: Scope, width: int | None) -> Value:
    """Evaluate at a context width (None: self-determined)."""
    if width is None:
        width = self_size(e, scope)[0]
    w = width
    m = _mask(w)

    if isinstance(e, Num):
        return Value(e.value & m, w, e.signed)
    if isinstance(e, Fill):
        return Value(m if e.bit else 0, w, False)
    if isinstance(e, Ident):
        v = scope.lookup(e.name, e.loc)
        return Value(v.as_int() & m, w, v.signed)
    if isinstance(e, Index):
        base = scope.lookup(e.base, e.loc)
        i = eval_expr(e.idx, scope, None).val
        bit = (base.val >> i) & 1 if i < base.width else 0
        return Value(bit & m, w, False)
    if isinstance(e, RangeSel):
        base = scope.lookup(e.base, e.loc)
        msb = eval_expr(e.msb, scope, None).as_int()
        lsb = eval_expr(e.lsb, scope, None).as_int()
        if msb < lsb or lsb < 0:
            raise EvalError(e.loc, f"bad part-select [{msb}:{lsb}]")
        val = (base.val >> lsb) & _mask(msb - lsb + 1)
        return Value(val & m, w, False)
    if isinstance(e, IndexedSel):
        base = scope.lookup(e.base, e.loc)
        off = eval_expr(e.offset, scope, None).as_int()
        sw = eval_expr(e.width, scope, None).as_int()
        lo = off - sw + 1 if e.down else off
        if lo >= 0:
            val = (base.val >> lo) & _mask(sw)
        else:
            val = (base.val << -lo) & _mask(sw)
        return Value(val & m, w, False)
    if isinstance(e, Unary):
        if e.op == "~":
            return Value(~eval_expr(e.a, scope, w).val & m, w,
                         self_size(e.a, scope)[1])
        if e.op == "-":
            return Value(-eval_expr(e.a, scope, w).val & m, w,
                         self_size(e.a, scope)[1])
        if e.op == "+":
            return eval_expr(e.a, scope, w)
        va = eval_expr(e.a, scope, None)
        if e.op == "!":
            return Value(int(va.val == 0) & m, w, False)
        full = _mask(va.width)
        red = {
            "&": int(va.val == full),
            "~&": int(va.val != full),
            "|": int(va.val != 0),
            "~|": int(va.val == 0),
            "^": va.val.bit_count() & 1,
            "~^": (va.val.bit_count() & 1) ^ 1,
            "^~": (va.val.bit_count() & 1) ^ 1,
        }[e.op]
        return Value(red & m, w, False)
    if isinstance(e, Binary):
        op = e.op
        if op in ("&&", "||"):
            va = eval_expr(e.a, scope, None).val != 0
            vb = eval_expr(e.b, scope, None).val != 0
            res = (va and vb) if op == "&&" else (va or vb)
            return Value(int(res) & m, w, False)
        if op in ("==", "!=", "<", "<=", ">", ">="):
            wa, sa = self_size(e.a, scope)
            wb, sb = self_size(e.b, scope)
            wc = max(wa, wb)
            va = eval_expr(e.a, scope, wc)
            vb = eval_expr(e.b, scope, wc)
            signed = sa and sb
            x = Value(va.val, wc, signed).as_int()
            y = Value(vb.val, wc, signed).as_int()
            res = {
                "==": x == y, "!=": x != y, "<": x < y, "<=": x <= y,
                ">": x > y, ">=": x >= y,
            }[op]
            return Value(int(res) & m, w, False)
        if op in ("<<", ">>", "<<<", ">>>"):
            wa, sa = self_size(e.a, scope)
            va = eval_expr(e.a, scope, w)
            sh = eval_expr(e.b, scope, None).val
            if op == "<<" or op == "<<<":
                return Value((va.val << sh) & m if sh < w else 0, w, sa)
            if op == ">>>" and sa:
                x = Value(va.val, w, True).as_int()
                return Value((x >> min(sh, w)) & m, w, True)
            return Value(va.val >> sh if sh < w else 0, w, sa)
        wa, sa = self_size(e.a, scope)
        wb, sb = self_size(e.b, scope)
        signed = sa and sb
        va = Value(eval_expr(e.a, scope, w).val, w, signed)
        vb = Value(eval_expr(e.b, scope, w).val, w, signed)
        if op == "+":
            return Value((va.val + vb.val) & m, w, signed)
        if op == "-":
            return Value((va.val - vb.val) & m, w, signed)
        if op == "*":
            return Value((va.as_int() * vb.as_int()) & m, w, signed)
        if op == "&":
            return Value(va.val & vb.val, w, signed)
        if op == "|":
            return Value(va.val | vb.val, w, signed)
        if op == "^":
            return Value(va.val ^ vb.val, w, signed)
        if op in ("~^", "^~"):
            return Value(~(va.val ^ vb.val) & m, w, signed)
        if op in ("/", "%"):
            x, y = va.as_int(), vb.as_int()
            if y == 0:
                raise EvalError(e.loc, "division by zero")
            q = abs(x) // abs(y)
            if (x < 0) != (y < 0):
                q = -q
            r = x - q * y
            return Value((q if op == "/" else r) & m, w, signed)
        if op == "**":
            x, y = va.as_int(), vb.as_int()
            if y < 0:
                raise EvalError(e.loc, "negative exponent")
            return Value(pow(x, y, 1 << w) & m, w, signed)
        raise EvalError(e.loc, f"operator {op!r}")
    if isinstance(e, Ternary):
        c = eval_expr(e.cond, scope, None).val != 0
        _, sa = self_size(e.then, scope)
        _, sb = self_size(e.els, scope)
        branch = e.then if c else e.els
        v = eval_expr(branch, scope, w)
        return Value(v.val, w, sa and sb)
    if isinstance(e, Concat):
        val = 0
        for p in e.parts:  # first part is most significant
            pw = self_size(p, scope)[0]
            val = (val << pw) | eval_expr(p, scope, pw).val
        return Value(val & m, w, False)
    if isinstance(e, Repl):
        n = eval_expr(e.count, scope, None).as_int()
        pw = self_size(e.part, scope)[0]
        pv = eval_expr(e.part, scope, pw).val
        val = 0
        for _ in range(n):
            val = (val << pw) | pv
        return Value(val & m, w, False)
    if isinstance(e, Call):
        if e.func == "$clog2":
            x = eval_expr(e.args[0], scope, None).as_int()
            return Value(clog2(x) & m, w, True)
        raise EvalError(e.loc, f"unknown function {e.func}")
    raise EvalError(getattr(e, "loc", Loc()), f"cannot evaluate "
                                              f"{type(e).__name__}")


def assign_eval(rhs, scope: Scope, lhs_width: int) -> int:
    """Value written to a lhs_width target: rhs evaluated at the final
    width, then truncated (signed values sign-extend up first)."""
    wf = max(lhs_width, self_size(rhs, scope)[0])
    v = eval_expr(rhs, scope, wf)
    return v.val & _mask(lhs_width)


PARAM_WIDTH_CAP = 64


def eval_param(expr, scope: Scope, declared: tuple[int, bool] | None,
               loc: Loc) -> Value:
    """Parameter value: natural width when declared, else the minimum
    width holding the value with a floor of 32; math capped at 64 bits."""
    wf = max(32, self_size(expr, scope)[0])
    if wf > PARAM_WIDTH_CAP:
        raise EvalError(loc, f"parameter expression wider than "
                             f"{PARAM_WIDTH_CAP} bits")
    v = eval_expr(expr, scope, wf)
    if declared is not None:
        width, signed = declared
        return Value(v.val & _mask(width), width, signed)
    x = Value(v.val, wf, v.signed).as_int()
    need = x.bit_length() + (1 if x < 0 else 0)
    width = max(32, need)
    return Value(x & _mask(width), width, v.signed)
