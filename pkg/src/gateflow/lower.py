"""Lower an elaborated design to a flat word-level netlist.

Hierarchy is inlined (net names keep dotted instance paths); always
blocks are symbolically executed into per-target expression trees with
muxes at control joins. Indexed part-selects become SHIFTX cells whose
shift amount is the lowered index expression in bits, mirroring the
generic-shifter representation the part-select pass then optimizes.

Only post-elaboration input is accepted: no parameters, no generates.
"""

from __future__ import annotations

from .diagnostics import DiagnosticError, Loc, err
from .semantics import (
    ConstScope, Scope, Value, eval_expr, self_size,
)
from .svast import (
    Assign, AlwaysComb, AlwaysFF, Binary, Call, Concat, Design, Fill, GenFor,
    GenIf, Ident, Index, IndexedSel, Instance, Module, NetDecl, Num,
    ParamDecl, RangeSel, Repl, SAssign, SCase, SIf, Ternary, Unary,
)
from .wordnet import WordNetlist


class LowerError(DiagnosticError):
    def __init__(self, loc: Loc, msg: str):
        super().__init__([err(loc, msg, "lower")])


class _Sym:
    __slots__ = ("net", "width", "signed", "name")

    def __init__(self, net: int, width: int, signed: bool, name: str):
        self.net = net
        self.width = width
        self.signed = signed
        self.name = name


class _SymScope(Scope):
    """Sizing scope: identifiers resolve to consts or signal shapes
    (signal 'values' are dummies; only width/sign are meaningful)."""

    def __init__(self, consts: dict[str, Value], syms: dict[str, _Sym]):
        self.consts = consts
        self.syms = syms

    def lookup(self, name: str, loc: Loc) -> Value:
        v = self.consts.get(name)
        if v is not None:
            return v
        s = self.syms.get(name)
        if s is not None:
            return Value(0, s.width, s.signed)
        raise LowerError(loc, f"unresolved identifier {name!r}")


class _ModuleFrame:
    def __init__(self, module: Module, path: str):
        self.module = module
        self.path = path
        self.consts: dict[str, Value] = {}
        self.syms: dict[str, _Sym] = {}
        self.scope = _SymScope(self.consts, self.syms)

    def pname(self, name: str) -> str:
        return f"{self.path}.{name}" if self.path else name


class Lowerer:
    def __init__(self, design: Design, top: str):
        self.design = design
        self.mods = {m.name: m for m in design.modules}
        if top not in self.mods:
            raise LowerError(Loc(), f"top module {top!r} not found")
        self.top = top
        self.wn = WordNetlist(top)
        self.clock_net: int | None = None
        # per-signal partial continuous drivers: sym -> list[(lo, w, net)]
        self.partials: dict[_Sym, list[tuple[int, int, int]]] = {}
        self.full_driven: set[_Sym] = set()

    # -- helpers ----------------------------------------------------------

    def const_net(self, value: int, width: int) -> int:
        return self.wn.const(value, width)

    def _try_const(self, e, frame: _ModuleFrame, width: int) -> int | None:
        try:
            v = eval_expr(e, ConstScope(frame.consts), width)
        except DiagnosticError:
            return None
        return self.const_net(v.val, width)

    def extend(self, net: int, width: int, signed: bool) -> int:
        cur = self.wn.width(net)
        if cur == width:
            return net
        if cur > width:
            return self.wn.op("SLICE", [net], width, lo=0)
        if signed:
            msb = self.wn.op("SLICE", [net], 1, lo=cur - 1)
            parts = [net] + [msb] * (width - cur)
            return self.wn.op("CONCAT", parts, width)
        pad = self.const_net(0, width - cur)
        return self.wn.op("CONCAT", [net, pad], width)

    def bool_net(self, net: int) -> int:
        if self.wn.width(net) == 1:
            return net
        zero = self.const_net(0, self.wn.width(net))
        eq = self.wn.op("EQ", [net, zero], 1)
        return self.wn.op("NOT", [eq], 1)

    # -- expression lowering ------------------------------------------------

    def lower_expr(self, e, frame: _ModuleFrame, width: int | None) -> int:
        """Net carrying e at the given context width."""
        scope = frame.scope
        if width is None:
            width = self_size(e, scope)[0]
        w = width
        cn = self._try_const(e, frame, w)
        if cn is not None:
            return cn

        if isinstance(e, Ident):
            sym = frame.syms.get(e.name)
            if sym is None:
                raise LowerError(e.loc, f"unresolved identifier {e.name!r}")
            return self.extend(sym.net, w, sym.signed)
        if isinstance(e, Index):
            return self._lower_select(e, frame, w)
        if isinstance(e, RangeSel):
            return self._lower_select(e, frame, w)
        if isinstance(e, IndexedSel):
            return self._lower_select(e, frame, w)
        if isinstance(e, Unary):
            return self._lower_unary(e, frame, w)
        if isinstance(e, Binary):
            return self._lower_binary(e, frame, w)
        if isinstance(e, Ternary):
            c = self.bool_net(self.lower_expr(e.cond, frame, None))
            a = self.lower_expr(e.then, frame, w)
            b = self.lower_expr(e.els, frame, w)
            return self.wn.op("MUX", [c, a, b], w)
        if isinstance(e, Concat):
            nets = []
            for p in e.parts:  # first part is most significant
                pw = self_size(p, scope)[0]
                nets.append(self.lower_expr(p, frame, pw))
            cat_w = sum(self.wn.width(n) for n in nets)
            cat = self.wn.op("CONCAT", list(reversed(nets)), cat_w)
            return self.extend(cat, w, False)
        if isinstance(e, Repl):
            n = eval_expr(e.count, ConstScope(frame.consts), None).as_int()
            pw = self_size(e.part, scope)[0]
            pn = self.lower_expr(e.part, frame, pw)
            if n == 0:
                raise LowerError(e.loc, "zero replication in net context")
            cat = self.wn.op("CONCAT", [pn] * n, pw * n)
            return self.extend(cat, w, False)
        raise LowerError(getattr(e, "loc", Loc()),
                         f"cannot lower {type(e).__name__}")

    def _base_sym(self, e, frame: _ModuleFrame) -> _Sym:
        sym = frame.syms.get(e.base)
        if sym is None:
            raise LowerError(e.loc, f"unresolved identifier {e.base!r}")
        return sym

    def _lower_select(self, e, frame: _ModuleFrame, w: int) -> int:
        scope = frame.scope
        sym = self._base_sym(e, frame)
        cs = ConstScope(frame.consts)
        if isinstance(e, Index):
            try:
                i = eval_expr(e.idx, cs, None).as_int()
            except DiagnosticError:
                i = None
            if i is not None:
                if 0 <= i < sym.width:
                    bit = self.wn.op("SLICE", [sym.net], 1, lo=i)
                else:
                    bit = self.const_net(0, 1)
                return self.extend(bit, w, False)
            sh = self.lower_expr(e.idx, frame, None)
            bit = self.wn.op("SHIFTX", [sym.net, sh], 1)
            return self.extend(bit, w, False)
        if isinstance(e, RangeSel):
            msb = eval_expr(e.msb, cs, None).as_int()
            lsb = eval_expr(e.lsb, cs, None).as_int()
            if msb < lsb or lsb < 0 or msb >= sym.width:
                raise LowerError(e.loc, f"part-select [{msb}:{lsb}] out of "
                                        f"range on {sym.name}")
            sl = self.wn.op("SLICE", [sym.net], msb - lsb + 1, lo=lsb)
            return self.extend(sl, w, False)
        # indexed select
        sw = eval_expr(e.width, cs, None).as_int()
        if sw < 1:
            raise LowerError(e.loc, "part-select width must be positive")
        try:
            off = eval_expr(e.offset, cs, None).as_int()
        except DiagnosticError:
            off = None
        if off is not None:
            lo = off - sw + 1 if e.down else off
            return self.extend(self._const_slice(sym, lo, sw), w, False)
        off_w = self_size(e.offset, scope)[0]
        if e.down:
            # widen so the subtraction cannot alias a valid offset
            need = max(off_w, (sym.width + sw).bit_length()) + 1
            off_n = self.lower_expr(e.offset, frame, need)
            k = self.const_net(sw - 1, need)
            sh = self.wn.op("SUB", [off_n, k], need)
        else:
            sh = self.lower_expr(e.offset, frame, off_w)
        out = self.wn.op("SHIFTX", [sym.net, sh], sw)
        return self.extend(out, w, False)

    def _const_slice(self, sym: _Sym, lo: int, sw: int) -> int:
        """Constant-offset slice with zero padding outside the vector."""
        if lo >= sym.width or lo + sw <= 0:
            return self.const_net(0, sw)
        parts = []
        if lo < 0:
            parts.append(self.const_net(0, -lo))
            take_lo = 0
        else:
            take_lo = lo
        take_hi = min(sym.width, lo + sw)
        parts.append(self.wn.op("SLICE", [sym.net], take_hi - take_lo,
                                lo=take_lo))
        got = (take_hi - take_lo) + (len(parts) > 1 and -lo or 0)
        if got < sw:
            parts.append(self.const_net(0, sw - got))
        if len(parts) == 1:
            return parts[0]
        return self.wn.op("CONCAT", parts, sw)

    def _lower_unary(self, e: Unary, frame: _ModuleFrame, w: int) -> int:
        scope = frame.scope
        if e.op == "~":
            return self.wn.op("NOT", [self.lower_expr(e.a, frame, w)], w)
        if e.op == "-":
            zero = self.const_net(0, w)
            return self.wn.op("SUB", [zero, self.lower_expr(e.a, frame, w)], w)
        if e.op == "+":
            return self.lower_expr(e.a, frame, w)
        aw = self_size(e.a, scope)[0]
        an = self.lower_expr(e.a, frame, aw)
        if e.op == "!":
            zero = self.const_net(0, aw)
            return self.extend(self.wn.op("EQ", [an, zero], 1), w, False)
        if e.op in ("&", "~&"):
            ones = self.const_net((1 << aw) - 1, aw)
            r = self.wn.op("EQ", [an, ones], 1)
            if e.op == "~&":
                r = self.wn.op("NOT", [r], 1)
            return self.extend(r, w, False)
        if e.op in ("|", "~|"):
            zero = self.const_net(0, aw)
            r = self.wn.op("EQ", [an, zero], 1)
            if e.op == "|":
                r = self.wn.op("NOT", [r], 1)
            return self.extend(r, w, False)
        if e.op in ("^", "~^", "^~"):
            bits = [self.wn.op("SLICE", [an], 1, lo=i) for i in range(aw)]
            r = bits[0]
            for b in bits[1:]:
                r = self.wn.op("XOR", [r, b], 1)
            if e.op != "^":
                r = self.wn.op("NOT", [r], 1)
            return self.extend(r, w, False)
        raise LowerError(e.loc, f"operator {e.op!r}")

    def _narrow_for_mul(self, net: int, signed: bool) -> int:
        """Undo an explicit zero/sign extension so multipliers see their
        natural operand width."""
        drv = None
        for c in self.wn.cells:
            if c.output == net:
                drv = c
                break
        if drv is None or drv.kind != "CONCAT":
            return net
        if len(drv.inputs) < 2:
            return net
        core = drv.inputs[0]
        rest = drv.inputs[1:]
        if not signed:
            for r in rest:
                rc = next((c for c in self.wn.cells if c.output == r), None)
                if rc is None or rc.kind != "CONST" or rc.attrs["value"] != 0:
                    return net
            return core
        # signed: upper parts must all be the replicated top bit of core
        top = None
        for r in rest:
            rc = next((c for c in self.wn.cells if c.output == r), None)
            if rc is None or rc.kind != "SLICE" or self.wn.width(r) != 1:
                return net
            if rc.inputs[0] != core or rc.attrs["lo"] != self.wn.width(core) - 1:
                return net
            top = rc
        return core if top is not None else net

    def _lower_binary(self, e: Binary, frame: _ModuleFrame, w: int) -> int:
        scope = frame.scope
        op = e.op
        if op in ("&&", "||"):
            a = self.bool_net(self.lower_expr(e.a, frame, None))
            b = self.bool_net(self.lower_expr(e.b, frame, None))
            kind = "AND" if op == "&&" else "OR"
            return self.extend(self.wn.op(kind, [a, b], 1), w, False)
        if op in ("==", "!=", "<", "<=", ">", ">="):
            wa, sa = self_size(e.a, scope)
            wb, sb = self_size(e.b, scope)
            wc = max(wa, wb)
            signed = sa and sb
            # operands extend by their own signedness, matching eval_expr
            a = self._lower_ext(e.a, frame, wc, sa)
            b = self._lower_ext(e.b, frame, wc, sb)
            if op in ("==", "!="):
                r = self.wn.op("EQ", [a, b], 1)
                if op == "!=":
                    r = self.wn.op("NOT", [r], 1)
            else:
                if op in ("<", ">="):
                    r = self.wn.op("LT", [a, b], 1, signed=signed)
                else:
                    r = self.wn.op("LT", [b, a], 1, signed=signed)
                if op in (">=", "<="):
                    r = self.wn.op("NOT", [r], 1)
            return self.extend(r, w, False)
        if op in ("<<", ">>", "<<<", ">>>"):
            _, sa = self_size(e.a, scope)
            a = self.lower_expr(e.a, frame, w)
            sh = self.lower_expr(e.b, frame, None)
            if op in ("<<", "<<<"):
                return self.wn.op("SHL", [a, sh], w)
            return self.wn.op("SHR", [a, sh], w,
                              signed=(op == ">>>" and sa))
        wa, sa = self_size(e.a, scope)
        wb, sb = self_size(e.b, scope)
        signed = sa and sb
        if op in ("+", "-", "*"):
            a = self.lower_expr(e.a, frame, w)
            b = self.lower_expr(e.b, frame, w)
            kind = {"+": "ADD", "-": "SUB", "*": "MUL"}[op]
            if kind == "MUL":
                a = self._narrow_for_mul(a, signed)
                b = self._narrow_for_mul(b, signed)
            return self.wn.op(kind, [a, b], w, signed=signed)
        if op in ("&", "|", "^", "~^", "^~"):
            a = self.lower_expr(e.a, frame, w)
            b = self.lower_expr(e.b, frame, w)
            if op in ("~^", "^~"):
                x = self.wn.op("XOR", [a, b], w)
                return self.wn.op("NOT", [x], w)
            kind = {"&": "AND", "|": "OR", "^": "XOR"}[op]
            return self.wn.op(kind, [a, b], w)
        if op in ("/", "%", "**"):
            raise LowerError(e.loc, f"unsupported: non-constant {op!r}")
        raise LowerError(e.loc, f"operator {op!r}")

    def _lower_ext(self, e, frame: _ModuleFrame, w: int, signed: bool) -> int:
        sw = self_size(e, frame.scope)[0]
        n = self.lower_expr(e, frame, sw)
        return self.extend(n, w, signed)

    # -- statement lowering ---------------------------------------------

    def _exec_stmts(self, stmts, frame: _ModuleFrame,
                    env: dict[_Sym, int], ff_fallback: bool, loc: Loc):
        for s in stmts:
            if isinstance(s, SAssign):
                self._exec_assign(s, frame, env, ff_fallback)
            elif isinstance(s, SIf):
                c = self.bool_net(self.lower_expr(s.cond, frame, None))
                env_t = dict(env)
                env_e = dict(env)
                self._exec_stmts(s.then, frame, env_t, ff_fallback, s.loc)
                self._exec_stmts(s.els, frame, env_e, ff_fallback, s.loc)
                self._merge(c, env_t, env_e, env, frame, ff_fallback, s.loc)
            elif isinstance(s, SCase):
                self._exec_case(s, frame, env, ff_fallback)
            else:
                raise LowerError(getattr(s, "loc", loc),
                                 f"cannot lower {type(s).__name__}")

    def _current(self, sym: _Sym, env, ff_fallback: bool, loc: Loc) -> int:
        got = env.get(sym)
        if got is not None:
            return got
        if ff_fallback:
            return sym.net
        raise LowerError(loc, f"{sym.name!r} read or partially assigned "
                              f"before a full assignment in always_comb")

    def _exec_assign(self, s: SAssign, frame, env, ff_fallback: bool):
        lhs = s.lhs
        base = lhs.name if isinstance(lhs, Ident) else lhs.base
        sym = frame.syms.get(base)
        if sym is None:
            raise LowerError(s.loc, f"unresolved target {base!r}")
        if isinstance(lhs, Ident):
            env[sym] = self.lower_expr(s.rhs, frame, sym.width)
            return
        cs = ConstScope(frame.consts)
        cur = self._current(sym, env, ff_fallback, s.loc)
        if isinstance(lhs, Index):
            try:
                i = eval_expr(lhs.idx, cs, None).as_int()
            except DiagnosticError:
                i = None
            if i is not None:
                env[sym] = self._splice_const(cur, sym, i, 1,
                                              self.lower_expr(s.rhs, frame, 1))
                return
            sh = self.lower_expr(lhs.idx, frame, None)
            env[sym] = self._splice_dyn(cur, sym, sh, 1,
                                        self.lower_expr(s.rhs, frame, 1),
                                        s.loc)
            return
        if isinstance(lhs, RangeSel):
            msb = eval_expr(lhs.msb, cs, None).as_int()
            lsb = eval_expr(lhs.lsb, cs, None).as_int()
            if msb < lsb or lsb < 0 or msb >= sym.width:
                raise LowerError(s.loc, f"part-select [{msb}:{lsb}] out of "
                                        f"range on {sym.name}")
            w = msb - lsb + 1
            env[sym] = self._splice_const(cur, sym, lsb, w,
                                          self.lower_expr(s.rhs, frame, w))
            return
        # indexed select target
        sw = eval_expr(lhs.width, cs, None).as_int()
        try:
            off = eval_expr(lhs.offset, cs, None).as_int()
        except DiagnosticError:
            off = None
        rhs = self.lower_expr(s.rhs, frame, sw)
        if off is not None:
            lo = off - sw + 1 if lhs.down else off
            env[sym] = self._splice_const(cur, sym, lo, sw, rhs)
            return
        if lhs.down:
            raise LowerError(s.loc, "variable descending part-select "
                                    "target is not supported")
        sh = self.lower_expr(lhs.offset, frame, None)
        env[sym] = self._splice_dyn(cur, sym, sh, sw, rhs, s.loc)

    def _splice_const(self, cur: int, sym: _Sym, lo: int, w: int,
                      rhs: int) -> int:
        if lo < 0 or lo + w > sym.width:
            raise LowerError(Loc(), f"write to [{lo}+:{w}] out of range on "
                                    f"{sym.name}")
        parts = []
        if lo > 0:
            parts.append(self.wn.op("SLICE", [cur], lo, lo=0))
        parts.append(rhs)
        if lo + w < sym.width:
            parts.append(self.wn.op("SLICE", [cur], sym.width - (lo + w),
                                    lo=lo + w))
        if len(parts) == 1:
            return parts[0]
        return self.wn.op("CONCAT", parts, sym.width)

    def _splice_dyn(self, cur: int, sym: _Sym, sh: int, w: int, rhs: int,
                    loc: Loc) -> int:
        width = sym.width
        mask = self.const_net((1 << w) - 1, width)
        shifted_mask = self.wn.op("SHL", [mask, sh], width)
        inv = self.wn.op("NOT", [shifted_mask], width)
        kept = self.wn.op("AND", [cur, inv], width)
        rhs_w = self.extend(rhs, width, False)
        shifted_rhs = self.wn.op("SHL", [rhs_w, sh], width)
        return self.wn.op("OR", [kept, shifted_rhs], width)

    def _merge(self, cond: int, env_t, env_e, env, frame,
               ff_fallback: bool, loc: Loc):
        keys = set(env_t) | set(env_e)
        for sym in sorted(keys, key=lambda s: s.name):
            vt = env_t.get(sym)
            ve = env_e.get(sym)
            if vt == ve:
                env[sym] = vt
                continue
            if vt is None:
                vt = self._current(sym, env, ff_fallback, loc)
            if ve is None:
                ve = self._current(sym, env, ff_fallback, loc)
            env[sym] = self.wn.op("MUX", [cond, vt, ve], sym.width)

    def _exec_case(self, s: SCase, frame, env, ff_fallback: bool):
        scope = frame.scope
        wc = self_size(s.subject, scope)[0]
        label_consts: list[int] = []
        all_const = True
        for labels, _ in s.items:
            for l in labels or ():
                wc = max(wc, self_size(l, scope)[0])
        subj = self.lower_expr(s.subject, frame, wc)
        arms = []  # (match_net | None for default, env_after)
        default_env = None
        for labels, body in s.items:
            env_i = dict(env)
            self._exec_stmts(body, frame, env_i, ff_fallback, s.loc)
            if labels is None:
                default_env = env_i
                continue
            match = None
            for l in labels:
                ln = self.lower_expr(l, frame, wc)
                eq = self.wn.op("EQ", [subj, ln], 1)
                match = eq if match is None else self.wn.op("OR", [match, eq], 1)
                try:
                    label_consts.append(
                        eval_expr(l, ConstScope(frame.consts), wc).val)
                except DiagnosticError:
                    all_const = False
            arms.append((match, env_i))

        covered = all_const and wc <= 20 and (
            len(set(label_consts)) == (1 << wc))
        keys = set()
        for _, env_i in arms:
            keys |= set(env_i)
        if default_env is not None:
            keys |= set(default_env)
        keys |= set(env)
        for sym in sorted(keys, key=lambda x: x.name):
            if default_env is not None:
                cur = default_env.get(sym)
                if cur is None and sym in env:
                    cur = env[sym]
                if cur is None:
                    cur = self._current(sym, env, ff_fallback, s.loc)
            elif covered:
                cur = self.const_net(0, sym.width)  # unreachable terminal
            elif sym in env:
                cur = env[sym]
            else:
                cur = self._current(sym, env, ff_fallback, s.loc)
            for match, env_i in reversed(arms):
                v = env_i.get(sym)
                if v is None:
                    v = env.get(sym)
                if v is None:
                    v = self._current(sym, env, ff_fallback, s.loc)
                if v == cur:
                    continue
                cur = self.wn.op("MUX", [match, v, cur], sym.width)
            env[sym] = cur

    # -- module instantiation ----------------------------------------------

    def run(self) -> WordNetlist:
        top = self.mods[self.top]
        frame = _ModuleFrame(top, "")
        port_nets: dict[str, int] = {}
        for p in top.ports:
            width = self._port_width(p, frame)
            net = self.wn.new_net(width, p.name)
            port_nets[p.name] = net
            frame.syms[p.name] = _Sym(net, width, p.signed, p.name)
        self._lower_module(top, frame)
        for p in top.ports:
            if p.direction == "input":
                self.wn.inputs.append((p.name, port_nets[p.name]))
            else:
                self.wn.outputs.append((p.name, port_nets[p.name]))
        self._finish_partials()
        if self.clock_net is not None:
            clk_names = [n for n, net in self.wn.inputs
                         if net == self.clock_net]
            if not clk_names:
                raise LowerError(Loc(), "register clock is not a top-level "
                                        "input")
            self.wn.clock = clk_names[0]
            self.wn.inputs = [
                (n, net) for n, net in self.wn.inputs
                if net != self.clock_net
            ]
        self.wn.validate()
        return self.wn

    def _port_width(self, p, frame: _ModuleFrame) -> int:
        if p.range_ is None:
            return 1
        cs = ConstScope(frame.consts)
        msb = eval_expr(p.range_[0], cs, None).as_int()
        lsb = eval_expr(p.range_[1], cs, None).as_int()
        if lsb != 0 or msb < 0:
            raise LowerError(p.loc, f"unsupported vector range [{msb}:{lsb}]")
        return msb + 1

    def _lower_module(self, m: Module, frame: _ModuleFrame):
        for it in m.items:
            if isinstance(it, ParamDecl):
                if it.kind != "localparam":
                    raise LowerError(it.loc, "parameter survived elaboration")
                v = eval_expr(it.value, ConstScope(frame.consts), None)
                if it.range_ is not None:
                    cs = ConstScope(frame.consts)
                    msb = eval_expr(it.range_[0], cs, None).as_int()
                    lsb = eval_expr(it.range_[1], cs, None).as_int()
                    width = msb - lsb + 1
                    v = Value(v.val & ((1 << width) - 1), width, it.signed)
                frame.consts[it.name] = v
            elif isinstance(it, (GenFor, GenIf)):
                raise LowerError(it.loc, "generate survived elaboration")

        for it in m.items:
            if isinstance(it, NetDecl):
                width = 1
                if it.range_ is not None:
                    cs = ConstScope(frame.consts)
                    msb = eval_expr(it.range_[0], cs, None).as_int()
                    width = msb + 1
                name = frame.pname(it.name)
                net = self.wn.new_net(width, name)
                frame.syms[it.name] = _Sym(net, width, it.signed, name)

        for it in m.items:
            if isinstance(it, Assign):
                self._lower_cont_assign(it.lhs, it.rhs, frame)
            elif isinstance(it, AlwaysComb):
                env: dict[_Sym, int] = {}
                self._exec_stmts(it.body, frame, env, False, it.loc)
                for sym in sorted(env, key=lambda s: s.name):
                    self._drive(sym, env[sym], it.loc)
            elif isinstance(it, AlwaysFF):
                self._lower_ff(it, frame)
            elif isinstance(it, Instance):
                self._lower_instance(it, frame)

    def _lower_ff(self, it: AlwaysFF, frame: _ModuleFrame):
        clk = frame.syms.get(it.clock)
        if clk is None:
            raise LowerError(it.loc, f"clock {it.clock!r} is not a signal")
        if self.clock_net is None:
            self.clock_net = clk.net
        elif self.clock_net != clk.net:
            raise LowerError(it.loc, "multiple clock nets (single-clock "
                                     "subset)")
        env: dict[_Sym, int] = {}
        self._exec_stmts(it.body, frame, env, True, it.loc)
        for sym in sorted(env, key=lambda s: s.name):
            if env[sym] == sym.net:
                continue
            self.wn.add_cell("DFF", [env[sym]], sym.net)
            self.full_driven.add(sym)

    def _lower_cont_assign(self, lhs, rhs, frame: _ModuleFrame):
        base = lhs.name if isinstance(lhs, Ident) else lhs.base
        sym = frame.syms.get(base)
        if sym is None:
            raise LowerError(lhs.loc, f"unresolved target {base!r}")
        if isinstance(lhs, Ident):
            net = self.lower_expr(rhs, frame, sym.width)
            self._drive(sym, net, lhs.loc)
            return
        cs = ConstScope(frame.consts)
        if isinstance(lhs, Index):
            lo = eval_expr(lhs.idx, cs, None).as_int()
            w = 1
        elif isinstance(lhs, RangeSel):
            msb = eval_expr(lhs.msb, cs, None).as_int()
            lo = eval_expr(lhs.lsb, cs, None).as_int()
            w = msb - lo + 1
        else:
            off = eval_expr(lhs.offset, cs, None).as_int()
            w = eval_expr(lhs.width, cs, None).as_int()
            lo = off - w + 1 if lhs.down else off
        if lo < 0 or w < 1 or lo + w > sym.width:
            raise LowerError(lhs.loc, f"select [{lo}+:{w}] out of range on "
                                      f"{sym.name}")
        net = self.lower_expr(rhs, frame, w)
        self.partials.setdefault(sym, []).append((lo, w, net))

    def _drive(self, sym: _Sym, net: int, loc: Loc):
        if sym in self.full_driven or sym in self.partials:
            raise LowerError(loc, f"multiple drivers on {sym.name!r}")
        self.full_driven.add(sym)
        if net != sym.net:
            self.wn.add_cell("CONCAT", [net], sym.net)

    def _finish_partials(self):
        for sym, pieces in self.partials.items():
            if sym in self.full_driven:
                raise LowerError(Loc(), f"multiple drivers on {sym.name!r}")
            pieces = sorted(pieces)
            pos = 0
            nets = []
            for lo, w, net in pieces:
                if lo < pos:
                    raise LowerError(Loc(), f"overlapping drivers on "
                                            f"{sym.name!r}")
                if lo > pos:
                    raise LowerError(Loc(), f"bits [{lo-1}:{pos}] of "
                                            f"{sym.name!r} undriven")
                nets.append(net)
                pos = lo + w
            if pos != sym.width:
                raise LowerError(Loc(), f"bits [{sym.width-1}:{pos}] of "
                                        f"{sym.name!r} undriven")
            self.wn.add_cell("CONCAT", nets, sym.net)

    def _lower_instance(self, it: Instance, frame: _ModuleFrame):
        child = self.mods.get(it.module)
        if child is None:
            raise LowerError(it.loc, f"undeclared module {it.module!r}")
        if it.params:
            raise LowerError(it.loc, "parameter binding survived elaboration")
        path = frame.pname(it.name)
        cframe = _ModuleFrame(child, path)
        ports = {p.name: p for p in child.ports}
        conns = dict(it.ports)
        for pname in conns:
            if pname not in ports:
                raise LowerError(it.loc, f"no port {pname!r} on {it.module}")
        out_targets: list[tuple[_Sym, object]] = []
        for p in child.ports:
            conn = conns.get(p.name)
            width = self._child_port_width(p, child, cframe)
            if p.direction == "input":
                if conn is None:
                    raise LowerError(it.loc,
                                     f"input port {p.name!r} unconnected")
                ew = self_size(conn, frame.scope)[0]
                if ew != width:
                    raise LowerError(
                        it.loc, f"width mismatch on {it.name}.{p.name}: "
                                f"port {width}, expression {ew}")
                net = self.lower_expr(conn, frame, width)
                cframe.syms[p.name] = _Sym(net, width, p.signed,
                                           f"{path}.{p.name}")
            else:
                net = self.wn.new_net(width, f"{path}.{p.name}")
                cframe.syms[p.name] = _Sym(net, width, p.signed,
                                           f"{path}.{p.name}")
                if conn is not None:
                    out_targets.append((cframe.syms[p.name], conn))
        self._lower_module(child, cframe)
        for child_sym, conn in out_targets:
            self._connect_output(conn, child_sym, frame, it.loc)

    def _child_port_width(self, p, child: Module, cframe: _ModuleFrame) -> int:
        # localparams of the child needed for port ranges come first
        for it in child.items:
            if isinstance(it, ParamDecl) and it.name not in cframe.consts:
                try:
                    v = eval_expr(it.value, ConstScope(cframe.consts), None)
                    cframe.consts[it.name] = v
                except DiagnosticError:
                    pass
        return self._port_width(p, cframe)

    def _connect_output(self, lhs, child_sym: _Sym, frame: _ModuleFrame,
                        loc: Loc):
        base = lhs.name if isinstance(lhs, Ident) else lhs.base
        sym = frame.syms.get(base)
        if sym is None:
            raise LowerError(loc, f"unresolved connection target {base!r}")
        if isinstance(lhs, Ident):
            if sym.width != child_sym.width:
                raise LowerError(loc, f"width mismatch connecting "
                                      f"{child_sym.name} to {sym.name}")
            self._drive(sym, child_sym.net, loc)
            return
        cs = ConstScope(frame.consts)
        if isinstance(lhs, Index):
            lo, w = eval_expr(lhs.idx, cs, None).as_int(), 1
        elif isinstance(lhs, RangeSel):
            msb = eval_expr(lhs.msb, cs, None).as_int()
            lo = eval_expr(lhs.lsb, cs, None).as_int()
            w = msb - lo + 1
        else:
            off = eval_expr(lhs.offset, cs, None).as_int()
            w = eval_expr(lhs.width, cs, None).as_int()
            lo = off - w + 1 if lhs.down else off
        if w != child_sym.width:
            raise LowerError(loc, f"width mismatch connecting "
                                  f"{child_sym.name} to {sym.name}")
        self.partials.setdefault(sym, []).append((lo, w, child_sym.net))


def lower_words(design: Design, top: str) -> WordNetlist:
    return Lowerer(design, top).run()
