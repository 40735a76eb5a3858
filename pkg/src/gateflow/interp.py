"""Reference interpreter over the source AST.

Evaluates designs directly (parameters, generates, and hierarchy are
handled dynamically with scoped environments), so it shares none of the
pre-elaborator's rewriting machinery and can serve as its oracle. Used
through the same step() protocol as the netlist simulators.

Model: one implicit global clock; all always_ff processes fire together
on step boundaries; registers reset to zero; combinational processes
settle in dependency order (cycles are rejected at build time). Port
connections must match widths exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import DiagnosticError, Loc, err
from .semantics import (
    Scope, Value, assign_eval, eval_expr, eval_param, self_size,
)
from .svast import (
    Assign, AlwaysComb, AlwaysFF, Design, GenFor, GenIf, Ident, Index,
    IndexedSel, Instance, Module, NetDecl, ParamDecl, RangeSel, SAssign,
    SCase, SIf,
)


class InterpError(DiagnosticError):
    def __init__(self, loc: Loc, msg: str):
        super().__init__([err(loc, msg, "interp")])


class Signal:
    __slots__ = ("name", "width", "signed", "value", "is_ff")

    def __init__(self, name: str, width: int, signed: bool):
        self.name = name
        self.width = width
        self.signed = signed
        self.value = 0
        self.is_ff = False

    def __repr__(self):
        return f"Signal({self.name}:{self.width})"


class _PortRef:
    """Marker lhs/rhs wiring a child port signal."""

    __slots__ = ("sig",)

    def __init__(self, sig: Signal):
        self.sig = sig


class _Env(Scope):
    """Lexical scope chain resolving names to constants or signals."""

    def __init__(self, parent: "_Env | None" = None):
        self.parent = parent
        self.consts: dict[str, Value] = {}
        self.signals: dict[str, Signal] = {}

    def find_const(self, name):
        env = self
        while env is not None:
            if name in env.consts:
                return env.consts[name]
            if name in env.signals:
                return None
            env = env.parent
        return None

    def find_signal(self, name):
        env = self
        while env is not None:
            if name in env.signals:
                return env.signals[name]
            if name in env.consts:
                return None
            env = env.parent
        return None

    def lookup(self, name: str, loc: Loc) -> Value:
        env = self
        while env is not None:
            if name in env.consts:
                return env.consts[name]
            if name in env.signals:
                s = env.signals[name]
                return Value(s.value, s.width, s.signed)
            env = env.parent
        raise InterpError(loc, f"unresolved identifier {name!r}")


class _ConstOnly(Scope):
    def __init__(self, env: _Env):
        self.env = env

    def lookup(self, name: str, loc: Loc) -> Value:
        v = self.env.find_const(name)
        if v is None:
            raise InterpError(loc, f"{name!r} is not a constant")
        return v


class _ExecEnv(Scope):
    """Read scope during process execution: shadowed values win."""

    def __init__(self, env: _Env, shadow: dict):
        self.env = env
        self.shadow = shadow

    def lookup(self, name: str, loc: Loc) -> Value:
        sig = self.env.find_signal(name)
        if sig is not None and sig in self.shadow:
            return Value(self.shadow[sig], sig.width, sig.signed)
        return self.env.lookup(name, loc)


@dataclass
class _Proc:
    kind: str  # "assign" | "comb" | "ff"
    env: _Env
    reads: set = field(default_factory=set)
    writes: set = field(default_factory=set)
    lhs: object = None
    rhs: object = None
    body: tuple = ()
    clock: Signal | None = None
    # constant (lo, width) for continuous partial assigns
    bits: tuple[int, int] | None = None
    loc: Loc = field(default_factory=Loc)


def _write_slice(sig: Signal, lo: int, w: int, value: int,
                 shadow: dict | None):
    cur = shadow[sig] if shadow is not None and sig in shadow else sig.value
    if lo < 0:
        value >>= -lo
        w += lo
        lo = 0
    if lo >= sig.width or w <= 0:
        new = cur
    else:
        w = min(w, sig.width - lo)
        mask = ((1 << w) - 1) << lo
        new = (cur & ~mask) | ((value << lo) & mask)
    if shadow is not None:
        shadow[sig] = new
    else:
        sig.value = new


class AstSim:
    """Cycle-level simulator for one top module of a parsed design."""

    def __init__(self, design: Design, top: str,
                 overrides: dict[str, int] | None = None):
        self.design = design
        self.mods = {m.name: m for m in design.modules}
        if top not in self.mods:
            raise InterpError(Loc(), f"top module {top!r} not found")
        self.procs: list[_Proc] = []
        self.ffs: list[Signal] = []
        binds = {
            k: Value(v & ((1 << 64) - 1), 64, True)
            for k, v in (overrides or {}).items()
        }
        self.top_env = self._build_module(self.mods[top], binds, Loc(), 0)
        topm = self.mods[top]
        self._top_input_sigs = {
            self.top_env.signals[p.name]: p.name
            for p in topm.ports if p.direction == "input"
        }
        self.clock_name = self._resolve_clocks()
        self.ports_in = [
            (p.name, self.top_env.signals[p.name].width)
            for p in topm.ports
            if p.direction == "input" and p.name != self.clock_name
        ]
        self.ports_out = [
            (p.name, self.top_env.signals[p.name].width)
            for p in topm.ports if p.direction == "output"
        ]
        self._order = self._schedule()
        self.is_sequential = bool(self.ffs)
        self.reset()

    # -- construction ---------------------------------------------------

    def _build_module(self, m: Module, binds: dict[str, Value], loc: Loc,
                      depth: int) -> _Env:
        if depth > 64:
            raise InterpError(loc, "instantiation too deep (recursion?)")
        env = _Env()
        decls = [it for it in m.items if isinstance(it, ParamDecl)]
        param_names = {d.name for d in decls if d.kind == "parameter"}
        for o in binds:
            if o not in param_names:
                raise InterpError(loc, f"override of nonexistent parameter "
                                       f"{o!r} in {m.name}")
        # declaration order with retry rounds covers forward references
        pending = list(decls)
        while pending:
            nxt = []
            for d in pending:
                try:
                    env.consts[d.name] = self._eval_param_decl(d, env, binds)
                except DiagnosticError:
                    nxt.append(d)
            if len(nxt) == len(pending):
                raise InterpError(nxt[0].loc,
                                  f"unresolvable parameter {nxt[0].name!r}")
            pending = nxt
        for p in m.ports:
            env.signals[p.name] = self._make_signal(p.name, p.range_,
                                                    p.signed, env, p.loc)
        self._build_items(list(m.items), env, loc, depth)
        return env

    def _eval_param_decl(self, d: ParamDecl, env: _Env,
                         binds: dict[str, Value]) -> Value:
        declared = None
        if d.range_ is not None:
            msb = eval_expr(d.range_[0], env, None).as_int()
            lsb = eval_expr(d.range_[1], env, None).as_int()
            declared = (msb - lsb + 1, d.signed)
        elif d.signed:
            declared = (32, True)
        if d.kind == "parameter" and d.name in binds:
            b = binds[d.name]
            if declared is not None:
                return Value(b.val & ((1 << declared[0]) - 1), declared[0],
                             declared[1])
            x = b.as_int()
            w = max(32, x.bit_length() + (1 if x < 0 else 0))
            return Value(x & ((1 << w) - 1), w, b.signed)
        return eval_param(d.value, env, declared, d.loc)

    def _make_signal(self, name: str, rng, signed: bool, env: _Env,
                     loc: Loc) -> Signal:
        if rng is None:
            return Signal(name, 1, signed)
        msb = eval_expr(rng[0], env, None).as_int()
        lsb = eval_expr(rng[1], env, None).as_int()
        if lsb != 0 or msb < 0:
            raise InterpError(loc, f"unsupported vector range [{msb}:{lsb}]")
        return Signal(name, msb + 1, signed)

    def _build_items(self, items, scope_env: _Env, loc: Loc, depth: int):
        for it in items:
            if isinstance(it, ParamDecl):
                if it.name not in scope_env.consts:
                    scope_env.consts[it.name] = self._eval_param_decl(
                        it, scope_env, {})
            elif isinstance(it, NetDecl):
                scope_env.signals[it.name] = self._make_signal(
                    it.name, it.range_, it.signed, scope_env, it.loc)
            elif isinstance(it, Assign):
                self.procs.append(
                    _Proc("assign", scope_env, lhs=it.lhs, rhs=it.rhs,
                          loc=it.loc))
            elif isinstance(it, AlwaysComb):
                self.procs.append(
                    _Proc("comb", scope_env, body=it.body, loc=it.loc))
            elif isinstance(it, AlwaysFF):
                clk = scope_env.find_signal(it.clock)
                if clk is None:
                    raise InterpError(it.loc,
                                      f"clock {it.clock!r} is not a signal")
                self.procs.append(
                    _Proc("ff", scope_env, body=it.body, clock=clk,
                          loc=it.loc))
            elif isinstance(it, Instance):
                self._build_instance(it, scope_env, depth)
            elif isinstance(it, GenFor):
                self._build_genfor(it, scope_env, depth)
            elif isinstance(it, GenIf):
                cond = eval_expr(it.cond, _ConstOnly(scope_env), None)
                body = it.then if cond.val != 0 else it.els
                child = _Env(scope_env)
                self._build_items(list(body), child, it.loc, depth)
            else:
                raise InterpError(getattr(it, "loc", Loc()),
                                  f"cannot interpret {type(it).__name__}")

    def _build_genfor(self, it: GenFor, scope_env: _Env, depth: int):
        cscope = _ConstOnly(scope_env)
        cur = eval_expr(it.init, cscope, None).as_int()
        count = 0
        while True:
            bound = eval_expr(it.bound, cscope, None).as_int()
            ok = {
                "<": cur < bound, "<=": cur <= bound, ">": cur > bound,
                ">=": cur >= bound, "!=": cur != bound,
            }[it.cond_op]
            if not ok:
                return
            count += 1
            if count > 65536:
                raise InterpError(it.loc, "generate loop exceeds unroll limit")
            child = _Env(scope_env)
            child.consts[it.var] = Value(cur & 0xFFFFFFFF, 32, True)
            self._build_items(list(it.body), child, it.loc, depth)
            cur += it.step

    def _build_instance(self, it: Instance, env: _Env, depth: int):
        child_mod = self.mods.get(it.module)
        if child_mod is None:
            raise InterpError(it.loc, f"undeclared module {it.module!r}")
        binds = {}
        for pname, pexpr in it.params:
            binds[pname] = eval_expr(pexpr, _ConstOnly(env), None)
        child_env = self._build_module(child_mod, binds, it.loc, depth + 1)
        ports = {p.name: p for p in child_mod.ports}
        for pname, pexpr in it.ports:
            port = ports.get(pname)
            if port is None:
                raise InterpError(it.loc, f"no port {pname!r} on {it.module}")
            child_sig = child_env.signals[pname]
            if pexpr is None:
                if port.direction == "input":
                    raise InterpError(it.loc,
                                      f"input port {pname!r} unconnected")
                continue
            if port.direction == "input":
                ew = self_size(pexpr, env)[0]
                if ew != child_sig.width:
                    raise InterpError(
                        it.loc,
                        f"width mismatch on {it.name}.{pname}: port "
                        f"{child_sig.width}, expression {ew}",
                    )
                self.procs.append(
                    _Proc("assign", env, lhs=_PortRef(child_sig), rhs=pexpr,
                          loc=it.loc))
            else:
                sig = env.find_signal(
                    pexpr.name if isinstance(pexpr, Ident)
                    else getattr(pexpr, "base", None))
                if sig is None:
                    raise InterpError(it.loc, f"output port {pname!r} must "
                                              f"connect to a net")
                lo, w = self._const_bits(pexpr, env)
                if w != child_sig.width:
                    raise InterpError(
                        it.loc,
                        f"width mismatch on {it.name}.{pname}: port "
                        f"{child_sig.width}, target {w}",
                    )
                self.procs.append(
                    _Proc("assign", env, lhs=pexpr, rhs=_PortRef(child_sig),
                          loc=it.loc))

    def _const_bits(self, lhs, env: _Env) -> tuple[int, int]:
        """Constant (lo, width) of an assignment target."""
        cscope = _ConstOnly(env)
        base = lhs.name if isinstance(lhs, Ident) else lhs.base
        sig = env.find_signal(base)
        if sig is None:
            raise InterpError(lhs.loc, f"assignment to non-signal {base!r}")
        if isinstance(lhs, Ident):
            return 0, sig.width
        if isinstance(lhs, Index):
            return eval_expr(lhs.idx, cscope, None).val, 1
        if isinstance(lhs, RangeSel):
            msb = eval_expr(lhs.msb, cscope, None).as_int()
            lsb = eval_expr(lhs.lsb, cscope, None).as_int()
            if msb < lsb or lsb < 0:
                raise InterpError(lhs.loc, f"bad part-select [{msb}:{lsb}]")
            return lsb, msb - lsb + 1
        if isinstance(lhs, IndexedSel):
            off = eval_expr(lhs.offset, cscope, None).as_int()
            w = eval_expr(lhs.width, cscope, None).as_int()
            return (off - w + 1 if lhs.down else off), w
        raise InterpError(lhs.loc, "invalid assignment target")

    # -- clock resolution ---------------------------------------------------

    def _resolve_clocks(self) -> str | None:
        clocks = {p.clock for p in self.procs if p.kind == "ff"}
        if not clocks:
            return None
        # identity wiring: child port <- plain parent identifier
        src: dict[Signal, Signal] = {}
        for p in self.procs:
            if p.kind != "assign":
                continue
            if isinstance(p.lhs, _PortRef) and isinstance(p.rhs, Ident):
                s = p.env.find_signal(p.rhs.name)
                if s is not None:
                    src[p.lhs.sig] = s
        names = set()
        for clk in clocks:
            cur = clk
            for _ in range(128):
                if cur in self._top_input_sigs:
                    break
                if cur not in src:
                    raise InterpError(
                        Loc(), f"clock {cur.name!r} is not wired directly "
                               f"from a top-level input")
                cur = src[cur]
            names.add(self._top_input_sigs[cur])
        if len(names) != 1:
            raise InterpError(Loc(), f"multiple clocks: {sorted(names)}")
        return names.pop()

    # -- scheduling ----------------------------------------------------------

    def _scan_expr_reads(self, e, env: _Env, reads: set):
        if isinstance(e, _PortRef):
            reads.add(e.sig)
            return
        if isinstance(e, Ident):
            s = env.find_signal(e.name)
            if s is not None:
                reads.add(s)
            return
        if isinstance(e, (Index, RangeSel, IndexedSel)):
            s = env.find_signal(e.base)
            if s is not None:
                reads.add(s)
            for f in ("idx", "msb", "lsb", "offset", "width"):
                v = getattr(e, f, None)
                if v is not None and not isinstance(v, (bool, str)):
                    self._scan_expr_reads(v, env, reads)
            return
        for f in getattr(e, "__dataclass_fields__", {}):
            if f == "loc":
                continue
            v = getattr(e, f)
            if isinstance(v, tuple):
                for x in v:
                    if hasattr(x, "__dataclass_fields__"):
                        self._scan_expr_reads(x, env, reads)
            elif hasattr(v, "__dataclass_fields__"):
                self._scan_expr_reads(v, env, reads)

    def _proc_io(self, p: _Proc):
        reads: set = set()
        writes: set = set()
        if p.kind == "assign":
            if isinstance(p.rhs, _PortRef):
                reads.add(p.rhs.sig)
            else:
                self._scan_expr_reads(p.rhs, p.env, reads)
            if isinstance(p.lhs, _PortRef):
                writes.add(p.lhs.sig)
                p.bits = (0, p.lhs.sig.width)
            else:
                lo, w = self._const_bits(p.lhs, p.env)
                sig = p.env.find_signal(
                    p.lhs.name if isinstance(p.lhs, Ident) else p.lhs.base)
                writes.add(sig)
                p.bits = (lo, w)
        else:
            assigned_full: set = set()
            partial_reads: set = set()

            def guarded(e):
                fresh: set = set()
                self._scan_expr_reads(e, p.env, fresh)
                reads.update(s for s in fresh if s not in assigned_full)

            def scan_stmt(s):
                if isinstance(s, SAssign):
                    guarded(s.rhs)
                    base = (s.lhs.name if isinstance(s.lhs, Ident)
                            else s.lhs.base)
                    sig = p.env.find_signal(base)
                    if sig is None:
                        raise InterpError(s.loc,
                                          f"assignment to non-signal {base!r}")
                    writes.add(sig)
                    if isinstance(s.lhs, Ident):
                        assigned_full.add(sig)
                    else:
                        for f in ("idx", "msb", "lsb", "offset", "width"):
                            v = getattr(s.lhs, f, None)
                            if v is not None and not isinstance(v, (bool, str)):
                                guarded(v)
                        if p.kind == "comb" and sig not in assigned_full:
                            partial_reads.add(sig)
                elif isinstance(s, SIf):
                    guarded(s.cond)
                    for x in s.then + s.els:
                        scan_stmt(x)
                elif isinstance(s, SCase):
                    guarded(s.subject)
                    for labels, body in s.items:
                        for l in labels or ():
                            guarded(l)
                        for x in body:
                            scan_stmt(x)

            for s in p.body:
                scan_stmt(s)
            reads.update(partial_reads)
        p.reads, p.writes = reads, writes

    def _schedule(self) -> list[_Proc]:
        for p in self.procs:
            self._proc_io(p)
            if p.kind == "ff":
                for s in p.writes:
                    s.is_ff = True
                    if s not in self.ffs:
                        self.ffs.append(s)
        # driver rules: ff targets only from ff procs; comb/assign targets
        # single full driver or non-overlapping constant-range assigns
        comb_writers: dict[Signal, list[_Proc]] = {}
        ff_writers: dict[Signal, int] = {}
        for p in self.procs:
            for s in p.writes:
                if p.kind != "ff" and s.is_ff:
                    raise InterpError(p.loc,
                                      f"{s.name!r} driven by both register "
                                      f"and combinational logic")
                if p.kind != "ff":
                    comb_writers.setdefault(s, []).append(p)
                else:
                    ff_writers[s] = ff_writers.get(s, 0) + 1
                    if ff_writers[s] > 1:
                        raise InterpError(p.loc,
                                          f"{s.name!r} written by multiple "
                                          f"always_ff blocks")
        for s, ws in comb_writers.items():
            if len(ws) == 1:
                continue
            if not all(w.kind == "assign" and w.bits is not None for w in ws):
                raise InterpError(ws[0].loc, f"multiple drivers on {s.name!r}")
            covered: set[int] = set()
            for w in ws:
                lo, width = w.bits
                span = set(range(lo, lo + width))
                if covered & span:
                    raise InterpError(w.loc,
                                      f"overlapping drivers on {s.name!r}")
                covered |= span

        order: list[_Proc] = []
        state: dict[int, int] = {}

        def visit(p: _Proc):
            st = state.get(id(p))
            if st == 1:
                return
            if st == 0:
                names = ", ".join(sorted(s.name for s in p.writes))
                raise InterpError(p.loc, f"combinational cycle through {names}")
            state[id(p)] = 0
            for s in sorted(p.reads, key=lambda x: (x.name, id(x))):
                if s.is_ff or s in self._top_input_sigs:
                    continue
                for w in comb_writers.get(s, ()):
                    visit(w)
            state[id(p)] = 1
            order.append(p)

        for p in self.procs:
            if p.kind != "ff":
                visit(p)
        return order

    # -- execution -------------------------------------------------------

    def reset(self):
        seen = set()
        for p in self.procs:
            for s in list(p.reads) + list(p.writes):
                if id(s) not in seen:
                    seen.add(id(s))
                    s.value = 0
        for s in self.top_env.signals.values():
            s.value = 0

    def _settle(self):
        for p in self._order:
            if p.kind == "assign":
                self._run_assign(p)
            else:
                shadow: dict[Signal, int] = {}
                scope = _ExecEnv(p.env, shadow)
                self._exec_stmts(p.body, p.env, scope, shadow)
                for sig, v in shadow.items():
                    sig.value = v

    def _run_assign(self, p: _Proc):
        if isinstance(p.lhs, _PortRef):
            sig = p.lhs.sig
        else:
            sig = p.env.find_signal(
                p.lhs.name if isinstance(p.lhs, Ident) else p.lhs.base)
        lo, w = p.bits
        if isinstance(p.rhs, _PortRef):
            src = p.rhs.sig
            v = src.value & ((1 << w) - 1)
        else:
            v = assign_eval(p.rhs, p.env, w)
        _write_slice(sig, lo, w, v, None)

    def _exec_stmts(self, stmts, env: _Env, scope, shadow):
        for s in stmts:
            if isinstance(s, SAssign):
                sig = env.find_signal(
                    s.lhs.name if isinstance(s.lhs, Ident) else s.lhs.base)
                lo, w = self._dyn_bits(s.lhs, scope, sig)
                v = assign_eval(s.rhs, scope, w)
                _write_slice(sig, lo, w, v, shadow)
            elif isinstance(s, SIf):
                c = eval_expr(s.cond, scope, None).val != 0
                self._exec_stmts(s.then if c else s.els, env, scope, shadow)
            elif isinstance(s, SCase):
                width = self_size(s.subject, scope)[0]
                for labels, _ in s.items:
                    for l in labels or ():
                        width = max(width, self_size(l, scope)[0])
                sv = eval_expr(s.subject, scope, width).val
                taken = None
                default = ()
                for labels, body in s.items:
                    if labels is None:
                        default = body
                        continue
                    if taken is None and any(
                            eval_expr(l, scope, width).val == sv
                            for l in labels):
                        taken = body
                self._exec_stmts(taken if taken is not None else default,
                                 env, scope, shadow)

    def _dyn_bits(self, lhs, scope, sig: Signal) -> tuple[int, int]:
        if isinstance(lhs, Ident):
            return 0, sig.width
        if isinstance(lhs, Index):
            return eval_expr(lhs.idx, scope, None).val, 1
        if isinstance(lhs, RangeSel):
            msb = eval_expr(lhs.msb, scope, None).as_int()
            lsb = eval_expr(lhs.lsb, scope, None).as_int()
            return lsb, msb - lsb + 1
        off = eval_expr(lhs.offset, scope, None).as_int()
        w = eval_expr(lhs.width, scope, None).as_int()
        return (off - w + 1 if lhs.down else off), w

    def step(self, inputs: dict[str, int]) -> dict[str, int]:
        for name, width in self.ports_in:
            sig = self.top_env.signals[name]
            sig.value = inputs.get(name, 0) & ((1 << width) - 1)
        self._settle()
        out = {
            name: self.top_env.signals[name].value
            for name, _ in self.ports_out
        }
        if self.ffs:
            shadow: dict[Signal, int] = {}
            for p in self.procs:
                if p.kind != "ff":
                    continue
                scope = _ExecEnv(p.env, {})
                self._exec_stmts(p.body, p.env, scope, shadow)
            for sig, v in shadow.items():
                sig.value = v
            self._settle()
        return out


def interpret(sim, inputs, cycles: int | None = None) -> list[dict]:
    """Output trace of a design adapter from the zero reset state.

    `inputs` is either one input map (held for `cycles` steps) or a
    per-cycle list of maps. Works with any adapter exposing the step()
    protocol (AST interpreter, word netlist, AIG, mapped netlist)."""
    if isinstance(inputs, dict):
        seq = [inputs] * (cycles if cycles is not None else 1)
    else:
        seq = list(inputs)
        if cycles is not None:
            seq = seq[:cycles]
    for name, _ in sim.ports_in:
        for ins in seq:
            if any(k not in dict(sim.ports_in) for k in ins):
                bad = [k for k in ins if k not in dict(sim.ports_in)]
                raise InterpError(Loc(), f"unknown input ports {bad}")
        break
    sim.reset()
    return [sim.step(ins) for ins in seq]
