"""Source-to-source pre-elaboration.

Resolves every parameter to a literal, unrolls all generate constructs,
and emits one module definition per distinct (module, resolved
parameters) key. Uniquified definitions are named <module>__P<hash8>
over the ordered resolved parameter list; the top module and modules
without parameters keep their names. Generate-scope declarations are
flattened as <scope>__<index>__<name> (scope = label or genblk<n>).

Emitted parameters become ranged localparam literals, so re-elaborating
the output is a structural fixpoint.
"""

from __future__ import annotations

import hashlib

from .diagnostics import DiagnosticError, Loc, err
from .semantics import ConstScope, EvalError, Value, eval_expr, eval_param
from .svast import (
    Assign, AlwaysComb, AlwaysFF, Binary, Call, Concat, Design, Fill, GenFor,
    GenIf, Ident, Index, IndexedSel, Instance, Module, NetDecl, Num,
    ParamDecl, Port, RangeSel, Repl, SAssign, SCase, SIf, Ternary, Unary,
)


class ElabError(DiagnosticError):
    def __init__(self, loc: Loc, msg: str):
        super().__init__([err(loc, msg, "elab")])


def _value_num(v: Value) -> Num:
    return Num(v.val, v.width, v.signed)


def _ident_deps(e, acc: set[str]):
    if isinstance(e, Ident):
        acc.add(e.name)
    elif isinstance(e, (Index, RangeSel, IndexedSel)):
        acc.add(e.base)
        for f in ("idx", "msb", "lsb", "offset", "width"):
            v = getattr(e, f, None)
            if v is not None and not isinstance(v, (bool, str)):
                _ident_deps(v, acc)
    elif isinstance(e, Unary):
        _ident_deps(e.a, acc)
    elif isinstance(e, Binary):
        _ident_deps(e.a, acc)
        _ident_deps(e.b, acc)
    elif isinstance(e, Ternary):
        _ident_deps(e.cond, acc)
        _ident_deps(e.then, acc)
        _ident_deps(e.els, acc)
    elif isinstance(e, Concat):
        for p in e.parts:
            _ident_deps(p, acc)
    elif isinstance(e, Repl):
        _ident_deps(e.count, acc)
        _ident_deps(e.part, acc)
    elif isinstance(e, Call):
        for a in e.args:
            _ident_deps(a, acc)


def _subst(e, consts: dict[str, Value], renames: dict[str, str]):
    """Replace constant identifiers with literals and apply generate
    scope renames (a name is const or net, never both)."""
    if isinstance(e, Ident):
        v = consts.get(e.name)
        if v is not None:
            return _value_num(v)
        if e.name in renames:
            return Ident(renames[e.name], e.loc)
        return e
    if isinstance(e, (Num, Fill)):
        return e
    if isinstance(e, (Index, RangeSel, IndexedSel)):
        base = renames.get(e.base, e.base)
        if e.base in consts and e.base not in renames:
            raise ElabError(e.loc, f"select on parameter {e.base!r} is not "
                                   f"supported")
        if isinstance(e, Index):
            return Index(base, _subst(e.idx, consts, renames), e.loc)
        if isinstance(e, RangeSel):
            return RangeSel(base, _subst(e.msb, consts, renames),
                            _subst(e.lsb, consts, renames), e.loc)
        return IndexedSel(base, _subst(e.offset, consts, renames),
                          _subst(e.width, consts, renames), e.down, e.loc)
    if isinstance(e, Unary):
        return Unary(e.op, _subst(e.a, consts, renames), e.loc)
    if isinstance(e, Binary):
        return Binary(e.op, _subst(e.a, consts, renames),
                      _subst(e.b, consts, renames), e.loc)
    if isinstance(e, Ternary):
        return Ternary(_subst(e.cond, consts, renames),
                       _subst(e.then, consts, renames),
                       _subst(e.els, consts, renames), e.loc)
    if isinstance(e, Concat):
        return Concat(tuple(_subst(p, consts, renames) for p in e.parts), e.loc)
    if isinstance(e, Repl):
        return Repl(_subst(e.count, consts, renames),
                    _subst(e.part, consts, renames), e.loc)
    if isinstance(e, Call):
        return Call(e.func, tuple(_subst(a, consts, renames) for a in e.args),
                    e.loc)
    raise ElabError(getattr(e, "loc", Loc()), f"cannot substitute "
                                              f"{type(e).__name__}")


def _declared_shape(p: ParamDecl, scope: ConstScope):
    if p.range_ is not None:
        msb = eval_expr(p.range_[0], scope, None).as_int()
        lsb = eval_expr(p.range_[1], scope, None).as_int()
        if msb < lsb:
            raise ElabError(p.loc, f"reversed parameter range on {p.name}")
        return (msb - lsb + 1, p.signed)
    if p.signed:
        return (32, True)
    return None


class Elaborator:
    def __init__(self, design: Design, max_unroll: int = 65536):
        self.mods = {m.name: m for m in design.modules}
        self.max_unroll = max_unroll
        self.memo: dict = {}
        self.uniq_keys: dict[str, object] = {}
        self.out: list[Module] = []
        self.sidecar: dict[str, dict] = {}
        self.visiting: set = set()

    def run(self, top: str, overrides: dict[str, int] | None) -> Design:
        if top not in self.mods:
            raise ElabError(Loc(), f"top module {top!r} not found")
        binds = {
            k: Value(v & ((1 << 64) - 1), 64, True)
            for k, v in (overrides or {}).items()
        }
        self.elab_module(top, binds, is_top=True, loc=Loc())
        return Design(tuple(self.out))

    # -- parameter evaluation -------------------------------------------

    def _eval_params(self, m: Module, binds: dict[str, Value], loc: Loc):
        decls = [it for it in m.items if isinstance(it, ParamDecl)]
        names = {d.name for d in decls}
        param_names = {d.name for d in decls if d.kind == "parameter"}
        for o in binds:
            if o not in param_names:
                raise ElabError(
                    loc, f"override of nonexistent parameter {o!r} in "
                         f"{m.name}"
                )
        order = self._topo_params(m, decls, names)
        scope = ConstScope()
        values: dict[str, Value] = {}
        for d in order:
            declared = _declared_shape(d, scope)
            if d.kind == "parameter" and d.name in binds:
                b = binds[d.name]
                if declared is not None:
                    v = Value(b.val & ((1 << declared[0]) - 1), declared[0],
                              declared[1])
                else:
                    x = b.as_int()
                    need = x.bit_length() + (1 if x < 0 else 0)
                    w = max(32, need)
                    v = Value(x & ((1 << w) - 1), w, b.signed)
            else:
                v = eval_param(d.value, scope, declared, d.loc)
            values[d.name] = v
            scope.bindings[d.name] = v
        ordered_params = [
            (d.name, values[d.name]) for d in decls if d.kind == "parameter"
        ]
        return values, ordered_params, decls

    def _topo_params(self, m: Module, decls, names: set[str]):
        by_name = {d.name: d for d in decls}
        state: dict[str, int] = {}
        order: list[ParamDecl] = []

        def visit(d: ParamDecl, chain: list[str]):
            st = state.get(d.name)
            if st == 1:
                return
            if st == 0:
                cyc = chain[chain.index(d.name):] + [d.name]
                raise ElabError(
                    d.loc,
                    f"unresolvable parameter (dependency cycle "
                    f"{' -> '.join(cyc)}) in {m.name}",
                )
            state[d.name] = 0
            deps: set[str] = set()
            _ident_deps(d.value, deps)
            if d.range_ is not None:
                _ident_deps(d.range_[0], deps)
                _ident_deps(d.range_[1], deps)
            for dep in sorted(deps & names):
                visit(by_name[dep], chain + [d.name])
            state[d.name] = 1
            order.append(d)

        for d in decls:
            visit(d, [])
        return order

    # -- module elaboration ------------------------------------------------

    def elab_module(self, name: str, binds: dict[str, Value], is_top: bool,
                    loc: Loc) -> str:
        m = self.mods[name]
        values, ordered_params, decls = self._eval_params(m, binds, loc)
        key = (
            name,
            tuple((n, v.val, v.width, v.signed) for n, v in ordered_params),
        )
        if key in self.memo:
            return self.memo[key]
        if key in self.visiting:
            raise ElabError(loc, f"recursive instantiation of {name}")
        self.visiting.add(key)

        if is_top:
            uniq = name
        elif not ordered_params:
            uniq = name
        else:
            blob = repr(key[1]).encode()
            h8 = hashlib.sha256(blob).hexdigest()[:8]
            uniq = f"{name}__P{h8}"
        prior = self.uniq_keys.get(uniq)
        if prior is not None and prior != key:
            raise ElabError(loc, f"uniquified name collision on {uniq}")
        self.uniq_keys[uniq] = key
        self.memo[key] = uniq

        ctx = _ModuleCtx(self, m, values, uniq)
        ports = [ctx.elab_port(p) for p in m.ports]
        items: list = []
        for d in decls:
            v = values[d.name]
            items.append(
                ParamDecl(
                    "localparam", d.name, _value_num(v),
                    (Num(v.width - 1, None, True), Num(0, None, True)), v.signed, d.loc,
                )
            )
        items.extend(ctx.elab_items(
            [it for it in m.items if not isinstance(it, ParamDecl)],
            dict(values), {}, [],
        ))
        self.visiting.discard(key)
        self.out.append(Module(uniq, tuple(ports), tuple(items), m.loc))
        self.sidecar[uniq] = {
            "module": name,
            "params": {n: v.as_int() for n, v in ordered_params},
        }
        return uniq


class _ModuleCtx:
    def __init__(self, elab: Elaborator, m: Module, values, uniq: str):
        self.elab = elab
        self.m = m
        self.values = values
        self.uniq = uniq
        self.genblk_counters: list[int] = [0]

    def elab_port(self, p: Port) -> Port:
        rng = self._elab_range(p.range_, self.values, {}, p.loc)
        return Port(p.direction, p.name, rng, p.signed, p.kind, p.loc)

    def _elab_range(self, rng, consts, renames, loc):
        if rng is None:
            return None
        scope = ConstScope(consts)
        msb = eval_expr(_subst(rng[0], consts, renames), scope, None).as_int()
        lsb = eval_expr(_subst(rng[1], consts, renames), scope, None).as_int()
        if lsb != 0:
            raise ElabError(loc, f"unsupported construct: vector range with "
                                 f"nonzero lsb [{msb}:{lsb}]")
        if msb < 0:
            raise ElabError(loc, f"negative vector range [{msb}:0]")
        return (Num(msb, None, True), Num(0, None, True))

    def elab_items(self, items, consts: dict[str, Value],
                   renames: dict[str, str], prefix: list[str]) -> list:
        out: list = []
        for it in items:
            out.extend(self.elab_item(it, consts, renames, prefix))
        return out

    def elab_item(self, it, consts, renames, prefix) -> list:
        if isinstance(it, ParamDecl):
            # localparam inside a generate scope
            scope = ConstScope(consts)
            declared = _declared_shape(
                ParamDecl(it.kind, it.name,
                          _subst(it.value, consts, renames),
                          tuple(_subst(r, consts, renames) for r in it.range_)
                          if it.range_ else None,
                          it.signed, it.loc),
                scope,
            )
            v = eval_param(_subst(it.value, consts, renames), scope, declared,
                           it.loc)
            new = self._scoped_name(it.name, prefix, renames)
            consts[it.name] = v
            renames.pop(it.name, None)
            return [ParamDecl("localparam", new, _value_num(v),
                              (Num(v.width - 1, None, True), Num(0, None, True)), v.signed, it.loc)]
        if isinstance(it, NetDecl):
            new = self._scoped_name(it.name, prefix, renames)
            if new != it.name:
                renames[it.name] = new
            consts.pop(it.name, None)
            rng = self._elab_range(it.range_, consts, renames, it.loc)
            return [NetDecl(it.kind, new, rng, it.signed, it.loc)]
        if isinstance(it, Assign):
            return [Assign(_subst(it.lhs, consts, renames),
                           _subst(it.rhs, consts, renames), it.loc)]
        if isinstance(it, AlwaysComb):
            return [AlwaysComb(
                tuple(self._elab_stmt(s, consts, renames) for s in it.body),
                it.loc)]
        if isinstance(it, AlwaysFF):
            clk = renames.get(it.clock, it.clock)
            if it.clock in consts:
                raise ElabError(it.loc, "clock cannot be a parameter")
            return [AlwaysFF(
                clk,
                tuple(self._elab_stmt(s, consts, renames) for s in it.body),
                it.loc)]
        if isinstance(it, Instance):
            return [self._elab_instance(it, consts, renames, prefix)]
        if isinstance(it, GenFor):
            return self._elab_genfor(it, consts, renames, prefix)
        if isinstance(it, GenIf):
            scope = ConstScope(consts)
            cond = eval_expr(_subst(it.cond, consts, renames), scope, None)
            label = it.label or self._next_genblk()
            body = it.then if cond.val != 0 else it.els
            sub_prefix = prefix + [label]
            sub_renames = dict(renames)
            sub_consts = dict(consts)
            self.genblk_counters.append(0)
            out = self.elab_items(list(body), sub_consts, sub_renames,
                                  sub_prefix)
            self.genblk_counters.pop()
            return out
        raise ElabError(getattr(it, "loc", Loc()),
                        f"cannot elaborate {type(it).__name__}")

    def _next_genblk(self) -> str:
        self.genblk_counters[-1] += 1
        return f"genblk{self.genblk_counters[-1]}"

    def _scoped_name(self, name: str, prefix: list[str],
                     renames: dict[str, str]) -> str:
        if not prefix:
            return name
        return "__".join(prefix + [name])

    def _elab_stmt(self, s, consts, renames):
        if isinstance(s, SAssign):
            return SAssign(_subst(s.lhs, consts, renames),
                           _subst(s.rhs, consts, renames), s.blocking, s.loc)
        if isinstance(s, SIf):
            return SIf(
                _subst(s.cond, consts, renames),
                tuple(self._elab_stmt(x, consts, renames) for x in s.then),
                tuple(self._elab_stmt(x, consts, renames) for x in s.els),
                s.loc,
            )
        if isinstance(s, SCase):
            items = []
            for labels, body in s.items:
                nl = (tuple(_subst(l, consts, renames) for l in labels)
                      if labels is not None else None)
                items.append(
                    (nl, tuple(self._elab_stmt(x, consts, renames)
                               for x in body))
                )
            return SCase(_subst(s.subject, consts, renames), tuple(items),
                         s.loc)
        raise ElabError(s.loc, f"cannot elaborate {type(s).__name__}")

    def _elab_instance(self, it: Instance, consts, renames, prefix):
        if it.module not in self.elab.mods:
            raise ElabError(it.loc, f"instance of undeclared module "
                                    f"{it.module!r}")
        scope = ConstScope(consts)
        binds: dict[str, Value] = {}
        for pname, pexpr in it.params:
            child = self.elab.mods[it.module]
            decl = next(
                (d for d in child.items
                 if isinstance(d, ParamDecl) and d.name == pname), None)
            if decl is None or decl.kind != "parameter":
                raise ElabError(
                    it.loc,
                    f"override of nonexistent parameter {pname!r} on "
                    f"{it.module}",
                )
            binds[pname] = eval_expr(_subst(pexpr, consts, renames), scope,
                                     None)
        uniq = self.elab.elab_module(it.module, binds, is_top=False,
                                     loc=it.loc)
        iname = self._scoped_name(it.name, prefix, renames)
        ports = tuple(
            (n, _subst(e, consts, renames) if e is not None else None)
            for n, e in it.ports
        )
        return Instance(uniq, iname, (), ports, it.loc)

    def _elab_genfor(self, it: GenFor, consts, renames, prefix) -> list:
        scope = ConstScope(consts)
        cur = eval_expr(_subst(it.init, consts, renames), scope, None).as_int()
        label = it.label or self._next_genblk()
        out: list = []
        count = 0
        while True:
            bound = eval_expr(_subst(it.bound, consts, renames), scope,
                              None).as_int()
            ok = {
                "<": cur < bound, "<=": cur <= bound, ">": cur > bound,
                ">=": cur >= bound, "!=": cur != bound,
            }[it.cond_op]
            if not ok:
                break
            count += 1
            if count > self.elab.max_unroll:
                raise ElabError(
                    it.loc,
                    f"generate loop exceeds unroll limit "
                    f"({self.elab.max_unroll})",
                )
            sub_consts = dict(consts)
            sub_consts[it.var] = Value(cur & ((1 << 32) - 1), 32, True)
            sub_renames = dict(renames)
            sub_prefix = prefix + [f"{label}__{cur}"]
            self.genblk_counters.append(0)
            out.extend(self.elab_items(list(it.body), sub_consts, sub_renames,
                                       sub_prefix))
            self.genblk_counters.pop()
            cur += it.step
        return out


def elaborate(design: Design, top: str, overrides: dict[str, int] | None = None,
              max_unroll: int = 65536) -> tuple[Design, dict]:
    """Returns the elaborated design plus the sidecar map
    (uniquified name -> {module, params})."""
    el = Elaborator(design, max_unroll)
    out = el.run(top, overrides)
    return out, el.sidecar
