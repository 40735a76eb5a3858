"""Recursive-descent parser for the SystemVerilog subset.

Anything outside the subset produces a diagnostic naming the construct;
nothing is silently skipped. Enum typedefs are lowered here: module
scope typedefs inject all member localparams in place, compilation-unit
scope typedefs inject the members a module actually references.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import Diagnostic, DiagnosticError, Loc, err
from .lexer import Token, tokenize
from .svast import (
    Assign, AlwaysComb, AlwaysFF, Binary, Call, Concat, Design, Fill, GenFor,
    GenIf, Ident, Index, IndexedSel, Instance, Module, NetDecl, Num,
    ParamDecl, Port, RangeSel, Repl, SAssign, SCase, SIf, SourceSet, Ternary,
    Unary,
)

_BIN_LEVELS = [
    ["||"],
    ["&&"],
    ["|"],
    ["^", "~^", "^~"],
    ["&"],
    ["==", "!="],
    ["<", "<=", ">", ">="],
    ["<<", ">>", "<<<", ">>>"],
    ["+", "-"],
    ["*", "/", "%"],
    ["**"],
]

_UNARY_OPS = {"~", "!", "-", "+", "&", "|", "^", "~&", "~|", "~^", "^~"}


@dataclass
class _EnumInfo:
    range_: tuple | None
    members: list[tuple[str, object]]  # (name, value expr)


class _Parser:
    def __init__(self, toks: list[Token], unit_enums: dict[str, _EnumInfo]):
        self.toks = toks
        self.pos = 0
        self.diags: list[Diagnostic] = []
        self.unit_enums = unit_enums  # shared across files, mutated in place
        self.module_enums: dict[str, _EnumInfo] = {}

    # -- token plumbing ------------------------------------------------

    def peek(self, off: int = 0) -> Token:
        return self.toks[min(self.pos + off, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.peek()
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        return self.peek().text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text:
            self.fail(t.loc, f"expected {text!r}, found {t.text!r}")
        return self.next()

    def expect_id(self) -> Token:
        t = self.peek()
        if t.kind != "id":
            self.fail(t.loc, f"expected identifier, found {t.text!r}")
        return self.next()

    def fail(self, loc: Loc, msg: str, code: str = "syntax"):
        self.diags.append(err(loc, msg, code))
        raise DiagnosticError(self.diags)

    def enum_of(self, name: str) -> _EnumInfo | None:
        return self.module_enums.get(name) or self.unit_enums.get(name)

    # -- top level -------------------------------------------------------

    def parse_file(self) -> list[Module]:
        mods = []
        while self.peek().kind != "eof":
            t = self.peek()
            if t.text == "typedef":
                name, info = self.parse_typedef()
                self.unit_enums[name] = info
            elif t.text == "module":
                mods.append(self.parse_module())
            else:
                self.fail(t.loc, f"expected module or typedef, found {t.text!r}")
        return mods

    def parse_typedef(self) -> tuple[str, _EnumInfo]:
        self.expect("typedef")
        t = self.peek()
        if t.text != "enum":
            self.fail(t.loc, "unsupported construct: typedef of non-enum type")
        self.next()
        rng = None
        if self.peek().text in ("logic", "bit", "reg"):
            self.next()
            if self.at("["):
                rng = self.parse_range()
        elif self.peek().text in ("int", "integer"):
            self.next()
        elif self.at("["):
            rng = self.parse_range()
        self.expect("{")
        members: list[tuple[str, object]] = []
        counter_base: object | None = None
        offset = 0
        while True:
            name = self.expect_id().text
            if self.accept("="):
                value = self.parse_expr()
                counter_base = value
                offset = 0
            else:
                if counter_base is None:
                    value = Num(offset)
                else:
                    value = (
                        Binary("+", counter_base, Num(offset))
                        if offset
                        else counter_base
                    )
            members.append((name, value))
            offset += 1
            if not self.accept(","):
                break
        self.expect("}")
        tname = self.expect_id().text
        self.expect(";")
        return tname, _EnumInfo(rng, members)

    # -- module ----------------------------------------------------------

    def parse_module(self) -> Module:
        loc = self.expect("module").loc
        name = self.expect_id().text
        self.module_enums = {}
        params: list[ParamDecl] = []
        if self.accept("#"):
            self.expect("(")
            params.extend(self.parse_header_params())
            self.expect(")")
        ports: list[Port] = []
        if self.accept("("):
            ports = self.parse_ports()
            self.expect(")")
        self.expect(";")
        items: list = list(params)
        while not self.at("endmodule"):
            if self.peek().kind == "eof":
                self.fail(self.peek().loc, f"missing endmodule for {name}")
            got = self.parse_item()
            if got:
                items.extend(got)
        self.expect("endmodule")
        items = self.inject_unit_enum_members(ports, items)
        self.check_unique_names(name, ports, items, loc)
        return Module(name, tuple(ports), tuple(items), loc)

    def parse_header_params(self) -> list[ParamDecl]:
        out = []
        if self.at(")"):
            return out
        kind = "parameter"
        while True:
            if self.peek().text in ("parameter", "localparam"):
                kind = self.next().text
            out.extend(self.parse_param_entry(kind))
            if not self.accept(","):
                break
        return out

    def parse_param_entry(self, kind: str) -> list[ParamDecl]:
        signed = False
        rng = None
        if self.peek().text in ("int", "integer"):
            self.next()
            signed = True
        if self.accept("signed"):
            signed = True
        if self.at("["):
            rng = self.parse_range()
        name = self.expect_id()
        self.expect("=")
        value = self.parse_expr()
        return [ParamDecl(kind, name.text, value, rng, signed, name.loc)]

    def parse_ports(self) -> list[Port]:
        ports: list[Port] = []
        if self.at(")"):
            return ports
        direction = None
        kind = "logic"
        rng = None
        signed = False
        while True:
            t = self.peek()
            fresh = False
            if t.text in ("input", "output", "inout"):
                if t.text == "inout":
                    self.fail(t.loc, "unsupported construct: inout port")
                direction = self.next().text
                kind = "logic"
                rng = None
                signed = False
                fresh = True
            if direction is None:
                self.fail(t.loc, "port list must start with a direction")
            if self.peek().text in ("logic", "wire", "reg", "bit"):
                kind = self.next().text
                if kind == "bit":
                    kind = "logic"
                fresh = True
            elif self.peek().kind == "id" and self.enum_of(self.peek().text):
                info = self.enum_of(self.next().text)
                rng = info.range_
                fresh = True
            if self.accept("signed"):
                signed = True
                fresh = True
            if self.at("["):
                rng = self.parse_range()
                fresh = True
            name = self.expect_id()
            _ = fresh
            ports.append(Port(direction, name.text, rng, signed, kind, name.loc))
            if not self.accept(","):
                break
        return ports

    def parse_range(self):
        self.expect("[")
        msb = self.parse_expr()
        self.expect(":")
        lsb = self.parse_expr()
        self.expect("]")
        return (msb, lsb)

    def check_unique_names(self, mod: str, ports, items, loc: Loc):
        seen: set[str] = set()
        for p in ports:
            if p.name in seen:
                self.fail(p.loc, f"duplicate declaration of {p.name!r} in {mod}")
            seen.add(p.name)

        def walk(its):
            for it in its:
                nm = getattr(it, "name", None)
                if isinstance(it, (NetDecl, ParamDecl, Instance)) and nm:
                    if nm in seen:
                        self.fail(
                            it.loc, f"duplicate declaration of {nm!r} in {mod}"
                        )
                    seen.add(nm)

        walk(items)

    # -- enum member injection -------------------------------------------

    def inject_unit_enum_members(self, ports, items):
        used: set[str] = set()

        def scan_expr(e):
            if isinstance(e, Ident):
                used.add(e.name)
            elif isinstance(e, (Index, RangeSel, IndexedSel)):
                used.add(e.base)
                for f in ("idx", "msb", "lsb", "offset", "width"):
                    v = getattr(e, f, None)
                    if v is not None and not isinstance(v, (bool, str)):
                        scan_expr(v)
            elif isinstance(e, Unary):
                scan_expr(e.a)
            elif isinstance(e, Binary):
                scan_expr(e.a)
                scan_expr(e.b)
            elif isinstance(e, Ternary):
                scan_expr(e.cond)
                scan_expr(e.then)
                scan_expr(e.els)
            elif isinstance(e, Concat):
                for p in e.parts:
                    scan_expr(p)
            elif isinstance(e, Repl):
                scan_expr(e.count)
                scan_expr(e.part)
            elif isinstance(e, Call):
                for a in e.args:
                    scan_expr(a)

        def scan_stmt(s):
            if isinstance(s, SAssign):
                scan_expr(s.lhs)
                scan_expr(s.rhs)
            elif isinstance(s, SIf):
                scan_expr(s.cond)
                for x in s.then + s.els:
                    scan_stmt(x)
            elif isinstance(s, SCase):
                scan_expr(s.subject)
                for labels, body in s.items:
                    for l in labels or ():
                        scan_expr(l)
                    for x in body:
                        scan_stmt(x)

        def scan_item(it):
            if isinstance(it, (Assign,)):
                scan_expr(it.lhs)
                scan_expr(it.rhs)
            elif isinstance(it, (AlwaysComb, AlwaysFF)):
                for s in it.body:
                    scan_stmt(s)
            elif isinstance(it, ParamDecl):
                scan_expr(it.value)
            elif isinstance(it, Instance):
                for _, e in it.params + it.ports:
                    if e is not None:
                        scan_expr(e)
            elif isinstance(it, (GenFor, GenIf)):
                if isinstance(it, GenFor):
                    scan_expr(it.init)
                    scan_expr(it.bound)
                    for x in it.body:
                        scan_item(x)
                else:
                    scan_expr(it.cond)
                    for x in it.then + it.els:
                        scan_item(x)
            if isinstance(it, (NetDecl, ParamDecl)) and it.range_:
                scan_expr(it.range_[0])
                scan_expr(it.range_[1])

        for p in ports:
            if p.range_:
                scan_expr(p.range_[0])
                scan_expr(p.range_[1])
        for it in items:
            scan_item(it)

        declared = {p.name for p in ports} | {
            getattr(it, "name", None) for it in items
        }
        injected = []
        for info in self.unit_enums.values():
            for mname, value in info.members:
                if mname in used and mname not in declared:
                    injected.append(
                        ParamDecl("localparam", mname, value, info.range_)
                    )
                    declared.add(mname)
        return injected + list(items)

    # -- module items -----------------------------------------------------

    def parse_item(self) -> list:
        t = self.peek()
        text = t.text
        if text in ("parameter", "localparam"):
            kind = self.next().text
            out = []
            while True:
                out.extend(self.parse_param_entry(kind))
                if not self.accept(","):
                    break
            self.expect(";")
            return out
        if text in ("logic", "wire", "reg", "bit"):
            return self.parse_net_decl()
        if text == "typedef":
            name, info = self.parse_typedef()
            self.module_enums[name] = info
            out = []
            for mname, value in info.members:
                out.append(ParamDecl("localparam", mname, value, info.range_))
            return out
        if text == "assign":
            return [self.parse_assign()]
        if text == "always_comb":
            loc = self.next().loc
            return [AlwaysComb(tuple(self.parse_stmt_block("always_comb")), loc)]
        if text == "always_ff":
            return [self.parse_always_ff()]
        if text == "always":
            return [self.parse_always_legacy()]
        if text == "generate":
            self.next()
            out = []
            while not self.at("endgenerate"):
                if self.peek().kind == "eof":
                    self.fail(self.peek().loc, "missing endgenerate")
                out.extend(self.parse_item())
            self.expect("endgenerate")
            return out
        if text == "genvar":
            self.next()
            self.expect_id()
            while self.accept(","):
                self.expect_id()
            self.expect(";")
            return []
        if text == "for":
            return [self.parse_gen_for()]
        if text == "if":
            return [self.parse_gen_if()]
        if t.kind == "id":
            if self.enum_of(text) and self.peek(1).kind == "id":
                return self.parse_net_decl()
            return [self.parse_instance()]
        self.fail(t.loc, f"unsupported construct at {text!r}")

    def parse_net_decl(self) -> list:
        t = self.next()
        kind = t.text
        rng = None
        signed = False
        if kind not in ("logic", "wire", "reg", "bit"):
            info = self.enum_of(kind)
            assert info is not None
            kind = "logic"
            rng = info.range_
        else:
            if kind == "bit":
                kind = "logic"
            if self.accept("signed"):
                signed = True
            if self.at("["):
                rng = self.parse_range()
        out: list = []
        while True:
            name = self.expect_id()
            decl = NetDecl(kind, name.text, rng, signed, name.loc)
            out.append(decl)
            if self.accept("="):
                if kind != "wire":
                    self.fail(
                        name.loc,
                        "unsupported construct: variable initializer "
                        "(use assign)",
                    )
                rhs = self.parse_expr()
                out.append(Assign(Ident(name.text, name.loc), rhs, name.loc))
            if not self.accept(","):
                break
        self.expect(";")
        return out

    def parse_assign(self):
        loc = self.expect("assign").loc
        lhs = self.parse_lvalue()
        self.expect("=")
        rhs = self.parse_expr()
        self.expect(";")
        return Assign(lhs, rhs, loc)

    def parse_always_ff(self):
        loc = self.expect("always_ff").loc
        self.expect("@")
        self.expect("(")
        edge = self.peek()
        if edge.text != "posedge":
            self.fail(edge.loc, "unsupported construct: always_ff without "
                                "a single posedge clock")
        self.next()
        clk = self.expect_id().text
        if self.at("or") or self.at(","):
            self.fail(self.peek().loc,
                      "unsupported construct: multiple events in always_ff")
        self.expect(")")
        body = self.parse_stmt_block("always_ff")
        return AlwaysFF(clk, tuple(body), loc)

    def parse_always_legacy(self):
        loc = self.expect("always").loc
        self.expect("@")
        if self.accept("*"):
            return AlwaysComb(tuple(self.parse_stmt_block("always_comb")), loc)
        self.expect("(")
        if self.accept("*"):
            self.expect(")")
            return AlwaysComb(tuple(self.parse_stmt_block("always_comb")), loc)
        t = self.peek()
        if t.text == "posedge":
            self.next()
            clk = self.expect_id().text
            self.expect(")")
            return AlwaysFF(clk, tuple(self.parse_stmt_block("always_ff")), loc)
        self.fail(t.loc, "unsupported construct: explicit sensitivity list")

    def parse_stmt_block(self, ctx: str) -> list:
        if self.accept("begin"):
            if self.accept(":"):
                self.expect_id()
            out = []
            while not self.at("end"):
                if self.peek().kind == "eof":
                    self.fail(self.peek().loc, "missing end")
                out.append(self.parse_stmt(ctx))
            self.expect("end")
            return out
        return [self.parse_stmt(ctx)]

    def parse_stmt(self, ctx: str):
        t = self.peek()
        if t.text == "if":
            loc = self.next().loc
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then = self.parse_stmt_block(ctx)
            els = []
            if self.accept("else"):
                els = self.parse_stmt_block(ctx)
            return SIf(cond, tuple(then), tuple(els), loc)
        if t.text == "case":
            return self.parse_case(ctx)
        lhs = self.parse_lvalue()
        if self.accept("<="):
            blocking = False
        elif self.accept("="):
            blocking = True
        else:
            self.fail(self.peek().loc, "expected assignment")
        if ctx == "always_ff" and blocking:
            self.fail(t.loc, "unsupported construct: blocking assignment "
                             "in always_ff")
        if ctx == "always_comb" and not blocking:
            self.fail(t.loc, "unsupported construct: nonblocking assignment "
                             "in always_comb")
        rhs = self.parse_expr()
        self.expect(";")
        return SAssign(lhs, rhs, blocking, t.loc)

    def parse_case(self, ctx: str):
        loc = self.expect("case").loc
        self.expect("(")
        subject = self.parse_expr()
        self.expect(")")
        items = []
        saw_default = False
        while not self.at("endcase"):
            if self.peek().kind == "eof":
                self.fail(self.peek().loc, "missing endcase")
            if self.accept("default"):
                self.accept(":")
                body = self.parse_stmt_block(ctx)
                items.append((None, tuple(body)))
                saw_default = True
                continue
            labels = [self.parse_expr()]
            while self.accept(","):
                labels.append(self.parse_expr())
            self.expect(":")
            body = self.parse_stmt_block(ctx)
            items.append((tuple(labels), tuple(body)))
        self.expect("endcase")
        _ = saw_default
        return SCase(subject, tuple(items), loc)

    def parse_gen_for(self):
        loc = self.expect("for").loc
        self.expect("(")
        if self.accept("genvar"):
            pass
        var = self.expect_id().text
        self.expect("=")
        init = self.parse_expr()
        self.expect(";")
        cv = self.expect_id()
        if cv.text != var:
            self.fail(cv.loc, "generate loop condition must test the genvar")
        op_t = self.next()
        if op_t.text not in ("<", "<=", ">", ">=", "!="):
            self.fail(op_t.loc, f"unsupported loop condition {op_t.text!r}")
        bound = self.parse_expr()
        self.expect(";")
        sv = self.expect_id()
        if sv.text != var:
            self.fail(sv.loc, "generate loop step must update the genvar")
        step = self.parse_gen_step(var)
        self.expect(")")
        label, body = self.parse_gen_body()
        return GenFor(var, init, op_t.text, bound, step, label, tuple(body), loc)

    def parse_gen_step(self, var: str) -> int:
        t = self.next()
        if t.text == "++":
            return 1
        if t.text == "--":
            return -1
        if t.text in ("+=", "-="):
            k = self.parse_const_int()
            return k if t.text == "+=" else -k
        if t.text == "=":
            iv = self.expect_id()
            if iv.text != var:
                self.fail(iv.loc, "generate loop step must update the genvar")
            op = self.next()
            if op.text not in ("+", "-"):
                self.fail(op.loc, "generate loop step must be +/- constant")
            k = self.parse_const_int()
            return k if op.text == "+" else -k
        self.fail(t.loc, f"unsupported loop step {t.text!r}")

    def parse_const_int(self) -> int:
        t = self.peek()
        if t.kind != "num":
            self.fail(t.loc, "expected integer literal")
        self.next()
        return t.num[0]

    def parse_gen_body(self):
        label = None
        body: list = []
        if self.accept("begin"):
            if self.accept(":"):
                label = self.expect_id().text
            while not self.at("end"):
                if self.peek().kind == "eof":
                    self.fail(self.peek().loc, "missing end in generate block")
                body.extend(self.parse_item())
            self.expect("end")
        else:
            body.extend(self.parse_item())
        return label, body

    def parse_gen_if(self):
        loc = self.expect("if").loc
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        _, then = self.parse_gen_body()
        els: list = []
        if self.accept("else"):
            if self.at("if"):
                els = [self.parse_gen_if()]
            else:
                _, els = self.parse_gen_body()
        return GenIf(cond, tuple(then), tuple(els), None, loc)

    def parse_instance(self):
        mod = self.expect_id()
        params: list = []
        if self.accept("#"):
            self.expect("(")
            if not self.at(")"):
                while True:
                    if not self.at("."):
                        self.fail(self.peek().loc,
                                  "unsupported construct: positional "
                                  "parameter binding")
                    self.expect(".")
                    pname = self.expect_id().text
                    self.expect("(")
                    pval = self.parse_expr()
                    self.expect(")")
                    params.append((pname, pval))
                    if not self.accept(","):
                        break
            self.expect(")")
        inst = self.expect_id()
        self.expect("(")
        ports: list = []
        if not self.at(")"):
            while True:
                if not self.at("."):
                    self.fail(self.peek().loc,
                              "unsupported construct: positional port "
                              "binding")
                self.expect(".")
                pname = self.expect_id().text
                self.expect("(")
                if self.at(")"):
                    ports.append((pname, None))
                else:
                    ports.append((pname, self.parse_expr()))
                self.expect(")")
                if not self.accept(","):
                    break
        self.expect(")")
        self.expect(";")
        return Instance(mod.text, inst.text, tuple(params), tuple(ports),
                        mod.loc)

    # -- expressions -------------------------------------------------------

    def parse_lvalue(self):
        e = self.parse_primary()
        if not isinstance(e, (Ident, Index, RangeSel, IndexedSel)):
            self.fail(self.peek().loc, "invalid assignment target")
        return e

    def parse_expr(self):
        return self.parse_ternary()

    def parse_ternary(self):
        cond = self.parse_binary(0)
        if self.accept("?"):
            then = self.parse_expr()
            self.expect(":")
            els = self.parse_expr()
            return Ternary(cond, then, els, cond.loc)
        return cond

    def parse_binary(self, level: int):
        if level >= len(_BIN_LEVELS):
            return self.parse_unary()
        ops = _BIN_LEVELS[level]
        a = self.parse_binary(level + 1)
        while True:
            t = self.peek()
            if t.kind == "punct" and t.text in ops:
                # don't eat '<=' as a comparison when it is an assignment;
                # callers handle that before reaching expressions
                self.next()
                b = self.parse_binary(level + 1)
                a = Binary(t.text, a, b, t.loc)
            else:
                return a

    def parse_unary(self):
        t = self.peek()
        if t.kind == "punct" and t.text in _UNARY_OPS:
            self.next()
            a = self.parse_unary()
            return Unary(t.text, a, t.loc)
        return self.parse_primary()

    def parse_primary(self):
        t = self.peek()
        if t.kind == "num":
            self.next()
            v, w, s = t.num
            return Num(v, w, s, t.loc)
        if t.kind == "fill":
            self.next()
            return Fill(t.num[0], t.loc)
        if t.kind == "sysid":
            if t.text == "$clog2":
                self.next()
                self.expect("(")
                arg = self.parse_expr()
                self.expect(")")
                return Call("$clog2", (arg,), t.loc)
            self.fail(t.loc, f"unsupported construct: system call {t.text}")
        if self.accept("("):
            e = self.parse_expr()
            self.expect(")")
            return e
        if t.text == "{":
            return self.parse_concat()
        if t.kind == "id":
            self.next()
            return self.parse_select_suffix(t)
        self.fail(t.loc, f"unexpected token {t.text!r} in expression")

    def parse_select_suffix(self, name_tok: Token):
        base = Ident(name_tok.text, name_tok.loc)
        if not self.at("["):
            return base
        self.expect("[")
        first = self.parse_expr()
        if self.accept(":"):
            lsb = self.parse_expr()
            self.expect("]")
            sel = RangeSel(name_tok.text, first, lsb, name_tok.loc)
        elif self.accept("+:"):
            width = self.parse_expr()
            self.expect("]")
            sel = IndexedSel(name_tok.text, first, width, False, name_tok.loc)
        elif self.accept("-:"):
            width = self.parse_expr()
            self.expect("]")
            sel = IndexedSel(name_tok.text, first, width, True, name_tok.loc)
        else:
            self.expect("]")
            sel = Index(name_tok.text, first, name_tok.loc)
        if self.at("["):
            self.fail(self.peek().loc,
                      "unsupported construct: multi-dimensional select")
        return sel

    def parse_concat(self):
        loc = self.expect("{").loc
        first = self.parse_expr()
        if self.at("{"):
            self.expect("{")
            items = [self.parse_expr()]
            while self.accept(","):
                items.append(self.parse_expr())
            self.expect("}")
            self.expect("}")
            part = items[0] if len(items) == 1 else Concat(tuple(items), loc)
            return Repl(first, part, loc)
        parts = [first]
        while self.accept(","):
            parts.append(self.parse_expr())
        self.expect("}")
        return Concat(tuple(parts), loc)


def parse_source_set(ss: SourceSet) -> Design:
    """Parse every file, resolve cross-file references, enforce the
    single-definition rule. Raises DiagnosticError."""
    diags: list[Diagnostic] = []
    modules: list[Module] = []
    unit_enums: dict[str, _EnumInfo] = {}
    for path, text in ss.files:
        try:
            toks = tokenize(text, path)
            p = _Parser(toks, unit_enums)
            modules.extend(p.parse_file())
        except DiagnosticError as e:
            diags.extend(e.diags)
    if diags:
        raise DiagnosticError(diags)

    seen: dict[str, Module] = {}
    for m in modules:
        if m.name in seen:
            diags.append(
                err(m.loc, f"duplicate definition of module {m.name!r}",
                    "duplicate-module")
            )
        else:
            seen[m.name] = m
    if ss.top not in seen and not diags:
        diags.append(err(Loc(), f"top module {ss.top!r} not found", "no-top"))

    def check_instances(items):
        for it in items:
            if isinstance(it, Instance) and it.module not in seen:
                diags.append(
                    err(it.loc,
                        f"instance of undeclared module {it.module!r}",
                        "undeclared-module")
                )
            elif isinstance(it, GenFor):
                check_instances(it.body)
            elif isinstance(it, GenIf):
                check_instances(it.then)
                check_instances(it.els)

    for m in modules:
        check_instances(m.items)
    if diags:
        raise DiagnosticError(diags)
    return Design(tuple(modules))


def parse_text(text: str, top: str, path: str = "<mem>") -> Design:
    return parse_source_set(SourceSet(((path, text),), top))
