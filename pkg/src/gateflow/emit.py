"""AST to source text.

Two dialects: "sv" keeps the SystemVerilog constructs (used for pickled
sources), "v2005" restricts to Verilog-2005 (always @*, wire/reg, no
generates or parameters may remain). Output is deterministic; numbers
are canonicalized, so reparsing compares structurally equal.
"""

from __future__ import annotations

from .svast import (
    Assign, AlwaysComb, AlwaysFF, Binary, Call, Concat, Design, Fill, GenFor,
    GenIf, Ident, Index, IndexedSel, Instance, Module, NetDecl, Num,
    ParamDecl, Port, RangeSel, Repl, SAssign, SCase, SIf, Ternary, Unary,
)

_LEVEL = {
    "||": 0, "&&": 1, "|": 2, "^": 3, "~^": 3, "^~": 3, "&": 4,
    "==": 5, "!=": 5, "<": 6, "<=": 6, ">": 6, ">=": 6,
    "<<": 7, ">>": 7, "<<<": 7, ">>>": 7,
    "+": 8, "-": 8, "*": 9, "/": 9, "%": 9, "**": 10,
}
_UNARY_LEVEL = 11
_TERNARY_LEVEL = -1


def emit_num(e: Num) -> str:
    if e.width is None:
        if e.signed:
            return str(e.value)
        return f"'d{e.value}"
    s = "s" if e.signed else ""
    return f"{e.width}'{s}d{e.value}"


def emit_expr(e, parent_level: int = -2, right: bool = False) -> str:
    if isinstance(e, Num):
        return emit_num(e)
    if isinstance(e, Fill):
        return f"'{e.bit}"
    if isinstance(e, Ident):
        return e.name
    if isinstance(e, Index):
        return f"{e.base}[{emit_expr(e.idx)}]"
    if isinstance(e, RangeSel):
        return f"{e.base}[{emit_expr(e.msb)}:{emit_expr(e.lsb)}]"
    if isinstance(e, IndexedSel):
        op = "-:" if e.down else "+:"
        return f"{e.base}[{emit_expr(e.offset)} {op} {emit_expr(e.width)}]"
    if isinstance(e, Concat):
        return "{" + ", ".join(emit_expr(p) for p in e.parts) + "}"
    if isinstance(e, Repl):
        if isinstance(e.part, Concat):
            inner = ", ".join(emit_expr(p) for p in e.part.parts)
        else:
            inner = emit_expr(e.part)
        return "{" + emit_expr(e.count) + "{" + inner + "}}"
    if isinstance(e, Call):
        return f"{e.func}(" + ", ".join(emit_expr(a) for a in e.args) + ")"
    if isinstance(e, Unary):
        inner = emit_expr(e.a, _UNARY_LEVEL)
        return f"{e.op}{inner}"
    if isinstance(e, Binary):
        lv = _LEVEL[e.op]
        a = emit_expr(e.a, lv, right=False)
        b = emit_expr(e.b, lv, right=True)
        text = f"{a} {e.op} {b}"
        if parent_level > lv or (parent_level == lv and right):
            return f"({text})"
        if parent_level == _UNARY_LEVEL:
            return f"({text})"
        return text
    if isinstance(e, Ternary):
        cond = emit_expr(e.cond, 0)
        text = f"{cond} ? {emit_expr(e.then)} : {emit_expr(e.els)}"
        if parent_level >= 0 or parent_level == _UNARY_LEVEL:
            return f"({text})"
        return text
    raise TypeError(f"emit of {type(e).__name__}")


def _range_str(rng) -> str:
    if rng is None:
        return ""
    return f"[{emit_expr(rng[0])}:{emit_expr(rng[1])}] "


class Emitter:
    def __init__(self, dialect: str = "sv"):
        assert dialect in ("sv", "v2005")
        self.dialect = dialect

    def design(self, d: Design) -> str:
        return "\n".join(self.module(m) for m in d.modules)

    def module(self, m: Module) -> str:
        reg_targets = _always_targets(m) if self.dialect == "v2005" else set()
        out = [f"module {m.name} ("]
        plines = []
        for p in m.ports:
            kind = ""
            if self.dialect == "sv":
                kind = f"{p.kind} " if p.kind else ""
            elif p.direction == "output" and p.name in reg_targets:
                kind = "reg "
            signed = "signed " if p.signed else ""
            plines.append(
                f"  {p.direction} {kind}{signed}{_range_str(p.range_)}{p.name}"
            )
        out.append(",\n".join(plines))
        out.append(");")
        for it in m.items:
            out.extend(self.item(it, "  ", reg_targets))
        out.append("endmodule")
        return "\n".join(out) + "\n"

    def item(self, it, ind: str, regs: set[str]) -> list[str]:
        if isinstance(it, ParamDecl):
            if self.dialect == "v2005" and it.kind == "parameter":
                raise AssertionError(
                    f"parameter {it.name} survived elaboration"
                )
            signed = "signed " if it.signed else ""
            return [
                f"{ind}{it.kind} {signed}{_range_str(it.range_)}{it.name} = "
                f"{emit_expr(it.value)};"
            ]
        if isinstance(it, NetDecl):
            kind = it.kind
            if self.dialect == "v2005" and kind == "logic":
                kind = "reg" if it.name in regs else "wire"
            signed = "signed " if it.signed else ""
            return [f"{ind}{kind} {signed}{_range_str(it.range_)}{it.name};"]
        if isinstance(it, Assign):
            return [
                f"{ind}assign {emit_expr(it.lhs)} = {emit_expr(it.rhs)};"
            ]
        if isinstance(it, AlwaysComb):
            head = "always_comb" if self.dialect == "sv" else "always @*"
            lines = [f"{ind}{head} begin"]
            for s in it.body:
                lines.extend(self.stmt(s, ind + "  "))
            lines.append(f"{ind}end")
            return lines
        if isinstance(it, AlwaysFF):
            head = "always_ff" if self.dialect == "sv" else "always"
            lines = [f"{ind}{head} @(posedge {it.clock}) begin"]
            for s in it.body:
                lines.extend(self.stmt(s, ind + "  "))
            lines.append(f"{ind}end")
            return lines
        if isinstance(it, Instance):
            head = f"{ind}{it.module} "
            if it.params:
                binds = ", ".join(
                    f".{n}({emit_expr(e)})" for n, e in it.params
                )
                head += f"#({binds}) "
            head += it.name
            conns = ", ".join(
                f".{n}({emit_expr(e) if e is not None else ''})"
                for n, e in it.ports
            )
            return [head + f" ({conns});"]
        if isinstance(it, GenFor):
            assert self.dialect == "sv", "generate survived elaboration"
            if it.step == 1:
                step = f"{it.var}++"
            elif it.step == -1:
                step = f"{it.var}--"
            elif it.step > 0:
                step = f"{it.var} += {it.step}"
            else:
                step = f"{it.var} -= {-it.step}"
            label = f" : {it.label}" if it.label else ""
            lines = [
                f"{ind}for (genvar {it.var} = {emit_expr(it.init)}; "
                f"{it.var} {it.cond_op} {emit_expr(it.bound)}; {step}) "
                f"begin{label}"
            ]
            for sub in it.body:
                lines.extend(self.item(sub, ind + "  ", regs))
            lines.append(f"{ind}end")
            return lines
        if isinstance(it, GenIf):
            assert self.dialect == "sv", "generate survived elaboration"
            lines = [f"{ind}if ({emit_expr(it.cond)}) begin"]
            for sub in it.then:
                lines.extend(self.item(sub, ind + "  ", regs))
            if it.els:
                lines.append(f"{ind}end else begin")
                for sub in it.els:
                    lines.extend(self.item(sub, ind + "  ", regs))
            lines.append(f"{ind}end")
            return lines
        raise TypeError(f"emit of item {type(it).__name__}")

    def stmt(self, s, ind: str) -> list[str]:
        if isinstance(s, SAssign):
            op = "=" if s.blocking else "<="
            return [f"{ind}{emit_expr(s.lhs)} {op} {emit_expr(s.rhs)};"]
        if isinstance(s, SIf):
            lines = [f"{ind}if ({emit_expr(s.cond)}) begin"]
            for x in s.then:
                lines.extend(self.stmt(x, ind + "  "))
            if s.els:
                lines.append(f"{ind}end else begin")
                for x in s.els:
                    lines.extend(self.stmt(x, ind + "  "))
            lines.append(f"{ind}end")
            return lines
        if isinstance(s, SCase):
            lines = [f"{ind}case ({emit_expr(s.subject)})"]
            for labels, body in s.items:
                if labels is None:
                    lines.append(f"{ind}  default: begin")
                else:
                    lab = ", ".join(emit_expr(l) for l in labels)
                    lines.append(f"{ind}  {lab}: begin")
                for x in body:
                    lines.extend(self.stmt(x, ind + "    "))
                lines.append(f"{ind}  end")
            lines.append(f"{ind}endcase")
            return lines
        raise TypeError(f"emit of stmt {type(s).__name__}")


def _always_targets(m: Module) -> set[str]:
    targets: set[str] = set()

    def scan_stmt(s):
        if isinstance(s, SAssign):
            lhs = s.lhs
            base = lhs.name if isinstance(lhs, Ident) else lhs.base
            targets.add(base)
        elif isinstance(s, SIf):
            for x in s.then + s.els:
                scan_stmt(x)
        elif isinstance(s, SCase):
            for _, body in s.items:
                for x in body:
                    scan_stmt(x)

    def scan_item(it):
        if isinstance(it, (AlwaysComb, AlwaysFF)):
            for s in it.body:
                scan_stmt(s)
        elif isinstance(it, (GenFor, GenIf)):
            subs = it.body if isinstance(it, GenFor) else it.then + it.els
            for sub in subs:
                scan_item(sub)

    for it in m.items:
        scan_item(it)
    return targets


def emit_sv(d: Design) -> str:
    return Emitter("sv").design(d)


def emit_v2005(d: Design) -> str:
    return Emitter("v2005").design(d)
