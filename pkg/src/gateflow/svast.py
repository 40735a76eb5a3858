"""AST for the supported SystemVerilog subset.

Locations are carried for diagnostics but excluded from equality, so
structural comparison (used by the round-trip and idempotence checks)
ignores formatting and provenance. Enum typedefs are lowered at parse
time into localparams plus plain vectors and never appear here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from .diagnostics import Loc

_NOLOC = Loc()


def _loc_field():
    return field(default=_NOLOC, compare=False, repr=False)


# -- expressions --------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: int
    width: int | None = None  # None: unsized literal (32-bit by default)
    signed: bool = False
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class Fill:
    bit: int  # '0 or '1: all-zeros / all-ones at context width
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class Ident:
    name: str
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class Unary:
    op: str
    a: "Expr"
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class Binary:
    op: str
    a: "Expr"
    b: "Expr"
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class Ternary:
    cond: "Expr"
    then: "Expr"
    els: "Expr"
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class Concat:
    parts: tuple["Expr", ...]
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class Repl:
    count: "Expr"
    part: "Expr"
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class Index:
    base: str
    idx: "Expr"
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class RangeSel:
    base: str
    msb: "Expr"
    lsb: "Expr"
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class IndexedSel:
    base: str
    offset: "Expr"
    width: "Expr"
    down: bool  # False: +: , True: -:
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Expr", ...]
    loc: Loc = _loc_field()


Expr = (
    Num | Fill | Ident | Unary | Binary | Ternary | Concat | Repl | Index
    | RangeSel | IndexedSel | Call
)


# -- statements ----------------------------------------------------------


@dataclass(frozen=True)
class SAssign:
    lhs: Expr
    rhs: Expr
    blocking: bool
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class SIf:
    cond: Expr
    then: tuple["Stmt", ...]
    els: tuple["Stmt", ...]
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class SCase:
    subject: Expr
    items: tuple[tuple[tuple[Expr, ...] | None, tuple["Stmt", ...]], ...]
    loc: Loc = _loc_field()  # labels None = default


Stmt = SAssign | SIf | SCase


# -- module items ---------------------------------------------------------


@dataclass(frozen=True)
class ParamDecl:
    kind: str  # "parameter" | "localparam"
    name: str
    value: Expr
    range_: tuple[Expr, Expr] | None = None
    signed: bool = False
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class NetDecl:
    # the net kind is representation, not semantics, in a two-valued
    # single-driver world; structural comparison ignores it
    kind: str = field(compare=False)  # "logic" | "wire" | "reg"
    name: str = ""
    range_: tuple[Expr, Expr] | None = None
    signed: bool = False
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class Assign:
    lhs: Expr
    rhs: Expr
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class AlwaysComb:
    body: tuple[Stmt, ...]
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class AlwaysFF:
    clock: str
    body: tuple[Stmt, ...]
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class Instance:
    module: str
    name: str
    params: tuple[tuple[str, Expr], ...]
    ports: tuple[tuple[str, Expr | None], ...]
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class GenFor:
    var: str
    init: Expr
    cond_op: str
    bound: Expr
    step: int
    label: str | None
    body: tuple["Item", ...]
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class GenIf:
    cond: Expr
    then: tuple["Item", ...]
    els: tuple["Item", ...]
    label: str | None = None
    loc: Loc = _loc_field()


Item = (
    ParamDecl | NetDecl | Assign | AlwaysComb | AlwaysFF | Instance | GenFor
    | GenIf
)


@dataclass(frozen=True)
class Port:
    direction: str  # "input" | "output"
    name: str
    range_: tuple[Expr, Expr] | None = None
    signed: bool = False
    kind: str = field(default="logic", compare=False)
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class Module:
    name: str
    ports: tuple[Port, ...]
    items: tuple[Item, ...]
    loc: Loc = _loc_field()


@dataclass(frozen=True)
class Design:
    modules: tuple[Module, ...]

    def module(self, name: str) -> Module:
        for m in self.modules:
            if m.name == name:
                return m
        raise KeyError(name)

    def module_names(self) -> list[str]:
        return [m.name for m in self.modules]


@dataclass(frozen=True)
class SourceSet:
    files: tuple[tuple[str, str], ...]  # (path, text)
    top: str

    def __post_init__(self):
        paths = [p for p, _ in self.files]
        if len(set(paths)) != len(paths):
            raise ValueError("duplicate paths in source set")
        if not self.top:
            raise ValueError("top module name is empty")
