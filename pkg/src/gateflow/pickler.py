"""Multi-file source pickling: one text, dependency-ordered.

Instantiated modules are emitted before their instantiators; ties break
lexicographically, so identical source sets pickle byte-identically.
"""

from __future__ import annotations

import heapq

from .diagnostics import DiagnosticError, Loc, err
from .emit import emit_sv
from .parser import parse_source_set
from .svast import Design, GenFor, GenIf, Instance, Module, SourceSet


def _deps(m: Module) -> set[str]:
    out: set[str] = set()

    def walk(items):
        for it in items:
            if isinstance(it, Instance):
                out.add(it.module)
            elif isinstance(it, GenFor):
                walk(it.body)
            elif isinstance(it, GenIf):
                walk(it.then)
                walk(it.els)

    walk(m.items)
    return out


def dependency_order(design: Design) -> list[Module]:
    mods = {m.name: m for m in design.modules}
    deps = {m.name: sorted(_deps(m) & mods.keys()) for m in design.modules}
    rdeps: dict[str, list[str]] = {n: [] for n in mods}
    pending = {n: len(deps[n]) for n in mods}
    for n, ds in deps.items():
        for d in ds:
            rdeps[d].append(n)
    heap = [n for n, k in pending.items() if k == 0]
    heapq.heapify(heap)
    order: list[Module] = []
    while heap:
        n = heapq.heappop(heap)
        order.append(mods[n])
        for u in sorted(rdeps[n]):
            pending[u] -= 1
            if pending[u] == 0:
                heapq.heappush(heap, u)
    if len(order) != len(mods):
        cyc = _find_cycle(deps, {n for n in mods if pending[n] > 0})
        raise DiagnosticError(
            [err(Loc(), "cyclic instantiation: " + " -> ".join(cyc), "cycle")]
        )
    return order


def _find_cycle(deps: dict[str, list[str]], remaining: set[str]) -> list[str]:
    start = min(remaining)
    path = [start]
    seen = {start}
    cur = start
    while True:
        nxt = min(d for d in deps[cur] if d in remaining)
        if nxt in seen:
            return path[path.index(nxt):] + [nxt]
        path.append(nxt)
        seen.add(nxt)
        cur = nxt


def pickle_design(design: Design) -> str:
    order = dependency_order(design)
    return emit_sv(Design(tuple(order)))


def pickle_sources(ss: SourceSet) -> str:
    """Parse a source set and emit the single dependency-ordered text."""
    design = parse_source_set(ss)
    return pickle_design(design)
