"""Cut-based technology mapping plus static timing and area reports.

Mapping runs a two-phase dynamic program over 4-feasible cuts: each node
polarity picks the cheapest library match (input permutations and
inversions enumerated per cell up front), with inverters bridging
phases. The result is compared against a plain NAND2+INV decomposition
and the better cover is returned, so the fallback is a hard area bound.

Timing uses one pin-to-output delay per cell, no slew or load; paths
start at inputs and register outputs and end at outputs and register
data pins. Area is reported in gate equivalents (NAND2 = 1.0).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .aig import KIND_AND, KIND_CONST, KIND_LATCH, KIND_PI, Aig
from .celllib import CellLibrary, LibCell
from .cuts import enumerate_cuts
from .tt import TruthTable, compress_support


@dataclass(frozen=True)
class _Variant:
    cell: LibCell
    pin_leaf: tuple[int, ...]  # pin j reads leaf pin_leaf[j]
    pin_inv: tuple[int, ...]   # pin j complemented


@dataclass
class MInst:
    name: str
    cell: str
    ins: list[int]
    out: int


class MappedNetlist:
    def __init__(self, name: str):
        self.name = name
        self.n_nets = 0
        self.instances: list[MInst] = []
        self.latches: list[tuple[str, int, int]] = []  # (name, d_net, q_net)
        self.inputs: list[tuple[str, list[int]]] = []
        self.outputs: list[tuple[str, list[int]]] = []
        self.const_nets: dict[int, int] = {}
        self.net_of_pi: dict[str, int] = {}

    def new_net(self) -> int:
        self.n_nets += 1
        return self.n_nets - 1

    @property
    def ports_in(self):
        return [(n, len(nets)) for n, nets in self.inputs]

    @property
    def ports_out(self):
        return [(n, len(nets)) for n, nets in self.outputs]

    def dump_verilog(self, lib: CellLibrary) -> str:
        lines = [f"module {self.name} (..);  // gate-level dump"]
        for inst in self.instances:
            ins = ", ".join(f"n{i}" for i in inst.ins)
            lines.append(f"  {inst.cell} {inst.name} (n{inst.out}; {ins});")
        for name, d, q in self.latches:
            lines.append(f"  DFF {name} (n{q}; n{d});")
        lines.append("endmodule")
        return "\n".join(lines) + "\n"


def build_match_table(lib: CellLibrary) -> dict[tuple[int, int], list[_Variant]]:
    table: dict[tuple[int, int], list[_Variant]] = {}
    for cell in lib.comb_cells():
        k = cell.k
        seen_for_cell: set[int] = set()
        for perm in itertools.permutations(range(k)):
            for phase in range(1 << k):
                bits = _transformed(cell.tt, perm, phase)
                if bits in seen_for_cell:
                    continue
                seen_for_cell.add(bits)
                pin_leaf = [0] * k
                pin_inv = [0] * k
                for i in range(k):
                    pin_leaf[perm[i]] = i
                    pin_inv[perm[i]] = (phase >> i) & 1
                table.setdefault((k, bits), []).append(
                    _Variant(cell, tuple(pin_leaf), tuple(pin_inv))
                )
    return table


def _transformed(tt: TruthTable, perm, phase: int) -> int:
    # G(l_0..l_{k-1}) = cell(x), x_{perm[i]} = l_i ^ phase_i
    k = tt.k
    bits = 0
    for m in range(1 << k):
        leaves = [(m >> (k - 1 - i)) & 1 for i in range(k)]
        x = [0] * k
        for i in range(k):
            x[perm[i]] = leaves[i] ^ ((phase >> i) & 1)
        if tt.eval(x):
            bits |= 1 << m
    return bits


_INF = (float("inf"),)


class _Mapper:
    def __init__(self, aig: Aig, lib: CellLibrary, objective: str,
                 restrict: set[str] | None = None):
        self.aig = aig
        self.lib = lib
        self.objective = objective
        self.match = build_match_table(lib)
        if restrict is not None:
            self.match = {
                key: [v for v in vs if v.cell.name in restrict]
                for key, vs in self.match.items()
            }
            self.match = {k: v for k, v in self.match.items() if v}
        self.inv = lib.inv
        # fanout counts normalize area costs (area flow), so shared
        # logic is not charged repeatedly by the tree-style recurrence
        refs = [0] * len(aig.kind)
        for nid in aig.node_ids():
            if aig.kind[nid] == KIND_AND:
                refs[aig.f0[nid] >> 1] += 1
                refs[aig.f1[nid] >> 1] += 1
        for _, lit in aig.pos:
            refs[lit >> 1] += 1
        for lit in aig.latch_next:
            refs[lit >> 1] += 1
        self.refs = refs
        # per (node, phase): (metric, impl); impl is one of
        # ("const", v) ("src",) ("inv",) ("wire", leaf, ph)
        # ("cell", variant, leaves)
        self.sol: dict[tuple[int, int], tuple[tuple, tuple]] = {}

    def metric_cell(self, cell: LibCell, leaf_costs: list[tuple],
                    nid: int) -> tuple:
        share = max(1, self.refs[nid])
        if self.objective == "area":
            return ((cell.area + sum(c[0] for c in leaf_costs)) / share,)
        arr = cell.delay + max((c[0] for c in leaf_costs), default=0.0)
        flow = (cell.area + sum(c[1] for c in leaf_costs)) / share
        return (arr, flow)

    def zero_metric(self) -> tuple:
        return (0.0,) if self.objective == "area" else (0.0, 0.0)

    def run(self):
        aig = self.aig
        cuts = enumerate_cuts(aig, k=4, limit_per_node=8)
        for nid in aig.node_ids():
            kind = aig.kind[nid]
            if kind == KIND_CONST:
                continue
            if kind in (KIND_PI, KIND_LATCH):
                z = self.zero_metric()
                self.sol[(nid, 0)] = (z, ("src",))
                self.sol[(nid, 1)] = (self.metric_cell(self.inv, [z], nid),
                                      ("inv",))
                continue
            for ph in (0, 1):
                self.sol[(nid, ph)] = (_INF, None)
                best = _INF
                best_impl = None
                for leaves, _vol in cuts[nid]:
                    if leaves == (nid,):
                        continue
                    tt = aig.cut_function(2 * nid + ph, leaves)
                    ctt, cl = compress_support(tt, leaves)
                    if ctt.k == 0:
                        best = self.zero_metric()
                        best_impl = ("const", 1 if ctt.bits else 0)
                        break
                    if ctt.k == 1:
                        leaf = cl[0]
                        lph = 0 if ctt.bits == 0x2 else 1
                        m, _ = self._leaf(leaf, lph)
                        if m < best:
                            best = m
                            best_impl = ("wire", leaf, lph)
                        continue
                    for v in self.match.get((ctt.k, ctt.bits), ()):
                        leaf_costs = [
                            self._leaf(cl[v.pin_leaf[j]], v.pin_inv[j])[0]
                            for j in range(v.cell.k)
                        ]
                        m = self.metric_cell(v.cell, leaf_costs, nid)
                        if m < best:
                            best = m
                            best_impl = ("cell", v, cl)
                self.sol[(nid, ph)] = (best, best_impl)
            # inverter bridging between phases; at most one side may
            # bridge or construction would chase its own tail
            raw0, impl0 = self.sol[(nid, 0)]
            raw1, impl1 = self.sol[(nid, 1)]
            b0 = self.metric_cell(self.inv, [raw1], nid) if impl1 else _INF
            b1 = self.metric_cell(self.inv, [raw0], nid) if impl0 else _INF
            take0 = impl1 is not None and b0 < raw0
            take1 = impl0 is not None and b1 < raw1
            if take0 and take1:
                if raw0 >= raw1:
                    take1 = False
                else:
                    take0 = False
            if take0:
                self.sol[(nid, 0)] = (b0, ("inv",))
            if take1:
                self.sol[(nid, 1)] = (b1, ("inv",))
        return self._construct()

    def _leaf(self, nid: int, ph: int):
        got = self.sol.get((nid, ph))
        if got is None or got[1] is None:
            raise ValueError(f"unmappable node {nid} phase {ph}")
        return got

    # -- construction -----------------------------------------------------

    def _construct(self) -> MappedNetlist:
        aig = self.aig
        mn = MappedNetlist(aig.name)
        memo: dict[tuple[int, int], int] = {}
        self._mn = mn
        self._memo = memo
        self._gctr = 0

        for nid in aig.pi_ids:
            net = mn.new_net()
            memo[(nid, 0)] = net
            mn.net_of_pi[aig.names.get(nid, f"pi{nid}")] = net
        latch_q: dict[int, int] = {}
        for i, nid in enumerate(aig.latch_ids):
            net = mn.new_net()
            memo[(nid, 0)] = net
            latch_q[i] = net

        mn.inputs = [
            (name, [memo[(l >> 1, 0)] for l in lits])
            for name, lits in aig.in_words
        ]
        for name, lits in aig.out_words:
            mn.outputs.append((name, [self._need_lit(l) for l in lits]))
        for i, nxt in enumerate(aig.latch_next):
            d = self._need_lit(nxt)
            name = aig.names.get(aig.latch_ids[i], f"ff{i}")
            mn.latches.append((f"dff_{name}", d, latch_q[i]))
        # outputs not grouped into words still need mapping
        covered = {n for _, lits in aig.out_words for n in lits}
        for name, lit in aig.pos:
            if lit not in covered:
                net = self._need_lit(lit)
                mn.outputs.append((name, [net]))
        return mn

    def _const_net(self, v: int) -> int:
        mn = self._mn
        for net, val in mn.const_nets.items():
            if val == v:
                return net
        net = mn.new_net()
        mn.const_nets[net] = v
        return net

    def _need_lit(self, lit: int) -> int:
        return self._need(lit >> 1, lit & 1)

    def _need(self, nid: int, ph: int) -> int:
        got = self._memo.get((nid, ph))
        if got is not None:
            return got
        aig = self.aig
        if aig.kind[nid] == KIND_CONST:
            net = self._const_net(ph)
            self._memo[(nid, ph)] = net
            return net
        _, impl = self._leaf(nid, ph)
        if impl == ("inv",):
            src = self._need(nid, ph ^ 1)
            net = self._instance(self.inv.name, [src])
        elif impl == ("src",):
            raise AssertionError("source net must be pre-seeded")
        elif impl[0] == "const":
            net = self._const_net(impl[1])
        elif impl[0] == "wire":
            net = self._need(impl[1], impl[2])
        else:
            _, v, leaves = impl
            ins = [
                self._need(leaves[v.pin_leaf[j]], v.pin_inv[j])
                for j in range(v.cell.k)
            ]
            net = self._instance(v.cell.name, ins)
        self._memo[(nid, ph)] = net
        return net

    def _instance(self, cell: str, ins: list[int]) -> int:
        mn = self._mn
        out = mn.new_net()
        mn.instances.append(MInst(f"g{self._gctr}", cell, ins, out))
        self._gctr += 1
        return out


def map_aig(aig: Aig, lib: CellLibrary, objective: str = "area"
            ) -> MappedNetlist:
    """Greedy cut-based cover; never worse than NAND2+INV decomposition
    (that cover is computed too and wins ties it beats)."""
    if objective not in ("area", "delay"):
        raise ValueError(f"unknown mapping objective {objective!r}")
    g = aig.compact()
    full = _Mapper(g, lib, objective).run()
    fallback = _Mapper(g, lib, objective,
                       restrict={"NAND2", "INV"}).run()

    def score(mn: MappedNetlist):
        if objective == "area":
            return (area(mn, lib).total_ge,)
        rep = sta(mn, lib)
        return (rep.critical_path_ns, area(mn, lib).total_ge)

    return min((full, fallback), key=score)


# -- reports ------------------------------------------------------------


@dataclass
class TimingReport:
    critical_path_ns: float
    fmax_mhz: float | None
    path: list[str]
    endpoint_slack: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "critical_path_ns": round(self.critical_path_ns, 6),
            "fmax_mhz": None if self.fmax_mhz is None
            else round(self.fmax_mhz, 3),
            "path": self.path,
            "endpoint_slack_ns": {
                k: round(v, 6) for k, v in sorted(self.endpoint_slack.items())
            },
        }


@dataclass
class AreaReport:
    total_ge: float
    cells: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "area_ge": round(self.total_ge, 4),
            "cells": dict(sorted(self.cells.items())),
        }


def sta(mn: MappedNetlist, lib: CellLibrary) -> TimingReport:
    arrival: dict[int, float] = {}
    pred: dict[int, MInst] = {}
    driver: dict[int, MInst] = {}
    for net in mn.const_nets:
        arrival[net] = 0.0
    for _, nets in mn.inputs:
        for n in nets:
            arrival[n] = 0.0
    for net in mn.net_of_pi.values():
        arrival.setdefault(net, 0.0)
    for _, _, q in mn.latches:
        arrival[q] = 0.0
    for inst in mn.instances:
        cell = lib.by_name[inst.cell]
        best_key = None
        best_a = 0.0
        best_pred = None
        for i in inst.ins:
            if i not in arrival:
                raise ValueError(
                    f"combinational loop or undriven net n{i} at {inst.name}"
                )
            a = arrival[i]
            d = driver.get(i)
            key = (-a, d.name if d is not None else "")
            if best_key is None or key < best_key:
                best_key = key
                best_a = a
                best_pred = d
        arrival[inst.out] = best_a + cell.delay
        driver[inst.out] = inst
        if best_pred is not None:
            pred[inst.out] = best_pred

    endpoints: dict[str, int] = {}
    for name, nets in mn.outputs:
        for i, n in enumerate(nets):
            label = f"{name}[{i}]" if len(nets) > 1 else name
            endpoints[label] = n
    for name, d, _ in mn.latches:
        endpoints[f"{name}.D"] = d

    slack: dict[str, float] = {}
    crit = 0.0
    crit_end: str | None = None
    for label in sorted(endpoints):
        a = arrival[endpoints[label]]
        if a > crit:
            crit = a
            crit_end = label
    for label in sorted(endpoints):
        slack[label] = crit - arrival[endpoints[label]]

    path: list[str] = []
    if crit_end is not None and crit > 0:
        net = endpoints[crit_end]
        inst = driver.get(net)
        while inst is not None:
            path.append(inst.name)
            inst = pred.get(inst.out)
        path.reverse()
    fmax = (1000.0 / crit) if crit > 0 else None
    return TimingReport(crit, fmax, path, slack)


def area(mn: MappedNetlist, lib: CellLibrary) -> AreaReport:
    counts: dict[str, int] = {}
    total = 0.0
    for inst in mn.instances:
        counts[inst.cell] = counts.get(inst.cell, 0) + 1
        total += lib.by_name[inst.cell].area
    for _ in mn.latches:
        counts["DFF"] = counts.get("DFF", 0) + 1
        total += lib.dff.area
    return AreaReport(total, counts)


# -- simulation adapter ---------------------------------------------------


class MappedSim:
    def __init__(self, mn: MappedNetlist, lib: CellLibrary):
        self.mn = mn
        self.lib = lib
        self.ports_in = mn.ports_in
        self.ports_out = mn.ports_out
        self.is_sequential = bool(mn.latches)
        self.state = {q: 0 for _, _, q in mn.latches}

    def reset(self):
        for q in self.state:
            self.state[q] = 0

    def step(self, inputs: dict[str, int]) -> dict[str, int]:
        mn = self.mn
        vals: dict[int, int] = dict(mn.const_nets)
        for name, nets in mn.inputs:
            v = inputs.get(name, 0)
            for i, n in enumerate(nets):
                vals[n] = (v >> i) & 1
        vals.update(self.state)
        for inst in mn.instances:
            cell = self.lib.by_name[inst.cell]
            vals[inst.out] = cell.tt.eval([vals[i] for i in inst.ins])
        out = {}
        for name, nets in mn.outputs:
            out[name] = sum((vals[n] << i) for i, n in enumerate(nets))
        nxt = {q: vals[d] for _, d, q in mn.latches}
        self.state.update(nxt)
        return out
