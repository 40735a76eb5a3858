"""Command line flow driver.

Subcommands: pickle, elab, synth, lmsdb, sweep. Exit codes: 0 success,
1 user/input error, 2 internal invariant violation. Flags override
config file keys.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .diagnostics import DiagnosticError
from .elaborate import elaborate
from .emit import emit_v2005
from .exact_synth import EffortConfig
from .flow import (
    REFERENCE_BANNER, FlowConfig, at_sweep, config_from_dict, run_flow,
    sweep_csv,
)
from .lms import DbFormatError, build_database, harvest, load_db, save_db
from .parser import parse_source_set, parse_text
from .pickler import pickle_sources
from .svast import SourceSet
from .tt import TruthTable
from .wordnet import NetlistError

ABOUT = f"""gateflow {__version__}
SystemVerilog-to-gates synthesis flow: source pickling, parameter
pre-elaboration to plain Verilog, constant-stride part-select
optimization, table-driven AIG rewriting, an arithmetic unit library
with MAC fusion, and technology mapping with area/timing reports.
{REFERENCE_BANNER}
"""


def _read_manifest(path: str) -> SourceSet:
    data = json.loads(open(path).read())
    extra = set(data) - {"files", "top"}
    if extra:
        raise ValueError(f"unknown manifest keys: {sorted(extra)}")
    files = tuple((p, open(p).read()) for p in data["files"])
    return SourceSet(files, data["top"])


def _parse_param_args(items) -> dict[str, int]:
    out = {}
    for item in items or ():
        name, _, value = item.partition("=")
        if not value:
            raise ValueError(f"bad --param {item!r}, expected NAME=VALUE")
        out[name] = int(value, 0)
    return out


def cmd_pickle(args) -> int:
    ss = _read_manifest(args.manifest)
    text = pickle_sources(ss)
    _write(args.out, text)
    return 0


def cmd_elab(args) -> int:
    text = open(args.input).read()
    design = parse_text(text, args.top, path=args.input)
    overrides = _parse_param_args(args.param)
    out, sidecar = elaborate(design, args.top, overrides or None)
    _write(args.out, emit_v2005(out))
    map_path = args.map or (args.out + ".map.json" if args.out else None)
    if map_path:
        _write(map_path, json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return 0


def _flow_config(args) -> FlowConfig:
    cfg = FlowConfig()
    if getattr(args, "config", None):
        cfg = config_from_dict(json.loads(open(args.config).read()), cfg)
    if args.top:
        cfg.top = args.top
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "no_partselect", False):
        cfg.partselect = False
    if getattr(args, "no_lms", False):
        cfg.lms = False
    if getattr(args, "no_fma", False):
        cfg.fma = False
    if getattr(args, "db", None):
        cfg.db_path = args.db
    if getattr(args, "lib", None):
        cfg.lib_path = args.lib
    if getattr(args, "param", None):
        cfg.params = _parse_param_args(args.param)
    cfg.validate()
    return cfg


def cmd_synth(args) -> int:
    cfg = _flow_config(args)
    if not cfg.top:
        raise ValueError("--top (or config key top) is required")
    source = open(args.input).read()
    result = run_flow(source, cfg)
    _write(args.out, result.netlist_verilog)
    _write(args.report, result.qor_json())
    if not args.out and not args.report:
        sys.stdout.write(result.qor_json())
    return 0


def cmd_lmsdb(args) -> int:
    if args.action == "inspect":
        db = load_db(open(args.db).read())
        hist = db.histogram()
        print(f"lmsdb v{db.version} kmax={db.k_max}")
        print(f"entries: {len(db.entries)}")
        for k in sorted(hist):
            print(f"  k={k}: {hist[k]}")
        return 0
    funcs = []
    kmax = args.exhaustive_k
    for k in range(1, kmax + 1):
        funcs.extend(TruthTable(k, b) for b in range(1 << (1 << k)))
    effort = EffortConfig()
    db = build_database(funcs, effort)
    for path in args.sources or ():
        top = args.top
        if top is None:
            raise ValueError("--top required when harvesting sources")
        cfg = FlowConfig(top=top, lms=False)
        res = run_flow(open(path).read(), cfg)
        extra = build_database(
            (t for t in harvest(res.aig)
             if (t.k, t.bits) not in db.entries),
            EffortConfig(exact_timeout_s=0.0),
        )
        for key, entry in extra.entries.items():
            db.add(entry)
    _write(args.out, save_db(db))
    return 0


def cmd_sweep(args) -> int:
    source = open(args.input).read()
    data = json.loads(open(args.configs).read())
    extra = set(data) - {"configs"}
    if extra:
        raise ValueError(f"unknown sweep keys: {sorted(extra)}")
    configs = []
    for row in data["configs"]:
        row = dict(row)
        name = row.pop("name")
        cfg = config_from_dict(row)
        if args.top:
            cfg.top = args.top
        if args.seed is not None:
            cfg.seed = args.seed
        cfg.validate()
        configs.append((name, cfg))
    rows = at_sweep(source, configs, jobs=args.jobs)
    _write(args.out, sweep_csv(rows))
    if all(a == "error" for _, a, _, _ in rows):
        return 1
    return 0


def _write(path: str | None, text: str):
    if path:
        with open(path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gateflow", description=ABOUT)
    ap.add_argument("--about", action="store_true",
                    help="print tool context and exit")
    sub = ap.add_subparsers(dest="cmd")

    p = sub.add_parser("pickle", help="combine sources into one ordered file")
    p.add_argument("--manifest", required=True,
                   help="JSON {files: [...], top: name}")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_pickle)

    p = sub.add_parser("elab", help="pre-elaborate to plain Verilog")
    p.add_argument("input")
    p.add_argument("--top", required=True)
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--out")
    p.add_argument("--map", help="sidecar uniquification map path")
    p.set_defaults(fn=cmd_elab)

    p = sub.add_parser("synth", help="full synthesis flow")
    p.add_argument("input")
    p.add_argument("--top")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--out", help="mapped netlist output")
    p.add_argument("--report", help="QoR JSON output")
    p.add_argument("--db", help="rewrite database path")
    p.add_argument("--lib", help="cell library JSON path")
    p.add_argument("--no-partselect", action="store_true")
    p.add_argument("--no-lms", action="store_true")
    p.add_argument("--no-fma", action="store_true")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("lmsdb", help="build or inspect rewrite databases")
    p.add_argument("action", choices=["build", "inspect"])
    p.add_argument("--db", help="database to inspect")
    p.add_argument("--out", help="database output path (build)")
    p.add_argument("--exhaustive-k", type=int, default=3)
    p.add_argument("--sources", nargs="*", help="designs to harvest")
    p.add_argument("--top")
    p.set_defaults(fn=cmd_lmsdb)

    p = sub.add_parser("sweep", help="area/timing sweep over flow configs")
    p.add_argument("input")
    p.add_argument("--top")
    p.add_argument("--configs", required=True,
                   help="JSON {configs: [{name, ...flow keys}]}")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.about:
        print(ABOUT)
        return 0
    if not getattr(args, "cmd", None):
        ap.print_help()
        return 1
    try:
        return args.fn(args)
    except (DiagnosticError, NetlistError, DbFormatError, ValueError,
            OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AssertionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
