#!/usr/bin/env python3
"""Area/timing sweep of the MAC benchmark across adder policies and
rewrite settings; writes the pareto-flagged CSV."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from gateflow.bench import mac_case  # noqa: E402
from gateflow.flow import (  # noqa: E402
    FlowConfig, at_sweep, config_from_dict, sweep_csv,
)


def sweep_configs(top):
    out = []
    for policy, mobj in (("min_area", "area"), ("balanced", "area"),
                         ("min_delay", "delay")):
        for lms in (True, False):
            name = f"{policy}_lms{'on' if lms else 'off'}"
            cfg = config_from_dict({
                "top": top,
                "adder": {"policy": policy},
                "map": {"objective": mobj},
                "passes": {"lms": lms},
            })
            out.append((name, cfg))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="mac_at.csv")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--wa", type=int, default=16)
    ap.add_argument("--wb", type=int, default=16)
    ap.add_argument("--wc", type=int, default=32)
    args = ap.parse_args()
    top, src = mac_case(args.wa, args.wb, args.wc)
    rows = at_sweep(src, sweep_configs(top), jobs=args.jobs)
    text = sweep_csv(rows)
    Path(args.out).write_text(text)
    print(text, end="")
    pareto = [r for r in rows if r[3] == 1]
    print(f"# {len(pareto)} pareto points", file=sys.stderr)


if __name__ == "__main__":
    main()
