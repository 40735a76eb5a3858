#!/usr/bin/env python3
"""Build the reusable rewrite database: exhaustive classes up to three
inputs plus functions harvested from the bundled benchmark designs."""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from gateflow.bench import lms_corpus, mac_case  # noqa: E402
from gateflow.exact_synth import EffortConfig  # noqa: E402
from gateflow.flow import FlowConfig, run_flow  # noqa: E402
from gateflow.lms import build_database, harvest, save_db  # noqa: E402
from gateflow.tt import TruthTable  # noqa: E402


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="lms.db")
    args = ap.parse_args()

    t0 = time.time()
    funcs = []
    for k in (1, 2, 3):
        funcs.extend(TruthTable(k, b) for b in range(1 << (1 << k)))
    db = build_database(funcs, EffortConfig())
    print(f"exhaustive k<=3: {len(db.entries)} entries "
          f"({time.time() - t0:.1f}s)")

    designs = lms_corpus() + [mac_case(8, 8, 16)]
    for top, src in designs:
        res = run_flow(src, FlowConfig(top=top, lms=False))
        extra = build_database(
            (t for t in harvest(res.aig) if (t.k, t.bits) not in db.entries),
            EffortConfig(exact_timeout_s=0.0),
        )
        n = 0
        for entry in extra.entries.values():
            n += db.add(entry)
        print(f"harvested {top}: +{n} entries")
    Path(args.out).write_text(save_db(db))
    print(f"wrote {args.out}: {len(db.entries)} entries "
          f"({time.time() - t0:.1f}s total)")


if __name__ == "__main__":
    main()
