"""Record regression pins (ratio windows) for every scenario's default parameters.

Usage: python scripts/record_pins.py [--out tests/pins/windows.json] [scenario ...]
"""

import argparse
import json
import os
import sys
import time

from gammaspaces import harness
from gammaspaces.grids import make_log_grid


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    here = os.path.dirname(os.path.abspath(__file__))
    ap.add_argument("--out", default=os.path.join(here, "..", "tests", "pins", "windows.json"))
    ap.add_argument("scenarios", nargs="*")
    args = ap.parse_args(argv)
    ids = args.scenarios or sorted(harness.REGISTRY)
    grid = make_log_grid()
    pins = {}
    if os.path.exists(args.out) and args.scenarios:
        with open(args.out) as fh:
            pins = json.load(fh)
    for sid in ids:
        reports = []
        for params in harness.REGISTRY[sid].defaults:
            start = time.perf_counter()
            rep = harness.run_scenario(sid, params, grid=grid)
            reports.append(rep)
            print(f"{sid:34s} [{rep.ratio_min:.6g}, {rep.ratio_max:.6g}] "
                  f"{time.perf_counter() - start:6.1f}s {'FAIL ' + rep.failures[0] if rep.failures else ''}",
                  flush=True)
        pins.update(harness.pin_windows(reports))
    os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
    harness.atomic_write(args.out, json.dumps(pins, indent=1, sort_keys=True) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
