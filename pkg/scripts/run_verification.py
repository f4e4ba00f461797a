"""Run every verification scenario (or the named ones) and export the report.

Usage: python scripts/run_verification.py [--out report.csv] [--format csv|json] [--jobs N] [id ...]
"""

import argparse
import json
import os
import sys
import tempfile

from gammaspaces import cli


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="verification_report.csv")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    ap.add_argument("scenarios", nargs="*")
    args = ap.parse_args(argv)
    cfg = {"command": "verify", "format": args.format, "jobs": args.jobs, "out": args.out}
    if args.scenarios:
        cfg["scenarios"] = [{"scenario": s} for s in args.scenarios]
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(cfg, fh)
    try:
        code = cli.main(["verify", "--config", fh.name, "-v"])
    finally:
        os.unlink(fh.name)
    print(f"report written to {args.out} (exit {code})")
    return code


if __name__ == "__main__":
    sys.exit(main())
