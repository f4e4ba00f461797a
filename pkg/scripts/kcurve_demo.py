"""Print search and closed-form K-curves of a few power-log functions for each couple.

Usage: python scripts/kcurve_demo.py [--p 2.0] [--cells 200]
"""

import argparse

import numpy as np

from gammaspaces import PowerLog, couple, k_closed, k_search, make_log_grid, indicator

COUPLES = (("classical-small", {}), ("grand-classical", {}),
           ("grand-grand", {"alpha": 2.0, "beta": 1.0}), ("weak-classical", {}))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=float, default=2.0)
    ap.add_argument("--cells", type=int, default=200)
    args = ap.parse_args(argv)
    grid = make_log_grid(cells=args.cells)
    t = np.geomspace(0.05, 0.9, 6)
    funcs = {"s^-1/(2p) log^-1": PowerLog(0.5 / args.p, -1.0), "chi(0,1/8]": indicator(0.125)}
    for tag, extra in COUPLES:
        cpl = couple(tag, args.p, **extra)
        for name, f in funcs.items():
            if tag == "weak-classical":
                f = PowerLog(1.0 / args.p, 1.0)
                name = "s^-1/p log^1"
            ks = k_search(f, cpl, t, grid=grid)
            kc = k_closed(f, cpl, t, grid)
            print(f"{tag:16s} {name:18s}")
            for ti, a, b in zip(t, ks, kc):
                print(f"    t={ti:.4f}  K_search={a:.6g}  K_closed={b:.6g}  ratio={a / b:.4f}")
            if tag == "weak-classical":
                break
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
