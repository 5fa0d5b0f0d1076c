"""Time-step convergence sweeps on BKW data for both equations.

    python3 scripts/run_convergence.py [--N 32] [--out out/convergence]

Writes one ``*_converge.csv`` per (equation, scheme, dt set) and a plot script.
"""
import argparse
import logging
from dataclasses import replace
from pathlib import Path

from savkinetic.harness import RunConfig, build_operator, run_converge, write_outputs

SWEEPS = {
    "boltzmann": [0.02, 0.01, 0.005, 0.0025],
    "landau": [0.002, 0.001, 0.0005, 0.00025],
    "landau-large": [0.02, 0.01, 0.005, 0.0025],
}
SCHEMES = ["sav1", "sav1-lm", "sav2", "sav2-lm"]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--N", type=int, default=32)
    p.add_argument("--S", type=float, default=3.3)
    p.add_argument("--out", default="out/convergence")
    p.add_argument("--schemes", default=",".join(SCHEMES))
    args = p.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    ops = {}
    for sweep, dts in SWEEPS.items():
        equation = sweep.split("-")[0]
        base = RunConfig(equation=equation, N=args.N, S=args.S, t0=0.5, t_end=0.6)
        if equation not in ops:
            ops[equation] = build_operator(base)
        for scheme in args.schemes.split(","):
            cfg = replace(base, scheme=scheme, name=f"{sweep}-{scheme}-N{args.N}")
            res = run_converge(cfg, dts, op=ops[equation])
            failed = [r.dt for r in res.rows if r.failure is not None]
            logging.info("%-14s %-8s slope %6.3f%s", sweep, scheme, res.slope,
                         f"  failed dt {failed}" if failed else "")
            write_outputs(res, Path(args.out))


if __name__ == "__main__":
    main()
