"""Command line entry point.

    savkinetic evolve      --config run.ini [--set key=value ...]
    savkinetic converge    --config run.ini --dts 0.02,0.01,0.005,0.0025
    savkinetic beta-study  --config run.ini --betas 1.1,5,10,100 --dts ...
    savkinetic modes-cache --config run.ini --out modes.bin

Exit status: 0 on success, 2 when a run finished its protocol but recorded a
scheme failure, 1 on usage, configuration or I/O errors.
"""
import argparse
import logging
import sys
from dataclasses import replace

from . import harness
from .collision import save_modes
from .errors import CorruptFile, MetadataMismatch

log = logging.getLogger("savkinetic")

OK, USAGE, FAILED = 0, 1, 2


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _pair(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="savkinetic",
                                     description="SAV solvers for homogeneous kinetic equations")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="INI file with a [run] section")
        p.add_argument("--set", dest="overrides", action="append", type=_pair, default=[],
                       metavar="KEY=VALUE", help="override a config value (repeatable)")
        p.add_argument("--out-dir", help="output directory (overrides output_dir)")

    common(sub.add_parser("evolve", help="run one evolution and write its diagnostics"))
    p = sub.add_parser("converge", help="time-step convergence study against BKW")
    common(p)
    p.add_argument("--dts", type=_floats, required=True)
    p = sub.add_parser("beta-study", help="sav1-pb convergence for several beta values")
    common(p)
    p.add_argument("--betas", type=_floats, required=True)
    p.add_argument("--dts", type=_floats, default=[0.2, 0.1, 0.05, 0.025])
    p.add_argument("--fixed-dt", type=float, default=None)
    p = sub.add_parser("modes-cache", help="precompute kernel modes into a cache file")
    common(p)
    p.add_argument("--out", required=True, help="cache file to write")
    return parser


def _load(args) -> harness.RunConfig:
    overrides = dict(args.overrides)
    if args.out_dir:
        overrides["output_dir"] = args.out_dir
    return harness.load_config(args.config, overrides)


def _emit(result):
    for path in harness.write_outputs(result):
        print(path)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = _load(args)
        if args.command == "modes-cache":
            # never reuse an existing cache here; always rebuild
            modes = harness.obtain_modes(replace(cfg, modes_cache=""))
            print(save_modes(modes, args.out))
            return OK
        if args.command == "evolve":
            result = harness.run_evolve(cfg)
            failed = not result.ok
        elif args.command == "converge":
            result = harness.run_converge(cfg, args.dts)
            failed = not result.ok
        else:
            result = harness.run_beta_study(cfg, args.betas, args.dts, args.fixed_dt)
            failed = not all(c.ok for c in result.convergence.values())
        _emit(result)
    except (OSError, ValueError, KeyError, MetadataMismatch, CorruptFile) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    if failed:
        log.warning("a run recorded a scheme failure; see the CSV comment lines")
        return FAILED
    return OK


if __name__ == "__main__":
    sys.exit(main())
