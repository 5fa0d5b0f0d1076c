"""Convergence and fixed-step error of the beta-stabilised scheme for several beta.

    python3 scripts/run_beta_study.py [--betas 1.1,5,10,100] [--out out/beta_study]
"""
import argparse
import logging

from savkinetic.harness import load_config, run_beta_study, write_outputs


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--config", default="scripts/configs/beta_study.ini")
    p.add_argument("--betas", default="1.1,5,10,100")
    p.add_argument("--dts", default="0.2,0.1,0.05,0.025")
    p.add_argument("--fixed-dt", type=float, default=0.025)
    p.add_argument("--out", default=None)
    args = p.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cfg = load_config(args.config)
    betas = [float(b) for b in args.betas.split(",")]
    dts = [float(d) for d in args.dts.split(",")]
    res = run_beta_study(cfg, betas, dts, fixed_dt=args.fixed_dt)
    for beta in betas:
        logging.info("beta %6g  slope %6.3f  error(dt=%g) %.3e  warnings %d", beta,
                     res.convergence[beta].slope, res.fixed_dt, res.fixed_errors[beta],
                     len(res.warnings[beta]))
    for path in write_outputs(res, args.out):
        logging.info("wrote %s", path)


if __name__ == "__main__":
    main()
