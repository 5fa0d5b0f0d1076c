"""Experiment runners: single evolutions, time-step convergence sweeps, beta study.

All runners take a :class:`RunConfig`.  Results are plain dataclasses; the
``write_*`` functions turn them into CSV files with ``#`` comment lines that
echo the resolved configuration and any failure record.
"""
import configparser
import math
import warnings
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .collision import (BOLTZMANN, LANDAU, BoltzmannKernel, BoltzmannOperator, LandauKernel,
                        LandauOperator, load_modes, precompute_boltzmann_modes,
                        precompute_landau_modes, save_modes)
from .collision.boltzmann import default_radial_order
from .errors import KineticError
from .grid import VelocityGrid, make_grid
from .reference import BiMaxwellianParams, bi_maxwellian, bkw, max_norm_error
from .schemes import BetaBoundWarning, SchemeConfig, StepReport, init_state, state_report, step

EVOLVE_HEADER = ("step,t,mass,mom_x,mom_y,energy,entropy,modified_entropy,r,min_f,D,"
                 "xi,lambda_sum,clipped,corrected")
CONVERGE_HEADER = "dt,error,slope"
BETA_HEADER = "beta,dt,error,slope"


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one run.

    ``L`` is derived from ``S``: ``(3 sqrt(2) + 1) S / 2`` for Boltzmann and
    ``2 S`` for Landau.  The kernel cut-off radius defaults to ``2 S`` for both.
    """

    equation: str = BOLTZMANN
    scheme: str = "sav1"
    N: int = 32
    S: float = 3.3
    dt: float = 0.01
    t0: float = 0.5
    t_end: float = 0.6
    C: float = 10.0
    eps: float = 1e-16
    beta: float | None = None
    kernel_const: float | None = None
    gamma: float = 0.0
    R: float | None = None
    M_r: int | None = None
    initial: str = "bkw"
    bimax_rho: tuple = (0.5, 0.5)
    bimax_T: tuple = (1.0, 1.0)
    bimax_V1: tuple = (-1.0, 2.0)
    bimax_V2: tuple = (3.0, -3.0)
    cadence: int = 1
    output_dir: str = "out"
    name: str = ""
    modes_cache: str = ""

    def __post_init__(self):
        if self.equation not in (BOLTZMANN, LANDAU):
            raise ValueError(f"equation must be {BOLTZMANN!r} or {LANDAU!r}")
        if self.initial not in ("bkw", "bimax"):
            raise ValueError("initial must be 'bkw' or 'bimax'")
        if not self.t_end >= self.t0:
            raise ValueError("t_end must not precede t0")
        if not self.S > 0 or self.N < 4 or self.cadence < 1:
            raise ValueError("need S > 0, N >= 4, cadence >= 1")
        self.scheme_config()

    @property
    def L(self) -> float:
        if self.equation == BOLTZMANN:
            return (3.0 * math.sqrt(2.0) + 1.0) * self.S / 2.0
        return 2.0 * self.S

    @property
    def radius(self) -> float:
        return self.R if self.R is not None else 2.0 * self.S

    @property
    def label(self) -> str:
        return self.name or f"{self.equation}-{self.scheme}"

    @property
    def n_steps(self) -> int:
        span = self.t_end - self.t0
        n = int(round(span / self.dt))
        if abs(n * self.dt - span) > 1e-9 * max(1.0, span):
            raise ValueError(f"t_end - t0 = {span} is not a multiple of dt = {self.dt}")
        return n

    def grid(self) -> VelocityGrid:
        return make_grid(self.N, self.L)

    def scheme_config(self) -> SchemeConfig:
        return SchemeConfig(self.scheme, self.dt, C=self.C, eps=self.eps, beta=self.beta)

    def kernel(self):
        if self.equation == BOLTZMANN:
            const = self.kernel_const if self.kernel_const is not None else 1.0 / (2.0 * np.pi)
            return BoltzmannKernel(C_B=const, gamma=self.gamma, R=self.radius)
        const = self.kernel_const if self.kernel_const is not None else 1.0 / 16.0
        return LandauKernel(C_L=const, gamma=self.gamma, R=self.radius)

    def expected_metadata(self) -> dict:
        k = self.kernel()
        if self.equation == BOLTZMANN:
            M_r = self.M_r or default_radial_order(self.N)
            params, orders = (float(k.C_B), float(k.gamma), float(k.R)), (M_r, 0)
        else:
            params, orders = (float(k.C_L), float(k.gamma), float(k.R or 0.0)), (0, 0)
        return {"operator": self.equation, "N": self.N, "L": self.L,
                "params": params, "orders": orders}

    def bimax_params(self) -> BiMaxwellianParams:
        return BiMaxwellianParams(rho1=self.bimax_rho[0], rho2=self.bimax_rho[1],
                                  T1=self.bimax_T[0], T2=self.bimax_T[1],
                                  V1=tuple(self.bimax_V1), V2=tuple(self.bimax_V2))

    def initial_density(self, grid: VelocityGrid) -> np.ndarray:
        if self.initial == "bkw":
            return bkw(grid, self.t0)
        return bi_maxwellian(grid, self.bimax_params())

    def echo(self) -> list[str]:
        """``key = value`` lines of the resolved configuration, derived L included."""
        lines = [f"{f.name} = {_fmt_value(getattr(self, f.name))}" for f in fields(self)]
        lines.append(f"L = {_fmt_value(self.L)}")
        lines.append(f"R_effective = {_fmt_value(self.radius)}")
        return lines


def _fmt_value(v):
    if v is None:
        return ""
    if isinstance(v, (tuple, list)):
        return ", ".join(_fmt_value(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _optional(convert):
    return lambda text: None if text == "" else convert(text)


def _floats(text):
    return tuple(float(x) for x in text.split(","))


_PARSERS = {
    "N": int, "cadence": int, "M_r": _optional(int),
    "S": float, "dt": float, "t0": float, "t_end": float, "C": float, "eps": float,
    "gamma": float, "beta": _optional(float), "kernel_const": _optional(float),
    "R": _optional(float),
    "bimax_rho": _floats, "bimax_T": _floats, "bimax_V1": _floats, "bimax_V2": _floats,
}


def _parse_value(name, text):
    if name not in {f.name for f in fields(RunConfig)}:
        raise KeyError(f"unknown config key {name!r}")
    return _PARSERS.get(name, str)(text.strip())


def config_from_mapping(values: dict, base: RunConfig | None = None) -> RunConfig:
    """Build a RunConfig from string values, on top of ``base`` (or the defaults)."""
    parsed = {k: _parse_value(k, v) if isinstance(v, str) else v for k, v in values.items()}
    return replace(base or RunConfig(), **parsed)


def load_config(path, overrides: dict | None = None) -> RunConfig:
    """Read the ``[run]`` section of an INI file; ``overrides`` win over file values."""
    parser = configparser.ConfigParser()
    parser.optionxform = str
    with open(path) as fh:
        parser.read_file(fh)
    if not parser.has_section("run"):
        raise ValueError(f"{path}: missing [run] section")
    values = dict(parser.items("run"))
    values.update(overrides or {})
    return config_from_mapping(values)


def dump_config(cfg: RunConfig, path) -> Path:
    path = Path(path)
    parser = configparser.ConfigParser()
    parser.optionxform = str
    parser["run"] = {f.name: _fmt_value(getattr(cfg, f.name)) for f in fields(cfg)}
    with open(path, "w") as fh:
        parser.write(fh)
    return path


# -- operators -------------------------------------------------------------

def obtain_modes(cfg: RunConfig, grid: VelocityGrid | None = None):
    """Kernel modes for ``cfg``: from ``cfg.modes_cache`` if present, else computed.

    A freshly computed table is written to ``cfg.modes_cache`` when a path is
    set.  A cache file whose metadata disagrees with ``cfg`` raises
    MetadataMismatch rather than being overwritten.
    """
    grid = grid or cfg.grid()
    cache = Path(cfg.modes_cache) if cfg.modes_cache else None
    if cache is not None and cache.exists():
        return load_modes(cache, expected=cfg.expected_metadata())
    if cfg.equation == BOLTZMANN:
        modes = precompute_boltzmann_modes(grid, cfg.kernel(), M_r=cfg.M_r)
    else:
        modes = precompute_landau_modes(grid, cfg.kernel())
    if cache is not None:
        cache.parent.mkdir(parents=True, exist_ok=True)
        save_modes(modes, cache)
    return modes


def build_operator(cfg: RunConfig, grid: VelocityGrid | None = None):
    grid = grid or cfg.grid()
    modes = obtain_modes(cfg, grid)
    if cfg.equation == BOLTZMANN:
        return BoltzmannOperator(grid, modes)
    return LandauOperator(grid, modes)


# -- evolve ----------------------------------------------------------------

@dataclass
class Failure:
    step: int
    t: float
    kind: str
    message: str


@dataclass
class EvolveResult:
    config: RunConfig
    reports: list
    f: np.ndarray
    failure: Failure | None = None
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failure is None


def run_evolve(cfg: RunConfig, op=None, f0=None, on_step=None) -> EvolveResult:
    """Step from ``t0`` to ``t_end`` with fixed ``dt``.

    Reports are kept for step 0, every ``cadence`` steps and the last step.
    ``on_step(state, report)`` is called after every step.  A solver error
    ends the run early and is recorded in ``failure``.
    """
    grid = op.grid if op is not None else cfg.grid()
    op = op if op is not None else build_operator(cfg, grid)
    scfg = cfg.scheme_config()
    f0 = cfg.initial_density(grid) if f0 is None else f0
    n_steps = cfg.n_steps
    state = init_state(grid, f0, scfg, cfg.t0)
    reports = [state_report(grid, state, scfg)]
    failure = None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", BetaBoundWarning)
        for k in range(n_steps):
            try:
                new, rep = step(state, op, scfg)
            except KineticError as exc:
                failure = Failure(state.n, state.t, type(exc).__name__, str(exc))
                break
            # fixed-step clock, free of accumulated rounding
            new.t = rep.t = cfg.t0 + (k + 1) * cfg.dt
            if on_step is not None:
                on_step(new, rep)
            state = new
            if (k + 1) % cfg.cadence == 0 or k + 1 == n_steps:
                reports.append(rep)
    notes = [str(w.message) for w in caught if issubclass(w.category, BetaBoundWarning)]
    return EvolveResult(cfg, reports, state.f, failure, notes)


# -- convergence -------------------------------------------------------------

@dataclass
class ConvergenceRow:
    dt: float
    error: float
    failure: Failure | None = None


@dataclass
class ConvergenceResult:
    config: RunConfig
    rows: list
    slope: float

    @property
    def ok(self) -> bool:
        return all(r.failure is None for r in self.rows)


def fit_slope(dts, errors) -> float:
    """Least-squares slope of ``log error`` against ``log dt`` over finite rows (>= 3)."""
    dts, errors = np.asarray(dts, float), np.asarray(errors, float)
    ok = np.isfinite(errors) & (errors > 0)
    if ok.sum() < 3:
        return float("nan")
    return float(np.polyfit(np.log(dts[ok]), np.log(errors[ok]), 1)[0])


def run_converge(cfg: RunConfig, dts, op=None, exact=None, f0=None) -> ConvergenceResult:
    """One evolution per ``dt`` to ``cfg.t_end``, max-norm error against ``exact``.

    ``exact(grid, t)`` defaults to the BKW solution, so the initial condition
    must be ``bkw`` unless a different reference is supplied.  ``f0`` replaces
    the configured initial density.
    """
    dts = [float(d) for d in dts]
    if len(dts) < 3:
        raise ValueError("a convergence study needs at least three time steps")
    if exact is None:
        if cfg.initial != "bkw":
            raise ValueError("no analytic reference for this initial condition")
        exact = bkw
    grid = op.grid if op is not None else cfg.grid()
    op = op if op is not None else build_operator(cfg, grid)
    ref = exact(grid, cfg.t_end)
    rows = []
    for dt in dts:
        rcfg = replace(cfg, dt=dt)
        run = run_evolve(replace(rcfg, cadence=max(1, rcfg.n_steps)), op=op, f0=f0)
        err = max_norm_error(run.f, ref) if run.ok else float("nan")
        rows.append(ConvergenceRow(dt, err, run.failure))
    return ConvergenceResult(cfg, rows, fit_slope(dts, [r.error for r in rows]))


# -- beta study --------------------------------------------------------------

@dataclass
class BetaStudyResult:
    config: RunConfig
    betas: list
    convergence: dict
    fixed_dt: float
    fixed_errors: dict
    series: dict
    warnings: dict


def run_beta_study(cfg: RunConfig, betas, dts, fixed_dt=None, op=None) -> BetaStudyResult:
    """Convergence of sav1-pb for each beta plus an entropy series at ``fixed_dt``."""
    if cfg.equation != BOLTZMANN:
        raise ValueError("the beta study needs the Boltzmann gain/loss split")
    cfg = replace(cfg, scheme="sav1-pb", beta=float(betas[0]))
    grid = op.grid if op is not None else cfg.grid()
    op = op if op is not None else build_operator(cfg, grid)
    fixed_dt = float(min(dts) if fixed_dt is None else fixed_dt)
    conv, errs, series, notes = {}, {}, {}, {}
    for beta in betas:
        bcfg = replace(cfg, beta=float(beta))
        conv[beta] = run_converge(bcfg, dts, op=op)
        run = run_evolve(replace(bcfg, dt=fixed_dt), op=op)
        errs[beta] = max_norm_error(run.f, bkw(grid, cfg.t_end)) if run.ok else float("nan")
        series[beta] = run.reports
        notes[beta] = run.warnings
    return BetaStudyResult(cfg, list(betas), conv, fixed_dt, errs, series, notes)


# -- output ----------------------------------------------------------------

def _num(x) -> str:
    return repr(float(x))


def _report_row(r: StepReport) -> str:
    vals = [str(r.step), _num(r.t), _num(r.mass), _num(r.momentum[0]), _num(r.momentum[1]),
            _num(r.energy), _num(r.entropy), _num(r.modified_entropy), _num(r.r), _num(r.min_f),
            _num(r.D), _num(r.xi), _num(r.lambda_sum), str(int(r.clipped)), str(int(r.corrected))]
    return ",".join(vals)


def _comment_block(cfg: RunConfig, extra=()) -> list[str]:
    return ["# config: " + line for line in cfg.echo()] + [f"# {x}" for x in extra]


def _failure_line(fail: Failure, prefix="failure") -> str:
    msg = fail.message.replace("\n", " ")
    return f"# {prefix}: step={fail.step} t={fail.t!r} kind={fail.kind} message={msg}"


def _write(path, lines) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def write_evolve_csv(result: EvolveResult, path) -> Path:
    lines = _comment_block(result.config) + [EVOLVE_HEADER]
    lines += [_report_row(r) for r in result.reports]
    lines += [f"# warning: {w}" for w in result.warnings]
    if result.failure is not None:
        lines.append(_failure_line(result.failure))
    return _write(path, lines)


def write_converge_csv(result: ConvergenceResult, path) -> Path:
    lines = _comment_block(result.config) + [CONVERGE_HEADER]
    lines += [f"{_num(r.dt)},{_num(r.error)},{_num(result.slope)}" for r in result.rows]
    for r in result.rows:
        if r.failure is not None:
            lines.append(_failure_line(r.failure, prefix=f"failure dt={r.dt!r}"))
    return _write(path, lines)


def write_beta_csv(result: BetaStudyResult, path) -> Path:
    lines = _comment_block(result.config, [f"fixed_dt = {result.fixed_dt!r}"]) + [BETA_HEADER]
    for beta in result.betas:
        conv = result.convergence[beta]
        lines += [f"{_num(beta)},{_num(r.dt)},{_num(r.error)},{_num(conv.slope)}" for r in conv.rows]
    for beta in result.betas:
        lines.append(f"# fixed_dt_error: beta={beta!r} error={result.fixed_errors[beta]!r}")
        for r in result.convergence[beta].rows:
            if r.failure is not None:
                lines.append(_failure_line(r.failure, prefix=f"failure beta={beta!r} dt={r.dt!r}"))
        lines += [f"# warning: beta={beta!r} {w}" for w in result.warnings[beta]]
    return _write(path, lines)


def write_beta_series_csv(result: BetaStudyResult, path) -> Path:
    lines = _comment_block(result.config, [f"fixed_dt = {result.fixed_dt!r}"])
    lines.append("beta," + EVOLVE_HEADER)
    for beta in result.betas:
        lines += [f"{_num(beta)}," + _report_row(r) for r in result.series[beta]]
    return _write(path, lines)


PLOT_SCRIPT = '''"""Plot the CSV files produced by the savkinetic harness.

Usage: python {name} [files...]   (defaults to the files listed below)
"""
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

FILES = {files!r}


def load(path):
    with open(path) as fh:
        rows = [line for line in fh if not line.startswith("#")]
    return np.genfromtxt(rows, delimiter=",", names=True)


def plot(path):
    data = load(path)
    cols = data.dtype.names
    fig, ax = plt.subplots()
    if "modified_entropy" in cols:
        ax.plot(data["t"], data["entropy"], label="entropy")
        ax.plot(data["t"], data["modified_entropy"], "--", label="modified entropy")
        ax.set_xlabel("t")
    elif "beta" in cols:
        for b in np.unique(data["beta"]):
            sel = data["beta"] == b
            ax.loglog(data["dt"][sel], data["error"][sel], "o-", label=f"beta={{b:g}}")
        ax.set_xlabel("dt")
        ax.set_ylabel("max-norm error")
    else:
        ax.loglog(data["dt"], data["error"], "o-", label=f"slope {{data['slope'][0]:.3f}}")
        ax.set_xlabel("dt")
        ax.set_ylabel("max-norm error")
    ax.legend()
    out = path.rsplit(".", 1)[0] + ".png"
    fig.savefig(out, dpi=120)
    plt.close(fig)
    print(out)


if __name__ == "__main__":
    for p in sys.argv[1:] or FILES:
        plot(p)
'''


def write_plot_script(csv_paths, path) -> Path:
    path = Path(path)
    files = [str(Path(p)) for p in csv_paths]
    return _write(path, PLOT_SCRIPT.format(name=path.name, files=files).rstrip("\n").split("\n"))


def write_outputs(result, out_dir=None) -> list[Path]:
    """CSV files for ``result`` plus a plot script, under ``out_dir`` or the config's."""
    cfg = result.config
    out = Path(out_dir or cfg.output_dir)
    if isinstance(result, EvolveResult):
        paths = [write_evolve_csv(result, out / f"{cfg.label}_evolve.csv")]
    elif isinstance(result, ConvergenceResult):
        paths = [write_converge_csv(result, out / f"{cfg.label}_converge.csv")]
    elif isinstance(result, BetaStudyResult):
        paths = [write_beta_csv(result, out / f"{cfg.label}_beta.csv"),
                 write_beta_series_csv(result, out / f"{cfg.label}_beta_entropy.csv")]
    else:
        raise TypeError(f"cannot write {type(result).__name__}")
    paths.append(write_plot_script(paths, out / f"plot_{cfg.label}.py"))
    return paths


__all__ = [
    "RunConfig", "load_config", "dump_config", "config_from_mapping",
    "obtain_modes", "build_operator",
    "Failure", "EvolveResult", "run_evolve",
    "ConvergenceRow", "ConvergenceResult", "fit_slope", "run_converge",
    "BetaStudyResult", "run_beta_study",
    "write_evolve_csv", "write_converge_csv", "write_beta_csv", "write_beta_series_csv",
    "write_plot_script", "write_outputs",
    "EVOLVE_HEADER", "CONVERGE_HEADER", "BETA_HEADER",
]
