"""Scalar-auxiliary-variable time integrators for ``df/dt = Q(f)``.

Every scheme evolves ``(f, r)`` with ``r^0 = sqrt(H(f^0))`` and
``H(f) = int f log f dv + C``.  The coupled linear equations for
``(f^{n+1}, r^{n+1})`` are reduced by substitution to a scalar equation for
``r^{n+1}``, after which ``f^{n+1}`` is explicit.

Scheme tags:

=========  =====================================================
sav1       first order
sav2-bdf   second order, BDF2 with ``2 f^n - f^{n-1}`` extrapolation
sav2-cn    second order, Crank-Nicolson with midpoint extrapolation
sav1-pb    first order, beta-stabilised (Boltzmann gain/loss split)
sav1-l     sav1 + pointwise KKT cut-off (positivity)
sav2-l     BDF2 + positive extrapolation + KKT cut-off
sav1-lm    sav1-l + scalar mass multiplier
sav2-lm    sav2-l + scalar mass multiplier
=========  =====================================================

Operators are callables ``op(f) -> Q(f)`` carrying a ``grid`` attribute;
``sav1-pb`` also needs ``op.split(f) -> (Q+, Q-)``.
"""
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (Degenerate, MissingHistory, NegativeDensity, NoConvergence,
                     NonPositiveDensity, NonPositiveModifiedEntropy, OperatorWithoutSplit)
from .grid import entropy, integrate, moments
from .reference import maxwellian_entropy

SCHEMES = ("sav1", "sav2-bdf", "sav2-cn", "sav1-pb", "sav1-l", "sav2-l", "sav1-lm", "sav2-lm")
ALIASES = {"sav2": "sav2-bdf"}
SECOND_ORDER = {"sav2-bdf", "sav2-cn", "sav2-l", "sav2-lm"}
STARTUP = {"sav2-bdf": "sav1", "sav2-cn": "sav1", "sav2-l": "sav1-l", "sav2-lm": "sav1-lm"}


class BetaBoundWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SchemeConfig:
    scheme: str
    dt: float
    C: float = 10.0
    eps: float = 1e-16
    beta: float | None = None
    secant_tol: float = 1e-12
    secant_max_iter: int = 100
    # plain schemes abort once min f < -neg_tol * max f
    neg_tol: float = 1e-4

    def __post_init__(self):
        scheme = ALIASES.get(self.scheme, self.scheme)
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        object.__setattr__(self, "scheme", scheme)
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if scheme == "sav1-pb":
            if self.beta is None or self.beta < 0:
                raise ValueError("sav1-pb needs beta >= 0")

    @property
    def order(self) -> int:
        return 2 if self.scheme in SECOND_ORDER else 1


@dataclass
class SavState:
    f: np.ndarray
    r: float
    f_prev: np.ndarray | None = None
    r_prev: float | None = None
    n: int = 0
    t: float = 0.0
    H_min: float | None = None

    @property
    def has_history(self) -> bool:
        return self.f_prev is not None and self.r_prev is not None


@dataclass
class StepReport:
    step: int
    t: float
    mass: float
    momentum: np.ndarray
    energy: float
    entropy: float
    modified_entropy: float
    r: float
    min_f: float
    D: float = 0.0
    H_step: float = float("nan")
    xi: float = 0.0
    lambda_sum: float = 0.0
    clipped: int = 0
    corrected: bool = False
    order_used: int = 1
    r_old: float = float("nan")
    r_older: float = float("nan")
    beta_ok: bool = True
    extra: dict = field(default_factory=dict)


# -- pointwise pieces ------------------------------------------------------

def extrapolate_ab(f, f_prev):
    return 2.0 * f - f_prev


def extrapolate_midpoint(f, f_prev):
    return 1.5 * f - 0.5 * f_prev


def extrapolate_positive(f, f_prev):
    """``2f - f_prev`` where ``f >= f_prev``, else ``1/(2/f - 1/f_prev)``; positive output."""
    f, f_prev = np.asarray(f, float), np.asarray(f_prev, float)
    if np.any(f <= 0) or np.any(f_prev <= 0):
        raise NonPositiveDensity("positive extrapolation needs strictly positive inputs")
    up = f >= f_prev
    with np.errstate(divide="ignore"):
        down = 1.0 / (2.0 / f - 1.0 / f_prev)
    return np.where(up, 2.0 * f - f_prev, down)


def kkt_project(f_tilde, dt_eff, eps):
    """Pointwise solve of ``(f - f_tilde)/dt_eff = lam``, ``lam >= 0``, ``f >= eps``,
    ``lam (f - eps) = 0``.  Returns ``(f, lam)``."""
    f_tilde = np.asarray(f_tilde, float)
    clip = f_tilde < eps
    f = np.where(clip, eps, f_tilde)
    lam = np.where(clip, (eps - f_tilde) / dt_eff, 0.0)
    return f, lam


def mass_residual(xi, f_tilde, target_mass, dt_eff, eps, dv=1.0):
    """``F(xi) = int max(f_tilde + dt_eff xi, eps) dv - target_mass``."""
    return dv * float(np.sum(np.maximum(f_tilde + dt_eff * xi, eps))) - target_mass


def solve_mass_multiplier(f_tilde, target_mass, dt_eff, eps, dv=1.0,
                          tol=1e-12, max_iter=100) -> float:
    """Root of the nondecreasing piecewise-linear ``F`` by safeguarded secant.

    Starts from ``xi_0 = 0, xi_1 = -dt_eff``.  An analytic bracket is kept and a
    secant step that leaves it is replaced by bisection.  Once the residual is
    within ``tol * target_mass`` the active set is frozen and ``xi`` is solved
    exactly on it.
    """
    f_tilde = np.asarray(f_tilde, float)
    if not target_mass > 0:
        raise ValueError("target mass must be positive")
    area = dv * f_tilde.size
    if eps * area >= target_mass:
        raise NoConvergence(f"floor mass {eps * area:.3e} already exceeds target {target_mass:.3e}")
    atol = tol * target_mass

    def F(x):
        return mass_residual(x, f_tilde, target_mass, dt_eff, eps, dv)

    x0, F0 = 0.0, F(0.0)
    if abs(F0) <= atol and not np.any(f_tilde < eps):
        return 0.0

    # F(lo) = eps*area - target < 0; F(hi) >= 0 since max(x, eps) >= x
    lo = (eps - float(f_tilde.max())) / dt_eff
    hi = (target_mass - dv * float(f_tilde.sum())) / (dt_eff * area)
    hi = max(hi, lo)
    if F(hi) < 0:  # only through roundoff; widen until it brackets
        step = max(abs(hi), dt_eff, 1e-300)
        while F(hi) < 0:
            hi += step
            step *= 2
    x1 = -dt_eff
    F1 = F(x1)
    pts = [(x0, F0), (x1, F1)]
    for xk, Fk in pts:
        if Fk < 0:
            lo = max(lo, xk)
        elif Fk > 0:
            hi = min(hi, xk)

    x, Fx = (x1, F1) if abs(F1) < abs(F0) else (x0, F0)
    for _ in range(max_iter):
        if abs(Fx) <= atol:
            return _polish(x, f_tilde, target_mass, dt_eff, eps, dv)
        (xa, Fa), (xb, Fb) = pts[-2], pts[-1]
        denom = Fb - Fa
        cand = xb - Fb * (xb - xa) / denom if denom != 0 else math.nan
        if not (lo < cand < hi):
            cand = 0.5 * (lo + hi)
        Fc = F(cand)
        if Fc < 0:
            lo = cand
        elif Fc > 0:
            hi = cand
        else:
            return _polish(cand, f_tilde, target_mass, dt_eff, eps, dv)
        pts.append((cand, Fc))
        x, Fx = cand, Fc
        if hi - lo <= 4 * np.finfo(float).eps * max(abs(lo), abs(hi), 1e-300):
            return _polish(x, f_tilde, target_mass, dt_eff, eps, dv)
    if abs(Fx) <= atol:
        return _polish(x, f_tilde, target_mass, dt_eff, eps, dv)
    raise NoConvergence(f"mass multiplier not found in {max_iter} iterations (|F|={abs(Fx):.3e})")


def _polish(xi, f_tilde, target_mass, dt_eff, eps, dv, max_iter=64):
    """Newton on the active set.  F is convex and piecewise linear, so the
    iterates settle on the exact root of one linear piece in a few passes."""
    best, best_F = xi, abs(mass_residual(xi, f_tilde, target_mass, dt_eff, eps, dv))
    for _ in range(max_iter):
        active = f_tilde + dt_eff * xi > eps
        n_act = int(active.sum())
        if n_act == 0:
            break
        n_floor = f_tilde.size - n_act
        new = (target_mass / dv - eps * n_floor - float(f_tilde[active].sum())) / (dt_eff * n_act)
        F_new = abs(mass_residual(new, f_tilde, target_mass, dt_eff, eps, dv))
        if F_new < best_F or (F_new == best_F and new == xi):
            best, best_F = new, F_new
        if new == xi or np.array_equal(f_tilde + dt_eff * new > eps, active):
            break
        xi = new
    return best


def modified_entropy(state: SavState, order: int) -> float:
    if order == 1:
        return state.r**2
    if state.r_prev is None:
        raise MissingHistory("second-order modified entropy needs r^{n-1}")
    return 0.5 * state.r**2 + 0.5 * (2.0 * state.r - state.r_prev) ** 2


def dissipation_residual(r_new, r, r_prev, D, H, dt, order, beta=0.0, cn=False):
    """Residual of the discrete modified-entropy identity for one step.

    First order:  ``H~' - H~ + (r'-r)^2 - dt r'^2 D / ((1 + beta dt) H)``
    with ``H~ = r^2``.  Second order: ``H~' - H~ + (r'-2r+r_prev)^2/2 - dt r'^2 D/H``
    with ``H~ = r^2/2 + (2r - r_prev)^2/2``.  Crank-Nicolson (``cn=True``):
    ``r'^2 - r^2 - dt (r' + r)^2 D / (4H)``.  Returns ``(residual, scale)``.
    """
    if cn:
        dH = r_new**2 - r**2
        src = dt * (r_new + r) ** 2 * D / (4.0 * H)
        return dH - src, max(abs(dH), abs(src), r_new**2)
    if order == 1:
        dH = r_new**2 - r**2
        sq = (r_new - r) ** 2
        src = dt * r_new**2 * D / ((1.0 + beta * dt) * H)
    else:
        dH = (0.5 * r_new**2 + 0.5 * (2.0 * r_new - r) ** 2
              - 0.5 * r**2 - 0.5 * (2.0 * r - r_prev) ** 2)
        sq = 0.5 * (r_new - 2.0 * r + r_prev) ** 2
        src = dt * r_new**2 * D / H
    return dH + sq - src, max(abs(dH), sq, abs(src), r_new**2)


# -- helpers ---------------------------------------------------------------

def _grid(op):
    try:
        return op.grid
    except AttributeError as exc:
        raise TypeError("collision operator must expose .grid") from exc


def _H(grid, f, cfg):
    return integrate(grid, f * np.log(np.maximum(f, cfg.eps))) + cfg.C


def _logf(f, eps):
    return np.log(np.maximum(f, eps))


def _check_plain(f, cfg, what="f^n"):
    fmax = float(np.max(f))
    fmin = float(np.min(f))
    if not np.all(np.isfinite(f)):
        raise NonPositiveDensity(f"{what} is not finite")
    if fmax <= 0 or fmin < -cfg.neg_tol * fmax:
        raise NonPositiveDensity(f"{what} has min {fmin:.3e} (max {fmax:.3e})")


def _positive_H(H):
    if not H > 0:
        raise Degenerate(f"entropy H={H!r} is not positive; increase C")
    return H


# -- initialisation --------------------------------------------------------

def init_state(grid, f0, cfg: SchemeConfig, t0: float = 0.0) -> SavState:
    """``r^0 = sqrt(H(f^0))``; for sav1-pb also record ``H_min``."""
    f0 = np.array(grid.check(f0), dtype=float)
    if np.any(f0 < 0):
        raise NegativeDensity(f"initial density has entries down to {f0.min():.3e}")
    H0 = entropy(grid, f0, cfg.C, floor=cfg.eps)
    if not H0 > 0:
        raise NonPositiveModifiedEntropy(f"H(f0) + C = {H0!r} <= 0")
    state = SavState(f=f0, r=math.sqrt(H0), n=0, t=t0)
    if cfg.scheme == "sav1-pb":
        state.H_min = estimate_H_min(grid, f0, cfg.C)
    return state


def estimate_H_min(grid, f0, C) -> float:
    """Entropy of the Maxwellian sharing ``f0``'s mass and temperature, plus ``C``."""
    m = moments(grid, f0)
    return maxwellian_entropy(m.rho, m.T) + C


def beta_lower_bound(state: SavState, op, C: float | None = None) -> float:
    """``r / sqrt(H_min) * max Q-(f)`` with the current ``r`` (``r`` never increases).

    ``C`` is needed only when the state carries no ``H_min`` yet.
    """
    if state.H_min is None:
        if C is None:
            raise ValueError("state has no H_min; pass the entropy shift C")
        state.H_min = estimate_H_min(_grid(op), state.f, C)
    _, loss = op.split(state.f)
    return state.r / math.sqrt(state.H_min) * float(loss.max())


# -- scalar r-updates ------------------------------------------------------

def r_update_first(r, D, H, dt, beta=0.0):
    """``r^{n+1} = r^n / (1 - dt D / (2 H (1 + dt beta)))``; beta=0 gives sav1."""
    denom = 1.0 - dt * D / (2.0 * H * (1.0 + dt * beta))
    if not denom > 0:
        raise Degenerate(f"r-update denominator {denom!r}")
    return r / denom


def r_update_bdf(r, r_prev, D, H, dt):
    """Solve ``3 r' - 4 r + r_prev = dt r' D / H`` for ``r'``."""
    denom = 3.0 - dt * D / H
    if not denom > 0:
        raise Degenerate(f"3 - dt D*/H* = {denom!r}")
    return (4.0 * r - r_prev) / denom


def r_update_cn(r, D, H, dt):
    """Solve ``r' - r = dt (r' + r) D / (4 H)`` for ``r'``."""
    a = dt * D / (4.0 * H)
    if not 1.0 - a > 0:
        raise Degenerate(f"1 - dt D*/(4H*) = {1.0 - a!r}")
    return r * (1.0 + a) / (1.0 - a)


# -- predictors ------------------------------------------------------------

def _predict_first(state, op, cfg):
    grid = _grid(op)
    f = state.f
    H = _positive_H(_H(grid, f, cfg))
    Q = op(f)
    D = integrate(grid, Q * _logf(f, cfg.eps))
    r_new = r_update_first(state.r, D, H, cfg.dt)
    f_new = f + (cfg.dt * (r_new / math.sqrt(H))) * Q
    return f_new, r_new, D, H


def _predict_bdf(state, op, cfg, extrapolate):
    if not state.has_history:
        raise MissingHistory("BDF2 step needs f^{n-1}, r^{n-1}")
    grid = _grid(op)
    fs = extrapolate(state.f, state.f_prev)
    Hs = _positive_H(_H(grid, fs, cfg))
    Qs = op(fs)
    Ds = integrate(grid, Qs * _logf(fs, cfg.eps))
    r_new = r_update_bdf(state.r, state.r_prev, Ds, Hs, cfg.dt)
    f_new = (4.0 * state.f - state.f_prev + (2.0 * cfg.dt * (r_new / math.sqrt(Hs))) * Qs) / 3.0
    return f_new, r_new, Ds, Hs


def _predict_cn(state, op, cfg):
    if not state.has_history:
        raise MissingHistory("Crank-Nicolson step needs f^{n-1}")
    grid = _grid(op)
    fs = extrapolate_midpoint(state.f, state.f_prev)
    Hs = _positive_H(_H(grid, fs, cfg))
    Qs = op(fs)
    Ds = integrate(grid, Qs * _logf(fs, cfg.eps))
    r_new = r_update_cn(state.r, Ds, Hs, cfg.dt)
    f_new = state.f + (cfg.dt * (r_new + state.r) / (2.0 * math.sqrt(Hs))) * Qs
    return f_new, r_new, Ds, Hs


# -- public steps ----------------------------------------------------------

def _advance(state, f_new, r_new, cfg):
    keep_history = cfg.order == 2
    return SavState(f=f_new, r=r_new,
                    f_prev=state.f if keep_history else None,
                    r_prev=state.r if keep_history else None,
                    n=state.n + 1, t=state.t + cfg.dt, H_min=state.H_min)


def _report(grid, new, cfg, order_used, D, H, old=None, **kw):
    f = new.f
    m = integrate(grid, f)
    mom = np.array([integrate(grid, f * grid.vx), integrate(grid, f * grid.vy)])
    energy = integrate(grid, f * grid.v2)
    H_act = _H(grid, f, cfg) if np.all(np.isfinite(f)) else float("nan")
    order = 2 if (cfg.order == 2 and new.has_history) else 1
    return StepReport(step=new.n, t=new.t, mass=m, momentum=mom, energy=energy,
                      entropy=H_act, modified_entropy=modified_entropy(new, order),
                      r=new.r, min_f=float(f.min()), D=D, H_step=H,
                      order_used=order_used,
                      r_old=old.r if old is not None else float("nan"),
                      r_older=old.r_prev if old is not None and old.r_prev is not None else float("nan"),
                      **kw)


def state_report(grid, state: SavState, cfg: SchemeConfig) -> StepReport:
    """Diagnostics of a state that was not produced by a step (e.g. the initial one)."""
    return _report(grid, state, cfg, 0, float("nan"), float("nan"))


def sav1_step(state, op, cfg):
    _check_plain(state.f, cfg)
    f_new, r_new, D, H = _predict_first(state, op, cfg)
    new = _advance(state, f_new, r_new, cfg)
    return new, _report(_grid(op), new, cfg, 1, D, H, old=state)


def sav2_bdf_step(state, op, cfg, f_star_rule=extrapolate_ab):
    _check_plain(state.f, cfg)
    f_new, r_new, D, H = _predict_bdf(state, op, cfg, f_star_rule)
    new = _advance(state, f_new, r_new, cfg)
    return new, _report(_grid(op), new, cfg, 2, D, H, old=state)


def sav2_cn_step(state, op, cfg):
    _check_plain(state.f, cfg)
    f_new, r_new, D, H = _predict_cn(state, op, cfg)
    new = _advance(state, f_new, r_new, cfg)
    return new, _report(_grid(op), new, cfg, 2, D, H, old=state, extra={"cn": True})


def sav1_pb_step(state, op, cfg):
    """beta-stabilised first-order step using the gain/loss split.

    The gain enters through its positive part so that the update
    ``f + dt c/(1 + dt beta) (Q+ - Q- f)`` stays nonnegative whenever
    ``beta >= c max Q-``.
    """
    split = getattr(op, "split", None)
    if split is None:
        raise OperatorWithoutSplit("sav1-pb needs an operator with a gain/loss split")
    grid = _grid(op)
    f = state.f
    if np.any(f < 0):
        raise NonPositiveDensity(f"f^n has entries down to {f.min():.3e}")
    beta, dt = cfg.beta, cfg.dt
    H = _positive_H(_H(grid, f, cfg))
    gain, loss = split(f)
    Q = np.maximum(gain, 0.0) - loss * f
    D = integrate(grid, Q * _logf(f, cfg.eps))
    r_new = r_update_first(state.r, D, H, dt, beta)
    c = r_new / math.sqrt(H)
    f_new = f + (dt * c / (1.0 + dt * beta)) * Q
    beta_ok = beta >= c * float(loss.max())
    if not beta_ok:
        warnings.warn(f"beta={beta} is below c*max(Q-)={c * float(loss.max()):.4f}", BetaBoundWarning)
    new = _advance(state, f_new, r_new, cfg)
    rep = _report(grid, new, cfg, 1, D, H, old=state, beta_ok=beta_ok,
                  extra={"gain_clipped": float(integrate(grid, np.maximum(-gain, 0.0)))})
    return new, rep


def _correct(f_tilde, state, grid, cfg, dt_eff, mass_fix):
    xi = 0.0
    if mass_fix:
        target = integrate(grid, state.f)
        xi = solve_mass_multiplier(f_tilde, target, dt_eff, cfg.eps, grid.dv,
                                   cfg.secant_tol, cfg.secant_max_iter)
    shifted = f_tilde + dt_eff * xi if xi != 0.0 else f_tilde
    f, lam = kkt_project(shifted, dt_eff, cfg.eps)
    clipped = int(np.count_nonzero(lam))
    return f, lam, xi, clipped


def _corrected_step(state, op, cfg, first_order, mass_fix):
    grid = _grid(op)
    if first_order:
        f_tilde, r_new, D, H = _predict_first(state, op, cfg)
        dt_eff, order = cfg.dt, 1
    else:
        f_tilde, r_new, D, H = _predict_bdf(state, op, cfg, extrapolate_positive)
        dt_eff, order = 2.0 * cfg.dt / 3.0, 2
    f, lam, xi, clipped = _correct(f_tilde, state, grid, cfg, dt_eff, mass_fix)
    new = _advance(state, f, r_new, cfg)
    rep = _report(grid, new, cfg, order, D, H, old=state, xi=xi, lambda_sum=integrate(grid, lam),
                  clipped=clipped, corrected=clipped > 0 or xi != 0.0)
    return new, rep


def sav1_l_step(state, op, cfg):
    return _corrected_step(state, op, cfg, True, False)


def sav2_l_step(state, op, cfg):
    return _corrected_step(state, op, cfg, False, False)


def sav1_lm_step(state, op, cfg):
    return _corrected_step(state, op, cfg, True, True)


def sav2_lm_step(state, op, cfg):
    return _corrected_step(state, op, cfg, False, True)


_STEPS = {
    "sav1": sav1_step,
    "sav2-bdf": sav2_bdf_step,
    "sav2-cn": sav2_cn_step,
    "sav1-pb": sav1_pb_step,
    "sav1-l": sav1_l_step,
    "sav2-l": sav2_l_step,
    "sav1-lm": sav1_lm_step,
    "sav2-lm": sav2_lm_step,
}


def step(state, op, cfg: SchemeConfig):
    """Advance one step; second-order schemes start with their first-order twin."""
    scheme = cfg.scheme
    if scheme in SECOND_ORDER and not state.has_history:
        first = replace(cfg, scheme=STARTUP[scheme])
        new, rep = _STEPS[first.scheme](state, op, first)
        # keep the level just left as history for the next (second-order) step
        new.f_prev, new.r_prev = state.f, state.r
        rep.modified_entropy = modified_entropy(new, 2)
        return new, rep
    return _STEPS[scheme](state, op, cfg)
