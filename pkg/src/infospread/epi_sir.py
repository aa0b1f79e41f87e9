"""Information-contagion compartment model over a closed manager population.

S' = -beta*S*I + mu*(N - S)
I' =  beta*S*I - alpha*I - mu*I
R' =  alpha*I - mu*R

beta is a mass-action coefficient on S*I, alpha the recovery (information
resistance) rate, mu the market turnover rate, and N the constant population
(S + I + R = N throughout).  R is integrated explicitly and the conservation
identity is used as a drift check instead of back-solving R = N - S - I.

Integration is fixed-step classical Runge-Kutta: reproducible, and its
fourth-order convergence is directly verifiable.  Named presets used by the
CLI run with N = 1 (population fractions) and mu = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BracketError,
    ConservationError,
    DegenerateParamsError,
    EndemicUndefinedError,
    StepSizeError,
)

__all__ = [
    "SirParams",
    "SirState",
    "Trajectory",
    "EquilibriumPoint",
    "EquilibriumReport",
    "PRESETS",
    "derivatives",
    "rk4_step",
    "integrate",
    "basic_reproduction_number",
    "equilibria",
    "final_size",
]

# Allowed relative drift of S + I + R away from N along a trajectory.
CONSERVATION_RTOL = 1e-8

# Eigenvalues within this relative band of zero are labeled non-hyperbolic.
_HYPERBOLIC_RTOL = 1e-12


@dataclass(frozen=True)
class SirParams:
    """Model rates; all nonnegative, population strictly positive."""

    beta: float
    alpha: float
    mu: float
    n_total: float

    def __post_init__(self):
        if self.beta < 0 or self.alpha < 0 or self.mu < 0:
            raise ValueError("rates beta, alpha, mu must be nonnegative")
        if self.n_total <= 0:
            raise ValueError("n_total must be positive")


@dataclass(frozen=True)
class SirState:
    s: float
    i: float
    r: float
    t: float = 0.0


@dataclass(frozen=True)
class Trajectory:
    """Fixed-step trajectory stored as parallel arrays.

    Index 0 is the supplied initial condition; timestamps advance by
    ``step`` exactly (t0 + k*step).
    """

    params: SirParams
    step: float
    t: np.ndarray
    s: np.ndarray
    i: np.ndarray
    r: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def state(self, k: int) -> SirState:
        return SirState(s=float(self.s[k]), i=float(self.i[k]),
                        r=float(self.r[k]), t=float(self.t[k]))

    @property
    def final(self) -> SirState:
        return self.state(len(self.t) - 1)


@dataclass(frozen=True)
class EquilibriumPoint:
    s: float
    i: float
    r: float
    eigenvalues: tuple[complex, ...]
    stability: str


@dataclass(frozen=True)
class EquilibriumReport:
    disease_free: EquilibriumPoint
    endemic: EquilibriumPoint | None
    r0: float


# Named parameter presets exposed by the CLI (fractions: N = 1, mu = 0).
PRESETS = {
    "fig6b": SirParams(beta=0.20, alpha=0.10, mu=0.0, n_total=1.0),
    "fig6c": SirParams(beta=0.82, alpha=0.18, mu=0.0, n_total=1.0),
    "fig6d": SirParams(beta=0.61, alpha=0.49, mu=0.0, n_total=1.0),
}


def _rhs(s: float, i: float, r: float, p: SirParams):
    ds = -p.beta * s * i + p.mu * (p.n_total - s)
    di = p.beta * s * i - p.alpha * i - p.mu * i
    dr = p.alpha * i - p.mu * r
    return ds, di, dr


def derivatives(state: SirState, params: SirParams):
    """(dS, dI, dR) at a state; their sum is mu*(N - S - I - R)."""
    return _rhs(state.s, state.i, state.r, params)


def _rk4(s: float, i: float, r: float, p: SirParams, h: float):
    k1s, k1i, k1r = _rhs(s, i, r, p)
    k2s, k2i, k2r = _rhs(s + 0.5 * h * k1s, i + 0.5 * h * k1i, r + 0.5 * h * k1r, p)
    k3s, k3i, k3r = _rhs(s + 0.5 * h * k2s, i + 0.5 * h * k2i, r + 0.5 * h * k2r, p)
    k4s, k4i, k4r = _rhs(s + h * k3s, i + h * k3i, r + h * k3r, p)
    c = h / 6.0
    return (s + c * (k1s + 2.0 * k2s + 2.0 * k3s + k4s),
            i + c * (k1i + 2.0 * k2i + 2.0 * k3i + k4i),
            r + c * (k1r + 2.0 * k2r + 2.0 * k3r + k4r))


def rk4_step(state: SirState, params: SirParams, h: float) -> SirState:
    """One classical 4-stage Runge-Kutta update; t advances by h."""
    if h <= 0:
        raise StepSizeError(f"step size must be positive, got {h!r}")
    s, i, r = _rk4(state.s, state.i, state.r, params, h)
    return SirState(s=s, i=i, r=r, t=state.t + h)


def integrate(params: SirParams, init: SirState, h: float,
              horizon: float) -> Trajectory:
    """Fixed-step trajectory over ``horizon`` time units.

    The horizon is rounded to a whole number of steps.  Conservation
    |S+I+R-N| <= 1e-8*N is enforced at the initial condition and after every
    step; a violation raises ConservationError (the step is too large).
    """
    if h <= 0:
        raise StepSizeError(f"step size must be positive, got {h!r}")
    if horizon < h:
        raise ValueError("horizon must be at least one step")
    n_total = params.n_total
    limit = CONSERVATION_RTOL * n_total
    steps = int(round(horizon / h))
    s, i, r = float(init.s), float(init.i), float(init.r)
    drift = abs(s + i + r - n_total)
    if not drift <= limit:
        raise ConservationError(
            f"initial state off the conservation manifold: |S+I+R-N|={drift:.3e}")
    ts = init.t + h * np.arange(steps + 1)
    ss = np.empty(steps + 1)
    ii = np.empty(steps + 1)
    rr = np.empty(steps + 1)
    ss[0], ii[0], rr[0] = s, i, r
    for k in range(1, steps + 1):
        s, i, r = _rk4(s, i, r, params, h)
        drift = abs(s + i + r - n_total)
        if not drift <= limit:
            raise ConservationError(
                f"conservation drift |S+I+R-N|={drift:.3e} at t={ts[k]:g}; "
                "reduce the step size")
        ss[k], ii[k], rr[k] = s, i, r
    return Trajectory(params=params, step=h, t=ts, s=ss, i=ii, r=rr)


def basic_reproduction_number(params: SirParams) -> float:
    """beta*N / (alpha + mu); information spreads from near-full
    susceptibility iff this exceeds 1."""
    denom = params.alpha + params.mu
    if denom == 0.0:
        raise DegenerateParamsError("alpha + mu must be positive for R0")
    return params.beta * params.n_total / denom


def _stability_label(eigenvalues) -> str:
    max_real = max(ev.real for ev in eigenvalues)
    scale = max(1.0, max(abs(ev) for ev in eigenvalues))
    if abs(max_real) <= _HYPERBOLIC_RTOL * scale:
        return "non-hyperbolic"
    return "stable" if max_real < 0.0 else "unstable"


def equilibria(params: SirParams) -> EquilibriumReport:
    """Equilibria of the planar (S, I) system with Jacobian classification.

    The Jacobian is J(S, I) = [[-beta*I - mu, -beta*S],
                               [ beta*I,       beta*S - alpha - mu]].
    The disease-free point (N, 0) has eigenvalues -mu and beta*N-alpha-mu.
    The endemic point S* = (alpha+mu)/beta, I* = mu*(N-S*)/(beta*S*) exists
    iff R0 > 1; with mu = 0 it collapses and EndemicUndefinedError points the
    caller at the final-size relation instead.
    """
    beta, alpha, mu, n_total = params.beta, params.alpha, params.mu, params.n_total
    r0 = basic_reproduction_number(params)
    df_eigs = (complex(-mu), complex(beta * n_total - alpha - mu))
    disease_free = EquilibriumPoint(
        s=n_total, i=0.0, r=0.0, eigenvalues=df_eigs,
        stability=_stability_label(df_eigs))
    if r0 <= 1.0:
        return EquilibriumReport(disease_free=disease_free, endemic=None, r0=r0)
    if mu == 0.0:
        raise EndemicUndefinedError(
            "endemic equilibrium collapses when mu=0 and R0>1; use "
            "final_size for the long-horizon susceptible fraction",
            disease_free=disease_free)
    s_star = (alpha + mu) / beta
    i_star = mu * (n_total - s_star) / (beta * s_star)
    r_star = alpha * i_star / mu
    jac = np.array([[-beta * i_star - mu, -beta * s_star],
                    [beta * i_star, beta * s_star - alpha - mu]])
    eigs = tuple(complex(ev) for ev in np.linalg.eigvals(jac))
    endemic = EquilibriumPoint(
        s=s_star, i=i_star, r=r_star, eigenvalues=eigs,
        stability=_stability_label(eigs))
    return EquilibriumReport(disease_free=disease_free, endemic=endemic, r0=r0)


def final_size(params: SirParams, s0: float, i0: float) -> float:
    """Long-horizon susceptible count for the turnover-free model (mu = 0).

    Returns the root s_inf in (0, s0] of

        ln(s0 / s_inf) = (beta/alpha) * (s0 + i0 - s_inf)

    by bisection to an interval of 1e-12.  Serves as the independent oracle
    for long-horizon integration.
    """
    if params.mu != 0.0:
        raise ValueError("final size is defined for mu = 0 only")
    if params.alpha <= 0.0:
        raise DegenerateParamsError("alpha must be positive for the final size")
    if i0 <= 0.0:
        raise ValueError("i0 must be positive")
    if s0 <= 0.0 or s0 + i0 > params.n_total * (1.0 + 1e-12):
        raise ValueError("need 0 < s0 and s0 + i0 <= N")
    if params.beta == 0.0:
        return s0

    ratio = params.beta / params.alpha

    def f(x: float) -> float:
        return math.log(s0 / x) - ratio * (s0 + i0 - x)

    hi = s0
    f_hi = f(hi)          # = -ratio * i0 < 0
    lo = s0
    f_lo = f_hi
    for _ in range(2000):
        lo *= 0.5
        f_lo = f(lo)
        if f_lo > 0.0:
            break
    if f_lo <= 0.0 or f_hi >= 0.0:
        raise BracketError(
            f"no sign change on [{lo:.3e}, {hi:.3e}] "
            f"(f={f_lo:.3e}, {f_hi:.3e})")
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
