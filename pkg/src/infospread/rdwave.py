"""Non-linear information flow in space and the fast-slow response sweep.

The spatial model is u_t = D u_xx + g(u) on a 1-D grid with zero-flux
boundaries, advanced by the explicit forward-time central-space scheme under
the hard stability bound D*dt/dx**2 <= 1/2.  The default rate family is
logistic, g(u) = r*u*(1 - u/K), which satisfies g(0) = g(K) = 0, g > 0 on
(0, K) and g'(K) = -r < 0; a bistable (Allee) family is available behind the
same interface.  Step initial data develops a rightward front whose speed is
measured by fitting the level-crossing position over a time window.

The Laplacian uses the flux form at the boundaries (one-sided differences),
so under pure diffusion the discrete mass sum(u)*dx is conserved to machine
precision; the mirror-ghost variant would not conserve the nodal sum
exactly.

The fast-slow layer multiplies the informed-compartment derivative of the
planar contagion system by 1/epsilon:

    S' = -beta*S*I + mu*(N - S)
    epsilon * I' = beta*S*I - (alpha + mu)*I

and integrates with substeps h_eff <= epsilon*h so the initial layer is
resolved.  The quasi-steady-state (QSS) reference trajectory lives on the
slow manifold: the branch I = 0 when R0 <= 1 (or I(0) = 0), else the
consistent branch S = (alpha+mu)/beta with I forced by S' = 0.  With
epsilon = 1 the stepping arithmetic is identical to the plain integrator, so
the trajectories agree bitwise at equal steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .epi_sir import SirParams
from .errors import (
    NoCrossingError,
    NonFiniteError,
    StabilityError,
    StiffnessError,
)

__all__ = [
    "ReactionDiffusionConfig",
    "FieldState",
    "FastSlowConfig",
    "FastSlowResult",
    "PlanarTrajectory",
    "WaveSpeedEstimate",
    "RateEquilibrium",
    "logistic_rate",
    "reaction_rate",
    "rd_step",
    "rd_integrate",
    "estimate_wave_speed",
    "rd_equilibria",
    "fast_slow_integrate",
]

_RATE_FAMILIES = ("logistic", "allee")


@dataclass(frozen=True)
class ReactionDiffusionConfig:
    """Grid, time step, and rate parameters for the explicit scheme.

    r_rate = 0 is allowed (pure diffusion, used by the mass-conservation
    diagnostics).  Construction enforces the stability bound
    d_coeff*dt/dx**2 <= 1/2, so a config that exists can always be stepped.
    """

    d_coeff: float
    r_rate: float
    k_cap: float
    dx: float
    dt: float
    length: float
    horizon: float
    rate_family: str = "logistic"
    allee_threshold: float = 0.0

    def __post_init__(self):
        for name in ("d_coeff", "k_cap", "dx", "dt", "length", "horizon"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.r_rate < 0:
            raise ValueError("r_rate must be nonnegative")
        if self.rate_family not in _RATE_FAMILIES:
            raise ValueError(f"rate_family must be one of {_RATE_FAMILIES}")
        number = self.d_coeff * self.dt / (self.dx * self.dx)
        if number > 0.5:
            raise StabilityError(
                f"explicit scheme unstable: D*dt/dx^2 = {number:.4g} > 0.5")

    @property
    def n_nodes(self) -> int:
        return int(round(self.length / self.dx)) + 1

    @property
    def x(self) -> np.ndarray:
        return self.dx * np.arange(self.n_nodes)


@dataclass(frozen=True)
class FieldState:
    """Information density over the grid nodes at time t."""

    u: np.ndarray
    t: float


@dataclass(frozen=True)
class WaveSpeedEstimate:
    speed: float
    level: float
    fit_window: tuple[float, float]
    residual: float


@dataclass(frozen=True)
class RateEquilibrium:
    u: float
    slope: float
    stability: str


class PlanarTrajectory(NamedTuple):
    """(t, S, I) arrays of a planar trajectory."""

    t: np.ndarray
    s: np.ndarray
    i: np.ndarray


class FastSlowResult(NamedTuple):
    trajectory: PlanarTrajectory
    qss_trajectory: PlanarTrajectory
    sup_deviation: float


@dataclass(frozen=True)
class FastSlowConfig:
    """Fast-slow sweep configuration.

    layer_time excludes the initial transient from the QSS comparison.  The
    initial condition defaults to i0 = 1e-3, s0 = N - i0.
    """

    sir: SirParams
    epsilon: float
    h: float
    horizon: float
    layer_time: float
    s0: float | None = None
    i0: float = 1e-3

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in (0, 1]")
        if self.h <= 0:
            raise ValueError("h must be positive")
        if not self.layer_time < self.horizon:
            raise ValueError("layer_time must be smaller than horizon")
        if self.s0 is None:
            object.__setattr__(self, "s0", self.sir.n_total - self.i0)


def logistic_rate(u, r: float, K: float):
    """Logistic flow rate r*u*(1 - u/K); zero at 0 and K exactly."""
    if K <= 0:
        raise ValueError("K must be positive")
    return r * u * (1.0 - u / K)


def reaction_rate(u, cfg: ReactionDiffusionConfig):
    """Evaluate the configured rate family (works on scalars and arrays)."""
    if cfg.rate_family == "logistic":
        return logistic_rate(u, cfg.r_rate, cfg.k_cap)
    # Allee: negative below the threshold, positive between it and K.
    return cfg.r_rate * u * (u - cfg.allee_threshold) * (1.0 - u / cfg.k_cap)


def _laplacian(u: np.ndarray) -> np.ndarray:
    # Flux form with zero-flux boundaries: column sums vanish, so the nodal
    # sum is conserved exactly under pure diffusion.
    lap = np.empty_like(u)
    if len(u) == 1:
        lap[0] = 0.0
        return lap
    lap[1:-1] = u[:-2] - 2.0 * u[1:-1] + u[2:]
    lap[0] = u[1] - u[0]
    lap[-1] = u[-2] - u[-1]
    return lap


def _step_array(u: np.ndarray, cfg: ReactionDiffusionConfig) -> np.ndarray:
    nu = cfg.d_coeff / (cfg.dx * cfg.dx)
    # Overflow is not a numpy-level event here: blow-ups surface as
    # NonFiniteError from the explicit isfinite check in rd_integrate.
    with np.errstate(over="ignore", invalid="ignore"):
        return u + cfg.dt * (nu * _laplacian(u) + reaction_rate(u, cfg))


def rd_step(field: FieldState, cfg: ReactionDiffusionConfig) -> FieldState:
    """One forward-time central-space update; t advances by dt."""
    number = cfg.d_coeff * cfg.dt / (cfg.dx * cfg.dx)
    if number > 0.5:
        raise StabilityError(
            f"explicit scheme unstable: D*dt/dx^2 = {number:.4g} > 0.5")
    return FieldState(u=_step_array(np.asarray(field.u, dtype=float), cfg),
                      t=field.t + cfg.dt)


def rd_integrate(cfg: ReactionDiffusionConfig, init: FieldState,
                 snapshot_every: int) -> list[FieldState]:
    """Advance to the configured horizon, returning periodic snapshots.

    Snapshots are taken at step 0 and every ``snapshot_every`` steps; the
    final state is always included.  Raises NonFiniteError with the time and
    node index if the field blows up.
    """
    if snapshot_every < 1:
        raise ValueError("snapshot_every must be >= 1")
    u = np.array(init.u, dtype=float)
    if len(u) != cfg.n_nodes:
        raise ValueError(
            f"initial field has {len(u)} nodes, grid expects {cfg.n_nodes}")
    steps = int(round(cfg.horizon / cfg.dt))
    snapshots = [FieldState(u=u.copy(), t=init.t)]
    for k in range(1, steps + 1):
        u = _step_array(u, cfg)
        if not np.isfinite(u).all():
            t = init.t + k * cfg.dt
            j = int(np.nonzero(~np.isfinite(u))[0][0])
            raise NonFiniteError(f"non-finite field value at t={t:g}, node {j}")
        if k % snapshot_every == 0 or k == steps:
            snapshots.append(FieldState(u=u.copy(), t=init.t + k * cfg.dt))
    return snapshots


def _front_position(u: np.ndarray, level: float, dx: float) -> float | None:
    """Rightmost downward crossing of ``level``, linearly interpolated."""
    above = u[:-1] >= level
    below = u[1:] < level
    idx = np.nonzero(above & below)[0]
    if len(idx) == 0:
        return None
    j = int(idx[-1])
    return dx * j + dx * (u[j] - level) / (u[j] - u[j + 1])


def estimate_wave_speed(series, level: float, fit_window,
                        dx: float) -> WaveSpeedEstimate:
    """Front speed from a least-squares fit of the crossing position.

    Snapshots inside the window that have no downward crossing (front not
    yet formed, saturated field, or front already out of the domain) are
    excluded; at least two usable snapshots are required, otherwise
    NoCrossingError is raised.
    """
    if not series:
        raise ValueError("series must be nonempty")
    t_lo, t_hi = fit_window
    times, fronts = [], []
    for snap in series:
        if not t_lo <= snap.t <= t_hi:
            continue
        pos = _front_position(np.asarray(snap.u, dtype=float), level, dx)
        if pos is not None:
            times.append(snap.t)
            fronts.append(pos)
    if len(times) < 2:
        raise NoCrossingError(
            f"level {level!r} crossed in fewer than two snapshots within "
            f"t in [{t_lo}, {t_hi}]")
    coeffs, res, *_ = np.polyfit(times, fronts, 1, full=True)
    rms = math.sqrt(float(res[0]) / len(times)) if len(res) else 0.0
    return WaveSpeedEstimate(speed=float(coeffs[0]), level=level,
                             fit_window=(t_lo, t_hi), residual=rms)


def rd_equilibria(r: float, K: float) -> tuple[RateEquilibrium, RateEquilibrium]:
    """Homogeneous equilibria of the logistic rate with their slopes.

    u = 0 has g'(0) = r (unstable for r > 0); u = K has g'(K) = -r
    (stable for r > 0).  At r = 0 both are non-hyperbolic.
    """
    if r < 0 or K <= 0:
        raise ValueError("need r >= 0 and K > 0")
    low = RateEquilibrium(u=0.0, slope=r,
                          stability="unstable" if r > 0 else "non-hyperbolic")
    high = RateEquilibrium(u=K, slope=-r,
                           stability="stable" if r > 0 else "non-hyperbolic")
    return low, high


def _rhs_fast(s: float, i: float, p: SirParams, eps: float):
    ds = -p.beta * s * i + p.mu * (p.n_total - s)
    di = (p.beta * s * i - p.alpha * i - p.mu * i) / eps
    return ds, di


def _rk4_fast(s: float, i: float, p: SirParams, eps: float, h: float):
    k1s, k1i = _rhs_fast(s, i, p, eps)
    k2s, k2i = _rhs_fast(s + 0.5 * h * k1s, i + 0.5 * h * k1i, p, eps)
    k3s, k3i = _rhs_fast(s + 0.5 * h * k2s, i + 0.5 * h * k2i, p, eps)
    k4s, k4i = _rhs_fast(s + h * k3s, i + h * k3i, p, eps)
    c = h / 6.0
    return (s + c * (k1s + 2.0 * k2s + 2.0 * k3s + k4s),
            i + c * (k1i + 2.0 * k2i + 2.0 * k3i + k4i))


def _qss_values(cfg: FastSlowConfig, ts: np.ndarray) -> PlanarTrajectory:
    p = cfg.sir
    supercritical = p.beta * p.n_total > p.alpha + p.mu
    if cfg.i0 > 0.0 and supercritical and p.beta > 0.0:
        s_star = (p.alpha + p.mu) / p.beta
        i_star = p.mu * (p.n_total - s_star) / (p.beta * s_star)
        return PlanarTrajectory(t=ts,
                                s=np.full_like(ts, s_star),
                                i=np.full_like(ts, i_star))
    # Subcritical (or uninfected) branch: I = 0, S relaxes to N.
    s = p.n_total + (cfg.s0 - p.n_total) * np.exp(-p.mu * ts)
    return PlanarTrajectory(t=ts, s=s, i=np.zeros_like(ts))


def fast_slow_integrate(cfg: FastSlowConfig) -> FastSlowResult:
    """Integrate the fast-slow system and compare it to its QSS limit.

    Substeps use h_eff = h / ceil(1/epsilon) <= epsilon*h.  sup_deviation is
    the largest |I(t) - I_qss(t)| over output times t >= layer_time.

    An unresolved fast layer shows up as a substep-scale oscillation of I
    with growing amplitude (or a non-finite value) and raises
    StiffnessError; a genuine fast spike of order 1/epsilon is legitimate
    dynamics and passes through.
    """
    p = cfg.sir
    substeps = math.ceil(1.0 / cfg.epsilon)
    h_eff = cfg.h / substeps
    steps = int(round(cfg.horizon / cfg.h))
    ts = cfg.h * np.arange(steps + 1)
    ss = np.empty(steps + 1)
    ii = np.empty(steps + 1)
    s, i = float(cfg.s0), float(cfg.i0)
    ss[0], ii[0] = s, i
    prev_delta = 0.0
    alternating = 0
    for k in range(1, steps + 1):
        for _ in range(substeps):
            try:
                s, i_new = _rk4_fast(s, i, p, cfg.epsilon, h_eff)
                blew_up = not (math.isfinite(s) and math.isfinite(i_new))
                delta = i_new - i
                if not blew_up and delta * prev_delta < 0.0 \
                        and abs(delta) > abs(prev_delta):
                    alternating += 1
                else:
                    alternating = 0
                prev_delta = delta
                i = i_new
            except OverflowError:
                blew_up = True
            if alternating >= 50 or blew_up:
                raise StiffnessError(
                    f"fast layer unresolved near t={ts[k]:g} "
                    f"(epsilon={cfg.epsilon:g}, h={cfg.h:g}); reduce h")
        ss[k], ii[k] = s, i
    trajectory = PlanarTrajectory(t=ts, s=ss, i=ii)
    qss = _qss_values(cfg, ts)
    mask = ts >= cfg.layer_time
    sup_dev = float(np.max(np.abs(ii[mask] - qss.i[mask])))
    return FastSlowResult(trajectory=trajectory, qss_trajectory=qss,
                          sup_deviation=sup_dev)
