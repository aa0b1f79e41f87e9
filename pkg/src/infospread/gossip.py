"""Pair-wise lossy information exchange: analytic 4-state chain plus a
seeded population simulation over a contact network.

A contact pairs an initiator A with a responder B; each may hold a single
information item, so the pair state is a bit pair in the canonical order
(0,0), (0,1), (1,0), (1,1).  One exchange resolves an event tree with four
independent stages:

    select (p_select)  ->  data message delivered (p_gain)
                       ->  feedback delivered (1 - p_loss)
                       ->  holder drops after confirmed delivery (p_drop)

Dropping requires confirmation: a sender only discards its copy once it
knows the message arrived.  The responder side mirrors the initiator side
(push-pull), and on a duplicate delivery only the sending side risks
dropping.  An uninformed pair can still acquire the item exogenously: each
party independently picks it up with probability p_ext (ambient broadcasts
behave like one more lossy sender, hence the default p_ext =
p_select * p_gain).  Once at least one party holds the item, the pair never
returns to (0,0).

The chain is time-homogeneous; no per-round parameter schedules.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import ParamRangeError, ReducibleChainError
from .netdiff import ManagerNetwork

__all__ = [
    "STATE_ORDER",
    "PairState",
    "ExchangeParams",
    "PairTransitionMatrix",
    "ScenarioProbabilities",
    "GossipTrace",
    "build_transition_matrix",
    "classify_scenarios",
    "step_pair",
    "stationary_distribution",
    "simulate_population",
    "empirical_transition_estimate",
    "replicate_generator",
]

STATE_ORDER = ((0, 0), (0, 1), (1, 0), (1, 1))

_ROW_SUM_TOL = 1e-12


class PairState(NamedTuple):
    """Presence bits of the item in initiator A's and responder B's cache."""

    a: int
    b: int

    @property
    def index(self) -> int:
        return 2 * self.a + self.b


def _as_state(state) -> PairState:
    s = PairState(*state)
    if s.a not in (0, 1) or s.b not in (0, 1):
        raise ValueError(f"pair state bits must be 0 or 1, got {tuple(state)}")
    return s


@dataclass(frozen=True)
class ExchangeParams:
    """Exchange probabilities; every field lies in [0, 1].

    p_ext is the exogenous acquisition probability applied (per party,
    independently) only when both caches are empty.  Leaving it None selects
    the default p_select * p_gain.
    """

    p_select: float
    p_drop: float
    p_loss: float
    p_gain: float
    p_ext: float | None = None

    def __post_init__(self):
        if self.p_ext is None:
            object.__setattr__(self, "p_ext", self.p_select * self.p_gain)
        for name in ("p_select", "p_drop", "p_loss", "p_gain", "p_ext"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and 0.0 <= value <= 1.0):
                raise ParamRangeError(f"{name}={value!r} must lie in [0, 1]")

    @classmethod
    def from_config(cls, mapping) -> "ExchangeParams":
        """Build from a JSON-style mapping.

        Recognized keys: p_select, p_drop, p_loss, p_gain, p_ext (optional),
        tie_gain_to_loss (optional bool forcing p_gain = 1 - p_loss).
        """
        known = {"p_select", "p_drop", "p_loss", "p_gain", "p_ext",
                 "tie_gain_to_loss"}
        unknown = set(mapping) - known
        if unknown:
            raise ParamRangeError(f"unknown exchange parameter(s): {sorted(unknown)}")
        kwargs = {k: mapping[k] for k in
                  ("p_select", "p_drop", "p_loss", "p_gain") if k in mapping}
        missing = {"p_select", "p_drop", "p_loss", "p_gain"} - set(kwargs)
        if mapping.get("tie_gain_to_loss"):
            if "p_gain" in kwargs:
                raise ParamRangeError(
                    "p_gain must be omitted when tie_gain_to_loss is set")
            kwargs["p_gain"] = 1.0 - mapping["p_loss"]
            missing.discard("p_gain")
        if missing:
            raise ParamRangeError(f"missing exchange parameter(s): {sorted(missing)}")
        if "p_ext" in mapping:
            kwargs["p_ext"] = mapping["p_ext"]
        return cls(**kwargs)


@dataclass(frozen=True)
class PairTransitionMatrix:
    """4x4 row-stochastic matrix over STATE_ORDER.

    Structural zeros encode item persistence: once a pair holds the item it
    never transitions back to (0,0), and (1,1) cannot reach (1,0).
    """

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (4, 4):
            raise ValueError(f"transition matrix must be 4x4, got {p.shape}")
        if ((p < 0.0) | (p > 1.0)).any():
            raise ValueError("transition probabilities must lie in [0, 1]")
        if np.max(np.abs(p.sum(axis=1) - 1.0)) > _ROW_SUM_TOL:
            raise ValueError("transition matrix rows must sum to 1")
        for row, col in ((1, 0), (2, 0), (3, 0), (3, 2)):
            if p[row, col] != 0.0:
                raise ValueError(
                    f"entry {STATE_ORDER[row]}->{STATE_ORDER[col]} must be "
                    "exactly 0 (item persistence)")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def row(self, state) -> np.ndarray:
        return self.p[_as_state(state).index]


@dataclass(frozen=True)
class ScenarioProbabilities:
    """Outcome split of a single contact attempt; the four fields sum to 1."""

    no_attempt: float
    forward_loss: float
    feedback_loss: float
    complete: float

    def __post_init__(self):
        total = self.no_attempt + self.forward_loss + self.feedback_loss + self.complete
        if abs(total - 1.0) > _ROW_SUM_TOL:
            raise ValueError(f"scenario probabilities sum to {total!r}, not 1")


@dataclass(frozen=True)
class GossipTrace:
    """Per-round informed counts from a population run.

    informed_count[0] is the initial condition; entry t is the count after
    round t.  isolated_skips counts initiators that had zero out-weight and
    were skipped (warning counter, not an error).
    """

    rounds: int
    informed_count: tuple[int, ...]
    informed_fraction: tuple[float, ...]
    seed: int
    params: ExchangeParams
    isolated_skips: int = 0


def build_transition_matrix(params: ExchangeParams) -> PairTransitionMatrix:
    """Analytic transition matrix of one exchange, from the event tree.

    With s=p_select, d=p_drop, l=p_loss, g=p_gain, e=p_ext, a confirmed
    transfer happens with probability s*g*(1-l), after which the sender
    drops with probability d; an unconfirmed transfer (feedback lost) still
    delivers the item but the sender keeps its copy.
    """
    s, d, l, g, e = (params.p_select, params.p_drop, params.p_loss,
                     params.p_gain, params.p_ext)
    transfer = s * g                      # data message delivered
    confirmed_drop = transfer * (1.0 - l) * d
    keep_or_unconfirmed = transfer * (1.0 - (1.0 - l) * d)
    p = np.zeros((4, 4))
    # (0,0): each party independently acquires the item exogenously.
    p[0, 0] = (1.0 - e) * (1.0 - e)
    p[0, 1] = e * (1.0 - e)
    p[0, 2] = e * (1.0 - e)
    p[0, 3] = e * e
    # (0,1): responder holds the item and pushes back (pull symmetry).
    p[1, 1] = 1.0 - transfer
    p[1, 2] = confirmed_drop
    p[1, 3] = keep_or_unconfirmed
    # (1,0): initiator holds the item and pushes.
    p[2, 2] = 1.0 - transfer
    p[2, 1] = confirmed_drop
    p[2, 3] = keep_or_unconfirmed
    # (1,1): duplicate delivery; only the sending side risks dropping.
    p[3, 1] = confirmed_drop
    p[3, 3] = 1.0 - confirmed_drop
    return PairTransitionMatrix(p=p)


def classify_scenarios(params: ExchangeParams) -> ScenarioProbabilities:
    """Split one contact attempt into its four outcome scenarios."""
    s, l, g = params.p_select, params.p_loss, params.p_gain
    return ScenarioProbabilities(
        no_attempt=1.0 - s,
        forward_loss=s * (1.0 - g),
        feedback_loss=s * g * l,
        complete=s * g * (1.0 - l),
    )


def _cumulative(weights: np.ndarray) -> np.ndarray:
    """Cumulative sampling thresholds with the tail pinned to exactly 1.0
    from the last positive entry, so a uniform draw in [0, 1) can never
    land on a zero-probability outcome through rounding."""
    c = np.cumsum(weights)
    c /= c[-1]
    c[np.nonzero(weights)[0][-1]:] = 1.0
    return c


@lru_cache(maxsize=128)
def _row_cumsums(params: ExchangeParams) -> np.ndarray:
    cums = np.vstack([_cumulative(row)
                      for row in build_transition_matrix(params).p])
    cums.setflags(write=False)
    return cums


def _sample_row(cums_row: np.ndarray, rng: np.random.Generator) -> int:
    return int(np.searchsorted(cums_row, rng.random(), side="right"))


def step_pair(state, params: ExchangeParams, rng: np.random.Generator) -> PairState:
    """Sample the next pair state, advancing the generator by one draw."""
    idx = _as_state(state).index
    nxt = _sample_row(_row_cumsums(params)[idx], rng)
    return PairState(*STATE_ORDER[nxt])


def _closed_classes(p: np.ndarray) -> tuple[tuple[int, ...], ...]:
    """Closed communicating classes of a small stochastic matrix."""
    n = p.shape[0]
    reach = np.eye(n, dtype=bool) | (p > 0.0)
    for _ in range(n):
        reach = reach | (reach @ reach)
    mutual = reach & reach.T
    classes = []
    seen = set()
    for i in range(n):
        if i in seen:
            continue
        members = tuple(j for j in range(n) if mutual[i, j])
        seen.update(members)
        classes.append(members)
    closed = []
    for members in classes:
        inside = set(members)
        if all(reach_j in inside
               for m in members for reach_j in np.nonzero(p[m] > 0.0)[0]):
            closed.append(members)
    return tuple(closed)


def stationary_distribution(matrix: PairTransitionMatrix) -> np.ndarray:
    """Unique stationary distribution pi with pi P = pi and sum(pi) = 1.

    Solved as a linear system with one balance equation replaced by the
    normalization row.  Raises ReducibleChainError, naming the closed
    classes, when more than one closed communicating class exists.
    """
    p = matrix.p
    closed = _closed_classes(p)
    if len(closed) > 1:
        labels = [tuple(STATE_ORDER[i] for i in members) for members in closed]
        raise ReducibleChainError(
            f"no unique stationary distribution: {len(closed)} closed "
            f"communicating classes {labels}",
            closed_classes=labels)
    a = p.T - np.eye(4)
    a[3, :] = 1.0
    b = np.array([0.0, 0.0, 0.0, 1.0])
    return np.linalg.solve(a, b)


def replicate_generator(seed: int, replicate: int) -> np.random.Generator:
    """Generator for replicate ``replicate`` of a run seeded with ``seed``.

    Pure mixing via SeedSequence([seed, replicate]); replicates are
    statistically independent and reproducible in isolation.
    """
    return np.random.default_rng(np.random.SeedSequence([seed, replicate]))


def simulate_population(net: ManagerNetwork, params: ExchangeParams,
                        initially_informed, rounds: int,
                        seed: int) -> GossipTrace:
    """Population gossip over a contact network.

    Per round every manager i initiates one contact in index order: the
    partner j is drawn with probability w[i, j] / sum_k w[i, k] (self-weights
    excluded), and the bit pair (bit_i, bit_j) advances one chain transition
    with i in the initiator role.  Bits update in place sequentially, so the
    run is deterministic for fixed inputs and seed.  Initiators with zero
    out-weight are skipped and counted in the trace.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    n = net.n
    informed = [False] * n
    for idx in initially_informed:
        if not 0 <= idx < n:
            raise ValueError(f"informed index {idx} outside [0, {n})")
        informed[idx] = True

    weights = np.array(net.w, dtype=float)
    np.fill_diagonal(weights, 0.0)
    partner_cums = [_cumulative(weights[i]) if weights[i].any() else None
                    for i in range(n)]
    row_cums = _row_cumsums(params)

    rng = np.random.default_rng(seed)
    counts = [sum(informed)]
    skips = 0
    for rnd in range(rounds):
        k = counts[-1]
        frozen = (k == n and params.p_drop == 0.0) or \
                 (k == 0 and params.p_ext == 0.0)
        if frozen:
            # No transition can change any bit; fill without consuming draws.
            counts.extend([k] * (rounds - rnd))
            break
        for i in range(n):
            cums = partner_cums[i]
            if cums is None:
                skips += 1
                continue
            j = int(np.searchsorted(cums, rng.random(), side="right"))
            state_idx = 2 * informed[i] + informed[j]
            nxt = STATE_ORDER[_sample_row(row_cums[state_idx], rng)]
            informed[i] = bool(nxt[0])
            informed[j] = bool(nxt[1])
        counts.append(sum(informed))
    return GossipTrace(
        rounds=rounds,
        informed_count=tuple(counts),
        informed_fraction=tuple(c / n for c in counts),
        seed=seed,
        params=params,
        isolated_skips=skips,
    )


def empirical_transition_estimate(params: ExchangeParams, trials: int,
                                  seed: int) -> np.ndarray:
    """Empirical transition frequencies from ``trials`` samples per pre-state.

    Vectorized equivalent of repeating step_pair: each sample consumes one
    uniform draw against the analytic row, exactly as step_pair does.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    cums = _row_cumsums(params)
    out = np.empty((4, 4))
    for s in range(4):
        draws = np.searchsorted(cums[s], rng.random(trials), side="right")
        out[s] = np.bincount(draws, minlength=4) / trials
    return out
