"""Bounded-confidence opinion dynamics on the unit interval.

Agents hold opinions in [0, 1]; agent i listens only to agents whose
opinion lies within its confidence interval epsilon_i.  Two synchronous
update rules are provided: the plain neighborhood mean, and a
self-weighted variant where an agent keeps a fraction w_own of its own
previous opinion and splits the rest over the other neighbors.  A run
is at equilibrium once no opinion moves by more than delta in a step;
clusters are maximal groups of opinions chained within cluster_tol.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

# Mindedness band edges for the confidence interval.  Labels only:
# the dynamics always use the raw epsilon.
CLOSE_MAX = 0.17
MODERATE_MAX = 0.22


class Mindedness(str, Enum):
    CLOSE = "close"
    MODERATE = "moderate"
    OPEN = "open"


class Rule(str, Enum):
    HK = "hk"
    HK_MOD = "hk_mod"


def classify(epsilon: float) -> Mindedness:
    """Label a confidence interval: close < 0.17 <= moderate <= 0.22 < open."""
    if epsilon < 0.0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    if epsilon < CLOSE_MAX:
        return Mindedness.CLOSE
    if epsilon <= MODERATE_MAX:
        return Mindedness.MODERATE
    return Mindedness.OPEN


@dataclass(frozen=True)
class Agent:
    """One agent; mindedness is derived from epsilon, never set directly."""

    id: int
    opinion: float
    epsilon: float
    injected: bool = False
    mindedness: Mindedness = field(init=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.opinion <= 1.0:
            raise ValueError(f"opinion must lie in [0, 1], got {self.opinion}")
        object.__setattr__(self, "mindedness", classify(self.epsilon))


class Population:
    """Immutable roster of agents with cached opinion/epsilon arrays.

    Agent ids must be unique; the array position of an agent is its list
    position, which everywhere in this package equals its id for
    populations built by the generators.
    """

    def __init__(self, agents: list[Agent]):
        agents = list(agents)
        if not agents:
            raise ValueError("population must contain at least one agent")
        ids = [a.id for a in agents]
        if len(set(ids)) != len(ids):
            raise ValueError("agent ids must be unique")
        self.agents = agents
        self._opinions = np.array([a.opinion for a in agents], dtype=float)
        self._epsilons = np.array([a.epsilon for a in agents], dtype=float)
        self._opinions.setflags(write=False)
        self._epsilons.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def opinions(self) -> np.ndarray:
        return self._opinions

    @property
    def epsilons(self) -> np.ndarray:
        return self._epsilons

    @classmethod
    def from_arrays(
        cls,
        opinions,
        epsilons,
        injected=None,
    ) -> "Population":
        opinions = np.asarray(opinions, dtype=float)
        epsilons = np.asarray(epsilons, dtype=float)
        if opinions.shape != epsilons.shape:
            raise ValueError("opinions and epsilons must have equal length")
        if injected is None:
            injected = [False] * len(opinions)
        return cls(
            [
                Agent(id=i, opinion=float(x), epsilon=float(e), injected=bool(f))
                for i, (x, e, f) in enumerate(zip(opinions, epsilons, injected))
            ]
        )

    def with_opinions(self, profile) -> "Population":
        """Same agents, new opinion profile (used to rebuild snapshots)."""
        profile = np.asarray(profile, dtype=float)
        if len(profile) != self.n:
            raise ValueError("profile length must match population size")
        return Population(
            [
                Agent(id=a.id, opinion=float(x), epsilon=a.epsilon, injected=a.injected)
                for a, x in zip(self.agents, profile)
            ]
        )

    def extended(self, new_agents: list[Agent]) -> "Population":
        return Population(self.agents + list(new_agents))


def neighborhood(pop: Population, i: int) -> set[int]:
    """Indices within agent i's confidence interval; always contains i."""
    if not 0 <= i < pop.n:
        raise ValueError(f"agent index {i} out of range")
    x = pop.opinions
    mask = np.abs(x - x[i]) <= pop.epsilons[i]
    return set(int(j) for j in np.nonzero(mask)[0])


def _neighbor_matrix(x: np.ndarray, eps: np.ndarray) -> np.ndarray:
    # row i marks the agents i listens to; diagonal is always True
    return np.abs(x[None, :] - x[:, None]) <= eps[:, None]


def _step_arrays(
    x: np.ndarray,
    eps: np.ndarray,
    rule: Rule = Rule.HK,
    w_own=None,
) -> np.ndarray:
    """One synchronous update on raw arrays.

    Elementwise products with explicit axis-1 sums keep the arithmetic
    off BLAS so repeated runs are bit-identical on any host.
    """
    a = _neighbor_matrix(x, eps)
    sizes = a.sum(axis=1)
    sums = (a * x[None, :]).sum(axis=1)
    if rule is Rule.HK:
        out = sums / sizes
    elif rule is Rule.HK_MOD:
        w = np.asarray(0.6 if w_own is None else w_own, dtype=float)
        if np.any(w <= 0.0) or np.any(w > 1.0):
            raise ValueError("w_own must lie in (0, 1]")
        others = sizes - 1
        other_sums = sums - x
        # an agent alone in its interval keeps its opinion unchanged
        mean_others = np.where(others > 0, other_sums / np.maximum(others, 1), x)
        out = w * x + (1.0 - w) * mean_others
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return np.clip(out, 0.0, 1.0)


def step_hk(pop: Population) -> np.ndarray:
    """Plain rule: each opinion becomes the mean over its neighborhood."""
    return _step_arrays(pop.opinions, pop.epsilons, Rule.HK)


def step_hk_mod(pop: Population, w_own) -> np.ndarray:
    """Self-weighted rule; w_own may be a scalar or a per-agent vector.

    The bare operation accepts any w_own in (0, 1] (w_own = 1/|N_i|
    recovers the plain rule); DynamicsConfig restricts the configured
    value to (0.5, 1] so that own opinion outweighs the rest combined.
    """
    return _step_arrays(pop.opinions, pop.epsilons, Rule.HK_MOD, w_own)


@dataclass
class DynamicsConfig:
    rule: Rule = Rule.HK
    w_own: float = 0.6
    delta: float = 1e-6
    max_steps: int = 1000
    cluster_tol: float = 1e-3

    def __post_init__(self) -> None:
        self.rule = Rule(self.rule)
        if self.delta <= 0.0:
            raise ValueError("delta must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.cluster_tol < 0.0:
            raise ValueError("cluster_tol must be nonnegative")
        if self.rule is Rule.HK_MOD and not 0.5 < self.w_own <= 1.0:
            raise ValueError("configured w_own must lie in (0.5, 1]")


@dataclass
class SimulationResult:
    """Trajectory plus equilibrium summary.

    trajectory[t] is the profile at time t; its length is t_eqm + 2 when
    converged (the profile at t_eqm and its quiet successor are both
    kept) and max_steps + 1 otherwise.  t_eqm is None when the run hit
    max_steps without settling; c_eqm is then counted on the final
    profile anyway.  agents lists the roster matching the trajectory
    columns (placement runs append injected agents at the end).
    """

    trajectory: list
    t_eqm: int | None
    converged: bool
    c_eqm: int
    agents: list


def simulate(pop: Population, cfg: DynamicsConfig | None = None) -> SimulationResult:
    """Run the configured rule until quiet (max move <= delta) or max_steps."""
    cfg = cfg or DynamicsConfig()
    x = pop.opinions.copy()
    eps = pop.epsilons
    traj = [x]
    t_eqm = None
    for t in range(cfg.max_steps):
        x1 = _step_arrays(x, eps, cfg.rule, cfg.w_own)
        traj.append(x1)
        if float(np.max(np.abs(x1 - x))) <= cfg.delta:
            t_eqm = t
            break
        x = x1
    return SimulationResult(
        trajectory=traj,
        t_eqm=t_eqm,
        converged=t_eqm is not None,
        c_eqm=count_clusters(traj[-1], cfg.cluster_tol),
        agents=list(pop.agents),
    )


def count_clusters(profile, tol: float = 1e-3) -> int:
    """Single-linkage cluster count: a gap > tol between sorted
    neighbors starts a new cluster."""
    profile = np.asarray(profile, dtype=float)
    if profile.size == 0:
        raise ValueError("profile must be nonempty")
    if tol < 0.0:
        raise ValueError("tol must be nonnegative")
    s = np.sort(profile)
    return int(1 + np.sum(np.diff(s) > tol))


def cluster_labels(profile, tol: float = 1e-3) -> np.ndarray:
    """Cluster index per agent, numbered left to right along the spectrum."""
    profile = np.asarray(profile, dtype=float)
    if profile.size == 0:
        raise ValueError("profile must be nonempty")
    order = np.argsort(profile, kind="stable")
    s = profile[order]
    labels_sorted = np.concatenate([[0], np.cumsum(np.diff(s) > tol)])
    labels = np.empty(len(profile), dtype=int)
    labels[order] = labels_sorted
    return labels


def write_trajectory_csv(trajectory: list, agents: list) -> str:
    """Serialize a trajectory as t,agent_id,opinion,epsilon,mindedness,injected.

    Profiles may grow over time (placement runs); an agent's rows start
    at the first step it is present.  Floats use repr so a reread parses
    back bit-identically.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "agent_id", "opinion", "epsilon", "mindedness", "injected"])
    for t, profile in enumerate(trajectory):
        for i in range(len(profile)):
            a = agents[i]
            w.writerow(
                [
                    t,
                    a.id,
                    repr(float(profile[i])),
                    repr(float(a.epsilon)),
                    a.mindedness.value,
                    "true" if a.injected else "false",
                ]
            )
    return buf.getvalue()
