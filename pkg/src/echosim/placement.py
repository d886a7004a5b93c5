"""Injection of moderate-minded agents to slow open-agent convergence.

The intelligent strategy scans each step's influence graph for
converging pairs: opinion-adjacent open-minded agents being pulled
toward each other (the left one net-pulled right, the right one
net-pulled left).  For each such pair it injects just enough moderate
agents at the outer edges of the pair's confidence intervals to flip
the net pulls outward, spending from a fixed budget until it runs out.
The baseline strategy spends the whole budget at t=0 on uniform random
positions over the initial opinion support.

All decisions within one step are evaluated against the frozen
start-of-step graph: agents injected at step t participate in the
update from t onward but can only anchor injections from t+1.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import (
    Agent,
    DynamicsConfig,
    Mindedness,
    Population,
    SimulationResult,
    _step_arrays,
    count_clusters,
    simulate,
)
from .graph import InfluenceGraph, build_graph_arrays, classify, pulls_all


class Strategy(str, Enum):
    INTELLIGENT = "intelligent"
    RANDOM_AT_START = "random_at_start"


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass
class PlacementConfig:
    budget: int
    epsilon_new: float = 0.2
    strategy: Strategy = Strategy.INTELLIGENT
    rng_seed: int = 0

    def __post_init__(self) -> None:
        self.strategy = Strategy(self.strategy)
        if self.budget < 0:
            raise ValueError("budget must be nonnegative")
        if not 0.0 <= self.epsilon_new <= 1.0:
            raise ValueError("epsilon_new must lie in [0, 1]")


@dataclass(frozen=True)
class PlacementEvent:
    """One injection batch.

    requested_opinion is the anchor position before clamping to [0, 1];
    clamped records whether clamping moved it.  anchor_agent is -1 and
    side is None for random placements."""

    time: int
    opinion: float
    requested_opinion: float
    count: int
    anchor_agent: int
    side: Side | None
    clamped: bool


def find_converging_pairs(g: InfluenceGraph) -> list[tuple[int, int]]:
    """Pairs (i, j) of opinion-adjacent open-minded agents, i left of j
    with no other agent's opinion between them, where i is net-pulled
    right (sum_left < sum_right) and j net-pulled left (sum_left >
    sum_right).  Returned left to right along the spectrum in original
    indices."""
    order = np.argsort(g.opinions, kind="stable")
    minded = [classify(float(e)) for e in g.epsilons]
    left, right = pulls_all(g)
    pairs = []
    for a, b in zip(order[:-1], order[1:]):
        i, j = int(a), int(b)
        if minded[i] is not Mindedness.OPEN or minded[j] is not Mindedness.OPEN:
            continue
        if left[i] < right[i] and left[j] > right[j]:
            pairs.append((i, j))
    return pairs


def compute_injection(
    g: InfluenceGraph, pair: tuple[int, int]
) -> tuple[PlacementEvent, PlacementEvent]:
    """Counter-pull batches for a converging pair.

    The left anchor i asks for ceil((sum_right - sum_left) / epsilon_i)
    agents at x_i - epsilon_i (the far edge of its interval, so each
    contributes a full epsilon_i of leftward pull); mirrored for the
    right anchor.  Positions are clamped to [0, 1] and flagged; counts
    are always >= 1 because qualification requires a strict imbalance.
    """
    i, j = pair
    left_i, right_i = _pull_of(g, i)
    left_j, right_j = _pull_of(g, j)
    if not (left_i < right_i and left_j > right_j):
        raise ValueError(f"pair ({i}, {j}) is not a converging pair")
    ev_left = _batch(g, i, right_i - left_i, Side.LEFT)
    ev_right = _batch(g, j, left_j - right_j, Side.RIGHT)
    return ev_left, ev_right


def _pull_of(g: InfluenceGraph, i: int) -> tuple[float, float]:
    xi = g.opinions[i]
    xs = g.opinions[g.out_neighbors[i]]
    return (
        float(np.sum(np.where(xs < xi, xi - xs, 0.0))),
        float(np.sum(np.where(xs > xi, xs - xi, 0.0))),
    )


def _batch(g: InfluenceGraph, anchor: int, imbalance: float, side: Side) -> PlacementEvent:
    eps_a = float(g.epsilons[anchor])
    if eps_a <= 0.0:
        raise ValueError("anchor epsilon must be positive")
    count = int(math.ceil(imbalance / eps_a))
    xa = float(g.opinions[anchor])
    requested = xa - eps_a if side is Side.LEFT else xa + eps_a
    opinion = min(max(requested, 0.0), 1.0)
    return PlacementEvent(
        time=g.timestamp,
        opinion=opinion,
        requested_opinion=requested,
        count=count,
        anchor_agent=anchor,
        side=side,
        clamped=opinion != requested,
    )


def run_with_placement(
    pop: Population,
    dyn: DynamicsConfig,
    place: PlacementConfig,
) -> tuple[SimulationResult, list[PlacementEvent]]:
    """Run the dynamics with injections; returns the result and the full
    event log.  With budget 0 both strategies reduce exactly to a plain
    simulate."""
    if place.budget == 0:
        return simulate(pop, dyn), []
    if place.strategy is Strategy.RANDOM_AT_START:
        return _run_random(pop, dyn, place)
    return _run_intelligent(pop, dyn, place)


def _run_random(pop, dyn, place):
    rng = np.random.default_rng(place.rng_seed)
    x0 = pop.opinions
    lo, hi = float(x0.min()), float(x0.max())
    draws = rng.uniform(lo, hi, place.budget)
    events = [
        PlacementEvent(
            time=0,
            opinion=float(d),
            requested_opinion=float(d),
            count=1,
            anchor_agent=-1,
            side=None,
            clamped=False,
        )
        for d in draws
    ]
    new = [
        Agent(id=pop.n + k, opinion=float(d), epsilon=place.epsilon_new, injected=True)
        for k, d in enumerate(draws)
    ]
    return simulate(pop.extended(new), dyn), events


def _run_intelligent(pop, dyn, place):
    x = pop.opinions.copy()
    eps = pop.epsilons.copy()
    agents = list(pop.agents)
    budget = place.budget
    events: list[PlacementEvent] = []
    traj: list[np.ndarray] = []
    t_eqm = None
    for t in range(dyn.max_steps):
        injected_now = False
        if budget > 0:
            g = build_graph_arrays(x, eps, t)
            step_events = []
            for pair in find_converging_pairs(g):
                ev_left, ev_right = compute_injection(g, pair)
                if budget < ev_left.count:
                    break  # unaffordable batch ends this step's scan
                step_events.append(ev_left)
                budget -= ev_left.count
                if budget < ev_right.count:
                    break
                step_events.append(ev_right)
                budget -= ev_right.count
            if step_events:
                injected_now = True
                events.extend(step_events)
                adds = []
                for ev in step_events:
                    for _ in range(ev.count):
                        adds.append(
                            Agent(
                                id=len(agents) + len(adds),
                                opinion=ev.opinion,
                                epsilon=place.epsilon_new,
                                injected=True,
                            )
                        )
                x = np.concatenate([x, [a.opinion for a in adds]])
                eps = np.concatenate([eps, [a.epsilon for a in adds]])
                agents.extend(adds)
        traj.append(x)
        x1 = _step_arrays(x, eps, dyn.rule, dyn.w_own)
        quiet = float(np.max(np.abs(x1 - x))) <= dyn.delta
        if not injected_now and quiet:
            t_eqm = t
            traj.append(x1)
            break
        x = x1
    else:
        traj.append(x)
    result = SimulationResult(
        trajectory=traj,
        t_eqm=t_eqm,
        converged=t_eqm is not None,
        c_eqm=count_clusters(traj[-1], dyn.cluster_tol),
        agents=agents,
    )
    return result, events


def budget_spent(events: list[PlacementEvent]) -> int:
    return sum(ev.count for ev in events)


def write_events_csv(events: list[PlacementEvent]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["time", "opinion", "requested_opinion", "count", "anchor_agent", "side", "clamped"]
    )
    for ev in events:
        w.writerow(
            [
                ev.time,
                repr(float(ev.opinion)),
                repr(float(ev.requested_opinion)),
                ev.count,
                ev.anchor_agent,
                ev.side.value if ev.side is not None else "",
                "true" if ev.clamped else "false",
            ]
        )
    return buf.getvalue()
