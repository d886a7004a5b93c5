"""Experiment harness: parameter sweeps, aggregation, serialization.

A sweep walks a grid of points (epsilon values, conversion fractions,
or budget fractions depending on the kind) crossed with population
sizes and run seeds, simulates each cell, and emits one flat record per
run.  Per-point means across seeds are aggregated separately.  All
sweeps are deterministic functions of their spec.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .core import DynamicsConfig, Mindedness, simulate, write_trajectory_csv
from .placement import (
    PlacementConfig,
    Strategy,
    budget_spent,
    run_with_placement,
    write_events_csv,
)
from .popgen import MixtureSpec, clipped_normal_mixture, evenly_spaced, round_half_up, transform


class SweepKind(str, Enum):
    EPSILON_SWEEP = "epsilon_sweep"
    TRANSFORM_SWEEP = "transform_sweep"
    PLACEMENT_COMPARE = "placement_compare"
    TRAJECTORY_DUMP = "trajectory_dump"


@dataclass
class SweepSpec:
    """Grid semantics by kind: epsilon values for EpsilonSweep,
    conversion fractions for TransformSweep, budget fractions of n for
    PlacementCompare; ignored by TrajectoryDump."""

    kind: SweepKind
    grid: list
    population_sizes: list
    base_mixture: MixtureSpec | None = None
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)
    placement: PlacementConfig | None = None
    runs: int = 5
    transform_from: Mindedness | None = None
    transform_epsilon: float = 0.2

    def __post_init__(self) -> None:
        self.kind = SweepKind(self.kind)
        if self.kind is not SweepKind.TRAJECTORY_DUMP and not self.grid:
            raise ValueError("grid must be nonempty")
        if not self.population_sizes:
            raise ValueError("population_sizes must be nonempty")
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if self.transform_from is not None:
            self.transform_from = Mindedness(self.transform_from)
        needs_mixture = self.kind in (
            SweepKind.TRANSFORM_SWEEP,
            SweepKind.PLACEMENT_COMPARE,
            SweepKind.TRAJECTORY_DUMP,
        )
        if needs_mixture and self.base_mixture is None:
            raise ValueError(f"{self.kind.value} needs a base_mixture")
        if self.kind is SweepKind.TRANSFORM_SWEEP and self.transform_from is None:
            raise ValueError("transform_sweep needs transform_from")


@dataclass
class SweepRecord:
    kind: SweepKind
    point: float
    n: int
    seed: int
    t_eqm: int
    converged: bool
    c_eqm: int
    strategy: Strategy | None = None
    budget_spent: int | None = None


def record_count(spec: SweepSpec) -> int:
    """Exact number of records a sweep emits."""
    cells = len(spec.grid) * len(spec.population_sizes)
    if spec.kind is SweepKind.PLACEMENT_COMPARE:
        return cells * (spec.runs + 1)  # one intelligent + runs random
    return cells * spec.runs


def _record(spec, point, n, seed, result, strategy=None, spent=None):
    cap = spec.dynamics.max_steps
    return SweepRecord(
        kind=spec.kind,
        point=float(point),
        n=n,
        seed=seed,
        t_eqm=result.t_eqm if result.converged else cap,
        converged=result.converged,
        c_eqm=result.c_eqm,
        strategy=strategy,
        budget_spent=spent,
    )


def run_epsilon_sweep(spec: SweepSpec) -> list[SweepRecord]:
    """Homogeneous evenly spaced populations; fully deterministic, so
    every run of a cell emits an identical record."""
    records = []
    for n in spec.population_sizes:
        for eps in spec.grid:
            result = simulate(evenly_spaced(n, eps), spec.dynamics)
            for seed in range(spec.runs):
                records.append(_record(spec, eps, n, seed, result))
    return records


def run_transform_sweep(spec: SweepSpec) -> list[SweepRecord]:
    """One fixed base mixture per size (its own seed), then per-run
    transform seeds pick which agents convert."""
    records = []
    for n in spec.population_sizes:
        base = clipped_normal_mixture(replace(spec.base_mixture, n=n))
        for frac in spec.grid:
            for seed in range(spec.runs):
                pop = transform(
                    base, spec.transform_from, frac, spec.transform_epsilon, rng_seed=seed
                )
                records.append(_record(spec, frac, n, seed, simulate(pop, spec.dynamics)))
    return records


def run_placement_compare(spec: SweepSpec) -> list[SweepRecord]:
    """Intelligent once per cell versus random over `runs` placement
    seeds, on the same base mixture; grid points are budget fractions,
    budget = round_half_up(point * n)."""
    base_place = spec.placement or PlacementConfig(budget=0)
    records = []
    for n in spec.population_sizes:
        base = clipped_normal_mixture(replace(spec.base_mixture, n=n))
        for b in spec.grid:
            budget = round_half_up(float(b) * n)
            cfg = replace(base_place, budget=budget, strategy=Strategy.INTELLIGENT)
            result, events = run_with_placement(base, spec.dynamics, cfg)
            records.append(
                _record(
                    spec, b, n, spec.base_mixture.rng_seed, result,
                    strategy=Strategy.INTELLIGENT, spent=budget_spent(events),
                )
            )
            for seed in range(spec.runs):
                cfg = replace(
                    base_place,
                    budget=budget,
                    strategy=Strategy.RANDOM_AT_START,
                    rng_seed=seed,
                )
                result, events = run_with_placement(base, spec.dynamics, cfg)
                records.append(
                    _record(
                        spec, b, n, seed, result,
                        strategy=Strategy.RANDOM_AT_START, spent=budget_spent(events),
                    )
                )
    return records


def run_sweep(spec: SweepSpec) -> list[SweepRecord]:
    if spec.kind is SweepKind.EPSILON_SWEEP:
        return run_epsilon_sweep(spec)
    if spec.kind is SweepKind.TRANSFORM_SWEEP:
        return run_transform_sweep(spec)
    if spec.kind is SweepKind.PLACEMENT_COMPARE:
        return run_placement_compare(spec)
    raise ValueError(f"{spec.kind.value} emits trajectories, not sweep records")


def dump_trajectories(spec: SweepSpec) -> dict:
    """TrajectoryDump kind: run the base mixture (first population size)
    once, with placement when configured, and return the CSV payloads
    keyed by filename."""
    n = spec.population_sizes[0]
    pop = clipped_normal_mixture(replace(spec.base_mixture, n=n))
    if spec.transform_from is not None:
        pop = transform(pop, spec.transform_from, spec.grid[0] if spec.grid else 0.0,
                        spec.transform_epsilon, rng_seed=0)
    if spec.placement is not None and spec.placement.budget > 0:
        result, events = run_with_placement(pop, spec.dynamics, spec.placement)
        return {
            "trajectory.csv": write_trajectory_csv(result.trajectory, result.agents),
            "events.csv": write_events_csv(events),
        }
    result = simulate(pop, spec.dynamics)
    return {"trajectory.csv": write_trajectory_csv(result.trajectory, result.agents)}


def write_sweep_csv(records: list[SweepRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["kind", "point", "n", "seed", "strategy", "budget_spent", "t_eqm", "converged", "c_eqm"]
    )
    for r in records:
        w.writerow(
            [
                r.kind.value,
                repr(float(r.point)),
                r.n,
                r.seed,
                r.strategy.value if r.strategy is not None else "",
                r.budget_spent if r.budget_spent is not None else "",
                r.t_eqm,
                "true" if r.converged else "false",
                r.c_eqm,
            ]
        )
    return buf.getvalue()


def read_sweep_csv(text: str) -> list[SweepRecord]:
    records = []
    for r in csv.DictReader(io.StringIO(text)):
        records.append(
            SweepRecord(
                kind=SweepKind(r["kind"]),
                point=float(r["point"]),
                n=int(r["n"]),
                seed=int(r["seed"]),
                strategy=Strategy(r["strategy"]) if r["strategy"] else None,
                budget_spent=int(r["budget_spent"]) if r["budget_spent"] else None,
                t_eqm=int(r["t_eqm"]),
                converged=r["converged"] == "true",
                c_eqm=int(r["c_eqm"]),
            )
        )
    return records


def aggregate_means(records: list[SweepRecord]) -> list[dict]:
    """Mean t_eqm and c_eqm per (kind, point, n, strategy) across seeds,
    in first-seen order.  Non-converged runs enter at the cap value."""
    groups: dict = {}
    for r in records:
        key = (r.kind, r.point, r.n, r.strategy)
        groups.setdefault(key, []).append(r)
    rows = []
    for (kind, point, n, strategy), rs in groups.items():
        rows.append(
            {
                "kind": kind.value,
                "point": point,
                "n": n,
                "strategy": strategy.value if strategy is not None else "",
                "runs": len(rs),
                "mean_t_eqm": float(np.mean([r.t_eqm for r in rs])),
                "mean_c_eqm": float(np.mean([r.c_eqm for r in rs])),
            }
        )
    return rows


def write_means_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "point", "n", "strategy", "runs", "mean_t_eqm", "mean_c_eqm"])
    for r in rows:
        w.writerow(
            [
                r["kind"],
                repr(float(r["point"])),
                r["n"],
                r["strategy"],
                r["runs"],
                repr(r["mean_t_eqm"]),
                repr(r["mean_c_eqm"]),
            ]
        )
    return buf.getvalue()


def _ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    s = values[order]
    base = np.arange(1.0, len(values) + 1.0)
    out = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and s[j + 1] == s[i]:
            j += 1
        out[order[i : j + 1]] = base[i : j + 1].mean()  # ties share the average rank
        i = j + 1
    return out


def spearman_rank_correlation(a, b) -> float:
    """Pearson correlation of average ranks; nan when either input is
    constant."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("inputs must be 1-d arrays of equal length")
    if len(a) < 2:
        raise ValueError("need at least two points")
    ra = _ranks(a)
    rb = _ranks(b)
    ra -= ra.mean()
    rb -= rb.mean()
    denom = float(np.sqrt((ra * ra).sum() * (rb * rb).sum()))
    if denom == 0.0:
        return float("nan")
    return float((ra * rb).sum() / denom)
