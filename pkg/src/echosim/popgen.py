"""Population generators and the class-conversion transform.

Two initial layouts: opinions evenly spaced over [0, 1], or drawn from
a normal centered at 0.5 and clipped to the interval.  Mixtures assign
close/moderate/open confidence intervals by fraction counts; everything
downstream of the seed (class shuffle, opinion draws, transform picks)
comes from numpy's default_rng (PCG64), so a seed pins the population.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .core import Agent, Mindedness, Population

NORMAL_MEAN = 0.5
NORMAL_SD = 0.125

DEFAULT_EPSILONS = {
    Mindedness.CLOSE: 0.01,
    Mindedness.MODERATE: 0.2,
    Mindedness.OPEN: 0.45,
}

# canonical class order for counting and epsilon assignment
_CLASS_ORDER = (Mindedness.CLOSE, Mindedness.MODERATE, Mindedness.OPEN)


class OpinionDist(str, Enum):
    EVENLY_SPACED = "evenly_spaced"
    CLIPPED_NORMAL = "clipped_normal"


def round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


@dataclass
class MixtureSpec:
    n: int
    fractions: dict
    epsilons: dict = field(default_factory=lambda: dict(DEFAULT_EPSILONS))
    opinion_dist: OpinionDist = OpinionDist.CLIPPED_NORMAL
    mean: float = NORMAL_MEAN
    sd: float = NORMAL_SD
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        self.opinion_dist = OpinionDist(self.opinion_dist)
        self.fractions = {Mindedness(k): float(v) for k, v in self.fractions.items()}
        self.epsilons = {Mindedness(k): float(v) for k, v in self.epsilons.items()}
        if not self.fractions:
            raise ValueError("fractions must name at least one class")
        if any(v < 0.0 for v in self.fractions.values()):
            raise ValueError("fractions must be nonnegative")
        if abs(sum(self.fractions.values()) - 1.0) > 1e-9:
            raise ValueError("fractions must sum to 1")
        missing = set(self.fractions) - set(self.epsilons)
        if missing:
            raise ValueError(f"no epsilon given for classes {sorted(m.value for m in missing)}")
        if self.sd <= 0.0:
            raise ValueError("sd must be positive")


def class_counts(spec: MixtureSpec) -> dict:
    """Agents per class: round half up, last named class absorbs the
    remainder so the counts always sum to n."""
    present = [c for c in _CLASS_ORDER if c in spec.fractions]
    counts = {}
    for c in present[:-1]:
        counts[c] = round_half_up(spec.fractions[c] * spec.n)
    rest = spec.n - sum(counts.values())
    if rest < 0:
        raise ValueError("rounded class counts exceed n")
    counts[present[-1]] = rest
    return counts


def evenly_spaced(n: int, epsilon: float) -> Population:
    """Homogeneous population with x_i = i / (n - 1)."""
    if n < 2:
        raise ValueError("evenly spaced layout needs at least 2 agents")
    x = np.linspace(0.0, 1.0, n)
    return Population.from_arrays(x, np.full(n, float(epsilon)))


def clipped_normal_mixture(spec: MixtureSpec) -> Population:
    """Draw a seeded mixture population.

    One generator drives everything, in a fixed order: the per-class
    epsilon labels are laid out in close/moderate/open order, shuffled,
    then the opinions are drawn (or spaced evenly if so configured).
    """
    rng = np.random.default_rng(spec.rng_seed)
    counts = class_counts(spec)
    eps = np.concatenate(
        [np.full(k, spec.epsilons[c]) for c, k in counts.items()]
    )
    rng.shuffle(eps)
    if spec.opinion_dist is OpinionDist.EVENLY_SPACED:
        if spec.n < 2:
            raise ValueError("evenly spaced layout needs at least 2 agents")
        x = np.linspace(0.0, 1.0, spec.n)
    else:
        x = np.clip(rng.normal(spec.mean, spec.sd, spec.n), 0.0, 1.0)
    return Population.from_arrays(x, eps)


def transform(
    pop: Population,
    from_class: Mindedness,
    fraction: float,
    epsilon_new: float = 0.2,
    rng_seed: int = 0,
) -> Population:
    """Convert a seeded uniform pick of round_half_up(fraction * count)
    agents of from_class to the new epsilon.  Opinions, ids and the
    injected flag never change; mindedness rederives from the epsilon."""
    from_class = Mindedness(from_class)
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    pool = [i for i, a in enumerate(pop.agents) if a.mindedness is from_class]
    k = round_half_up(fraction * len(pool))
    chosen: set[int] = set()
    if k:
        rng = np.random.default_rng(rng_seed)
        chosen = set(int(i) for i in rng.choice(np.array(pool), size=k, replace=False))
    out = []
    for i, a in enumerate(pop.agents):
        if i in chosen:
            out.append(Agent(id=a.id, opinion=a.opinion, epsilon=float(epsilon_new), injected=a.injected))
        else:
            out.append(a)
    return Population(out)


def write_population_csv(pop: Population) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["agent_id", "opinion", "epsilon", "mindedness", "injected"])
    for a in pop.agents:
        w.writerow(
            [
                a.id,
                repr(float(a.opinion)),
                repr(float(a.epsilon)),
                a.mindedness.value,
                "true" if a.injected else "false",
            ]
        )
    return buf.getvalue()


def read_population_csv(text: str) -> Population:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise ValueError("population csv has no rows")
    agents = [
        Agent(
            id=int(r["agent_id"]),
            opinion=float(r["opinion"]),
            epsilon=float(r["epsilon"]),
            injected=r["injected"] == "true",
        )
        for r in rows
    ]
    return Population(agents)


def scaled(spec: MixtureSpec, n: int) -> MixtureSpec:
    """Same mixture at a different population size."""
    return replace(spec, n=n)
