"""Command line front end.

Subcommands: gen (write a population), simulate (trajectory + summary),
place (trajectory + injection events), sweep (records + per-point
means; trajectory_dump configs emit trajectories instead), graph
(DOT/JSON export of a snapshot).  Every run is a pure function of the
config plus flags, so rerunning a command reproduces its output files
byte for byte.

Exit codes: 0 on success, 1 on validation or usage errors, 2 on I/O
errors.  Progress goes to stderr; --quiet silences it.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import DynamicsConfig, SimulationResult, simulate, write_trajectory_csv
from .graph import build_graph_arrays, export_graph
from .harness import (
    SweepKind,
    SweepSpec,
    aggregate_means,
    dump_trajectories,
    run_sweep,
    write_means_csv,
    write_sweep_csv,
)
from .placement import PlacementConfig, run_with_placement, write_events_csv
from .popgen import (
    MixtureSpec,
    clipped_normal_mixture,
    evenly_spaced,
    read_population_csv,
    transform,
    write_population_csv,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; this tool reserves 2
    # for I/O problems and reports bad usage as validation (1)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="echosim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in [
        ("gen", "generate a population CSV"),
        ("simulate", "run the dynamics, write trajectory and summary"),
        ("place", "run with agent injection, write trajectory and events"),
        ("sweep", "run a parameter sweep, write records and means"),
        ("graph", "export an influence-graph snapshot"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config entry by dotted path (repeatable)",
        )
        p.add_argument("--seed", type=int, default=None, help="override the generation seed")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")
    return parser


def _apply_overrides(cfg: dict, args) -> dict:
    if args.seed is not None:
        for key in ("population", "base_mixture"):
            if key in cfg and isinstance(cfg[key], dict):
                cfg[key]["rng_seed"] = args.seed
    for item in args.set:
        if "=" not in item:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = cfg
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ValueError(f"--set path {key!r} crosses a non-object entry")
        node[parts[-1]] = value
    return cfg


def _population_from_config(cfg: dict):
    kind = cfg.get("kind", "mixture")
    if kind == "evenly_spaced":
        pop = evenly_spaced(int(cfg["n"]), float(cfg["epsilon"]))
    elif kind == "mixture":
        fields = {
            k: cfg[k]
            for k in ("n", "fractions", "epsilons", "opinion_dist", "mean", "sd", "rng_seed")
            if k in cfg
        }
        pop = clipped_normal_mixture(MixtureSpec(**fields))
    elif kind == "csv":
        pop = read_population_csv(Path(cfg["path"]).read_text())
    else:
        raise ValueError(f"unknown population kind {kind!r}")
    t = cfg.get("transform")
    if t:
        pop = transform(
            pop,
            t["from"],
            float(t["fraction"]),
            float(t.get("epsilon_new", 0.2)),
            rng_seed=int(t.get("rng_seed", 0)),
        )
    return pop


def _dynamics_from_config(cfg: dict | None) -> DynamicsConfig:
    return DynamicsConfig(**(cfg or {}))


def _placement_from_config(cfg: dict) -> PlacementConfig:
    return PlacementConfig(**cfg)


def _sweep_from_config(cfg: dict) -> SweepSpec:
    base = cfg.get("base_mixture")
    placement = cfg.get("placement")
    fields = {
        k: cfg[k]
        for k in ("kind", "grid", "population_sizes", "runs", "transform_from", "transform_epsilon")
        if k in cfg
    }
    return SweepSpec(
        base_mixture=MixtureSpec(**base) if base else None,
        dynamics=_dynamics_from_config(cfg.get("dynamics")),
        placement=_placement_from_config(placement) if placement else None,
        **fields,
    )


def _summary_csv(result: SimulationResult, cap: int) -> str:
    t = result.t_eqm if result.converged else cap
    return (
        "n,t_eqm,converged,c_eqm\n"
        f"{len(result.trajectory[-1])},{t},"
        f"{'true' if result.converged else 'false'},{result.c_eqm}\n"
    )


def _run_command(command: str, cfg: dict) -> dict:
    """Build everything from the config and return filename -> text."""
    if command == "gen":
        pop = _population_from_config(cfg["population"])
        return {"population.csv": write_population_csv(pop)}
    if command == "simulate":
        pop = _population_from_config(cfg["population"])
        dyn = _dynamics_from_config(cfg.get("dynamics"))
        result = simulate(pop, dyn)
        return {
            "trajectory.csv": write_trajectory_csv(result.trajectory, result.agents),
            "summary.csv": _summary_csv(result, dyn.max_steps),
        }
    if command == "place":
        pop = _population_from_config(cfg["population"])
        dyn = _dynamics_from_config(cfg.get("dynamics"))
        place = _placement_from_config(cfg["placement"])
        result, events = run_with_placement(pop, dyn, place)
        return {
            "trajectory.csv": write_trajectory_csv(result.trajectory, result.agents),
            "events.csv": write_events_csv(events),
        }
    if command == "sweep":
        spec = _sweep_from_config(cfg)
        if spec.kind is SweepKind.TRAJECTORY_DUMP:
            return dump_trajectories(spec)
        records = run_sweep(spec)
        return {
            "sweep.csv": write_sweep_csv(records),
            "means.csv": write_means_csv(aggregate_means(records)),
        }
    if command == "graph":
        pop = _population_from_config(cfg["population"])
        dyn = _dynamics_from_config(cfg.get("dynamics"))
        step = int(cfg.get("step", 0))
        fmt = cfg.get("format", "dot")
        profile = pop.opinions
        if step > 0:
            traj = simulate(pop, dyn).trajectory
            profile = traj[min(step, len(traj) - 1)]
        g = build_graph_arrays(profile, pop.epsilons, step)
        return {f"graph.{fmt}": export_graph(g, fmt)}
    raise ValueError(f"unknown command {command!r}")


def dispatch(args) -> int:
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"echosim: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = json.loads(text)
        cfg = _apply_overrides(cfg, args)
        outputs = _run_command(args.command, cfg)
    except (ValueError, KeyError, TypeError) as exc:
        print(f"echosim: invalid config: {exc}", file=sys.stderr)
        return 1
    try:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, payload in outputs.items():
            path = out_dir / name
            path.write_text(payload)
            if not args.quiet:
                print(f"wrote {path}", file=sys.stderr)
    except OSError as exc:
        print(f"echosim: cannot write output: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> None:
    args = build_parser().parse_args(argv)
    sys.exit(dispatch(args))


if __name__ == "__main__":
    main()
