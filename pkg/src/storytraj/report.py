"""Experiment evidence: ordered-run metrics, tables, DOT trees, reports.

The headline statistic is the initial ordered run: how far a solver's
visiting order agrees with the true paragraph order 1, 2, 3, ... from the
very start. Its MST counterpart is the longest chain of consecutive-index
edges beginning at paragraph 1. A softer secondary metric tolerates a
single defect (one omitted value or one adjacent swap) and is reported
alongside, never instead.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .errors import ConfigError, DataError
from .graph import PathOrder, Tree, atsp_exact, atsp_heuristic, distance_matrix, mst
from .kernels import BACKEND
from .lsa import EmbeddingSet
from .meanpath import ActionConfig, action, make_permutations, mean_path, shuffled_mean_path

DEFAULT_TABLE_COLUMNS = 25


def initial_ordered_run(order: PathOrder | tuple[int, ...]) -> int:
    """Largest k with order[t] = t for all t <= k (0 when it starts off 1)."""
    seq = order.order if isinstance(order, PathOrder) else tuple(order)
    k = 0
    for t, v in enumerate(seq, start=1):
        if v != t:
            break
        k = t
    return k


def near_run(order: PathOrder | tuple[int, ...]) -> int:
    """Largest value v reached by the prefix 1..v tolerating one defect.

    A defect is either one omitted value or one swap of two adjacent
    values; with zero defects this reduces to the initial ordered run.
    """
    seq = order.order if isinstance(order, PathOrder) else tuple(order)
    expect = 1
    faults = 0
    reached = 0
    t = 0
    while t < len(seq):
        v = seq[t]
        if v == expect:
            reached = expect
            expect += 1
            t += 1
        elif faults == 0 and t + 1 < len(seq) and v == expect + 1 and seq[t + 1] == expect:
            faults = 1
            reached = v
            expect += 2
            t += 2
        elif faults == 0 and v == expect + 1:
            faults = 1
            reached = v
            expect = v + 1
            t += 1
        else:
            break
    return reached


def canonical_orientation(order: PathOrder) -> PathOrder:
    """Pick the orientation with the longer initial ordered run.

    Open paths read the same backwards; of the two readings this returns
    the one scoring higher, breaking ties toward the smaller first element.
    """
    fwd = order.order
    rev = tuple(reversed(fwd))
    rf, rr = initial_ordered_run(fwd), initial_ordered_run(rev)
    if rr > rf or (rr == rf and rev[0] < fwd[0]):
        return PathOrder(order=rev, cost=order.cost, solver=order.solver,
                         endpoints=order.endpoints)
    return order


def mst_initial_chain(tree: Tree) -> int:
    """Largest k such that every edge (j, j+1) with j < k is in the tree."""
    edges = {tuple(sorted(e)) for e in tree.edges}
    k = 1
    while k < tree.n and (k, k + 1) in edges:
        k += 1
    return k


def render_table(order: PathOrder | tuple[int, ...],
                 columns: int = DEFAULT_TABLE_COLUMNS) -> str:
    """Row-major fixed-width table of a visiting order."""
    if columns < 1:
        raise ConfigError(f"columns must be >= 1, got {columns}")
    seq = order.order if isinstance(order, PathOrder) else tuple(order)
    width = max(len(str(v)) for v in seq)
    lines = []
    for row_start in range(0, len(seq), columns):
        row = seq[row_start:row_start + columns]
        lines.append(" ".join(str(v).rjust(width) for v in row))
    return "\n".join(lines) + "\n"


def export_dot(tree: Tree, labels: dict[int, str] | None = None) -> str:
    """DOT text for a tree; edges sorted for stable output."""
    lines = ["graph tree {"]
    if labels:
        for node in sorted(labels):
            lines.append(f'  {node} [label="{labels[node]}"];')
    for a, b in sorted(tree.edges):
        lines.append(f"  {a} -- {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RunMetrics:
    """Solver outputs for one mean path (ordered or one shuffle)."""

    atsp: PathOrder
    tree: Tree
    action_value: float
    shuffle_seed: int | None = None
    orientation: str = "forward"

    @property
    def atsp_initial_run(self) -> int:
        return initial_ordered_run(self.atsp)

    @property
    def atsp_near_run(self) -> int:
        return near_run(self.atsp)

    @property
    def mst_initial_chain(self) -> int:
        return mst_initial_chain(self.tree)

    def to_dict(self) -> dict:
        return {
            "shuffle_seed": self.shuffle_seed,
            "atsp": {
                "sequence": list(self.atsp.order),
                "cost": self.atsp.cost,
                "solver": self.atsp.solver,
                "orientation": self.orientation,
                "initial_run": self.atsp_initial_run,
                "near_run": self.atsp_near_run,
            },
            "mst": {
                "edges": sorted(self.tree.edges),
                "weight": self.tree.total_weight,
                "initial_chain": self.mst_initial_chain,
            },
            "action": self.action_value,
        }


@dataclass
class ExperimentConfig:
    """Everything run_experiment needs beyond the embeddings."""

    metric: str = "squared_euclidean"
    solver: str = "heuristic"
    endpoints: tuple[int, int] | None = None
    shuffle_seeds: tuple[int, ...] = tuple(range(10))
    alpha: float = 1.0
    subsample_n: int | None = None
    subsample_seed: int = 0
    embedding_method: str = "unknown"
    dims: int | None = None
    svd_seed: int | None = None

    def __post_init__(self):
        if self.solver not in ("exact", "heuristic"):
            raise ConfigError(f"solver must be 'exact' or 'heuristic', got {self.solver!r}")
        if len(set(self.shuffle_seeds)) != len(self.shuffle_seeds):
            raise ConfigError("shuffle seeds must be distinct")


@dataclass(frozen=True)
class ExperimentReport:
    config: dict
    ordered: RunMetrics
    shuffled: list[RunMetrics]
    timestamp: str
    versions: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        shuffled_runs = [m.to_dict() for m in self.shuffled]
        med = (statistics.median(m.atsp_initial_run for m in self.shuffled)
               if self.shuffled else None)
        return {
            "config": self.config,
            "versions": self.versions,
            "ordered": self.ordered.to_dict(),
            "shuffled": shuffled_runs,
            "shuffled_median_initial_run": med,
            "actions": {
                "ordered": self.ordered.action_value,
                "shuffled": [m.action_value for m in self.shuffled],
            },
            "timestamp": self.timestamp,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _solve(points: np.ndarray, cfg: ExperimentConfig,
           shuffle_seed: int | None) -> RunMetrics:
    dm = distance_matrix(points, cfg.metric)
    if cfg.solver == "exact":
        path = atsp_exact(dm, cfg.endpoints)
    else:
        path = atsp_heuristic(dm, cfg.endpoints)
    canon = canonical_orientation(path)
    tree = mst(dm)
    act = action(points, ActionConfig(alpha=cfg.alpha))
    return RunMetrics(atsp=canon, tree=tree, action_value=act,
                      shuffle_seed=shuffle_seed,
                      orientation="forward" if canon.order == path.order
                      else "reversed")


def _subsample(e: EmbeddingSet, keep: int, seed: int) -> EmbeddingSet:
    if not 1 <= keep <= e.N:
        raise ConfigError(f"subsample size {keep} outside 1..{e.N}")
    if keep == e.N:
        return e
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(e.N, size=keep, replace=False))
    return EmbeddingSet(
        narrative_ids=tuple(e.narrative_ids[i] for i in idx),
        data=np.asarray(e.data)[idx].copy(),
    )


def run_experiment(e: EmbeddingSet, cfg: ExperimentConfig) -> ExperimentReport:
    """Ordered mean-path analysis plus one shuffled control per seed."""
    if cfg.subsample_n is not None:
        e = _subsample(e, cfg.subsample_n, cfg.subsample_seed)

    ordered_mp = mean_path(e)
    ordered = _solve(np.asarray(ordered_mp.points), cfg, None)

    shuffled = []
    for seed in cfg.shuffle_seeds:
        perms = make_permutations(e.N, e.n, seed)
        mp = shuffled_mean_path(e, perms)
        shuffled.append(_solve(np.asarray(mp.points), cfg, seed))

    config_echo = {
        "embedding_method": cfg.embedding_method,
        "dims": cfg.dims if cfg.dims is not None else e.dims,
        "N": e.N,
        "n": e.n,
        "metric": cfg.metric,
        "solver": cfg.solver,
        "endpoint_mode": ({"mode": "pinned", "start": cfg.endpoints[0],
                           "end": cfg.endpoints[1]}
                          if cfg.endpoints else {"mode": "free"}),
        "alpha": cfg.alpha,
        "shuffle_seeds": list(cfg.shuffle_seeds),
        "svd_seed": cfg.svd_seed,
        "subsample": ({"N": cfg.subsample_n, "seed": cfg.subsample_seed}
                      if cfg.subsample_n is not None else None),
    }
    versions = {
        "storytraj": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "kernel_backend": BACKEND,
    }
    return ExperimentReport(
        config=config_echo,
        ordered=ordered,
        shuffled=shuffled,
        timestamp=datetime.now(timezone.utc).isoformat(),
        versions=versions,
    )


def write_artifacts(report: ExperimentReport, out_dir: str | Path) -> list[Path]:
    """Write the report JSON plus tables and DOT trees; returns the paths.

    Everything is rendered in memory first so a failure emits nothing.
    """
    out = Path(out_dir)
    rendered: list[tuple[Path, str]] = [
        (out / "report.json", report.to_json()),
        (out / "atsp_ordered.txt", render_table(report.ordered.atsp)),
        (out / "mst_ordered.dot", export_dot(report.ordered.tree)),
    ]
    for m in report.shuffled:
        rendered.append((out / f"atsp_shuffled_{m.shuffle_seed}.txt",
                         render_table(m.atsp)))
        rendered.append((out / f"mst_shuffled_{m.shuffle_seed}.dot",
                         export_dot(m.tree)))
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for path, text in rendered:
        path.write_text(text, encoding="utf-8")
        paths.append(path)
    return paths


def load_report(path: str | Path) -> dict:
    src = Path(path)
    if not src.is_file():
        raise ConfigError(f"report not found: {src}")
    try:
        return json.loads(src.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"report is not valid JSON: {src}: {exc}") from exc


REPORT_SCHEMA: dict = {
    "type": "object",
    "required": ["config", "versions", "ordered", "shuffled",
                 "shuffled_median_initial_run", "actions", "timestamp"],
    "properties": {
        "config": {"type": "object"},
        "versions": {"type": "object"},
        "ordered": {"$ref": "#/$defs/run"},
        "shuffled": {"type": "array", "items": {"$ref": "#/$defs/run"}},
        "shuffled_median_initial_run": {"type": ["number", "null"]},
        "actions": {
            "type": "object",
            "required": ["ordered", "shuffled"],
            "properties": {
                "ordered": {"type": "number"},
                "shuffled": {"type": "array", "items": {"type": "number"}},
            },
        },
        "timestamp": {"type": "string"},
    },
    "$defs": {
        "run": {
            "type": "object",
            "required": ["atsp", "mst", "action"],
            "properties": {
                "shuffle_seed": {"type": ["integer", "null"]},
                "atsp": {
                    "type": "object",
                    "required": ["sequence", "cost", "solver", "orientation",
                                 "initial_run", "near_run"],
                },
                "mst": {
                    "type": "object",
                    "required": ["edges", "weight", "initial_chain"],
                },
                "action": {"type": "number"},
            },
        },
    },
}
