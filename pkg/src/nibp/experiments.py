"""Experiment drivers: bound fuzzing, noisy QAOA MaxCut training, landscapes.

Every run writes ``config.resolved`` (the fully expanded JSON config),
``results.csv`` and ``summary.json`` into its output directory.  Floats are
written with ``repr`` so they round-trip exactly, and every random draw comes
from a ``SeedSequence`` keyed on the master seed and the task coordinates, so
output does not depend on execution order or on ``jobs``.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import ansatz as az
from . import bounds as bd
from . import gradient as gr
from . import state as st
from .channels import NoiseSpec, random_cptp_spec
from .maxcut import Graph, erdos_renyi, exact_ground_energy, approximation_ratio, read_edge_list
from .optimize import NelderMeadOptions, multistart
from .pauli import PauliString, PauliSum
from .qaoa_sim import QaoaKernel

log = logging.getLogger(__name__)

# Stand-in noise strength for the QAOA study; not a measured device value.
DEFAULT_Q = 0.95
BOUND_SLACK = 1e-12
RATIO_SLACK = 1e-9

# spawn-key tags keep the random streams of different drivers disjoint
_TAG_GRAPHS, _TAG_VERIFY, _TAG_QAOA, _TAG_LANDSCAPE, _TAG_GRADCHECK = range(1, 6)


def seed_for(master: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=master, spawn_key=tuple(int(k) for k in key))


def rng_for(master: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(seed_for(master, *key))


# -- configuration ------------------------------------------------------------

@dataclass(frozen=True)
class GraphSource:
    count: int = 20
    seed: int = 0
    files: tuple[str, ...] = ()


@dataclass(frozen=True)
class VerifyOptions:
    instances: int = 1000
    n_min: int = 2
    n_max: int = 5
    L_max: int = 12


@dataclass(frozen=True)
class LandscapeOptions:
    p_values: tuple[int, ...] = (1, 4, 8)
    params: tuple[int, int] = (0, 1)
    grid: int = 21
    q: float = 0.9
    graph: int = 0


@dataclass(frozen=True)
class GradcheckOptions:
    instances: int = 200
    n_max: int = 4
    L_max: int = 6
    step: float = gr.FD_STEP


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment configuration (see ``load_config`` for the JSON schema)."""

    n: int = 5
    graphs: GraphSource = field(default_factory=GraphSource)
    p_min: int = 1
    p_max: int = 8
    noise: dict = field(default_factory=lambda: {"qx": DEFAULT_Q, "qy": DEFAULT_Q,
                                                 "qz": DEFAULT_Q, "qm": 1.0})
    native_layers: bool = True
    shots: int = 1000
    restarts: int = 10
    random_points: int = 20
    optimizer: NelderMeadOptions = field(default_factory=NelderMeadOptions)
    backend: str = "dense"
    seed: int = 0
    out: str = "runs"
    jobs: int = 1
    verify: VerifyOptions = field(default_factory=VerifyOptions)
    landscape: LandscapeOptions = field(default_factory=LandscapeOptions)
    gradcheck: GradcheckOptions = field(default_factory=GradcheckOptions)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.p_min < 1:
            raise ValueError("p_min must be >= 1 (p = 0 has no circuit)")
        if self.p_max < self.p_min:
            raise ValueError("p_max must be >= p_min")
        if self.shots < 1 or self.restarts < 1 or self.random_points < 0:
            raise ValueError("shots and restarts must be >= 1, random_points >= 0")
        if self.backend not in ("dense", "pauli"):
            raise ValueError(f"backend must be 'dense' or 'pauli', not {self.backend!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        unknown = set(self.noise) - {"qx", "qy", "qz", "qm"}
        if unknown or "qx" not in self.noise:
            raise ValueError(f"noise needs qx (and optionally qy, qz, qm); got {sorted(self.noise)}")
        self.noise_spec().require_cptp()
        lo = self.landscape
        if lo.params[0] == lo.params[1]:
            raise ValueError("landscape needs two distinct parameter ids")
        if lo.grid < 2:
            raise ValueError("landscape grid needs at least 2 points per axis")

    def noise_spec(self, n: int | None = None, qm: float | None = None) -> NoiseSpec:
        nz = self.noise
        qx = nz["qx"]
        return NoiseSpec.from_values(self.n if n is None else n, qx, nz.get("qy", qx),
                                     nz.get("qz", qx), nz.get("qm", 1.0) if qm is None else qm)

    @property
    def p_values(self) -> list[int]:
        return list(range(self.p_min, self.p_max + 1))

    def to_dict(self) -> dict:
        return json.loads(json.dumps(dataclasses.asdict(self)))

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


_SECTIONS = {"graphs": GraphSource, "verify": VerifyOptions, "landscape": LandscapeOptions,
             "gradcheck": GradcheckOptions}


def _section(cls, data: Any, name: str):
    if not isinstance(data, dict):
        raise ValueError(f"config section {name!r} must be an object")
    known = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(known)
    if unknown:
        raise ValueError(f"unknown keys in {name!r}: {sorted(unknown)}")
    values = {}
    for k, v in data.items():
        values[k] = tuple(v) if isinstance(v, list) else v
    return cls(**values)


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a config from plain JSON data; unknown keys are errors."""
    if not isinstance(data, dict):
        raise ValueError("config must be a JSON object")
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    values = dict(data)
    for key, cls in _SECTIONS.items():
        if key in values:
            values[key] = _section(cls, values[key], key)
    if "optimizer" in values:
        values["optimizer"] = NelderMeadOptions.from_dict(values["optimizer"])
    if "noise" in values:
        nz = values["noise"]
        if isinstance(nz, (int, float)):
            nz = {"qx": nz}
        values["noise"] = dict(nz)
    return ExperimentConfig(**values)


def load_config(path: str | Path | None, **overrides) -> ExperimentConfig:
    """Read a JSON config (or defaults when ``path`` is None) and apply CLI overrides."""
    data = {} if path is None else json.loads(Path(path).read_text())
    data.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_dict(data)


def _write_resolved(cfg: ExperimentConfig, out: Path, extra: dict | None = None) -> None:
    out.mkdir(parents=True, exist_ok=True)
    body = cfg.to_dict()
    if extra:
        body["_notes"] = extra
    (out / "config.resolved").write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: Path, columns: Sequence[str], rows: Sequence[dict]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    path.write_text(buf.getvalue())


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if math.isnan(v) else v
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: Path, data: dict) -> None:
    path.write_text(json.dumps(_json_safe(data), indent=2, sort_keys=True) + "\n")


def linear_fit(x, y) -> dict:
    """Least-squares line with its coefficient of determination."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else 1.0
    return {"slope": float(slope), "intercept": float(intercept), "r2": r2}


# -- bound verification -------------------------------------------------------

VERIFY_FAMILIES = ("hardware_efficient", "qaoa", "qaoa_native", "ucc", "random", "single_qubit")


def _random_graph(n: int, rng: np.random.Generator) -> Graph:
    while True:
        g = erdos_renyi(n, rng.integers(2**32))
        if g.edges:
            return g


def _random_observable(n: int, rng: np.random.Generator) -> PauliSum:
    k = int(rng.integers(1, 5))
    codes = rng.choice(np.arange(1, 4**n), size=min(k, 4**n - 1), replace=False)
    terms = [(PauliString(n, int(c)), float(rng.uniform(-1, 1))) for c in codes]
    return PauliSum(n, terms, float(rng.uniform(-1, 1)) if rng.random() < 0.5 else 0.0)


def _random_ucc(n: int, L_max: int, rng: np.random.Generator) -> az.Ansatz:
    gens, total = [], 0
    while True:
        k = int(rng.integers(1, 4))
        if gens and total + k > L_max:
            break
        codes = rng.choice(np.arange(1, 4**n), size=k, replace=False)
        gens.append({PauliString(n, int(c)): float(rng.choice([-1.0, 1.0])) for c in codes})
        total += k
        if total >= L_max or rng.random() < 0.3:
            break
    return az.build_ucc_like(n, gens, trotter=True)


def sample_instance(master: int, i: int, opts: VerifyOptions):
    """Deterministic random (ansatz, observable, input, noise, theta) for fuzz index ``i``."""
    rng = rng_for(master, _TAG_VERIFY, i)
    family = VERIFY_FAMILIES[int(rng.integers(len(VERIFY_FAMILIES)))]
    n = 1 if family == "single_qubit" else int(rng.integers(opts.n_min, opts.n_max + 1))
    L = int(rng.integers(1, opts.L_max + 1))
    if family == "hardware_efficient":
        a = az.build_hardware_efficient(n, L, rng.integers(2**32), rotation="random")
    elif family in ("qaoa", "qaoa_native"):
        g = _random_graph(n, rng)
        native = family == "qaoa_native"
        per_round = len(az.edge_coloring(g)) + 1 if native else 2
        p = max(1, min(L, opts.L_max) // per_round)
        a = az.build_qaoa(g, p, native)
    elif family == "ucc":
        a = _random_ucc(n, opts.L_max, rng)
    elif family == "random":
        a = az.build_random(n, L, rng)
    else:
        a = az.single_qubit_rx()
    if family.startswith("qaoa"):
        o = az.maxcut_hamiltonian(g)
        rho = a.input_state()
    else:
        o = PauliSum(1, {"Z": 1.0}) if family == "single_qubit" else _random_observable(n, rng)
        rho = (st.from_computational("0" * n) if rng.random() < 0.5
               else st.random_density(n, rng, rank=int(rng.integers(1, 2**n + 1))))
    qm = 1.0 if rng.random() < 0.5 else float(rng.uniform(0.5, 1.0))
    noise = random_cptp_spec(n, rng, q_floor=float(rng.uniform(0.0, 0.9)),
                             uniform=bool(rng.random() < 0.3), qm=qm)
    theta = rng.uniform(-np.pi, np.pi, a.n_params)
    return family, a, o, rho, noise, theta


VERIFY_COLUMNS = [
    "instance", "family", "n", "layers", "n_params", "q", "q_m", "w",
    "cost_deviation", "G", "G_readout",
    "max_factor_partial_ratio", "max_group_partial_ratio",
    "max_factor_partial_ratio_readout", "max_group_partial_ratio_readout",
    "violation",
]


def verify_instance(master: int, i: int, opts: VerifyOptions, backend: str) -> dict:
    family, a, o, rho, noise, theta = sample_instance(master, i, opts)
    q = noise.q
    w = o.min_weight
    ro = noise.qm**w
    cost = gr.cost(a, theta, o, rho, noise, backend)
    center = o.trace / 2**a.n
    G = bd.cost_bound(a, o, q)
    dev = abs(cost - center)
    parts = gr.factor_partials(a, theta, o, rho, noise, backend)
    factor_ratio = max(abs(v) / bd.factor_bound(a, r, o, q) for r, v in parts.items())
    grouped = {k: 0.0 for k in range(a.n_params)}
    for r, v in parts.items():
        grouped[a.factor(r).param_id] += v
    group_ratio = max(abs(v) / bd.group_bound(a, k, o, q) for k, v in grouped.items())
    violation = bool(
        dev > G * ro * (1 + RATIO_SLACK) + BOUND_SLACK
        or factor_ratio / ro > 1 + RATIO_SLACK
        or group_ratio / ro > 1 + RATIO_SLACK
    )
    return {
        "instance": i, "family": family, "n": a.n, "layers": a.layer_count,
        "n_params": a.n_params, "q": q, "q_m": noise.qm, "w": w,
        "cost_deviation": dev, "G": G, "G_readout": G * ro,
        "max_factor_partial_ratio": factor_ratio, "max_group_partial_ratio": group_ratio,
        "max_factor_partial_ratio_readout": factor_ratio / ro,
        "max_group_partial_ratio_readout": group_ratio / ro,
        "violation": violation,
    }


def _verify_chunk(args):
    master, indices, opts, backend = args
    return [verify_instance(master, i, opts, backend) for i in indices]


def _pool_map(fn, tasks: list, jobs: int) -> list:
    if jobs == 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, tasks))


def run_bound_verification(cfg: ExperimentConfig, out: str | Path | None = None) -> dict:
    """Fuzz the cost and gradient bounds; returns the summary written to ``summary.json``."""
    opts = cfg.verify
    chunks = [list(range(s, min(s + 50, opts.instances))) for s in range(0, opts.instances, 50)]
    rows = [r for part in _pool_map(_verify_chunk, [(cfg.seed, c, opts, cfg.backend)
                                                   for c in chunks], cfg.jobs) for r in part]
    summary = {
        "instances": len(rows),
        "violations": sum(r["violation"] for r in rows),
        "violations_by_family": {f: sum(r["violation"] for r in rows if r["family"] == f)
                                 for f in VERIFY_FAMILIES},
        "families": {f: sum(r["family"] == f for r in rows) for f in VERIFY_FAMILIES},
        "max_cost_ratio": max(r["cost_deviation"] / r["G_readout"] for r in rows),
        "max_factor_partial_ratio": max(r["max_factor_partial_ratio_readout"] for r in rows),
        "max_group_partial_ratio": max(r["max_group_partial_ratio_readout"] for r in rows),
        "with_readout_noise": sum(r["q_m"] < 1 for r in rows),
    }
    if out is not None:
        out = Path(out)
        _write_resolved(cfg, out)
        write_csv(out / "results.csv", VERIFY_COLUMNS, rows)
        write_json(out / "summary.json", summary)
    return summary


# -- QAOA MaxCut study --------------------------------------------------------

QAOA_COLUMNS = [
    "graph_id", "n_edges", "p", "layers", "ground_energy",
    "ratio_noise_free_training", "ratio_noisy_training_noisefree_eval",
    "ratio_noisy_training_noisy_eval", "mean_abs_cost", "max_abs_partial",
    "cost_bound", "gradient_bound", "within_bounds",
    "evals_noise_free", "evals_noisy", "seeds",
]


def load_graphs(cfg: ExperimentConfig) -> list[Graph]:
    src = cfg.graphs
    if src.files:
        graphs = [read_edge_list(f, cfg.n) for f in src.files]
    else:
        graphs = [erdos_renyi(cfg.n, seed_for(src.seed, _TAG_GRAPHS, i)) for i in range(src.count)]
    for g in graphs:
        if g.n != cfg.n:
            raise ValueError(f"graph has {g.n} nodes, config n={cfg.n}")
    return graphs


def _missing_record(gid: int, p: int, cfg: ExperimentConfig) -> dict:
    row = {c: math.nan for c in QAOA_COLUMNS}
    row.update(graph_id=gid, n_edges=0, p=p, layers=0, within_bounds=True,
               evals_noise_free=0, evals_noisy=0, seeds=f"{cfg.seed}:{gid}:{p}")
    return row


def qaoa_task(args) -> dict:
    """Train and evaluate one (graph, p) cell."""
    cfg, gid, graph, p = args
    if not graph.edges:
        return _missing_record(gid, p, cfg)
    noise = cfg.noise_spec()
    noisy = QaoaKernel(graph, p, cfg.native_layers, noise)
    clean = QaoaKernel(graph, p, cfg.native_layers, None)
    ground, _ = exact_ground_energy(noisy.hp)
    d = noisy.n_params
    opts = cfg.optimizer

    best_nf, _ = multistart(lambda rng: clean.noise_free_cost, d, cfg.restarts, opts,
                            seed_for(cfg.seed, _TAG_QAOA, gid, p, 0))

    def noisy_objective(rng):
        return lambda th: noisy.shot_cost(th, cfg.shots, rng)

    best_noisy, _ = multistart(noisy_objective, d, cfg.restarts, opts,
                               seed_for(cfg.seed, _TAG_QAOA, gid, p, 1))
    theta = best_noisy.x
    pts_rng = rng_for(cfg.seed, _TAG_QAOA, gid, p, 2)
    points = [theta] + [pts_rng.uniform(-np.pi, np.pi, d) for _ in range(cfg.random_points)]
    costs = [abs(noisy.cost(t)) for t in points]
    grads = [float(np.max(np.abs(noisy.gradient(t)))) for t in points]

    q = noise.q
    ro = bd.prop1_factor(noisy.hp, noise.qm)
    cost_bound = bd.cost_bound(noisy.ansatz, noisy.hp, q) * ro
    grad_bound = max(bd.qaoa_bounds(noisy.ansatz.metadata, q, graph.n)) * ro
    within = max(costs) <= cost_bound + BOUND_SLACK and max(grads) <= grad_bound + BOUND_SLACK
    return {
        "graph_id": gid, "n_edges": len(graph.edges), "p": p,
        "layers": noisy.ansatz.layer_count, "ground_energy": ground,
        "ratio_noise_free_training": approximation_ratio(clean.noise_free_cost(best_nf.x), ground),
        "ratio_noisy_training_noisefree_eval": approximation_ratio(clean.noise_free_cost(theta),
                                                                   ground),
        "ratio_noisy_training_noisy_eval": approximation_ratio(noisy.cost(theta), ground),
        "mean_abs_cost": float(np.mean(costs)), "max_abs_partial": float(np.mean(grads)),
        "cost_bound": cost_bound, "gradient_bound": grad_bound, "within_bounds": bool(within),
        "evals_noise_free": best_nf.evals, "evals_noisy": best_noisy.evals,
        "seeds": f"{cfg.seed}:{gid}:{p}",
    }


def summarize_qaoa(rows: list[dict], p_values: list[int]) -> dict:
    """Aggregate records per p (graph-id order) and fit the decay curves."""
    agg = {}
    keys = ["ratio_noise_free_training", "ratio_noisy_training_noisefree_eval",
            "ratio_noisy_training_noisy_eval", "mean_abs_cost", "max_abs_partial"]
    for p in p_values:
        cell = sorted((r for r in rows if r["p"] == p), key=lambda r: r["graph_id"])
        agg[p] = {k: float(np.nanmean([r[k] for r in cell])) if any(
            not math.isnan(r[k]) for r in cell) else math.nan for k in keys}
        agg[p]["graphs"] = sum(not math.isnan(r["ground_energy"]) for r in cell)
    ps = np.array(p_values, dtype=float)
    series = {k: [agg[p][k] for p in p_values] for k in keys}
    out = {"per_p": {str(p): agg[p] for p in p_values},
           "violations": sum(not r["within_bounds"] for r in rows),
           "excluded_edgeless": sorted({r["graph_id"] for r in rows
                                        if math.isnan(r["ground_energy"])})}
    if len(p_values) >= 2:
        out["fit_log_mean_abs_cost"] = linear_fit(ps, np.log(series["mean_abs_cost"]))
        out["fit_log_max_abs_partial"] = linear_fit(ps, np.log(series["max_abs_partial"]))
        nf = series["ratio_noise_free_training"]
        out["noise_free_min_step"] = float(np.min(np.diff(nf)))
        mid = series["ratio_noisy_training_noisefree_eval"]
        k = int(np.argmax(mid))
        out["noisy_train_noisefree_eval_argmax_p"] = p_values[k]
        out["noisy_train_noisefree_eval_interior_max"] = 0 < k < len(p_values) - 1
    return out


def run_qaoa_experiment(cfg: ExperimentConfig, out: str | Path | None = None):
    """Run every (graph, p) cell; returns ``(rows, summary)``."""
    graphs = load_graphs(cfg)
    tasks = [(cfg, gid, g, p) for gid, g in enumerate(graphs) for p in cfg.p_values]
    rows = _pool_map(qaoa_task, tasks, cfg.jobs)
    summary = summarize_qaoa(rows, cfg.p_values)
    summary["noise"] = cfg.noise_spec().to_dict()
    summary["noise_is_stand_in"] = True
    if out is not None:
        out = Path(out)
        _write_resolved(cfg, out, {"noise": "uniform Pauli stand-in, not a device model"})
        write_csv(out / "results.csv", QAOA_COLUMNS, rows)
        write_json(out / "summary.json", summary)
    return rows, summary


# -- landscapes ---------------------------------------------------------------

def landscape(ansatz: az.Ansatz, o: PauliSum, theta0, pair: tuple[int, int], grid: int,
              noise: NoiseSpec | None = None, input_state: st.State | None = None,
              backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Noisy cost over ``[-pi, pi]^2`` in two parameters, the rest held at ``theta0``.

    Returns ``(axis, values)`` with ``values[iy, ix]``.
    """
    i, j = pair
    if i == j:
        raise ValueError("landscape needs two distinct parameter ids")
    for k in pair:
        if not 0 <= k < ansatz.n_params:
            raise IndexError(f"parameter id {k} out of range")
    axis = np.linspace(-np.pi, np.pi, grid)
    values = np.empty((grid, grid))
    theta = np.array(theta0, dtype=float)
    for iy, y in enumerate(axis):
        for ix, x in enumerate(axis):
            theta[i], theta[j] = x, y
            values[iy, ix] = gr.cost(ansatz, theta, o, input_state, noise, backend)
    return axis, values


def _write_grid(path: Path, axis: np.ndarray, values: np.ndarray, names) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"{names[1]}\\{names[0]}"] + [repr(float(x)) for x in axis])
    for y, row in zip(axis, values):
        w.writerow([repr(float(y))] + [repr(float(v)) for v in row])
    path.write_text(buf.getvalue())


def run_landscape(cfg: ExperimentConfig, out: str | Path | None = None,
                  pair: tuple[int, int] | None = None, grid: int | None = None) -> dict:
    """Landscapes of one QAOA graph at each configured p with uniform noise ``landscape.q``."""
    lo = cfg.landscape
    pair = tuple(lo.params if pair is None else pair)
    grid = lo.grid if grid is None else grid
    if pair[0] == pair[1]:
        raise ValueError("landscape needs two distinct parameter ids")
    graphs = [g for g in load_graphs(cfg) if g.edges]
    graph = graphs[lo.graph % len(graphs)]
    hp = az.maxcut_hamiltonian(graph)
    noise = None if lo.q == 1.0 else NoiseSpec.uniform(graph.n, lo.q)
    result = {"graph_edges": [list(e) for e in graph.edges], "q": lo.q, "params": list(pair),
              "grid": grid, "per_p": {}}
    rows = []
    for p in lo.p_values:
        a = az.build_qaoa(graph, p, cfg.native_layers)
        theta0 = rng_for(cfg.seed, _TAG_LANDSCAPE, p).uniform(-np.pi, np.pi, a.n_params)
        axis, values = landscape(a, hp, theta0, pair, grid, noise, backend=cfg.backend)
        spread = float(values.max() - values.min())
        G = bd.cost_bound(a, hp, lo.q)
        entry = {"layers": a.layer_count, "spread": spread, "G": G,
                 "min": float(values.min()), "max": float(values.max()),
                 "center": hp.trace / 2**graph.n}
        result["per_p"][str(p)] = entry
        rows.append({"p": p, **entry})
        if out is not None:
            Path(out).mkdir(parents=True, exist_ok=True)
            names = [a.param_names[pair[0]], a.param_names[pair[1]]]
            _write_grid(Path(out) / f"landscape_p{p}.csv", axis, values, names)
    spreads = [result["per_p"][str(p)]["spread"] for p in lo.p_values]
    result["spread_strictly_decreasing"] = all(b < a for a, b in zip(spreads, spreads[1:]))
    result["spread_within_2G"] = all(e["spread"] <= 2 * e["G"] for e in result["per_p"].values())
    if out is not None:
        out = Path(out)
        _write_resolved(cfg, out)
        write_csv(out / "results.csv", ["p", "layers", "spread", "G", "min", "max", "center"],
                  rows)
        write_json(out / "summary.json", result)
    return result


# -- gradient check -----------------------------------------------------------

GRADCHECK_COLUMNS = ["instance", "family", "n", "layers", "param", "exact", "finite_diff",
                     "abs_error", "tolerance", "exact_pauli", "backend_error", "ok"]


def gradcheck_instance(master: int, i: int, opts: GradcheckOptions):
    rng = rng_for(master, _TAG_GRADCHECK, i)
    n = int(rng.integers(1, opts.n_max + 1))
    L = int(rng.integers(1, opts.L_max + 1))
    family = ("random", "hardware_efficient", "qaoa_native")[int(rng.integers(3))]
    if n == 1 or family == "random":
        family = "random"
        a = az.build_random(n, L, rng)
        o = _random_observable(n, rng)
        rho = st.random_density(n, rng)
    elif family == "hardware_efficient":
        a = az.build_hardware_efficient(n, L, rng.integers(2**32), rotation="random")
        o = _random_observable(n, rng)
        rho = st.from_computational("0" * n)
    else:
        g = _random_graph(n, rng)
        a = az.build_qaoa(g, max(1, L // (len(az.edge_coloring(g)) + 1)), True)
        o = az.maxcut_hamiltonian(g)
        rho = a.input_state()
    qm = 1.0 if rng.random() < 0.5 else float(rng.uniform(0.5, 1.0))
    noise = random_cptp_spec(n, rng, q_floor=0.5, qm=qm)
    theta = rng.uniform(-np.pi, np.pi, a.n_params)
    return family, a, o, rho, noise, theta


def gradcheck_rows(master: int, opts: GradcheckOptions) -> list[dict]:
    rows = []
    for i in range(opts.instances):
        family, a, o, rho, noise, theta = gradcheck_instance(master, i, opts)
        exact = gr.exact_gradient_grouped(a, theta, o, rho, noise, "dense").as_array()
        pauli = gr.exact_gradient_grouped(a, theta, o, rho, noise, "pauli").as_array()
        cost_fn = lambda t: gr.cost(a, t, o, rho, noise, "dense")
        for k in range(a.n_params):
            fd = gr.finite_diff_partial(cost_fn, theta, k, opts.step)
            err, tol = abs(exact[k] - fd), gr.fd_tolerance(exact[k])
            rows.append({"instance": i, "family": family, "n": a.n, "layers": a.layer_count,
                         "param": k, "exact": exact[k], "finite_diff": fd, "abs_error": err,
                         "tolerance": tol, "exact_pauli": pauli[k],
                         "backend_error": abs(exact[k] - pauli[k]), "ok": err <= tol})
    return rows


def run_gradcheck(cfg: ExperimentConfig, out: str | Path | None = None) -> dict:
    rows = gradcheck_rows(cfg.seed, cfg.gradcheck)
    summary = {"instances": cfg.gradcheck.instances, "partials": len(rows),
               "failures": sum(not r["ok"] for r in rows),
               "max_abs_error": max(r["abs_error"] for r in rows),
               "max_backend_error": max(r["backend_error"] for r in rows)}
    if out is not None:
        out = Path(out)
        _write_resolved(cfg, out)
        write_csv(out / "results.csv", GRADCHECK_COLUMNS, rows)
        write_json(out / "summary.json", summary)
    return summary
