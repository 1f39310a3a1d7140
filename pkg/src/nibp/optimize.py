"""Nelder-Mead simplex search with restarts.

Stops as soon as either the spread of simplex values or the simplex
diameter drops below its tolerance, or the evaluation budget runs out.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class NelderMeadOptions:
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    max_evals: int = 500
    xtol: float = 1e-4
    ftol: float = 1e-4
    initial_step: float = 0.25
    jitter: float = 0.1

    def __post_init__(self):
        for name in ("reflection", "expansion", "contraction", "shrink", "initial_step"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not self.expansion > 1 > self.contraction:
            raise ValueError("need expansion > 1 > contraction")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")
        if self.max_evals < 1:
            raise ValueError("max_evals must be >= 1")
        if self.jitter < 0 or self.jitter >= 1:
            raise ValueError("jitter must lie in [0, 1)")

    @classmethod
    def from_dict(cls, data: dict) -> "NelderMeadOptions":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown optimizer options {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    evals: int
    converged: bool
    exhausted: bool
    trace: list[float] = field(repr=False, default_factory=list)

    @property
    def best_trace(self) -> np.ndarray:
        """Running minimum of the evaluation history."""
        return np.minimum.accumulate(np.asarray(self.trace))


class _Budget(Exception):
    pass


def nelder_mead(objective: Callable[[np.ndarray], float], x0, opts: NelderMeadOptions | None = None,
                seed=None) -> OptimizeResult:
    """Minimise ``objective`` from ``x0``; returns the best point seen.

    ``seed`` only perturbs the initial per-axis step lengths (by up to
    ``opts.jitter`` relative).
    """
    opts = NelderMeadOptions() if opts is None else opts
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    d = x0.size
    rng = np.random.default_rng(seed)
    trace: list[float] = []
    best = [x0.copy(), np.inf]

    def f(x):
        if len(trace) >= opts.max_evals:
            raise _Budget
        v = float(objective(x))
        trace.append(v)
        if v < best[1]:
            best[0], best[1] = x.copy(), v
        return v

    first = f(x0)
    if not np.isfinite(first):
        raise ValueError("objective is not finite at the starting point")
    steps = opts.initial_step * (1 + opts.jitter * rng.uniform(-1, 1, d))
    simplex = np.vstack([x0, x0 + np.diag(steps)])
    converged = False
    try:
        values = np.array([first] + [f(v) for v in simplex[1:]])
        while True:
            order = np.argsort(values, kind="stable")
            simplex, values = simplex[order], values[order]
            spread = values[-1] - values[0]
            diameter = np.max(np.abs(simplex[1:] - simplex[0]))
            if spread < opts.ftol or diameter < opts.xtol:
                converged = True
                break
            centroid = simplex[:-1].mean(axis=0)
            worst = simplex[-1]
            xr = centroid + opts.reflection * (centroid - worst)
            fr = f(xr)
            if fr < values[0]:
                xe = centroid + opts.expansion * (xr - centroid)
                fe = f(xe)
                simplex[-1], values[-1] = (xe, fe) if fe < fr else (xr, fr)
                continue
            if fr < values[-2]:
                simplex[-1], values[-1] = xr, fr
                continue
            if fr < values[-1]:
                xc = centroid + opts.contraction * (xr - centroid)
                fc = f(xc)
                accept = fc <= fr
            else:
                xc = centroid + opts.contraction * (worst - centroid)
                fc = f(xc)
                accept = fc < values[-1]
            if accept:
                simplex[-1], values[-1] = xc, fc
                continue
            for i in range(1, d + 1):
                simplex[i] = simplex[0] + opts.shrink * (simplex[i] - simplex[0])
                values[i] = f(simplex[i])
    except _Budget:
        pass
    return OptimizeResult(best[0], best[1], len(trace), converged,
                          not converged and len(trace) >= opts.max_evals, trace)


def random_start(rng: np.random.Generator, d: int) -> np.ndarray:
    return rng.uniform(-np.pi, np.pi, d)


def multistart(make_objective: Callable[[np.random.Generator], Callable], d: int, restarts: int,
               opts: NelderMeadOptions | None = None,
               seed=None) -> tuple[OptimizeResult, list[OptimizeResult]]:
    """Best of ``restarts`` runs from uniform starts in ``[-pi, pi]^d``.

    ``make_objective`` receives a per-restart generator (for shot noise).
    Ties on the achieved value go to the earliest restart.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    runs = []
    for k in range(restarts):
        start_seq, nm_seq, obj_seq = (
            np.random.SeedSequence(root.entropy, spawn_key=(*root.spawn_key, k, j)) for j in range(3))
        x0 = random_start(np.random.default_rng(start_seq), d)
        obj = make_objective(np.random.default_rng(obj_seq))
        runs.append(nelder_mead(obj, x0, opts, nm_seq))
    best = min(runs, key=lambda r: r.fun)
    return best, runs
