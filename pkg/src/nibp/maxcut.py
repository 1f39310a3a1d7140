"""MaxCut instances: graphs, problem Hamiltonians and brute-force optima."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .pauli import PauliString, PauliSum

MAX_BRUTE_FORCE_QUBITS = 24


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``0 .. n-1`` with 0/1 edge weights."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        seen = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) outside {n} nodes")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", tuple(sorted(seen)))

    def degree(self, node: int) -> int:
        return sum(node in e for e in self.edges)

    def to_edge_list(self) -> str:
        lines = [f"# nodes {self.n}"] + [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edge_list(cls, text: str, n: int | None = None) -> "Graph":
        """Parse "u v" lines (0-indexed); a ``# nodes k`` header fixes the node count."""
        edges = []
        header_n = None
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "nodes":
                    header_n = int(parts[1])
                continue
            u, v = line.split()[:2]
            edges.append((int(u), int(v)))
        if n is None:
            n = header_n if header_n is not None else 1 + max((max(e) for e in edges), default=-1)
        return cls(n, edges)


def read_edge_list(path: str | Path, n: int | None = None) -> Graph:
    return Graph.from_edge_list(Path(path).read_text(), n)


def write_edge_list(graph: Graph, path: str | Path) -> None:
    Path(path).write_text(graph.to_edge_list())


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(j, (j + 1) % n) for j in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def erdos_renyi(n: int, seed) -> Graph:
    """Uniformly random labelled graph: every pair is an edge with probability 1/2."""
    if n < 2:
        raise ValueError("need at least two nodes")
    rng = np.random.default_rng(seed)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    keep = rng.random(len(pairs)) < 0.5
    return Graph(n, [e for e, k in zip(pairs, keep) if k])


def maxcut_hamiltonian(g: Graph) -> PauliSum:
    """``H_P = 1/2 sum_{(i,j) in E} Z_i Z_j``."""
    terms = [(PauliString.from_letters(g.n, {u: "Z", v: "Z"}), 0.5) for u, v in g.edges]
    return PauliSum(g.n, terms)


def mixer_hamiltonian(n: int) -> PauliSum:
    return PauliSum(n, [(PauliString.single(n, j, "X"), 1.0) for j in range(n)])


def exact_ground_energy(h: PauliSum) -> tuple[float, str]:
    """Minimum eigenvalue of a diagonal sum by enumerating all bitstrings.

    Ties go to the lowest bitstring value.
    """
    if not h.is_diagonal:
        raise ValueError("exact_ground_energy needs a computational-basis-diagonal sum")
    if h.n > MAX_BRUTE_FORCE_QUBITS:
        raise ValueError(f"brute force limited to {MAX_BRUTE_FORCE_QUBITS} qubits")
    diag = h.diagonal()
    i = int(np.argmin(diag))
    return float(diag[i]), format(i, f"0{h.n}b")


def cut_value(g: Graph, bits: str) -> int:
    return sum(bits[u] != bits[v] for u, v in g.edges)


def approximation_ratio(achieved: float, ground: float) -> float:
    """``achieved / ground``; NaN (missing) when the ground energy is zero."""
    if ground == 0:
        return math.nan
    return achieved / ground
