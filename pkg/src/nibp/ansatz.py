"""Layered parameterised circuits and their noisy evolution.

A layer is an ordered tuple of factors ``exp(-i theta H) W``; factor ``m = 0``
acts first.  Noise acts on every qubit before the first layer and after each
layer, so an ansatz with ``L`` layers carries ``L + 1`` noise channels.
Factors that share a ``param_id`` form a correlation group and are trained
as one parameter.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import state as st
from .channels import NoiseSpec
from .maxcut import Graph, maxcut_hamiltonian, mixer_hamiltonian
from .pauli import PauliString, PauliSum


@dataclass(frozen=True, eq=False)
class Factor:
    """One ``exp(-i theta_{param_id} H) W`` block; ``W`` (if any) acts first."""

    generator: PauliSum
    param_id: int
    fixed_gate: np.ndarray | None = None
    label: str = ""

    def __post_init__(self):
        if self.generator.identity_coeff != 0:
            raise ValueError("generators must have zero identity component")
        if not self.generator.terms:
            raise ValueError("generator has no terms")
        if self.fixed_gate is not None:
            st.check_unitary(self.fixed_gate)

    @property
    def n(self) -> int:
        return self.generator.n

    @cached_property
    def matrix(self) -> np.ndarray:
        return self.generator.to_matrix()

    @cached_property
    def _eig(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.matrix)

    @cached_property
    def _single(self) -> tuple[float, np.ndarray] | None:
        if len(self.generator.terms) != 1:
            return None
        (p, c), = self.generator.terms.items()
        return c, p.to_matrix()

    def exp(self, theta: float) -> np.ndarray:
        """``exp(-i theta H)``."""
        if self._single is not None:
            c, pm = self._single
            return np.cos(theta * c) * np.eye(pm.shape[0]) - 1j * np.sin(theta * c) * pm
        w, v = self._eig
        return (v * np.exp(-1j * theta * w)) @ v.conj().T

    def unitary(self, theta: float) -> np.ndarray:
        u = self.exp(theta)
        return u if self.fixed_gate is None else u @ self.fixed_gate


Layer = tuple[Factor, ...]


@dataclass(frozen=True, eq=False)
class Ansatz:
    n: int
    layers: tuple[Layer, ...]
    param_names: tuple[str, ...]
    metadata: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(tuple(layer) for layer in self.layers))
        ids = {f.param_id for layer in self.layers for f in layer}
        if ids != set(range(len(self.param_names))):
            raise ValueError("param ids must be exactly 0 .. n_params-1")
        for layer in self.layers:
            if not layer:
                raise ValueError("empty layer")
            for f in layer:
                if f.n != self.n:
                    raise ValueError("factor qubit count mismatch")

    @property
    def n_params(self) -> int:
        return len(self.param_names)

    @property
    def layer_count(self) -> int:
        return len(self.layers)

    @property
    def noise_insertions(self) -> int:
        return self.layer_count + 1

    @property
    def factor_refs(self) -> list[tuple[int, int]]:
        return [(l, m) for l, layer in enumerate(self.layers) for m in range(len(layer))]

    def factor(self, ref: tuple[int, int]) -> Factor:
        l, m = ref
        if not (0 <= l < len(self.layers) and 0 <= m < len(self.layers[l])):
            raise IndexError(f"no factor at {ref}")
        return self.layers[l][m]

    def group(self, param_id: int) -> list[tuple[int, int]]:
        return [r for r in self.factor_refs if self.factor(r).param_id == param_id]

    def group_sizes(self) -> dict[int, int]:
        """Correlation group size ``b`` of every parameter."""
        counts = Counter(self.factor(r).param_id for r in self.factor_refs)
        return {k: counts[k] for k in range(self.n_params)}

    def input_state(self, backend: str = "dense") -> st.State:
        if self.metadata.get("initial_state") == "plus":
            return st.plus_state(self.n, backend)
        return st.from_computational("0" * self.n, backend)

    def describe(self) -> str:
        """Human-readable dump of the circuit structure."""
        lines = [f"ansatz n={self.n} layers={self.layer_count} params={self.n_params}"]
        for key in sorted(self.metadata):
            lines.append(f"  {key}: {self.metadata[key]}")
        for l, layer in enumerate(self.layers):
            lines.append(f"layer {l}:")
            for m, f in enumerate(layer):
                w = " W" if f.fixed_gate is not None else ""
                lines.append(f"  [{m}] {self.param_names[f.param_id]}{w} : {f.generator}")
        return "\n".join(lines)


def _check_theta(ansatz: Ansatz, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (ansatz.n_params,):
        raise ValueError(f"expected {ansatz.n_params} parameters, got shape {theta.shape}")
    return theta


def segment_unitary(layer: Sequence[Factor], theta, start: int = 0,
                    stop: int | None = None) -> np.ndarray:
    """Product of factors ``start .. stop-1`` with the earliest acting first."""
    stop = len(layer) if stop is None else stop
    dim = 2 ** layer[0].n
    u = np.eye(dim, dtype=complex)
    for f in layer[start:stop]:
        if f.param_id >= len(theta):
            raise KeyError(f"parameter {f.param_id} not provided")
        u = f.unitary(theta[f.param_id]) @ u
    return u


def layer_unitary(layer: Sequence[Factor], theta) -> np.ndarray:
    return segment_unitary(layer, np.asarray(theta, dtype=float))


def _noise(s: st.State, noise: NoiseSpec | None) -> st.State:
    return s if noise is None else st.apply_noise(s, noise)


def _transform(s: st.State, u: np.ndarray) -> st.State:
    return st.apply_unitary(s, u, check=False)


def propagate(ansatz: Ansatz, theta, s: st.State, noise: NoiseSpec | None,
              layer: int, factor: int) -> st.State:
    """Push a state or operator from just before ``(layer, factor)`` to the output.

    Completes the given layer, then applies the noise channel after it and
    every later layer with its trailing noise channel.
    """
    theta = np.asarray(theta, dtype=float)
    if layer < ansatz.layer_count:
        s = _transform(s, segment_unitary(ansatz.layers[layer], theta, factor))
        s = _noise(s, noise)
        for lay in ansatz.layers[layer + 1:]:
            s = _noise(_transform(s, segment_unitary(lay, theta)), noise)
    return s


def evolve(ansatz: Ansatz, theta, input_state: st.State | None = None,
           noise: NoiseSpec | None = None, backend: str | None = None) -> st.State:
    """Noisy output state ``N o U_L o ... o N o U_1 o N (rho)``.

    ``noise=None`` gives the noise-free evolution.  ``backend`` converts the
    input to ``"dense"`` or ``"pauli"`` first.
    """
    theta = _check_theta(ansatz, theta)
    s = ansatz.input_state() if input_state is None else input_state
    if s.n != ansatz.n:
        raise ValueError(f"input state has {s.n} qubits, ansatz has {ansatz.n}")
    if noise is not None:
        if noise.n != ansatz.n:
            raise ValueError("noise spec qubit count mismatch")
        noise.require_cptp()
    if backend == "dense":
        s = st.as_dense(s)
    elif backend == "pauli":
        s = st.as_pauli(s)
    elif backend is not None:
        raise ValueError(f"unknown backend {backend!r}")
    s = _noise(s, noise)
    return propagate(ansatz, theta, s, noise, 0, 0)


def layered_states(ansatz: Ansatz, theta, input_state: st.State,
                   noise: NoiseSpec | None) -> list[st.State]:
    """``[rho_0, rho_1, ..., rho_L]`` where ``rho_l`` follows the ``l``-th unitary."""
    theta = _check_theta(ansatz, theta)
    out = [input_state]
    s = input_state
    for lay in ansatz.layers:
        s = _transform(_noise(s, noise), segment_unitary(lay, theta))
        out.append(s)
    return out


# -- builders -----------------------------------------------------------------

def edge_coloring(graph: Graph) -> list[list[tuple[int, int]]]:
    """Greedy proper edge colouring, edges visited by decreasing endpoint degree."""
    deg = [graph.degree(v) for v in range(graph.n)]
    order = sorted(graph.edges, key=lambda e: (-(deg[e[0]] + deg[e[1]]), e))
    used: dict[int, set[int]] = {v: set() for v in range(graph.n)}
    classes: list[list[tuple[int, int]]] = []
    for u, v in order:
        c = 0
        while c in used[u] or c in used[v]:
            c += 1
        if c == len(classes):
            classes.append([])
        classes[c].append((u, v))
        used[u].add(c)
        used[v].add(c)
    return [sorted(c) for c in classes]


def build_qaoa(graph: Graph, p: int, native_layers: bool = False) -> Ansatz:
    """QAOA for MaxCut: ``p`` rounds of ``exp(-i gamma H_P)`` then ``exp(-i beta H_M)``.

    Parameter order is ``gamma_1, beta_1, gamma_2, ...``.  With
    ``native_layers`` the problem unitary is split into one layer per edge
    colour (every ZZ rotation carrying ``gamma_l``) and the mixer into one
    layer of X rotations carrying ``beta_l``; noise then sits between native
    layers.
    """
    if p < 1:
        raise ValueError("QAOA needs p >= 1")
    if not graph.edges:
        raise ValueError("graph has no edges")
    n = graph.n
    hp, hm = maxcut_hamiltonian(graph), mixer_hamiltonian(n)
    colors = edge_coloring(graph)
    layers: list[list[Factor]] = []
    names: list[str] = []
    for r in range(p):
        g_id, b_id = 2 * r, 2 * r + 1
        names += [f"gamma_{r + 1}", f"beta_{r + 1}"]
        if native_layers:
            for cls in colors:
                layers.append([
                    Factor(PauliSum(n, [(PauliString.from_letters(n, {u: "Z", v: "Z"}), 0.5)]),
                           g_id, label=f"ZZ{u},{v}")
                    for u, v in cls
                ])
            layers.append([Factor(PauliSum(n, [(PauliString.single(n, j, "X"), 1.0)]), b_id,
                                  label=f"X{j}") for j in range(n)])
        else:
            layers.append([Factor(hp, g_id, label="H_P")])
            layers.append([Factor(hm, b_id, label="H_M")])
    k_p, k_m = (len(colors), 1) if native_layers else (1, 1)
    meta = {
        "family": "qaoa",
        "p": p,
        "native_layers": native_layers,
        "k_P": k_p,
        "k_M": k_m,
        "b_P": len(graph.edges) if native_layers else 1,
        "b_M": n if native_layers else 1,
        "edge_colors": colors if native_layers else [list(graph.edges)],
        "initial_state": "plus",
        "eta_P_inf": hp.inf_norm,
        "eta_M_inf": hm.inf_norm,
        "N_P": hp.num_terms,
        "N_M": hm.num_terms,
    }
    return Ansatz(n, tuple(tuple(l) for l in layers), tuple(names), meta)


def cnot_matrix(n: int, control: int, target: int) -> np.ndarray:
    dim = 2**n
    idx = np.arange(dim)
    cbit = (idx >> (n - 1 - control)) & 1
    out = idx ^ (cbit << (n - 1 - target))
    m = np.zeros((dim, dim))
    m[out, idx] = 1.0
    return m.astype(complex)


def cnot_ladder(n: int) -> np.ndarray:
    u = np.eye(2**n, dtype=complex)
    for j in range(n - 1):
        u = cnot_matrix(n, j, j + 1) @ u
    return u


def build_hardware_efficient(n: int, depth: int, seed=None, rotation: str = "y") -> Ansatz:
    """Layers of a nearest-neighbour CNOT ladder followed by one rotation per qubit.

    ``rotation`` is ``"x"``, ``"y"`` or ``"z"``; ``"random"`` draws an axis per
    gate from ``seed``.  Each rotation is ``exp(-i theta sigma / 2)``.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    rng = np.random.default_rng(seed)
    ladder = cnot_ladder(n) if n > 1 else None
    layers, names = [], []
    axes = "XYZ"
    for l in range(depth):
        layer = []
        for j in range(n):
            axis = axes[rng.integers(3)] if rotation == "random" else rotation.upper()
            pid = len(names)
            names.append(f"theta_{l}_{j}")
            gen = PauliSum(n, [(PauliString.single(n, j, axis), 0.5)])
            layer.append(Factor(gen, pid, ladder if j == 0 else None, label=f"R{axis.lower()}{j}"))
        layers.append(layer)
    meta = {"family": "hardware_efficient", "depth": depth, "rotation": rotation,
            "cnot_count": (n - 1) * depth}
    return Ansatz(n, tuple(tuple(l) for l in layers), tuple(names), meta)


def _as_signed_sum(n: int, gen) -> PauliSum:
    if isinstance(gen, PauliSum):
        s = gen
    elif isinstance(gen, Mapping):
        s = PauliSum(n, gen)
    else:
        s = PauliSum(n, [(PauliString.from_str(t) if isinstance(t, str) else t, c) for t, c in gen])
    if s.identity_coeff != 0:
        raise ValueError("UCC generators cannot contain the identity")
    for c in s.terms.values():
        if c not in (1.0, -1.0):
            raise ValueError(f"UCC generator coefficient {c} not in {{0, +1, -1}}")
    return s


def build_ucc_like(n: int, generators: Iterable, trotter: bool = True) -> Ansatz:
    """Products of ``exp(+i theta_k sum_i mu_i sigma_i)`` with ``mu_i in {0, +1, -1}``.

    With ``trotter`` each signed string becomes its own layer sharing the
    amplitude, so noise acts between every factor.
    """
    gens = [_as_signed_sum(n, g) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    layers, names = [], []
    for k, g in enumerate(gens):
        names.append(f"t_{k}")
        if trotter:
            for p, mu in g.terms.items():
                layers.append([Factor(PauliSum(n, [(p, -mu)]), k, label=f"{mu:+g}{p}")])
        else:
            layers.append([Factor(-g, k, label=f"G{k}")])
    meta = {"family": "ucc", "trotter": trotter, "N_hat": [g.num_terms for g in gens]}
    return Ansatz(n, tuple(tuple(l) for l in layers), tuple(names), meta)


def build_random(n: int, n_layers: int, rng: np.random.Generator, max_factors: int = 2,
                 max_terms: int = 3, fixed_gates: bool = True, share: float = 0.3) -> Ansatz:
    """Generic layered ansatz with random Pauli-sum generators and Haar ``W`` gates.

    With probability ``share`` a factor reuses an existing parameter, which
    creates correlation groups.
    """
    layers, names = [], []
    for _ in range(n_layers):
        layer = []
        for _ in range(int(rng.integers(1, max_factors + 1))):
            t = int(rng.integers(1, max_terms + 1))
            codes = rng.choice(np.arange(1, 4**n), size=min(t, 4**n - 1), replace=False)
            gen = PauliSum(n, [(PauliString(n, int(c)), float(rng.uniform(-1, 1))) for c in codes])
            if names and rng.random() < share:
                pid = int(rng.integers(len(names)))
            else:
                pid = len(names)
                names.append(f"theta_{pid}")
            w = st.haar_unitary(2**n, rng) if fixed_gates and rng.random() < 0.5 else None
            layer.append(Factor(gen, pid, w))
        layers.append(layer)
    return Ansatz(n, tuple(tuple(l) for l in layers), tuple(names), {"family": "random"})


def single_qubit_rx() -> Ansatz:
    """One qubit, one layer, ``exp(-i theta X / 2)``."""
    gen = PauliSum(1, {"X": 0.5})
    return Ansatz(1, ((Factor(gen, 0, label="Rx"),),), ("theta",), {"family": "single_qubit"})
