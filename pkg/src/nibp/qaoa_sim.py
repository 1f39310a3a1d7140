"""Specialised noisy QAOA simulator for the MaxCut experiments.

The state is kept as its real Pauli coefficient vector ``a_i = Tr[rho sigma_i]``
(identity included).  Local Pauli noise is then an elementwise product, and a
rotation ``exp(-i phi P)`` mixes each string that anticommutes with ``P``
with its partner ``-i P sigma``.  Gradients use the adjoint identity
``Tr[O Phi(D)] = Tr[Phi^dagger(O) D]`` on the inserted commutator ``D``, which
is the same derivative as forward propagation of ``D``.  The test suite
checks all outputs against the generic ``ansatz`` / ``gradient`` path.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .ansatz import Ansatz, build_qaoa
from .channels import NoiseSpec, measurement_noise_observable, noise_factors
from .gradient import sample_diagonal
from .maxcut import Graph, maxcut_hamiltonian
from .pauli import PauliSum, left_multiply_all, letter_table


@njit(cache=True)
def _rotate(v, lo, hi, first, second, w_first, w_second, c, s):
    for k in range(lo, hi):
        i, j = first[k], second[k]
        a, b = v[i], v[j]
        v[i] = c * a + s * w_first[k] * b
        v[j] = c * b + s * w_second[k] * a


@njit(cache=True)
def _forward(v, theta, layer_pid, layer_lo, layer_hi, gate_lo, gate_hi, coeff,
             first, second, w_first, w_second, factors, kept):
    """Run all layers in place; ``kept[l]`` receives the state after layer ``l``'s gates."""
    v *= factors
    for l in range(layer_pid.size):
        t = theta[layer_pid[l]]
        for g in range(layer_lo[l], layer_hi[l]):
            phi = 2.0 * t * coeff[g]
            _rotate(v, gate_lo[g], gate_hi[g], first, second, w_first, w_second,
                    np.cos(phi), np.sin(phi))
        if kept.shape[0] > 0:
            kept[l, :] = v
        v *= factors


@njit(cache=True)
def _backward(lam, theta, grad, layer_pid, layer_lo, layer_hi, gate_lo, gate_hi, coeff,
              first, second, w_first, w_second, factors, kept):
    """Adjoint sweep: accumulate ``lam . (-i[H_l, rho_l])`` into ``grad``."""
    for l in range(layer_pid.size - 1, -1, -1):
        lam *= factors
        t = theta[layer_pid[l]]
        acc = 0.0
        for g in range(layer_lo[l], layer_hi[l]):
            scale = 2.0 * coeff[g]
            for k in range(gate_lo[g], gate_hi[g]):
                i, j = first[k], second[k]
                acc += scale * (lam[i] * w_first[k] * kept[l, j] + lam[j] * w_second[k] * kept[l, i])
        grad[layer_pid[l]] += acc
        for g in range(layer_hi[l] - 1, layer_lo[l] - 1, -1):
            phi = -2.0 * t * coeff[g]
            _rotate(lam, gate_lo[g], gate_hi[g], first, second, w_first, w_second,
                    np.cos(phi), np.sin(phi))


def _gate_pairs(p):
    """Pairs ``(i, j)`` of strings anticommuting with ``p`` and their partner signs.

    ``-i P sigma_j = w_first * sigma_i`` and ``-i P sigma_i = w_second * sigma_j``.
    """
    phase, index = left_multiply_all(p)
    sgn = np.rint(np.real(-1j * phase))
    anti = np.flatnonzero(np.abs(phase.real) < 0.5)
    first = anti[anti < index[anti]]
    second = index[first]
    return first, second, sgn[second], sgn[first]


def _full_vector(o: PauliSum) -> np.ndarray:
    return np.concatenate([[o.identity_coeff], o.coefficient_vector()])


class QaoaKernel:
    """Noisy QAOA on ``graph`` with a noise channel at every (native) layer boundary."""

    def __init__(self, graph: Graph, p: int, native_layers: bool = True,
                 noise: NoiseSpec | None = None):
        self.graph = graph
        self.ansatz: Ansatz = build_qaoa(graph, p, native_layers)
        self.n = n = graph.n
        self.dim = 2**n
        if noise is not None:
            if noise.n != n:
                raise ValueError("noise spec qubit count mismatch")
            noise.require_cptp()
        self.noise = noise
        self._factors = (np.ones(4**n) if noise is None
                         else np.concatenate([[1.0], noise_factors(noise)]))
        self.qm = 1.0 if noise is None else noise.qm
        self.hp = maxcut_hamiltonian(graph)
        self.cost_diag = self.hp.diagonal()
        eff = self.hp if self.qm == 1.0 else measurement_noise_observable(self.hp, self.qm)
        self._omega = _full_vector(eff)
        self._build_tables()
        self.n_params = self.ansatz.n_params
        letters = letter_table(n)
        self._x_type = np.all((letters == 0) | (letters == 1), axis=1).astype(float)
        z_type = np.flatnonzero(np.all((letters == 0) | (letters == 3), axis=1))
        self._z_idx = z_type
        zbits = (letters[z_type] == 3).astype(int) @ (1 << np.arange(n - 1, -1, -1))
        s = np.arange(self.dim)
        self._z_signs = 1.0 - 2.0 * (np.bitwise_count(s[:, None] & zbits[None, :]) & 1)
        self._mix_eig = n - 2.0 * np.bitwise_count(s)
        hadamard = 1.0 - 2.0 * (np.bitwise_count(s[:, None] & s[None, :]) & 1)
        self._walsh = hadamard

    def _build_tables(self) -> None:
        pids, lo, hi, g_lo, g_hi, coeff, parts = [], [], [], [], [], [], []
        size = 0
        for layer in self.ansatz.layers:
            pids.append(layer[0].param_id)
            lo.append(len(coeff))
            for f in layer:
                for p, c in f.generator.terms.items():
                    pair = _gate_pairs(p)
                    g_lo.append(size)
                    size += pair[0].size
                    g_hi.append(size)
                    coeff.append(c)
                    parts.append(pair)
            hi.append(len(coeff))
        as_int = lambda x: np.asarray(x, dtype=np.int64)
        self._tables = (
            as_int(pids), as_int(lo), as_int(hi), as_int(g_lo), as_int(g_hi),
            np.asarray(coeff, dtype=float),
            *(np.concatenate([q[k] for q in parts]) for k in range(4)),
        )
        self._layer_diag = [
            sum(f.generator.diagonal() for f in layer) if layer[0].generator.is_diagonal else None
            for layer in self.ansatz.layers
        ]

    def _check(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got shape {theta.shape}")
        return theta

    def initial(self) -> np.ndarray:
        return self._x_type.copy()

    def _run(self, theta, keep: bool):
        v = self.initial()
        kept = np.empty((len(self.ansatz.layers) if keep else 0, v.size))
        _forward(v, theta, *self._tables, self._factors, kept)
        return v, kept

    def final_vector(self, theta) -> np.ndarray:
        """Pauli coefficients ``Tr[rho sigma_i]`` of the output, identity first."""
        return self._run(self._check(theta), keep=False)[0]

    def probabilities(self, theta) -> np.ndarray:
        v = self.final_vector(theta)
        return self._z_signs @ v[self._z_idx] / self.dim

    def cost(self, theta) -> float:
        """Exact noisy cost including read-out noise."""
        return float(self._omega @ self.final_vector(theta))

    def statevector(self, theta) -> np.ndarray:
        theta = self._check(theta)
        psi = np.full(self.dim, 1 / np.sqrt(self.dim), dtype=complex)
        for layer, h in zip(self.ansatz.layers, self._layer_diag):
            t = theta[layer[0].param_id]
            if h is not None:
                psi = psi * np.exp(-1j * t * h)
            else:
                spec = self._walsh @ psi
                psi = self._walsh @ (spec * np.exp(-1j * t * self._mix_eig)) / self.dim
        return psi

    def noise_free_cost(self, theta) -> float:
        return float(self.cost_diag @ np.abs(self.statevector(theta)) ** 2)

    def shot_cost(self, theta, shots: int, rng: np.random.Generator) -> float:
        return sample_diagonal(self.probabilities(theta), self.cost_diag, self.n, shots,
                               self.qm, rng)

    def gradient(self, theta) -> np.ndarray:
        """Exact grouped gradient of :meth:`cost`."""
        theta = self._check(theta)
        _, kept = self._run(theta, keep=True)
        grad = np.zeros(self.n_params)
        _backward(self._omega.copy(), theta, grad, *self._tables, self._factors, kept)
        return grad
