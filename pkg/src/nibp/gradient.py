"""Noisy cost, its exact partial derivatives, and shot-based estimates.

The exact derivative with respect to one factor is obtained by inserting the
commutator ``-i[H, rho]`` right after that factor and pushing the resulting
traceless operator through the rest of the noisy pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from . import state as st
from .ansatz import Ansatz, _check_theta, _noise, evolve, propagate, segment_unitary
from .channels import NoiseSpec, measurement_noise_observable
from .pauli import PauliSum

FD_STEP = 1e-5
FD_ABS_TOL = 1e-6
FD_REL_TOL = 1e-5


@dataclass(frozen=True)
class GradientReport:
    partials: Mapping[int, float]
    method: str
    max_abs: float

    @classmethod
    def from_partials(cls, partials: Mapping[int, float], method: str) -> "GradientReport":
        vals = [abs(v) for v in partials.values()]
        return cls(dict(partials), method, max(vals) if vals else 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.partials[k] for k in sorted(self.partials)])


def effective_observable(o: PauliSum, noise: NoiseSpec | None) -> PauliSum:
    """Fold read-out noise into the observable."""
    if noise is None or noise.qm == 1.0:
        return o
    return measurement_noise_observable(o, noise.qm)


def _prepare(ansatz: Ansatz, input_state, noise, backend):
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
    return s


def cost(ansatz: Ansatz, theta, o: PauliSum, input_state: st.State | None = None,
         noise: NoiseSpec | None = None, backend: str | None = None) -> float:
    """``Tr[O rho_final]`` including read-out noise when ``noise.qm < 1``."""
    final = evolve(ansatz, theta, input_state, noise, backend)
    return st.expectation(final, effective_observable(o, noise))


def commutator_operator(h: PauliSum, s: st.State) -> st.State:
    """``-i[H, rho]`` in the backend of ``s``."""
    rho = st.as_dense(s).matrix
    hm = h.to_matrix()
    d = st.DensityState(s.n, -1j * (hm @ rho - rho @ hm), st.OPERATOR)
    return d if isinstance(s, st.DensityState) else st.convert(d)


def _forward_factors(ansatz: Ansatz, theta, s: st.State, noise):
    """Yield ``((l, m), state just after factor m of layer l)`` in circuit order."""
    s = _noise(s, noise)
    for l, layer in enumerate(ansatz.layers):
        for m, f in enumerate(layer):
            s = st.apply_unitary(s, f.unitary(theta[f.param_id]), check=False)
            yield (l, m), s
        s = _noise(s, noise)


def exact_partial(ansatz: Ansatz, theta, o: PauliSum, ref: tuple[int, int],
                  input_state: st.State | None = None, noise: NoiseSpec | None = None,
                  backend: str | None = None) -> float:
    """Derivative of the noisy cost with respect to the angle of factor ``ref`` alone."""
    theta = _check_theta(ansatz, theta)
    f = ansatz.factor(ref)
    s = _prepare(ansatz, input_state, noise, backend)
    l, m = ref
    s = _noise(s, noise)
    for lay in ansatz.layers[:l]:
        s = _noise(st.apply_unitary(s, segment_unitary(lay, theta), check=False), noise)
    s = st.apply_unitary(s, segment_unitary(ansatz.layers[l], theta, 0, m + 1), check=False)
    d = propagate(ansatz, theta, commutator_operator(f.generator, s), noise, l, m + 1)
    return st.expectation(d, effective_observable(o, noise))


def factor_partials(ansatz: Ansatz, theta, o: PauliSum, input_state: st.State | None = None,
                    noise: NoiseSpec | None = None,
                    backend: str | None = None) -> dict[tuple[int, int], float]:
    """Exact partial for every factor, sharing one forward pass."""
    theta = _check_theta(ansatz, theta)
    s = _prepare(ansatz, input_state, noise, backend)
    oe = effective_observable(o, noise)
    out = {}
    for (l, m), s_lm in _forward_factors(ansatz, theta, s, noise):
        f = ansatz.factor((l, m))
        d = propagate(ansatz, theta, commutator_operator(f.generator, s_lm), noise, l, m + 1)
        out[(l, m)] = st.expectation(d, oe)
    return out


def exact_gradient_grouped(ansatz: Ansatz, theta, o: PauliSum,
                           input_state: st.State | None = None,
                           noise: NoiseSpec | None = None,
                           backend: str | None = None) -> GradientReport:
    """Gradient in the trained parameters: factor partials summed per correlation group."""
    partials = {k: 0.0 for k in range(ansatz.n_params)}
    for ref, v in factor_partials(ansatz, theta, o, input_state, noise, backend).items():
        partials[ansatz.factor(ref).param_id] += v
    return GradientReport.from_partials(partials, "exact")


def finite_diff_partial(cost_fn: Callable[[np.ndarray], float], theta, i: int,
                        h: float = FD_STEP) -> float:
    """Central difference ``(C(theta + h e_i) - C(theta - h e_i)) / 2h``."""
    if h <= 0:
        raise ValueError("step must be positive")
    theta = np.asarray(theta, dtype=float)
    e = np.zeros_like(theta)
    e[i] = h
    return (cost_fn(theta + e) - cost_fn(theta - e)) / (2 * h)


def finite_diff_gradient(cost_fn, theta, h: float = FD_STEP) -> GradientReport:
    theta = np.asarray(theta, dtype=float)
    return GradientReport.from_partials(
        {i: finite_diff_partial(cost_fn, theta, i, h) for i in range(theta.size)}, "finite_diff")


def fd_tolerance(value: float) -> float:
    return max(FD_ABS_TOL, FD_REL_TOL * abs(value))


def readout_distribution(probs: np.ndarray, n: int, q_m: float) -> np.ndarray:
    """Outcome distribution after flipping every bit with probability ``(1 - q_m) / 2``."""
    p = np.clip(np.real(np.asarray(probs)).astype(float), 0.0, None)
    p = p / p.sum()
    if q_m == 1.0:
        return p
    f = (1.0 - q_m) / 2.0
    t = p.reshape((2,) * n)
    for k in range(n):
        t = (1 - f) * t + f * np.flip(t, axis=k)
    return t.reshape(-1)


def sample_diagonal(probs: np.ndarray, eigenvalues: np.ndarray, n: int, shots: int, q_m: float,
                    rng: np.random.Generator) -> float:
    """Mean observable eigenvalue over ``shots`` noisy read-outs.

    Outcome counts are drawn in one multinomial from the flipped distribution,
    which has the same law as flipping bits shot by shot.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    counts = rng.multinomial(shots, readout_distribution(probs, n, q_m))
    return float(counts @ eigenvalues) / shots


def shot_cost(ansatz: Ansatz, theta, o: PauliSum, shots: int, rng_seed,
              input_state: st.State | None = None, noise: NoiseSpec | None = None,
              q_m: float | None = None, backend: str | None = None) -> float:
    """Finite-shot estimate of the noisy cost for a computational-basis-diagonal ``o``.

    ``q_m`` defaults to ``noise.qm``.  The estimator is unbiased for the exact
    cost of ``measurement_noise_observable(o, q_m)``.
    """
    if not o.is_diagonal:
        raise ValueError("shot sampling needs an observable made of I and Z only")
    if q_m is None:
        q_m = 1.0 if noise is None else noise.qm
    final = st.as_dense(evolve(ansatz, theta, input_state, noise, backend))
    rng = np.random.default_rng(rng_seed)
    return sample_diagonal(np.diag(final.matrix), o.diagonal(), ansatz.n, shots, q_m, rng)
