"""Local Pauli noise: channel parameters, Kraus form and its two actions.

A single-qubit Pauli channel is fixed by its eigenvalues ``(q_X, q_Y, q_Z)``
on the non-identity Paulis.  The package applies it to density matrices via
the four-term Kraus sum and to Pauli coefficient vectors as a diagonal
rescaling; both are kept so they can check each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .pauli import PauliSum, letter_table, weight, _SINGLE

CPTP_TOL = 1e-12


class NonCPTPError(ValueError):
    """Raised when a noise triple does not define a physical channel."""


def pauli_channel_kraus(q_x: float, q_y: float, q_z: float, strict: bool = True):
    """Kraus probabilities ``(p_I, p_X, p_Y, p_Z)`` of the Pauli channel.

    The channel ``rho -> sum_k p_k s_k rho s_k`` maps X, Y, Z to
    ``q_X X, q_Y Y, q_Z Z``.  With ``strict`` a negative probability (beyond
    ``CPTP_TOL``) raises :class:`NonCPTPError`.
    """
    for q in (q_x, q_y, q_z):
        if not -1 < q < 1:
            raise ValueError(f"Pauli eigenvalue {q} outside (-1, 1)")
    p = (
        (1 + q_x + q_y + q_z) / 4,
        (1 + q_x - q_y - q_z) / 4,
        (1 - q_x + q_y - q_z) / 4,
        (1 - q_x - q_y + q_z) / 4,
    )
    if strict and min(p) < -CPTP_TOL:
        raise NonCPTPError(f"eigenvalues {(q_x, q_y, q_z)} give Kraus probabilities {p}")
    return p


@dataclass(frozen=True)
class NoiseSpec:
    """Per-qubit Pauli noise eigenvalues plus a measurement parameter ``qm``.

    ``qx``, ``qy`` and ``qz`` hold one value per qubit.  ``qm`` is the
    measurement fidelity: each read-out bit flips with probability
    ``(1 - qm) / 2``.
    """

    qx: tuple[float, ...]
    qy: tuple[float, ...]
    qz: tuple[float, ...]
    qm: float = 1.0

    def __post_init__(self):
        for name in ("qx", "qy", "qz"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        if not len(self.qx) == len(self.qy) == len(self.qz) >= 1:
            raise ValueError("qx, qy, qz need one entry per qubit")
        for v in self.qx + self.qy + self.qz:
            if not -1 < v < 1:
                raise ValueError(f"Pauli eigenvalue {v} outside (-1, 1)")
        if not 0 <= self.qm <= 1:
            raise ValueError(f"measurement parameter {self.qm} outside [0, 1]")

    @classmethod
    def uniform(cls, n: int, qx: float, qy: float | None = None, qz: float | None = None,
                qm: float = 1.0) -> "NoiseSpec":
        qy = qx if qy is None else qy
        qz = qx if qz is None else qz
        return cls((qx,) * n, (qy,) * n, (qz,) * n, qm)

    @classmethod
    def from_values(cls, n: int, qx, qy, qz, qm: float = 1.0) -> "NoiseSpec":
        """Build from scalars or per-qubit lists (the config-file form)."""

        def expand(v):
            if np.ndim(v) == 0:
                return (float(v),) * n
            if len(v) != n:
                raise ValueError(f"expected {n} per-qubit values, got {len(v)}")
            return tuple(float(x) for x in v)

        return cls(expand(qx), expand(qy), expand(qz), qm)

    @property
    def n(self) -> int:
        return len(self.qx)

    @property
    def uniform_triple(self) -> bool:
        return len(set(zip(self.qx, self.qy, self.qz))) == 1

    @cached_property
    def q(self) -> float:
        """Noise strength: the largest ``|q_sigma|`` over all qubits."""
        return max(abs(v) for v in self.qx + self.qy + self.qz)

    def eigenvalues(self) -> np.ndarray:
        """``(n, 3)`` array of per-qubit ``(q_X, q_Y, q_Z)``."""
        return np.array([self.qx, self.qy, self.qz]).T

    def kraus_probabilities(self, strict: bool = False) -> np.ndarray:
        return np.array([pauli_channel_kraus(*t, strict=strict) for t in self.eigenvalues()])

    @cached_property
    def cptp_valid(self) -> bool:
        return bool(self.kraus_probabilities().min() >= -CPTP_TOL)

    def require_cptp(self) -> None:
        if not self.cptp_valid:
            raise NonCPTPError("noise spec is not completely positive; cannot simulate")

    def with_qm(self, qm: float) -> "NoiseSpec":
        return NoiseSpec(self.qx, self.qy, self.qz, qm)

    def to_dict(self) -> dict:
        def compact(v):
            return v[0] if len(set(v)) == 1 else list(v)

        return {"qx": compact(self.qx), "qy": compact(self.qy), "qz": compact(self.qz),
                "qm": self.qm}


def noise_factors(spec: NoiseSpec) -> np.ndarray:
    """Multiplier for every non-identity Pauli coefficient (canonical order)."""
    n = spec.n
    per_qubit = np.hstack([np.ones((n, 1)), spec.eigenvalues()])  # (n, 4) indexed by letter
    letters = letter_table(n)[1:]
    return np.prod(per_qubit[np.arange(n), letters], axis=1)


def apply_noise_pauli_basis(vec, spec: NoiseSpec):
    """Scale each coefficient by the product over qubits of that letter's eigenvalue."""
    from .state import PauliVector

    if vec.n != spec.n:
        raise ValueError(f"vector has {vec.n} qubits, noise spec has {spec.n}")
    return PauliVector(vec.n, vec.coeffs * noise_factors(spec), vec.identity_coeff, vec.kind)


def apply_noise_dense(m: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    """Apply the product channel to a ``2^n x 2^n`` matrix through its Kraus sum."""
    spec.require_cptp()
    n = spec.n
    probs = spec.kraus_probabilities()
    out = np.asarray(m, dtype=complex)
    for k in range(n):
        t = out.reshape(2**k, 2, 2 ** (n - k - 1), 2**k, 2, 2 ** (n - k - 1))
        acc = np.zeros_like(t)
        for s in range(4):
            if probs[k, s] == 0:
                continue
            sig = _SINGLE[s]
            acc += probs[k, s] * np.einsum("ij,ajbckd,lk->aibcld", sig, t, sig.conj())
        out = acc.reshape(2**n, 2**n)
    return out


def measurement_noise_observable(o: PauliSum, q_m: float) -> PauliSum:
    """Heisenberg-picture read-out noise: each term scales by ``q_m ** weight``.

    The identity coefficient is untouched; ``o.min_weight`` gives the
    exponent used by the measurement-noise bound.
    """
    if not 0 <= q_m <= 1:
        raise ValueError(f"q_m={q_m} outside [0, 1]")
    return PauliSum(o.n, {p: c * q_m ** weight(p)[3] for p, c in o.terms.items()},
                    o.identity_coeff)


def bit_flip_probability(q_m: float) -> float:
    return (1.0 - q_m) / 2.0


def random_cptp_spec(n: int, rng: np.random.Generator, q_floor: float = 0.0,
                     uniform: bool = False, qm: float = 1.0) -> NoiseSpec:
    """Draw a physical Pauli channel per qubit (Dirichlet over Kraus weights).

    ``q_floor`` skews draws toward the identity channel to keep ``q`` large.
    """
    draws = 1 if uniform else n
    triples = []
    for _ in range(draws):
        while True:
            p = rng.dirichlet([1.0, 1.0, 1.0, 1.0])
            mix = rng.uniform(q_floor, 1.0)
            p = mix * np.array([1.0, 0, 0, 0]) + (1 - mix) * p
            pI, pX, pY, pZ = p
            t = (pI + pX - pY - pZ, pI - pX + pY - pZ, pI - pX - pY + pZ)
            if max(abs(v) for v in t) < 1 - 1e-9:
                triples.append(t)
                break
    if uniform:
        triples = triples * n
    qx, qy, qz = zip(*triples)
    return NoiseSpec(qx, qy, qz, qm)

