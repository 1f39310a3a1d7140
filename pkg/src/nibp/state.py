"""Dense density matrices and Pauli coefficient vectors.

Both backends carry either a state (trace one) or a traceless operator such
as a derivative ``-i[H, rho]``; the ``kind`` tag records which.  The Pauli
vector uses unnormalised coefficients ``a_i = Tr[rho sigma_i]`` so that
``rho = (a_0 * I + a . sigma) / 2^n`` with ``a_0 = Tr[rho]``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import TextIO, Union

import numpy as np

from . import channels
from .pauli import PauliString, PauliSum, from_pauli_coefficients, pauli_coefficients

STATE = "state"
OPERATOR = "operator"
UNITARY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DensityState:
    n: int
    matrix: np.ndarray
    kind: str = STATE

    def __post_init__(self):
        if self.matrix.shape != (2**self.n, 2**self.n):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match n={self.n}")

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def is_hermitian(self, tol: float = 1e-9) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol)

    def is_positive(self, floor: float = -1e-8) -> bool:
        return bool(np.linalg.eigvalsh(self.matrix).min() >= floor)


@dataclass(frozen=True, eq=False)
class PauliVector:
    n: int
    coeffs: np.ndarray
    identity_coeff: float = 1.0
    kind: str = STATE

    def __post_init__(self):
        if self.coeffs.shape != (4**self.n - 1,):
            raise ValueError(f"expected {4**self.n - 1} coefficients, got {self.coeffs.shape}")

    def to_csv(self, fh: TextIO, tol: float = 0.0) -> None:
        """Debug dump: one ``string,coefficient`` row per entry above ``tol``."""
        writer = csv.writer(fh)
        writer.writerow(["pauli", "coefficient"])
        writer.writerow(["I" * self.n, repr(float(self.identity_coeff))])
        for i in np.flatnonzero(np.abs(self.coeffs) > tol):
            writer.writerow([PauliString(self.n, int(i) + 1).letters, repr(float(self.coeffs[i]))])


State = Union[DensityState, PauliVector]


def _bits_index(bits: str) -> int:
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"invalid bitstring {bits!r}")
    return int(bits, 2)


def from_computational(bits: str, backend: str = "dense") -> State:
    """The pure state ``|bits><bits|``; qubit 0 is the leftmost character."""
    n = len(bits)
    m = np.zeros((2**n, 2**n), dtype=complex)
    i = _bits_index(bits)
    m[i, i] = 1.0
    s = DensityState(n, m)
    return s if backend == "dense" else convert(s)


def from_statevector(psi: np.ndarray, backend: str = "dense") -> State:
    psi = np.asarray(psi, dtype=complex)
    n = int(round(np.log2(psi.size)))
    psi = psi / np.linalg.norm(psi)
    s = DensityState(n, np.outer(psi, psi.conj()))
    return s if backend == "dense" else convert(s)


def plus_state(n: int, backend: str = "dense") -> State:
    return from_statevector(np.ones(2**n), backend)


def maximally_mixed(n: int, backend: str = "dense") -> State:
    s = DensityState(n, np.eye(2**n, dtype=complex) / 2**n)
    return s if backend == "dense" else convert(s)


def convert(s: State) -> State:
    """Switch between the dense and the Pauli-vector backend."""
    if isinstance(s, DensityState):
        c = pauli_coefficients(s.matrix).real
        return PauliVector(s.n, c[1:].copy(), float(c[0]), s.kind)
    full = np.concatenate([[s.identity_coeff], s.coeffs])
    return DensityState(s.n, from_pauli_coefficients(full, s.n), s.kind)


def as_dense(s: State) -> DensityState:
    return s if isinstance(s, DensityState) else convert(s)


def as_pauli(s: State) -> PauliVector:
    return s if isinstance(s, PauliVector) else convert(s)


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> None:
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > tol:
        raise ValueError(f"matrix is not unitary (max deviation {err:.2e})")


def apply_unitary(s: State, u: np.ndarray, check: bool = True) -> State:
    """Conjugate by ``u``; the Pauli backend goes through the matrix picture."""
    if u.shape != (2**s.n, 2**s.n):
        raise ValueError(f"unitary shape {u.shape} does not match n={s.n}")
    if check:
        check_unitary(u)
    if isinstance(s, DensityState):
        return DensityState(s.n, u @ s.matrix @ u.conj().T, s.kind)
    return convert(apply_unitary(convert(s), u, check=False))


def apply_noise(s: State, spec: channels.NoiseSpec) -> State:
    if isinstance(s, DensityState):
        return DensityState(s.n, channels.apply_noise_dense(s.matrix, spec), s.kind)
    spec.require_cptp()
    return channels.apply_noise_pauli_basis(s, spec)


def expectation(s: State, o: PauliSum) -> float:
    """``Tr[O rho]``; equals ``omega_0 a_0 + omega . a`` in the Pauli picture."""
    if o.n != s.n:
        raise ValueError(f"observable has {o.n} qubits, state has {s.n}")
    if isinstance(s, DensityState):
        return float(np.real(np.einsum("ij,ji->", o.to_matrix(), s.matrix)))
    return float(o.identity_coeff * s.identity_coeff + o.coefficient_vector() @ s.coeffs)


def bloch_vector(s: State) -> np.ndarray:
    return as_pauli(s).coeffs


def bloch_norm2(s: State) -> float:
    """Euclidean norm of the non-identity Pauli coefficients."""
    return float(np.linalg.norm(bloch_vector(s)))


def purity(s: State) -> float:
    """``Tr[rho^2] = (a_0^2 + |a|^2) / 2^n``."""
    if isinstance(s, DensityState):
        return float(np.real(np.einsum("ij,ji->", s.matrix, s.matrix)))
    return float((s.identity_coeff**2 + s.coeffs @ s.coeffs) / 2**s.n)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_pure_state(n: int, rng: np.random.Generator, backend: str = "dense") -> State:
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return from_statevector(psi, backend)


def random_density(n: int, rng: np.random.Generator, rank: int | None = None,
                   backend: str = "dense") -> State:
    rank = 2**n if rank is None else rank
    g = rng.normal(size=(2**n, rank)) + 1j * rng.normal(size=(2**n, rank))
    m = g @ g.conj().T
    s = DensityState(n, m / np.trace(m).real)
    return s if backend == "dense" else convert(s)
