"""Pauli strings, real Pauli sums and decomposition of matrices in the Pauli basis.

Conventions used everywhere in the package:

* A string of length ``n`` is written left to right as qubit ``0 .. n-1``;
  qubit 0 is the leftmost Kronecker factor (most significant bit).
* Letters are coded ``I=0, X=1, Y=2, Z=3`` with two bits per qubit and
  qubit 0 in the most significant position.  The resulting integer is the
  canonical index of the string; iterating ``0 .. 4**n - 1`` is the canonical
  (lexicographic) order and index 0 is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

import numpy as np

LETTERS = "IXYZ"
PRUNE_TOL = 1e-12
HERMITIAN_TOL = 1e-9

_SINGLE = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

# (phase, letter) of the single-qubit product a*b.
_MUL_TABLE = {
    (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
    (1, 0): (1, 1), (1, 1): (1, 0), (1, 2): (1j, 3), (1, 3): (-1j, 2),
    (2, 0): (1, 2), (2, 1): (-1j, 3), (2, 2): (1, 0), (2, 3): (1j, 1),
    (3, 0): (1, 3), (3, 1): (1j, 2), (3, 2): (-1j, 1), (3, 3): (1, 0),
}


@dataclass(frozen=True, order=True)
class PauliString:
    """An ``n``-qubit Pauli string stored as a packed integer code."""

    n: int
    code: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a Pauli string needs at least one qubit")
        if not 0 <= self.code < 4**self.n:
            raise ValueError(f"code {self.code} out of range for n={self.n}")

    @classmethod
    def from_str(cls, text: str) -> "PauliString":
        text = text.strip().upper()
        code = 0
        for ch in text:
            if ch not in LETTERS:
                raise ValueError(f"invalid Pauli letter {ch!r} in {text!r}")
            code = (code << 2) | LETTERS.index(ch)
        return cls(len(text), code)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliString":
        """String with ``letter`` on ``qubit`` and identity elsewhere."""
        return cls.from_letters(n, {qubit: letter})

    @classmethod
    def from_letters(cls, n: int, letters: Mapping[int, str]) -> "PauliString":
        chars = ["I"] * n
        for q, ch in letters.items():
            chars[q] = ch
        return cls.from_str("".join(chars))

    def letter_codes(self) -> list[int]:
        return [(self.code >> (2 * (self.n - 1 - k))) & 3 for k in range(self.n)]

    @property
    def letters(self) -> str:
        return "".join(LETTERS[c] for c in self.letter_codes())

    @property
    def is_identity(self) -> bool:
        return self.code == 0

    @property
    def is_diagonal(self) -> bool:
        return all(c in (0, 3) for c in self.letter_codes())

    def to_matrix(self) -> np.ndarray:
        out = np.array([[1.0 + 0j]])
        for c in self.letter_codes():
            out = np.kron(out, _SINGLE[c])
        return out

    def __str__(self) -> str:
        return self.letters

    def __repr__(self) -> str:
        return f"PauliString({self.letters!r})"


def weight(p: PauliString) -> tuple[int, int, int, int]:
    """Return ``(x, y, z, w)``: counts of X, Y and Z letters and their total."""
    codes = p.letter_codes()
    x, y, z = codes.count(1), codes.count(2), codes.count(3)
    return x, y, z, x + y + z


def multiply(p: PauliString, r: PauliString) -> tuple[complex, PauliString]:
    """Matrix product of two strings as ``(phase, product)``."""
    if p.n != r.n:
        raise ValueError(f"qubit count mismatch: {p.n} vs {r.n}")
    phase: complex = 1
    code = 0
    for a, b in zip(p.letter_codes(), r.letter_codes()):
        ph, c = _MUL_TABLE[(a, b)]
        phase *= ph
        code = (code << 2) | c
    return phase, PauliString(p.n, code)


def commutes(p: PauliString, r: PauliString) -> bool:
    anti = sum(1 for a, b in zip(p.letter_codes(), r.letter_codes()) if a and b and a != b)
    return anti % 2 == 0


@dataclass(frozen=True)
class PauliSum:
    """Real linear combination of Pauli strings.

    The identity coefficient is held apart from ``terms``; ``terms`` never
    contains the identity string nor coefficients below ``PRUNE_TOL``.
    """

    n: int
    terms: Mapping[PauliString, float]
    identity_coeff: float = 0.0

    def __init__(self, n: int, terms: Mapping | Iterable = (), identity_coeff: float = 0.0):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[PauliString, float] = {}
        ident = float(identity_coeff)
        for key, coeff in items:
            p = PauliString.from_str(key) if isinstance(key, str) else key
            if p.n != n:
                raise ValueError(f"term {p} has {p.n} qubits, expected {n}")
            if isinstance(coeff, complex) or np.iscomplexobj(coeff):
                if abs(np.imag(coeff)) > HERMITIAN_TOL:
                    raise ValueError(f"complex coefficient {coeff} on {p}")
                coeff = np.real(coeff)
            if p.is_identity:
                ident += float(coeff)
            else:
                acc[p] = acc.get(p, 0.0) + float(coeff)
        pruned = {p: acc[p] for p in sorted(acc) if abs(acc[p]) > PRUNE_TOL}
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "terms", pruned)
        object.__setattr__(self, "identity_coeff", ident if abs(ident) > PRUNE_TOL else 0.0)

    @classmethod
    def from_dict(cls, data: Mapping[str, float]) -> "PauliSum":
        if not data:
            raise ValueError("cannot infer qubit count from an empty mapping")
        n = len(next(iter(data)))
        return cls(n, data)

    @classmethod
    def identity(cls, n: int, coeff: float = 1.0) -> "PauliSum":
        return cls(n, {}, coeff)

    def __iter__(self) -> Iterator[tuple[PauliString, float]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return (
            self.n == other.n
            and self.identity_coeff == other.identity_coeff
            and dict(self.terms) == dict(other.terms)
        )

    def __hash__(self):
        return hash((self.n, self.identity_coeff, tuple(self.terms.items())))

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.n != self.n:
            raise ValueError("qubit count mismatch")
        items = list(self.terms.items()) + list(other.terms.items())
        return PauliSum(self.n, items, self.identity_coeff + other.identity_coeff)

    def __mul__(self, scalar: float) -> "PauliSum":
        return PauliSum(
            self.n, {p: c * scalar for p, c in self.terms.items()}, self.identity_coeff * scalar
        )

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return self * -1.0

    def isclose(self, other: "PauliSum", atol: float = 1e-9) -> bool:
        if self.n != other.n or abs(self.identity_coeff - other.identity_coeff) > atol:
            return False
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0.0) - other.terms.get(k, 0.0)) <= atol for k in keys)

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    @property
    def inf_norm(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    @property
    def trace(self) -> float:
        return 2.0**self.n * self.identity_coeff

    @property
    def is_diagonal(self) -> bool:
        return all(p.is_diagonal for p in self.terms)

    @property
    def min_weight(self) -> int:
        if not self.terms:
            raise ValueError("observable has no non-identity term")
        return min(weight(p)[3] for p in self.terms)

    def coefficient_vector(self) -> np.ndarray:
        """Non-identity coefficients as a dense vector in canonical order."""
        vec = np.zeros(4**self.n - 1)
        for p, c in self.terms.items():
            vec[p.code - 1] = c
        return vec

    def to_matrix(self) -> np.ndarray:
        full = self.coefficient_vector()
        coeffs = np.concatenate([[self.identity_coeff], full]) * 2.0**self.n
        return from_pauli_coefficients(coeffs, self.n)

    def diagonal(self) -> np.ndarray:
        """Eigenvalues of a computational-basis-diagonal sum, indexed by bitstring."""
        if not self.is_diagonal:
            raise ValueError("sum contains X or Y letters; it is not diagonal")
        diag = np.full(2**self.n, self.identity_coeff)
        for p, c in self.terms.items():
            diag += c * _z_signs(p)
        return diag

    def __str__(self) -> str:
        parts = [f"{self.identity_coeff:+g}*{'I' * self.n}"] if self.identity_coeff else []
        parts += [f"{c:+g}*{p}" for p, c in self.terms.items()]
        return " ".join(parts) if parts else "0"


def _z_signs(p: PauliString) -> np.ndarray:
    idx = np.arange(2**p.n)
    sign = np.ones(2**p.n)
    for k, c in enumerate(p.letter_codes()):
        if c == 3:
            bit = (idx >> (p.n - 1 - k)) & 1
            sign *= 1 - 2 * bit
    return sign


@lru_cache(maxsize=None)
def _forward_kernel() -> np.ndarray:
    # K[p, 2r + c] = (sigma_p)_{c r}, so that sum_j K[p, j] m_j = Tr[sigma_p m].
    return np.array([[_SINGLE[p][c, r] for r in range(2) for c in range(2)] for p in range(4)])


@lru_cache(maxsize=None)
def _inverse_kernel() -> np.ndarray:
    # J[2r + c, p] = (sigma_p)_{r c}
    return np.array([[_SINGLE[p][r, c] for p in range(4)] for r in range(2) for c in range(2)])


def _interleave(m: np.ndarray, n: int) -> np.ndarray:
    t = m.reshape([2] * (2 * n))
    order = [ax for k in range(n) for ax in (k, n + k)]
    return t.transpose(order).reshape([4] * n)


def _deinterleave(t: np.ndarray, n: int) -> np.ndarray:
    t = t.reshape([2] * (2 * n))
    inv = [2 * k for k in range(n)] + [2 * k + 1 for k in range(n)]
    return t.transpose(inv).reshape(2**n, 2**n)


def _apply_per_qubit(t: np.ndarray, kernel: np.ndarray, n: int) -> np.ndarray:
    for k in range(n):
        t = t.reshape(4**k, 4, 4 ** (n - k - 1))
        t = np.einsum("pj,ajb->apb", kernel, t)
    return t.reshape(-1)


def pauli_coefficients(m: np.ndarray) -> np.ndarray:
    """All ``Tr[m sigma_i]`` in canonical order (length ``4**n``, complex)."""
    dim = m.shape[0]
    n = int(round(np.log2(dim)))
    if m.shape != (dim, dim) or 2**n != dim:
        raise ValueError(f"expected a square 2^n matrix, got shape {m.shape}")
    return _apply_per_qubit(_interleave(np.asarray(m, dtype=complex), n), _forward_kernel(), n)


def from_pauli_coefficients(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`pauli_coefficients`: ``(1/2^n) sum_i c_i sigma_i``."""
    coeffs = np.asarray(coeffs)
    if coeffs.shape != (4**n,):
        raise ValueError(f"expected {4**n} coefficients, got {coeffs.shape}")
    t = _apply_per_qubit(coeffs.astype(complex), _inverse_kernel(), n)
    return _deinterleave(t, n) / 2.0**n


def decompose(m: np.ndarray, tol: float = HERMITIAN_TOL) -> PauliSum:
    """Decompose a Hermitian matrix as ``sum_i c_i sigma_i`` with ``c_i = Tr[m sigma_i]/2^n``."""
    m = np.asarray(m, dtype=complex)
    c = pauli_coefficients(m) / m.shape[0]
    if np.max(np.abs(c.imag), initial=0.0) > tol:
        raise ValueError("matrix is not Hermitian: imaginary Pauli coefficient found")
    n = int(round(np.log2(m.shape[0])))
    real = c.real
    terms = [(PauliString(n, i), real[i]) for i in np.flatnonzero(np.abs(real) > PRUNE_TOL) if i]
    return PauliSum(n, terms, real[0])


def sum_stats(s: PauliSum) -> tuple[int, float, float]:
    """``(num_terms, inf_norm, trace)`` with the identity excluded from the first two."""
    return s.num_terms, s.inf_norm, s.trace


def strings(n: int) -> Iterator[PauliString]:
    """All non-identity strings in canonical order."""
    for code in range(1, 4**n):
        yield PauliString(n, code)


@lru_cache(maxsize=None)
def letter_table(n: int) -> np.ndarray:
    """``(4**n, n)`` array of letter codes for every string in canonical order."""
    idx = np.arange(4**n)
    return np.stack([(idx >> (2 * (n - 1 - k))) & 3 for k in range(n)], axis=1)


_MUL_PHASE = np.array([[_MUL_TABLE[(a, b)][0] for b in range(4)] for a in range(4)], dtype=complex)
_MUL_LETTER = np.array([[_MUL_TABLE[(a, b)][1] for b in range(4)] for a in range(4)])


def left_multiply_all(p: PauliString) -> tuple[np.ndarray, np.ndarray]:
    """``(phase, index)`` arrays with ``p @ sigma_i = phase[i] * sigma_index[i]`` for all ``i``."""
    n = p.n
    letters = letter_table(n)
    phase = np.ones(4**n, dtype=complex)
    index = np.zeros(4**n, dtype=np.intp)
    for k, a in enumerate(p.letter_codes()):
        phase *= _MUL_PHASE[a, letters[:, k]]
        index = (index << 2) | _MUL_LETTER[a, letters[:, k]]
    return phase, index
