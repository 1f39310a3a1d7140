"""Closed-form concentration and gradient bounds for noisy layered circuits.

All bounds carry the noise envelope ``2^{n/2} q^{L+1}`` where ``L + 1`` is the
number of noise channels in the pipeline.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .pauli import PauliSum


@dataclass(frozen=True)
class BoundInputs:
    """Symbols entering the bounds.

    ``L`` counts unitary layers, so the noise exponent is ``L + 1``.  ``q_M``
    and ``w`` are optional read-out parameters; when both are set the
    measurement factor ``q_M ** w`` is applied by :func:`with_readout`.
    """

    n: int
    L: int
    q: float
    N_lm: int = 1
    eta_inf: float = 1.0
    N_O: int = 1
    omega_inf: float = 1.0
    b: int = 1
    q_M: float | None = None
    w: int | None = None
    trace_O: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.L < 0:
            raise ValueError("L must be >= 0")
        if not -1 < self.q <= 1:
            raise ValueError(f"q={self.q} outside (-1, 1]")
        if self.b < 1:
            raise ValueError("b must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


def envelope(inp: BoundInputs) -> float:
    return 2 ** (inp.n / 2) * abs(inp.q) ** (inp.L + 1)


def readout_factor(inp: BoundInputs) -> float:
    if inp.q_M is None or inp.w is None:
        return 1.0
    return inp.q_M**inp.w


def concentration_center(inp: BoundInputs) -> float:
    """Cost of the maximally mixed state, ``Tr[O] / 2^n``."""
    return inp.trace_O / 2**inp.n


def lemma1_G(inp: BoundInputs) -> float:
    """Bound on ``|C - Tr[O]/2^n|``."""
    return inp.N_O * inp.omega_inf * envelope(inp)


def thm1_F(inp: BoundInputs) -> float:
    """Bound on a single partial derivative ``|d C / d theta_lm|``."""
    return math.sqrt(2) * inp.N_lm * inp.N_O * inp.eta_inf * inp.omega_inf * envelope(inp)


def remark1_F(inp: BoundInputs) -> float:
    """Bound for a parameter shared by ``b`` factors."""
    return inp.b * thm1_F(inp)


def with_readout(value: float, inp: BoundInputs) -> float:
    return value * readout_factor(inp)


def prop1_factor(o: PauliSum, q_M: float) -> float:
    """``q_M ** w`` with ``w`` the smallest weight among the terms of ``o``."""
    if not o.terms:
        raise ValueError("observable has no non-identity terms")
    return q_M**o.min_weight


def cor1_depth_threshold(n: int, q: float, alpha: float, c: float = 0.0) -> float:
    """Depth beyond which the gradient bound falls as ``2^{-alpha n}``.

    Solves ``2^{n/2} q^{L+1} <= const * 2^{-alpha n}`` for ``L`` using
    ``log2(1/q) > 0``.
    """
    if not 0 < q < 1:
        raise ValueError("threshold needs 0 < q < 1")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return (alpha + 0.5) * n / math.log2(1 / q) - c


def cor1_depth_threshold_printed(n: int, q: float, alpha: float, c: float = 0.0) -> float:
    """The same expression with ``1 / log2(q)``; negative for ``q < 1``, shown for reference."""
    if not 0 < q < 1:
        raise ValueError("threshold needs 0 < q < 1")
    return (alpha + 0.5) * n / math.log2(q) - c


def observable_inputs(o: PauliSum) -> dict:
    return {"N_O": o.num_terms, "omega_inf": o.inf_norm, "trace_O": o.trace}


def _meta(metadata, key):
    try:
        return metadata[key]
    except KeyError:
        raise KeyError(f"ansatz metadata lacks {key!r}") from None


def qaoa_bounds(metadata, q: float, n: int, r: int = 1) -> tuple[float, float]:
    """``(beta_bound, gamma_bound)`` for round ``r`` of a QAOA ansatz with ``O = H_P``.

    Each mixer angle multiplies ``b_M`` native gates with generator weight
    ``N_M eta_M`` (or ``1 * eta_M`` once compiled), each problem angle ``b_P``
    gates with ``N_P eta_P`` (or ``1 * eta_P``).  The noise exponent is
    ``(k_P + k_M) p + 1``.
    """
    p, k_p, k_m = _meta(metadata, "p"), _meta(metadata, "k_P"), _meta(metadata, "k_M")
    if not 1 <= r <= p:
        raise ValueError(f"round {r} outside 1..{p}")
    n_p, n_m = _meta(metadata, "N_P"), _meta(metadata, "N_M")
    eta_p, eta_m = _meta(metadata, "eta_P_inf"), _meta(metadata, "eta_M_inf")
    native = _meta(metadata, "native_layers")
    common = dict(n=n, L=(k_p + k_m) * p, q=q, N_O=n_p, omega_inf=eta_p)
    beta = remark1_F(BoundInputs(N_lm=1 if native else n_m, eta_inf=eta_m,
                                 b=_meta(metadata, "b_M"), **common))
    gamma = remark1_F(BoundInputs(N_lm=1 if native else n_p, eta_inf=eta_p,
                                  b=_meta(metadata, "b_P"), **common))
    return beta, gamma


def ucc_bound(metadata, o: PauliSum, q: float, n: int, k: int, layers: int) -> float:
    """Bound on the derivative in amplitude ``k`` of a trotterised UCC-like ansatz."""
    if not _meta(metadata, "trotter"):
        raise ValueError("the UCC bound assumes the trotterised form")
    n_hat = _meta(metadata, "N_hat")[k]
    return remark1_F(BoundInputs(n=n, L=layers, q=q, N_lm=1, eta_inf=1.0, b=n_hat,
                                 **observable_inputs(o)))


def group_bound(ansatz, param_id: int, o: PauliSum, q: float) -> float:
    """Degenerate-parameter bound for one trained parameter of any ansatz.

    Uses ``b`` factors sharing the id and the largest ``N_lm ||eta_lm||`` among them.
    """
    refs = ansatz.group(param_id)
    worst = max(ansatz.factor(r).generator.num_terms * ansatz.factor(r).generator.inf_norm
                for r in refs)
    inp = BoundInputs(n=ansatz.n, L=ansatz.layer_count, q=q, N_lm=1, eta_inf=worst,
                      b=len(refs), **observable_inputs(o))
    return remark1_F(inp)


def factor_bound(ansatz, ref, o: PauliSum, q: float) -> float:
    g = ansatz.factor(ref).generator
    return thm1_F(BoundInputs(n=ansatz.n, L=ansatz.layer_count, q=q, N_lm=g.num_terms,
                              eta_inf=g.inf_norm, **observable_inputs(o)))


def cost_bound(ansatz, o: PauliSum, q: float) -> float:
    return lemma1_G(BoundInputs(n=ansatz.n, L=ansatz.layer_count, q=q, **observable_inputs(o)))


def g_vector_bound(n_terms: int, eta_inf: float, a_norm: float) -> float:
    """Right-hand side ``sqrt(2) N ||eta|| ||a||`` of the commutator-vector estimate."""
    return math.sqrt(2) * n_terms * eta_inf * a_norm


def g_vector_bound_corrected(n_terms: int, eta_inf: float, a_norm: float) -> float:
    """``2 N ||eta|| ||a||``: a commutator doubles the spectral half-width at most."""
    return 2 * n_terms * eta_inf * a_norm


def table_rows(inp: BoundInputs, alpha: float = 1.0, c: float = 0.0) -> list[dict]:
    """One row per formula, for the ``bounds`` subcommand."""
    rows = [
        ("lemma1_G", "N_O*omega_inf*2^(n/2)*q^(L+1)", lemma1_G(inp)),
        ("concentration_center", "trace_O/2^n", concentration_center(inp)),
        ("thm1_F", "sqrt(2)*N_lm*N_O*eta_inf*omega_inf*2^(n/2)*q^(L+1)", thm1_F(inp)),
        ("remark1_F", "b*thm1_F", remark1_F(inp)),
        ("readout_factor", "q_M^w", readout_factor(inp)),
        ("lemma1_G_readout", "q_M^w*lemma1_G", with_readout(lemma1_G(inp), inp)),
        ("remark1_F_readout", "q_M^w*remark1_F", with_readout(remark1_F(inp), inp)),
    ]
    if 0 < inp.q < 1:
        rows.append(("depth_threshold", "(alpha+1/2)*n/log2(1/q)-c",
                     cor1_depth_threshold(inp.n, inp.q, alpha, c)))
        rows.append(("depth_threshold_printed", "(alpha+1/2)*n/log2(q)-c",
                     cor1_depth_threshold_printed(inp.n, inp.q, alpha, c)))
    inputs = {**inp.to_dict(), "alpha": alpha, "c": c}
    return [{"name": k, "formula": f, "value": v, "inputs": inputs} for k, f, v in rows]
