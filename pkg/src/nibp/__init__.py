"""Noise-induced concentration of variational cost landscapes.

Simulate layered parameterised circuits under local Pauli noise, compute
exact noisy gradients, evaluate the matching closed-form bounds, and run
the QAOA MaxCut study.
"""

from .ansatz import (Ansatz, Factor, build_hardware_efficient, build_qaoa, build_random,
                     build_ucc_like, edge_coloring, evolve, layer_unitary, single_qubit_rx)
from .bounds import (BoundInputs, cor1_depth_threshold, lemma1_G, prop1_factor, qaoa_bounds,
                     remark1_F, thm1_F, ucc_bound)
from .channels import NoiseSpec, NonCPTPError, measurement_noise_observable, pauli_channel_kraus
from .gradient import (GradientReport, cost, exact_gradient_grouped, exact_partial,
                       finite_diff_partial, shot_cost)
from .maxcut import Graph, approximation_ratio, erdos_renyi, exact_ground_energy, maxcut_hamiltonian
from .optimize import NelderMeadOptions, multistart, nelder_mead
from .pauli import PauliString, PauliSum, commutes, decompose, multiply, weight
from .state import DensityState, PauliVector, apply_noise, apply_unitary, convert, expectation

__version__ = "0.1.0"
