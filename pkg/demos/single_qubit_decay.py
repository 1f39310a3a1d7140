"""
One qubit under depolarizing noise
==================================

Rotate |0> about X, measure Z, and watch the cost and its slope shrink
as the noise channels before and after the gate get stronger.
"""

import numpy as np

from nibp import NoiseSpec, PauliSum, cost, exact_partial, single_qubit_rx
from nibp.state import bloch_vector
from nibp.ansatz import evolve

circuit = single_qubit_rx()
z = PauliSum(1, {"Z": 1.0})
theta = np.linspace(-np.pi, np.pi, 9)

# Two channels (before and after the gate) each scale the Bloch vector by q,
# so the whole curve is q^2 cos(theta).
for q in (1.0, 0.9, 0.5):
    spec = None if q == 1.0 else NoiseSpec.uniform(1, q)
    c = [cost(circuit, [t], z, noise=spec) for t in theta]
    d = [exact_partial(circuit, [t], z, (0, 0), noise=spec) for t in theta]
    print(f"q={q:.2f}  max|C|={max(map(abs, c)):.4f}  max|dC|={max(map(abs, d)):.4f}")

# Output Bloch vector at theta = pi/3: the Y component carries the minus sign.
spec = NoiseSpec.uniform(1, 0.9)
print("bloch(pi/3) =", bloch_vector(evolve(circuit, [np.pi / 3], noise=spec, backend="pauli")))
