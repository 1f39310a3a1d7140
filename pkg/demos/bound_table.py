"""
How deep before the gradient bound is useless?
==============================================

Tabulate the cost-concentration and partial-derivative bounds for a few
noise levels, and the depth past which the noise envelope
2^(n/2) q^(L+1) drops below 2^(-n) for n = 8 qubits.
"""

from nibp import BoundInputs, cor1_depth_threshold, lemma1_G, thm1_F

n = 8
for q in (0.99, 0.95, 0.9):
    depth = cor1_depth_threshold(n, q, alpha=1.0)
    print(f"q={q}: envelope below 2^-{n} once L > {depth:.1f}")
    for L in (1, 10, 50, 200):
        inp = BoundInputs(n=n, L=L, q=q, N_O=n, omega_inf=0.5)
        print(f"   L={L:3d}  G={lemma1_G(inp):.3e}  F={thm1_F(inp):.3e}")
