"""Tour of the exact layer: generate the hierarchy, inspect the flows,
and audit the zero-curvature condition.

Everything here is computed in exact Gaussian-rational arithmetic; no
floating point is involved until a flow is compiled onto a grid.
"""

from rakns import build_flows, render, scalar_H, zero_curvature_check
from rakns.hierarchy import conserved_density

K = 5
table = build_flows(K)

print("Reduced scalar flows (psi_{t_k} = i^k H_k):\n")
for k in range(1, K + 1):
    print(f"  H_{k} =", render(scalar_H(table, k)))

print("\nFirst conserved densities:\n")
for k in range(1, 4):
    print(f"  rho_{k} =", render(conserved_density(table, k)))

print("\nZero-curvature audit (every lambda-power must vanish exactly):\n")
for k in range(1, K + 1):
    print(zero_curvature_check(table, k))
    print()
