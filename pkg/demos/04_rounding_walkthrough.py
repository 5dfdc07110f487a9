"""Step through the polytope rounding on a hand-checkable 2x2 plan.

Rows are shrunk to fit the row marginal, columns likewise, and the missing
mass returns as a rank-one outer product of the deficits.  The output has
exact marginals and moves at most twice the input's marginal L1 distance.
"""

import numpy as np

from pdasgd import marginal_distance, round_to_polytope

alpha = np.array([0.5, 0.5])
beta = np.array([0.5, 0.5])
f = np.array([[0.4, 0.2], [0.1, 0.3]])

print("input plan:")
print(f)
print(f"input marginal distance d(F) = {marginal_distance(f, alpha, beta)}")

rows = f.sum(axis=1)
scale = np.minimum(alpha / rows, 1.0)
print(f"\nrow sums {rows} -> row scale factors {scale}")
f_prime = scale[:, None] * f
print("after row shrink:")
print(f_prime)
cols = f_prime.sum(axis=0)
print(f"column sums {cols} -> column scale factors {np.minimum(beta / cols, 1.0)}")

err_r = alpha - f_prime.sum(axis=1)
err_c = beta - f_prime.sum(axis=0)
print(f"\nrow deficits {err_r}, column deficits {err_c}")

rounded, report = round_to_polytope(f, alpha, beta)
print("\nrounded plan (exact thirds and sixths):")
print(rounded.entries)
print(f"d(E) = {marginal_distance(rounded, alpha, beta):.2e}")
print(f"|E - F|_1 = {report.l1_change:.6f} <= 2 d(F) = {2 * report.input_marginal_gap:.6f}")

# the guarantee holds on random near-feasible plans too
rng = np.random.default_rng(1)
worst = 0.0
for _ in range(2000):
    n = int(rng.integers(2, 7))
    a = rng.dirichlet(np.ones(n))
    b = rng.dirichlet(np.ones(n))
    g = np.maximum(np.outer(a, b) * (1 + 0.3 * rng.normal(size=(n, n))), 0)
    g /= g.sum()
    e, rep = round_to_polytope(g, a, b)
    if rep.input_marginal_gap > 0:
        worst = max(worst, rep.l1_change / (2 * rep.input_marginal_gap))
print(f"\nworst |E-F|_1 / (2 d(F)) over 2000 random plans: {worst:.3f} (must be <= 1)")
