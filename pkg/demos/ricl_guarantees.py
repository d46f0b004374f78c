"""Certify a small matrix by brute force and read off the recovery guarantees."""
import math

import numpy as np
from scipy.stats import ortho_group

from levelcs import (LevelStructure, cosamp_guarantee, default_weights, ihtl,
                     iht_guarantee, qcbp_threshold, random_levels_signal,
                     ricl_worst_case, scale_sparsities, unit_weights)

ls = LevelStructure((8, 16), (1, 1))

# an orthogonal matrix is a perfect isometry; perturb it a little
Q = ortho_group.rvs(16, random_state=0)
A = Q + 0.1 * np.random.default_rng(0).standard_normal((16, 16)) / 4

delta, worst = ricl_worst_case(A, scale_sparsities(ls, 3))
print(f"delta_3s = {delta:.6f}, attained on columns {worst.indices}")

rep = iht_guarantee(delta)
print(f"IHT: rho = {rep.rho:.4f} (needs delta < {rep.condition_threshold:.4f}), "
      f"tau <= {rep.tau_bound:.3f}")
print(f"CoSaMP threshold {cosamp_guarantee(0).condition_threshold:.3f}")

# watch the error contract at least as fast as rho^n
x = random_levels_signal(ls, 5)
errs = []
ihtl(A, A @ x, ls, callback=lambda n, v: errs.append(np.linalg.norm(v - x)))
for n, e in enumerate(errs[:8]):
    print(f"n={n}  error {e:.3e}  bound {rep.rho ** n * np.linalg.norm(x):.3e}")

# weighted QCBP thresholds: optimal weights make the bound depend on r only
for r in (1, 2, 4):
    lsr = LevelStructure(tuple(10 * (k + 1) for k in range(r)), tuple(range(1, r + 1)))
    print(f"r={r}: QCBP optimal {qcbp_threshold(lsr, default_weights(lsr)):.4f}, "
          f"unit {qcbp_threshold(lsr, unit_weights(lsr)):.4f}, "
          f"1/(sqrt(2r)+1) = {1 / (math.sqrt(2 * r) + 1):.4f}")
