# Exact payoffs against simulated search episodes.

import numpy as np

from pandora_contracts import Contract, evaluate_exact, make_project, simulate

rng = np.random.default_rng(11)
boxes = [make_project([(0, 0.5), (100, 0.5)], 10),
         make_project([(10, 0.2), (40, 0.5), (70, 0.3)], 4),
         make_project([(55, 1.0)], 0)]

for w in (Contract.pure_debt(80), Contract.debt_plus_equity(40, 1 / 3), Contract.linear(0.2)):
    exact = evaluate_exact(w, boxes)
    est = simulate(w, boxes, seed=int(rng.integers(1 << 31)), n_episodes=50_000)
    z = (est.mean - exact.principal) / est.std_error if est.std_error > 0 else 0.0
    print(f"{w.family:18s} exact={exact.principal:9.4f}  simulated={est.mean:9.4f} "
          f"+- {est.std_error:.4f}  ({z:+.2f} SE)")
