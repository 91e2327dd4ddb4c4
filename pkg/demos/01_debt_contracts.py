# Debt-like contracts for a single known project.
#
# The known project pays 0 or 100 with equal odds and costs 10 to inspect.
# Its reservation index is 80 and its net surplus is 40.

# In[1]:

import numpy as np

from pandora_contracts import Contract, guarantee, index, make_project
from pandora_contracts.contracts import emit_plot_data
from pandora_contracts.designer import capped_earnout, classify_optimal, debt_plus_equity, pure_debt

a0 = make_project([(0, 0.5), (100, 0.5)], 10)
r0, s0 = index(a0).value, a0.surplus
print("index r0 =", r0, " surplus s0 =", s0)


# In[2]:

# three members of the optimal family, all with guarantee s0
for w in (pure_debt(a0), debt_plus_equity(a0, 40), capped_earnout(a0, 40), capped_earnout(a0, 60)):
    v = classify_optimal(w, a0)
    print(f"{w.family:18s} {str(w.params):28s} mdl={v.mdl!s:5} fse={v.fse!s:5} "
          f"guarantee={guarantee(w, a0).value:.6g}")


# In[3]:

# linear shares never reach the surplus: a free safe project just above zero
# crowds the agent out whenever the share is too small, and a large share
# leaves the principal little of the known project
alphas = np.linspace(0, 1, 21)
vals = [guarantee(Contract.linear(a), a0).value for a in alphas]
for a, v in zip(alphas, vals):
    print(f"alpha={a:.2f}  guarantee={v:8.4f}")
print("best linear guarantee:", max(vals))


# In[4]:

# wage and principal share on a grid, ready for any plotting tool
print(emit_plot_data(capped_earnout(a0, 40), 100, 6))
