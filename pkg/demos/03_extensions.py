# Diversion by the principal, a risk-averse agent, several agents and efficiency.

# In[1]:

import numpy as np

from pandora_contracts import UtilityFn, make_project, planner_value
from pandora_contracts.designer import (design_moral_hazard, design_risk_averse, efficiency_report,
                                        plan_multi_agent)

a0 = make_project([(0, 0.5), (100, 0.5)], 10)


# In[2]:

# the principal can keep a fraction k of any prize she hides; the equity
# share must then stay below 1 - k, which pushes the debt level down
for k in np.linspace(0, 0.8, 9):
    d, _ = design_moral_hazard(a0, float(k))
    print(f"k={k:.2f}  z={d.z:7.3f}  alpha={d.alpha:.4f}  ({d.case}, k*={d.k_star:.4f})")


# In[3]:

# the cap is the wage that gives the agent c0 in expected utility; the
# debt level, and with it the guarantee, moves the other way
box = make_project([(0, 0.5), (100, 0.5)], 2)
for name, u in [("identity", UtilityFn.identity()), ("2 sqrt(x)", UtilityFn.scaled_sqrt(2)),
                ("3 sqrt(x)", UtilityFn.scaled_sqrt(3)), ("x^0.5", UtilityFn.power(0.5))]:
    d, w = design_risk_averse(box, u)
    print(f"{name:10s} z_u={d.z_u:9.5f}  cap={d.w_bar_u:8.5f}  guarantee={d.guarantee:9.5f}")


# In[4]:

agents = [a0, make_project([(0, 0.5), (60, 0.5)], 6), make_project([(20, 0.7), (90, 0.3)], 12)]
plan = plan_multi_agent(agents)
print("order", plan.order, "debts", [round(x, 4) for x in plan.debts])
print("principal", plan.expected_principal, " planner", planner_value(agents))


# In[5]:

for box in (make_project([(50, 1)], 10), a0):
    rep = efficiency_report(box, n_audit=10)
    print("efficient:", rep.condition, "audit:", rep.audit_passed)
    if rep.counterexample:
        print("  counterexample", rep.counterexample)
