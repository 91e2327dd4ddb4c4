# How an unknown extra project hurts the principal.
#
# The principal only knows project a0.  The agent may also hold projects she
# has never heard of; the guarantee is her payoff against the worst of them.

# In[1]:

from pandora_contracts import (AdversaryGrid, Contract, Project, brute_force_guarantee,
                               evaluate_exact, guarantee, induced_index, make_project, point_mass)

a0 = make_project([(0, 0.5), (100, 0.5)], 10)
share = Contract.linear(0.2)

# the agent pays 10 for an expected wage of 10, so his induced index is 0
print("induced index of a0 under a 20% share:", induced_index(share, a0).value)


# In[2]:

# a free project with a tiny sure prize beats opening a0 for the agent
for x in (5.0, 1.0, 0.1, 0.001):
    rep = evaluate_exact(share, [a0, Project(point_mass(x), 0.0)])
    print(f"safe prize {x:7.3f}: principal gets {rep.principal:.5f}, agent {rep.agent:.5f}")


# In[3]:

g = guarantee(share, a0)
print("structural guarantee:", g.value, "| attained:", g.attained, "| witness x ->", g.witness_x)
print(g.epsilon_note)


# In[4]:

# the brute-force search over small project sets finds the same worst case
b = brute_force_guarantee(share, a0, grid=AdversaryGrid(max_extra=1))
print("brute force:", b.value, b.witness, b.witness_projects)


# In[5]:

# a flat wage is paid even if nothing is searched, so the agent just takes it
flat = Contract.constant(10)
print("flat wage of 10:", brute_force_guarantee(flat, a0).value)
