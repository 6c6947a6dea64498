# %% [markdown]
# # Simultaneous eating, exactly
#
# Three agents, three houses. Every agent eats its favourite remaining house
# at unit speed, and the fraction eaten is its probability of getting it.

# %%
from fractions import Fraction

from psmanip import AssignmentProblem, UtilityFunction, eu_value, format_rational, ps

problem = AssignmentProblem.from_names(
    ["1", "2", "3"],
    ["h1", "h2", "h3"],
    [["h1", "h2", "h3"], ["h2", "h1", "h3"], ["h2", "h3", "h1"]],
)
alloc, trace = ps(problem)
for agent, row in zip(problem.agents, alloc.to_lists()):
    print(agent, row)

# %% [markdown]
# Agents 2 and 3 share h2 until it runs out at t = 1/2. Agent 2 then joins
# agent 1 on h1, which is gone at 3/4.

# %%
for t, batch in trace.events:
    print(f"t={format_rational(t)}:", problem.house_names(batch), "exhausted")
print({problem.houses[h]: format_rational(t) for h, t in trace.start.items()})

# %% [markdown]
# Agent 1 can do better by pretending to like h2 most. Rows are now
# incomparable under stochastic dominance, but with utilities 7, 6, 0 the lie pays.

# %%
lie, _ = ps(problem.with_report(problem.house_ids(["h2", "h1", "h3"])))
u = UtilityFunction((7, 6, 0))
print("truthful", eu_value(alloc[0], u), "manipulated", eu_value(lie[0], u))
assert eu_value(lie[0], u) == Fraction(11, 2)
