# %% [markdown]
# # Two agents: halves of houses
#
# With two agents every share is 0, 1/2 or 1. Split each house into two
# halves and let the agents pick halves alternately: the picks, averaged,
# are exactly the eating outcome.

# %%
import random

from psmanip import (
    brute_force_best_response,
    eu_best_response_2,
    eu_value,
    half_house_reduction,
    ps,
    random_profile,
    sequential_allocation,
)
from psmanip.experiments import random_utility

rng = random.Random(0)
problem = random_profile(2, 6, rng)
inst, halves = half_house_reduction(problem)
picked = sequential_allocation(inst)
print(halves.average(picked) == ps(problem)[0])

# %% [markdown]
# Manipulating picking sequences is easy with two agents, and that carries
# over: one report is optimal for every utility consistent with the
# manipulator's order.

# %%
report, alloc = eu_best_response_2(problem)
print("report:", problem.house_names(report))
truthful = ps(problem)[0][0]
for _ in range(5):
    u = random_utility(problem.prefs[0], rng)
    best = brute_force_best_response(problem, "eu", u).best_value
    print(eu_value(truthful, u), "->", eu_value(alloc[0], u), "oracle", best)
