# %% [markdown]
# # How often does lying pay?
#
# Random strict profiles, best responses for every agent. With as many
# houses as agents nobody can gain lexicographically. The share of
# manipulable profiles climbs quickly as houses are added.

# %%
from psmanip import ExperimentConfig, run_experiment

report = run_experiment(ExperimentConfig(ns=(2, 3), ms=(2, 3, 4, 5, 6), trials=60, seed=1))
print(report.table())
print(report.trend())

# %% [markdown]
# Expected utility with random cardinal utilities: the welfare columns count
# deviations that raise (W+) or lower (W-) the total.

# %%
eu = run_experiment(ExperimentConfig(ns=(2,), ms=(3, 4, 5, 6), trials=60, seed=1, criterion="eu"))
print(eu.table())
