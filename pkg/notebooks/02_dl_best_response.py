# %% [markdown]
# # Lexicographic best responses
#
# An agent that cares about its top house first, then the next one, can
# still profit from lying. The best lie is built house by house along its
# true order, keeping everything already secured.

# %%
from psmanip import AssignmentProblem, brute_force_best_response, dl_best_response, dl_rounds

problem = AssignmentProblem.from_names(
    ["1", "2"],
    [f"h{k}" for k in range(1, 7)],
    [["h1", "h2", "h3", "h4", "h5", "h6"], ["h3", "h6", "h4", "h5", "h1", "h2"]],
)

for r in dl_rounds(problem):
    shares = [str(r.alloc[h]) for h in problem.prefs[0][: r.i]]
    print(f"round {r.i}:", problem.house_names(r.list), shares)

# %% [markdown]
# The opponent wants h3 first, so agent 1 grabs half of it right away and
# still gets h1 and h2 in full afterwards. Reporting truthfully would lose h3
# entirely.

# %%
report, alloc = dl_best_response(problem)
print(problem.house_names(report), alloc.to_lists()[0])
oracle = brute_force_best_response(problem, "dl")
print("oracle agrees:", oracle.best_allocations == (tuple(alloc[0]),))
print("truth-telling optimal:", oracle.truthful_is_optimal)
