# %% [markdown]
# # Why expected-utility manipulation is hard in general
#
# A 3SAT formula where every literal occurs exactly twice becomes an
# assignment problem with 18 synchronised copies of one gadget. The
# manipulator encodes a truth assignment in the order it eats two houses
# per variable, and only satisfying assignments reach the target utility.

# %%
import itertools

from psmanip import evaluate_assignment, reduce_3sat, timing_audit
from psmanip.hardness import example_formula

formula = example_formula()
inst = reduce_3sat(formula)
print(inst.problem.n, "agents,", inst.problem.m, "houses; target", inst.target)

# %%
for bits in itertools.product((True, False), repeat=formula.n):
    value, ok = evaluate_assignment(inst, bits)
    audit = timing_audit(inst, bits)
    print(
        "".join("T" if b else "F" for b in bits),
        "sat" if formula.satisfied_by(bits) else "   ",
        "reaches T" if ok else "misses T ",
        "alone on prize for", audit.solo_prize_time,
    )

# %% [markdown]
# A falsified clause lets three rival agents reach the prize after 24/27
# (printed in lowest terms as 8/9). Otherwise the manipulator eats it alone
# for 25/27, and that single 1/27 is what the target measures.
