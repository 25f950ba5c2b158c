# %% [markdown]
# # Three Lipschitz constants, one sample
#
# A map can be badly discontinuous and still behave well along its orbits.
# This script measures the uniform, orbit and strong-orbit constants of a few
# interval maps on one shared sample and checks that they nest as expected.

# %%
from ofl.actions import Action
from ofl.analysis import SamplePlan, analyze, check_hierarchy, check_star
from ofl.spaces import IntervalSpace

iv = IntervalSpace()
plan = SamplePlan(seed=0, n_pairs=128, horizon=32)

for name in ("contraction", "square", "step"):
    rep = analyze(Action(iv, [name]), plan)
    print(f"{name:12s} uniform={rep.k_uniform.value:10.4g} orbit={rep.k_orbit.value:.4g} "
          f"strong={rep.k_strong.value:.4g} nested={check_hierarchy(rep).passed}")

# %% [markdown]
# The squaring map (with 1 sent to 0) has no uniform constant at all: pairs
# straddling the jump at 1 give arbitrarily large ratios.  Its orbit constant
# stays bounded, and the weaker tail condition holds already with k = 1.

# %%
sq = Action(iv, ["square"])
star = check_star(sq, 1.0, SamplePlan(n_pairs=2000, horizon=16, n_words=8))
print("tail condition at k=1:", "pass" if star.passed else "fail", "on", star.n_gated, "gated pairs")

# %% [markdown]
# The step map (everything below 1 goes to 1, and 1 goes to 0) sits exactly at
# orbit constant 2; the pair (1/2, 1) attains it.

# %%
step = Action(iv, ["step"])
est = analyze(step, SamplePlan(n_pairs=1, horizon=8, extra_pairs=[(0.5, 1.0)], derived=False)).k_orbit
print("step map orbit constant:", est.value, "at", (est.witness["x"], est.witness["y"]))
