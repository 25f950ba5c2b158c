# %% [markdown]
# # Iterating toward fixed points
#
# Three iterations on the same maps: plain repetition of one map, the
# center-of-the-orbit-tail iteration, and the two-ball regularity iteration.

# %%
from fractions import Fraction

from ofl.actions import Action
from ofl.solvers import SolverConfig, lifschitz_iteration, orbit_center_iteration, picard
from ofl.spaces import IntervalSpace

cases = {
    "square": (Action(IntervalSpace(), ["square"]), 0.9, 1.5),
    "sign flip a=3/5": (Action(IntervalSpace(-1, 1, rational_share=0.5), [{"name": "sa", "a": "3/5"}]),
                        Fraction(1, 2), 1.8),
    "step": (Action(IntervalSpace(), ["step"]), 0.3, 1.9),
}
for label, (act, x0, k) in cases.items():
    cfg = SolverConfig(k=k, max_iter=300)
    for solver in (picard, orbit_center_iteration, lifschitz_iteration):
        tr = solver(act, x0, cfg)
        print(f"{label:16s} {tr.method:13s} {str(tr.outcome):28s} steps={len(tr.steps) - 1:4d} "
              f"residual={tr.steps[-1]['residual']:.2e}")

# %% [markdown]
# The regularity iteration shrinks the estimated orbit radius geometrically
# when the orbit constant is below the space's characteristic (2 on a line).
# The step map sits at 2 and the iteration stalls.

# %%
tr = lifschitz_iteration(cases["square"][0], 0.9, SolverConfig(k=1.5))
for s in tr.steps[:8]:
    print(f"j={s['j']:2d} r_est={s['r_est']:.4f} alpha={s.get('alpha') or float('nan'):.3f}")
