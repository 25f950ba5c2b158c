# %% [markdown]
# # How round are the balls?
#
# Two geometric constants govern the fixed-point results: the Lifschitz
# characteristic (how much a two-ball lens can be absorbed by a smaller ball)
# and the normal-structure coefficient (how small the inner radius of an
# admissible set is relative to its diameter).  Both are estimated here.

# %%
from ofl.constants import estimate_kappa, estimate_normal_coeff
from ofl.spaces import make_space

for desc in ({"type": "interval"}, {"type": "euclidean", "n": 2}, {"type": "maxnorm", "n": 2}):
    sp = make_space(desc)
    b = estimate_kappa(sp, budget=20_000)
    ref = sp.reference_constants().get("kappa")
    print(f"{sp.kind:10s} kappa in [{b.lower:.4f}, {b.upper:.4f}]  known value {ref}")

# %% [markdown]
# The upper end comes with a certificate: two points of the lens exactly 2r
# apart, so no ball of radius below r contains the lens.

# %%
sp = make_space({"type": "maxnorm", "n": 2})
cert = estimate_kappa(sp, budget=5_000).certificate
print(cert.to_json(sp), "replays:", cert.replay(sp))

# %%
for desc in ({"type": "interval"}, {"type": "maxnorm", "n": 3}, {"type": "euclidean", "n": 2}):
    est = estimate_normal_coeff(make_space(desc), n_sets=50)
    print(f"{desc['type']:10s} normal-structure estimate {est.value:.4f}")
