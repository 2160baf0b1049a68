"""
Staged fixed points on models of bounded height
===============================================

"""

# For a target A(#p) with every hole occurrence under a box, the staged
# construction produces a sentence that satisfies the fixed point
# equation on every model of height at most n.
from modalfix import FixpointTarget, fixpoint_qk, parse

target = FixpointTarget(parse("box (#p -> forall u. (Q(u) -> box #p))"), "p")
trace = fixpoint_qk(target, 2)
for key, value in trace.report_lines():
    print(f"{key:8s} {value}")

# The equation itself: result <-> A(result), closed universally.
from modalfix import iff, subst_prop, universal_closure

equation = universal_closure(iff(trace.result, subst_prop(target.formula, "p", trace.result)))

# Check it over every model with up to 3 worlds, domains of size 1 and
# height at most 2.
from modalfix import enumerate_models, valid_in_model

models = list(enumerate_models(3, 1, {"P": 1, "Q": 1}, max_height=2))
assert all(valid_in_model(m, equation) for m in models)
print(f"equation valid on all {len(models)} enumerated models of height <= 2")

# Seeded random models of bounded height agree.
from modalfix import ModelGenSpec, random_model

spec = dict(world_count=(1, 4), height_bound=2, signature={"P": 1, "Q": 1})
pool = [random_model(ModelGenSpec(**spec, seed=i)) for i in range(200)]
assert all(valid_in_model(m, equation) for m in pool)
print(f"equation valid on {len(pool)} random models of height <= 2")

# On taller models a staged equation can fail: stage n solves height n
# only. The target ~box #p makes this visible on a 4-world chain.
from modalfix import KripkeModel

neg = FixpointTarget(parse("~box #p"), "p")
neg_result = fixpoint_qk(neg, 2).result
neg_equation = universal_closure(
    iff(neg_result, subst_prop(neg.formula, "p", neg_result))
)
assert all(valid_in_model(m, neg_equation) for m in pool)
chain4 = KripkeModel(
    worlds=(0, 1, 2, 3),
    rel=frozenset({(1, 0), (2, 1), (3, 2)}),
    domains={w: frozenset({"a"}) for w in range(4)},
    interp={},
    sig={},
)
print("~box #p stage 2, height <= 2 pool: valid")
print("~box #p stage 2, height 3 chain:  ", valid_in_model(chain4, neg_equation))
