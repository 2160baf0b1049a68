"""
Fixed points for guarded targets
================================

"""

# A guarded (sigma) target is built from boxed formulas by conjunction,
# disjunction and existential quantification, so every hole occurrence
# sits inside a box. For such targets an exact fixed point exists.
from modalfix import FixpointTarget, format_formula, parse, sigma_fixpoint

core = FixpointTarget(parse("box #p"), "p")
result = sigma_fixpoint(core)
print("box #p   fixes at:", format_formula(result.result))

# Boolean combinations of guarded parts and hole free parts are solved
# by decomposing, solving the guarded parts simultaneously and
# substituting back.
from modalfix import boolean_sigma_fixpoint

for text in ["~box #p", "box (#p -> R) -> R", "box #p & box ~#p"]:
    res = boolean_sigma_fixpoint(FixpointTarget(parse(text), "p"))
    print(f"{text:20s} fixes at:", format_formula(res.result))

# The solution satisfies the fixed point equation on finite transitive
# irreflexive models.
from modalfix import (
    ModelGenSpec,
    iff,
    random_model,
    subst_prop,
    universal_closure,
    valid_in_model,
)

f = parse("~box #p")
fp = boolean_sigma_fixpoint(FixpointTarget(f, "p")).result
equation = universal_closure(iff(fp, subst_prop(f, "p", fp)))
spec = dict(
    world_count=(1, 5),
    height_bound=3,
    signature={"P": 1, "R": 0},
    require=frozenset({"transitive", "irreflexive"}),
)
pool = [random_model(ModelGenSpec(**spec, seed=i)) for i in range(300)]
assert all(valid_in_model(m, equation) for m in pool)
print(f"equation valid on {len(pool)} random transitive irreflexive models")

# Simultaneous systems: several targets sharing their holes are solved
# together, one formula per hole.
from modalfix import simultaneous_sigma_fixpoints

system = [parse("box #q"), parse("box (#p & #q)")]
solutions = simultaneous_sigma_fixpoints(system, ["p", "q"])
for hole, sol in zip("pq", solutions):
    print(f"solution for #{hole}:", format_formula(sol))

# Closed guarded sentences prove themselves: S implies box S on
# transitive models.
from modalfix import Box, Implies, is_sigma

s = parse("exists u. box P(u)")
assert is_sigma(s)
self_prover = universal_closure(Implies(s, Box(s)))
assert all(valid_in_model(m, self_prover) for m in pool)
print("S -> box S valid for S =", format_formula(s))
