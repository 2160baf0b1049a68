"""
Kripke models with expanding domains
====================================

"""

# A model is a finite frame with a domain per world. Domains may only
# grow along the accessibility relation.
from modalfix import KripkeModel, validate_model

m = KripkeModel(
    worlds=(0, 1),
    rel=frozenset({(0, 1)}),
    domains={0: frozenset({"a"}), 1: frozenset({"a", "b"})},
    interp={(1, "P"): frozenset({("a",)})},
    sig={"P": 1},
)
assert validate_model(m) == []

# Quantifiers range over the domain of the world of evaluation, so these
# two sentences differ: the universal inside the box sees the larger
# domain of world 1, the universal outside only binds elements of world 0.
from modalfix import eval_formula, parse

print("forall u. box P(u):", eval_formula(m, 0, parse("forall u. box P(u)")))
print("box forall u. P(u):", eval_formula(m, 0, parse("box forall u. P(u)")))

# Validity in a model is truth of the universal closure at every world.
from modalfix import valid_in_model

print("valid box P(u):    ", valid_in_model(m, parse("box P(u)")))

# Frame reports classify the frame and compute world heights.
from modalfix import frame_report

report = frame_report(m)
print("classes:", report.classes, "heights:", report.heights)

# Models serialize to a line based text format and parse back.
from modalfix import format_model, parse_model

text = format_model(m)
print(text)
assert parse_model(text) == m

# Seeded random generation produces reproducible models within bounds.
from modalfix import ModelGenSpec, random_model

spec = ModelGenSpec(
    world_count=(2, 4),
    height_bound=2,
    signature={"P": 1},
    require=frozenset({"transitive", "irreflexive"}),
    seed=7,
)
print("random model, seed 7:", random_model(spec).worlds)
assert random_model(spec) == random_model(spec)

# Exhaustive enumeration visits every model within small bounds once.
from modalfix import enumerate_models

count = sum(1 for _ in enumerate_models(2, 1, {"P": 1}))
print("models with <= 2 worlds, domain size <= 1:", count)
