"""
Parsing, printing and rewriting formulas
========================================

"""

# Formulas are parsed from a small surface syntax: #p is a propositional
# hole, box is the modality, quantifiers bind individual variables.
from modalfix import parse, format_formula

a = parse("box (#p -> forall u. (Q(u) -> box #p))")
print("parsed:   ", format_formula(a))

# Parsing and printing round trip: the printed text parses back to the
# same tree.
assert parse(format_formula(a)) == a

# Occurrence depths count the boxes above each hole occurrence.
from modalfix import occurrence_depths, is_modalized

print("depths:   ", occurrence_depths(a, "p"))
print("modalized:", is_modalized(a, "p"))

# Truncation at level n discards everything behind n nested boxes by
# replacing the subformula with truth.
from modalfix import truncate

for n in range(3):
    print(f"truncate {n}:", format_formula(truncate(a, n)))

# Depth indexed substitution replaces each hole occurrence according to
# how many boxes sit above it.
from modalfix import Atom, subst_at_depths

b0, b1, b2 = Atom("B0"), Atom("B1"), Atom("B2")
print("subst:    ", format_formula(subst_at_depths(a, "p", [b0, b1, b2])))

# Plain substitution is the depth uniform special case. It refuses to
# capture free variables of the substituted formula.
from modalfix import CaptureError, subst_prop

print("uniform:  ", format_formula(subst_prop(a, "p", parse("box R"))))
try:
    subst_prop(a, "p", parse("Q(u)"))
except CaptureError as e:
    print("capture:  ", e)
