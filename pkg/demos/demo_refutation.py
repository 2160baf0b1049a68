"""
Refuting fixed point candidates on chain models
===============================================

"""

# The target here quantifies into the box: A(#p) = forall u. box (#p -> P(u)).
# Unlike the bounded and guarded cases, no single sentence satisfies its
# fixed point equation on all finite chains.
from modalfix import format_formula, refutation_target

target = refutation_target()
print("target:", format_formula(target.formula))

# chain_model(k) is a descending chain of k+1 worlds. World n sees every
# smaller world, its domain is the numerals n..k+2, and P(m) holds at n
# exactly when m differs from n+1.
from modalfix import chain_model, frame_report, validate_model

m = chain_model(2)
assert validate_model(m) == []
print("chain 2 classes:", frame_report(m).classes)
print("domain at world 0:", sorted(m.domains[0]))

# A candidate sentence B is refuted at k when the equation
# B <-> A(B) fails somewhere on chain_model(k). The staged construction
# for height n survives every chain up to n and dies at n + 1.
from modalfix import FixpointTarget, fixpoint_qk, parse, refute_fixpoint

for n in range(4):
    staged = fixpoint_qk(target, n).result
    print(f"stage {n} refuted at k =", refute_fixpoint(staged))

# The refutation table shows the per chain verdicts. Where the equation
# is valid, the candidate's truth alternates along the chain, which is
# why no candidate survives every chain.
from modalfix import refutation_table

for row in refutation_table(parse("box false"), k_max=4):
    print(f"k={row.k} valid={row.valid} failing_world={row.failing_world} "
          f"parity_ok={row.parity_ok}")

# Chains embed into one infinite descending order; a bounded evaluator
# decides sentences there, and agrees with the finite chains.
from modalfix import eval_formula, eval_infinite_chain

sentence = parse("box (exists u. P(u))")
for n in range(3):
    finite = eval_formula(chain_model(4), n, sentence)
    infinite = eval_infinite_chain(n, sentence)
    assert finite == infinite
    print(f"world {n}: finite={finite} infinite={infinite}")
