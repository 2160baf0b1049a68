"""
Command line interface tour
===========================

"""

# Every library entry point is also reachable from the command line.
# This script shells out the way a user would.
import subprocess
import sys


def run(*args: str) -> str:
    out = subprocess.run(
        [sys.executable, "-m", "modalfix", *args], capture_output=True, text=True
    )
    assert out.returncode == 0, out.stderr
    return out.stdout


# Compute a staged fixed point, machine readable.
print(run("fixpoint", "--logic", "qk-bot", "--n", "1",
          "box (#p -> forall u. (Q(u) -> box #p))", "--format", "lines"))

# Compute a guarded fixed point.
print(run("fixpoint", "--logic", "qgl-sigma", "~box #p"))

# Generate a model file, then evaluate a formula in it.
model_text = run("gen-model", "--worlds", "2:3", "--height", "2",
                 "--pred", "P:1", "--seed", "11")
with open("/tmp/demo.model", "w") as fh:
    fh.write(model_text)
print(run("check", "forall u. box P(u)", "--model", "/tmp/demo.model", "--frame"))

# Recheck a fixed point equation over enumerated and random models.
print(run("verify-fixpoint", "~box #p", "--n", "1", "--max-worlds", "2",
          "--max-domain", "1", "--random", "50", "--seed", "3"))

# Search the chains for a refutation of a candidate.
print(run("refute", "box false", "--k-max", "6"))

# Emit a chain countermodel file.
print(run("mk", "--k", "1"))
