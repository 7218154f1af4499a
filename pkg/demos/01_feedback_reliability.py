"""
How feedback reliability changes the number of transmission phases
====================================================================

One relay, one-bit ACK/NACK feedback over a binary symmetric channel with
reliability ``p``. We sweep ``p`` for a family of source-destination failure
probabilities and look at the mean number of phases per source message.
"""

# %%
# The closed form and its two cross-checks
# ----------------------------------------
import numpy as np

from increlay import (
    build_phase_tree,
    expected_phases_matrix,
    expected_phases_one_relay,
    expected_phases_tree,
    phase_derivative_sign,
)

p_grid = np.linspace(0, 1, 11)
pbar_family = [0.0, 0.25, 0.5, 0.75, 1.0]

print("p     " + "  ".join(f"P̄={q:<4}" for q in pbar_family))
for p in p_grid:
    row = [expected_phases_one_relay(q, p) for q in pbar_family]
    print(f"{p:4.1f}  " + "  ".join(f"{v:6.3f}" for v in row))

# Tree and matrix routes give the same numbers.
q, p = 0.3, 0.85
print(expected_phases_one_relay(q, p),
      expected_phases_tree(build_phase_tree([1 - q], p, 1)),
      expected_phases_matrix([1 - q], p, 1))

# %%
# Every line passes through (0.5, 1.5); the slope sign depends on P̄_SD
# ----------------------------------------------------------------------
for q in pbar_family:
    print(q, phase_derivative_sign(q), expected_phases_one_relay(q, 0.5))

# %%
# Plot (needs matplotlib)
# -----------------------
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(5, 4))
    fine = np.linspace(0, 1, 101)
    for q in np.linspace(0, 1, 11):
        style = "-." if q == 0.5 else "-"
        ax.plot(fine, [expected_phases_one_relay(q, p) for p in fine], style, lw=1)
    ax.set_xlabel("feedback reliability p")
    ax.set_ylabel("E(N)")
    ax.set_ylim(0.95, 2.05)
    fig.savefig("feedback_reliability.png", dpi=120, bbox_inches="tight")
    print("saved feedback_reliability.png")
