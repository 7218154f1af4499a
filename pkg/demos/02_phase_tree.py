"""
Binary phase tree for several relays
====================================

Each level of the tree holds a positive block (the destination can decode)
and a negative block (it cannot). Correctly read ACKs and misread NACKs stop
the block; the other outcome hands the next phase to the next relay.
"""

# %%
from increlay import build_phase_tree, expected_phases, expected_phases_tree

profile = [0.6, 0.85]  # P_SD, P_R1D
tree = build_phase_tree(profile, p=0.9, num_relays=2)

for leaf in tree.leaves():
    print(f"{' * '.join(leaf.path):32s} prob={leaf.probability:.4f}  phases={leaf.multiplier}")

print("E(N) =", expected_phases_tree(tree))
print("leaves sum to", tree.total_probability())

# %%
# Worthless feedback: the profile stops mattering
# ------------------------------------------------
# At p = 1/2 every level extends with probability 1/2 whatever happened at
# the destination, so E(N) = 2 - 2**-K and approaches 2 as relays are added.
import numpy as np

rng = np.random.default_rng(0)
for k in (1, 2, 3, 5, 10, 20):
    print(k, expected_phases(rng.random(k), 0.5, k))
