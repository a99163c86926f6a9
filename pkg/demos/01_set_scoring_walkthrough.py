"""Worked example of the set-level score.

Three predictions are compared against three references. Every pair gets a
sentence-level score, the maximum-weight one-to-one matching is solved, and
the matched weights are averaged. One strong output cannot claim more than
one reference, which is the whole point.
"""

import numpy as np

from multiscore import ScoreMatrix, brute_force_matching, max_weight_matching
from multiscore.corpus import bundled_json

fixture = bundled_json("figure_walkthrough.json")
weights = np.array(fixture["scores"])

print("pairwise score matrix (rows = predictions, cols = references):")
print(weights)

matrix = ScoreMatrix(weights)
matching = max_weight_matching(matrix)

print("\noptimal matching:")
for (row, col), w in zip(matching.edges, matching.edge_weights):
    print(f"  prediction {row + 1} -> reference {col + 1}   weight {w:.0f}")

score = matching.total / len(matching.edges)
print(f"\nset score = ({'+'.join(f'{w:.0f}' for w in matching.edge_weights)}) / 3 = {score:.2f}")

# the exhaustive oracle agrees (all 6 assignments enumerated)
oracle = brute_force_matching(matrix)
assert oracle.edges == matching.edges and oracle.total == matching.total
print("exhaustive enumeration confirms the optimum.")

# the assignment constraint is what penalizes repetition: replace the set
# with three copies of its single best prediction (row 3, scores 58/22/38)
# and two copies get forced onto references they match poorly
best_row = int(weights.max(axis=1).argmax())
cloned = max_weight_matching(ScoreMatrix(np.tile(weights[best_row], (3, 1))))
print(f"\nthree copies of prediction {best_row + 1} score only "
      f"{cloned.total / 3:.2f} under the same matching rule.")
