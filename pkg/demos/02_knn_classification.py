"""
k-nearest-neighbor classification as a two-candidate contest
============================================================

For binary labels the family of candidate answers at a query point has
exactly two members: answer 0 and answer 1.  Each candidate is scored
by its disagreement with the k nearest training cases, and the lower
score wins.  That contest reproduces the classical majority vote, with
one extra nicety: ties at the k-th distance extend the neighborhood
instead of depending on sort order, and a split vote resolves to 0
because candidate 0 is tried first.
"""

import numpy as np

from minconsist import FeatureVector, knn_predict, training_set
from minconsist.oracle import brute_knn_majority

# Six points on a line, labels switching at x = 2.5.
T = training_set([
    ((0.0,), 0), ((1.0,), 0), ((2.0,), 0),
    ((3.0,), 1), ((4.0,), 1), ((5.0,), 1),
])

print("training labels by position:", [c.y for c in T.cases])
print()

# Sweep a query across the line and watch the answer flip.
for q in (0.5, 2.2, 2.5, 2.8, 4.6):
    label, report = knn_predict(FeatureVector.of(q), T, k=3)
    print(f"query {q:+.1f}: answer {label}, inconsistency {report.total:.4f}")
print()

# The midpoint query at 2.5 is equidistant from 2 and 3, so k = 3
# extends to four neighbors with a 2-2 vote.  The declared tie rule
# gives 0, and the two candidate scores are equal.
mid = FeatureVector.of(2.5)
label, report = knn_predict(mid, T, k=3)
print("tied query at 2.5 -> answer", label,
      "(inconsistency", f"{report.total})")
print()

# An independent majority-vote oracle, written with plain counting,
# agrees everywhere.  Seeded random queries keep the check honest.
rng = np.random.default_rng(7)
queries = rng.uniform(-1.0, 6.0, size=200)
agree = sum(
    1 for q in queries
    if knn_predict(FeatureVector.of(float(q)), T, k=3)[0]
    == brute_knn_majority(FeatureVector.of(float(q)), T, k=3)
)
print(f"agreement with brute-force majority on {len(queries)} random queries:",
      f"{agree}/{len(queries)}")
