"""
Local smoothing: answering one query from its neighborhood
==========================================================

Every learner in this library answers the same kind of question: among
a family of candidate answers, which one disagrees least with the
observed cases that count as its counterparts?  Local smoothing is the
smallest possible instance of that question.  The candidate answers are
constant values at a single query point, the counterparts are the
nearby training cases, and the disagreement is the absolute gap between
the answer and the neighborhood's mean feedback.
"""

import numpy as np

from minconsist import (
    FeatureVector,
    FixedRadius,
    KNearest,
    NeighborhoodSpec,
    smoothing_case_inconsistency,
    smoothing_counterparts,
    smoothing_fit,
    training_set,
)

# A tiny one-dimensional training set: feedback rises with x, with one
# far-away point that should not influence local answers.
T = training_set([((0.0,), 1.0), ((1.0,), 2.0), ((5.0,), 9.0)])
x0 = FeatureVector.of(0.4)

print("training cases:", [(c.x.values[0], c.y) for c in T.cases])
print("query point:   ", x0.values[0])
print()

# With k = 2 the neighborhood holds the two nearest cases.  The fitted
# answer is their mean feedback, and by construction that answer has
# zero inconsistency against the neighborhood.
spec = NeighborhoodSpec(KNearest(2), "euclidean")
neighborhood = smoothing_counterparts(x0, T, spec)
h = smoothing_fit(x0, T, spec)
print("k=2 neighborhood feedbacks:", neighborhood.feedbacks)
print("fitted answer h(x0):        ", h.value)
print("inconsistency of the fit:   ", smoothing_case_inconsistency(h.value, neighborhood))

# Any other answer does worse.  Scan a dense range of alternatives and
# confirm the fitted value sits at the bottom of the curve.
candidates = np.linspace(-2.0, 10.0, 2001)
curve = np.abs(candidates - np.mean(neighborhood.feedbacks))
print("dense-scan argmin:          ", candidates[np.argmin(curve)])
print()

# A radius neighborhood changes who counts as a counterpart, not the
# fitting rule.  Radius 0.5 around x0 = 0.4 catches only the case at 0.
spec_r = NeighborhoodSpec(FixedRadius(0.5), "euclidean")
neighborhood_r = smoothing_counterparts(x0, T, spec_r)
h_r = smoothing_fit(x0, T, spec_r)
print("radius=0.5 neighborhood feedbacks:", neighborhood_r.feedbacks)
print("fitted answer:                    ", h_r.value)
print()

# Widening the neighborhood pulls the answer toward the global mean,
# outlier included.  That trade-off is the whole k parameter.
for k in (1, 2, 3):
    hk = smoothing_fit(x0, T, NeighborhoodSpec(KNearest(k), "euclidean"))
    print(f"k={k}: h(x0) = {hk.value}")
