"""
Decision trees: one partition, many local contests
==================================================

The tree learner splits an ordinal feature space into rectangular
subdomains.  Prediction inside a subdomain is then exactly the same
two-candidate contest k-NN runs, except the counterparts are the
training cases sharing the leaf rather than the metric neighbors.
The tree itself is grown greedily: each split must strictly decrease
label impurity, and growth stops on depth, size, or purity.
"""

from minconsist import (
    FeatureVector,
    TreeConfig,
    TreeLeaf,
    TreeNode,
    dtree_build,
    dtree_counterparts,
    dtree_predict,
    training_set,
)

# Two ordinal features with levels 0..3.  The label is 1 in the upper
# right corner of the grid, 0 elsewhere, with one noisy case.
T = training_set([
    ((0, 0), 0), ((1, 0), 0), ((2, 0), 0), ((3, 0), 0),
    ((0, 2), 0), ((1, 2), 0), ((2, 2), 1), ((3, 2), 1),
    ((0, 3), 0), ((1, 3), 1), ((2, 3), 1), ((3, 3), 1),
])

partition = dtree_build(T, TreeConfig(max_depth=3))


def describe(node, indent=""):
    if isinstance(node, TreeLeaf):
        labels = [T.cases[i].y for i in node.case_indices]
        print(f"{indent}leaf {node.leaf_id}: cases {node.case_indices}, labels {labels}")
        return
    assert isinstance(node, TreeNode)
    print(f"{indent}split on feature {node.feature} at <= {node.threshold}")
    describe(node.left, indent + "  ")
    describe(node.right, indent + "  ")


print("grown partition:")
describe(partition.root)
print()

# Each query routes to exactly one leaf; the leaf's cases are the
# counterparts, and the answer is the leaf's majority label.
for point in ((0, 0), (3, 3), (1, 3), (2, 2)):
    x0 = FeatureVector(point)
    label, report = dtree_predict(x0, partition, T)
    pool = dtree_counterparts(x0, partition, T)
    print(f"query {point}: answer {label}, "
          f"counterpart labels {pool.feedbacks}, inconsistency {report.total:.4f}")
print()

# Tighter stopping rules trade fidelity for simplicity.  Depth 1 forces
# a single split, so the noisy corner can no longer be isolated.
shallow = dtree_build(T, TreeConfig(max_depth=1))
print("depth-1 partition:")
describe(shallow.root)
