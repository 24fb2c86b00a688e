#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "bstlimit/rng.hpp"
#include "bstlimit/tree.hpp"

namespace bstlimit {

/// Routes real keys into a growing tree by comparison. Labels live in the
/// builder and are dropped with it; the tree itself carries shape only.
class BstBuilder {
 public:
  /// Where a key landed: the new node and the gap (lo, hi) between the
  /// neighbouring earlier keys, with 0 and 1 as sentinels.
  struct Placement {
    BinaryTree::Index node;
    double lo;
    double hi;
  };

  /// Starts the tree with `first_key` at the root.
  explicit BstBuilder(double first_key);

  /// Inserts the next key; throws DuplicateKey on an exact tie.
  Placement insert(double key);

  const BinaryTree& tree() const noexcept { return tree_; }
  BinaryTree release() && { return std::move(tree_); }
  double label(BinaryTree::Index i) const noexcept { return labels_[i]; }

 private:
  BinaryTree tree_;
  std::vector<double> labels_;
};

/// Shape trajectory of the BST algorithm on the given keys (final tree).
BinaryTree bst_from_keys(std::span<const double> keys);

/// Inserts a uniformly chosen external node. Returns the new node index.
BinaryTree::Index bst_step(BinaryTree& x, RngStream& rng);

/// Driving measure of a digital search tree, given by its left-split ratios
/// p_u = mu(A_{u0}) / mu(A_u).
class DrivingMeasure {
 public:
  explicit DrivingMeasure(std::function<double(NodeId)> split) : split_(std::move(split)) {}

  static DrivingMeasure constant(double p);

  double split(NodeId u) const { return split_(u); }

  /// mu(A_u) as the product of split factors along the root path.
  double mass(NodeId u) const;

 private:
  std::function<double(NodeId)> split_;
};

/// DST step: follow a lazily sampled mu-ray from the root to the first
/// external node.
BinaryTree::Index dst_step(BinaryTree& x, const DrivingMeasure& mu, RngStream& rng);

/// h-transformed BST step with parameter z > 0: propose an external node with
/// probability proportional to z^{|u|}, accept it with probability
/// 2z / (n + 2z), otherwise pick uniformly among the other n external nodes.
BinaryTree::Index tilted_step(BinaryTree& x, double z, RngStream& rng);

/// Transition probability of the tilted chain into x + {v}, v external.
double tilted_transition_probability(const BinaryTree& x, double z, NodeId v);

/// The full tilted transition law over the frontier, in canonical order.
std::vector<std::pair<NodeId, double>> tilted_transition_law(const BinaryTree& x, double z);

/// Sum over the frontier of z^{|u|}.
double frontier_generating_function(const BinaryTree& x, double z);

}  // namespace bstlimit
