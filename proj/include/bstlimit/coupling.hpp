#pragma once

#include <cstdint>
#include <vector>

#include "bstlimit/limit_tree.hpp"
#include "bstlimit/tree.hpp"

namespace bstlimit {

/// Joint realization of the BST trajectory and its limit from one stream of
/// uniform keys.
///
/// Every inserted node u records the gap (lo, hi) of the earlier keys that
/// its key fell into. The gap width is X(A_u), and the relative position of
/// the key inside the gap is xi_u. Nodes that were never inserted get fresh
/// split ratios from an independent seeded field, which is their exact
/// conditional law given the keys seen so far.
class EtaCoupling final : public SplitField {
 public:
  struct Interval {
    double lo;
    double hi;
    double key;
  };

  /// Builds n nodes from keys of RngStream(master_seed, stream_id). Throws
  /// DepthOverflow if the tree grows deeper than max_depth (<= 62).
  EtaCoupling(std::uint64_t master_seed, std::uint64_t stream_id, std::size_t n,
              int max_depth = NodeId::kMaxDepth);

  /// Builds the coupling from explicit keys in (0,1).
  EtaCoupling(const std::vector<double>& keys, std::uint64_t fresh_seed);

  const BinaryTree& tree() const noexcept { return tree_; }
  std::size_t size() const noexcept { return tree_.size(); }

  const Interval& interval(BinaryTree::Index i) const noexcept { return intervals_[i]; }

  /// Gap width of an inserted node: X(A_u).
  double width(BinaryTree::Index i) const noexcept { return intervals_[i].hi - intervals_[i].lo; }

  double xi(NodeId u) const override;

  /// For inserted nodes this is the gap width itself; otherwise the product
  /// from the deepest inserted ancestor.
  double mass(NodeId u) const override;

 private:
  void build(const std::vector<double>& keys, int max_depth);

  BinaryTree tree_;
  std::vector<Interval> intervals_;
  LimitTree fresh_;
};

/// Truncated rho-weighted discrepancy sum_{k=1..depth} rho^k max_{|u|=k}
/// |X_n(u) - X(A_u)|, with X_n(u) = sigma(x,u)/n on the tree and 0 off it.
double sup_discrepancy(const BinaryTree& x, const SplitField& limit, double rho, int depth);

}  // namespace bstlimit
