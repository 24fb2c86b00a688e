#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bstlimit/node.hpp"

namespace bstlimit {

/// Node and external-node counts per depth.
struct Profiles {
  std::vector<std::uint64_t> internal;  ///< w(k), k = 0..height
  std::vector<std::uint64_t> external;  ///< v(k), k = 0..height+1
};

/// A finite, nonempty, prefix-stable node set with maintained subtree sizes.
///
/// Nodes are stored in insertion order, so node index i is the (i+1)-th
/// inserted node and index 0 is the root. Each node keeps its parent and
/// child indices; an absent child slot instead records where that external
/// node sits in its per-depth frontier bucket, which makes removal from the
/// frontier O(1) (swap-remove).
class BinaryTree {
 public:
  using Index = std::uint32_t;
  static constexpr Index npos = ~Index{0};

  /// A frontier element, identified by its (present) parent and direction.
  struct ExternalRef {
    Index parent;
    int dir;
  };

  /// The one-node tree {root}.
  BinaryTree();

  static BinaryTree singleton() { return {}; }

  std::size_t size() const noexcept { return nodes_.size(); }

  std::optional<Index> find(NodeId u) const noexcept;
  bool contains(NodeId u) const noexcept { return find(u).has_value(); }
  bool is_external(NodeId u) const noexcept;

  /// Adds the external node u; throws NotExternal unless u is in the frontier.
  Index insert(NodeId u);

  /// Adds the external child `dir` of node `parent`. Throws DepthOverflow when
  /// the child would be deeper than 62.
  Index insert_child(Index parent, int dir);

  /// sigma(x, u): number of tree nodes v with u <= v; 0 for u off the tree.
  std::uint64_t subtree_size(NodeId u) const noexcept;

  NodeId node(Index i) const noexcept { return nodes_[i].id; }
  std::uint64_t sigma(Index i) const noexcept { return nodes_[i].sigma; }
  Index parent_index(Index i) const noexcept { return nodes_[i].parent; }
  /// Child index, or npos when that child is external.
  Index child_index(Index i, int dir) const noexcept {
    const Index c = nodes_[i].child[dir];
    return (c & kExternalFlag) ? npos : c;
  }
  /// sigma of child `dir` of node i (0 when external).
  std::uint64_t child_sigma(Index i, int dir) const noexcept {
    const Index c = child_index(i, dir);
    return c == npos ? 0 : nodes_[c].sigma;
  }

  /// Frontier size; always size() + 1.
  std::size_t external_count() const noexcept { return nodes_.size() + 1; }

  /// The k-th external node in the canonical order (by depth, then bucket
  /// position). The order changes with insertions.
  ExternalRef external_at(std::size_t k) const noexcept;

  /// External nodes at depth d (1 <= d <= 63) in bucket order.
  std::span<const std::uint32_t> external_bucket(int d) const noexcept;
  static ExternalRef decode_external(std::uint32_t entry) noexcept {
    return {entry >> 1, static_cast<int>(entry & 1U)};
  }

  /// NodeId of a frontier element; throws DepthOverflow for depth 63.
  NodeId external_node(ExternalRef e) const { return nodes_[e.parent].id.child(e.dir); }

  /// All external nodes (throws DepthOverflow if any sits at depth 63).
  std::vector<NodeId> externals() const;

  /// The deepest depth with a nonempty frontier bucket.
  int max_external_depth() const noexcept { return height_ + 1; }

  /// Nodes in insertion order.
  std::vector<NodeId> insertion_log() const;

  /// The tree after its first n insertions (1 <= n <= size()).
  BinaryTree prefix(std::size_t n) const;

  int height() const noexcept { return height_; }
  int fill_level() const noexcept;
  Profiles profiles() const;

  /// Weighted subtree-size edge length rho^{|u|} sigma(x,u) / sigma(x,root)
  /// of the edge from parent(u) to u.
  double edge_weight(NodeId u, double rho) const;

  /// Distance from the root in the rho-weighted subtree-size metric.
  double root_distance(NodeId u, double rho) const;

  /// Tree distance via the root distances and the last common ancestor.
  double distance(NodeId u, NodeId v, double rho) const;

  /// Graph distance (every edge has length 1).
  std::uint64_t canonical_distance(NodeId u, NodeId v) const;

  /// One node word per line in insertion order, root written as "e".
  void write(std::ostream& out) const;
  static BinaryTree read(std::istream& in);
  void save(const std::string& path) const;
  static BinaryTree load(const std::string& path);

  friend bool operator==(const BinaryTree& a, const BinaryTree& b) noexcept;

 private:
  static constexpr Index kExternalFlag = Index{1} << 31;

  struct Node {
    NodeId id;
    Index parent;
    Index child[2];  // node index, or kExternalFlag | slot in the bucket
    std::uint32_t sigma;
  };

  Index require(NodeId u) const;

  std::vector<Node> nodes_;
  // buckets_[d]: frontier elements at depth d, encoded as parent * 2 + dir.
  std::vector<std::vector<std::uint32_t>> buckets_;
  int height_ = 0;
};

}  // namespace bstlimit
