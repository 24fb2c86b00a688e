#include "bstlimit/tree.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "bstlimit/error.hpp"

namespace bstlimit {

BinaryTree::BinaryTree() : buckets_(NodeId::kMaxDepth + 2) {
  nodes_.push_back(Node{NodeId::root(), npos, {kExternalFlag | 0, kExternalFlag | 1}, 1});
  buckets_[1] = {0, 1};
}

std::optional<BinaryTree::Index> BinaryTree::find(NodeId u) const noexcept {
  Index i = 0;
  for (int j = 0; j < u.depth(); ++j) {
    const Index c = nodes_[i].child[u.step(j)];
    if (c & kExternalFlag) return std::nullopt;
    i = c;
  }
  return i;
}

bool BinaryTree::is_external(NodeId u) const noexcept {
  if (u.is_root()) return false;
  const auto p = find(u.parent());
  return p && (nodes_[*p].child[u.last_step()] & kExternalFlag);
}

BinaryTree::Index BinaryTree::require(NodeId u) const {
  const auto i = find(u);
  if (!i) raise(ErrorCode::NotInTree, "node " + u.to_string() + " is not in the tree");
  return *i;
}

BinaryTree::Index BinaryTree::insert(NodeId u) {
  if (u.is_root()) raise(ErrorCode::NotExternal, "the root is always in the tree");
  const auto p = find(u.parent());
  if (!p || !(nodes_[*p].child[u.last_step()] & kExternalFlag)) {
    raise(ErrorCode::NotExternal, "node " + u.to_string() + " is not an external node");
  }
  return insert_child(*p, u.last_step());
}

BinaryTree::Index BinaryTree::insert_child(Index parent, int dir) {
  Node& p = nodes_[parent];
  const Index slot_word = p.child[dir];
  const NodeId id = p.id.child(dir);  // throws DepthOverflow at depth 62
  const int d = id.depth();

  // Remove the frontier element from bucket d.
  auto& bucket = buckets_[d];
  const Index slot = slot_word & ~kExternalFlag;
  const std::uint32_t moved = bucket.back();
  bucket[slot] = moved;
  nodes_[moved >> 1].child[moved & 1U] = kExternalFlag | slot;
  bucket.pop_back();

  const auto index = static_cast<Index>(nodes_.size());
  auto& next = buckets_[d + 1];
  nodes_.push_back(Node{id, parent,
                        {kExternalFlag | static_cast<Index>(next.size()),
                         kExternalFlag | static_cast<Index>(next.size() + 1)},
                        1});
  next.push_back(index * 2);
  next.push_back(index * 2 + 1);
  nodes_[parent].child[dir] = index;

  for (Index a = parent; a != npos; a = nodes_[a].parent) ++nodes_[a].sigma;
  if (d > height_) height_ = d;
  return index;
}

std::uint64_t BinaryTree::subtree_size(NodeId u) const noexcept {
  const auto i = find(u);
  return i ? nodes_[*i].sigma : 0;
}

BinaryTree::ExternalRef BinaryTree::external_at(std::size_t k) const noexcept {
  for (int d = 1; d <= height_ + 1; ++d) {
    const auto& bucket = buckets_[d];
    if (k < bucket.size()) return decode_external(bucket[k]);
    k -= bucket.size();
  }
  return {npos, 0};
}

std::span<const std::uint32_t> BinaryTree::external_bucket(int d) const noexcept {
  if (d < 1 || d >= static_cast<int>(buckets_.size())) return {};
  return buckets_[d];
}

std::vector<NodeId> BinaryTree::externals() const {
  std::vector<NodeId> out;
  out.reserve(external_count());
  for (int d = 1; d <= height_ + 1; ++d) {
    for (const auto e : buckets_[d]) out.push_back(external_node(decode_external(e)));
  }
  return out;
}

std::vector<NodeId> BinaryTree::insertion_log() const {
  std::vector<NodeId> log;
  log.reserve(nodes_.size());
  for (const auto& n : nodes_) log.push_back(n.id);
  return log;
}

BinaryTree BinaryTree::prefix(std::size_t n) const {
  if (n < 1 || n > nodes_.size()) raise(ErrorCode::InvalidParameter, "prefix size out of range");
  BinaryTree t;
  for (std::size_t i = 1; i < n; ++i) {
    const Node& node = nodes_[i];
    t.insert_child(node.parent, node.id.last_step());
  }
  return t;
}

int BinaryTree::fill_level() const noexcept {
  for (int d = 1; d <= height_ + 1; ++d) {
    if (!buckets_[d].empty()) return d - 1;
  }
  return height_;
}

Profiles BinaryTree::profiles() const {
  Profiles p;
  p.internal.assign(height_ + 1, 0);
  p.external.assign(height_ + 2, 0);
  for (const auto& n : nodes_) ++p.internal[n.id.depth()];
  for (int d = 1; d <= height_ + 1; ++d) p.external[d] = buckets_[d].size();
  return p;
}

double BinaryTree::edge_weight(NodeId u, double rho) const {
  if (u.is_root()) raise(ErrorCode::RootHasNoParent, "the root has no incoming edge");
  const Index i = require(u);
  return std::pow(rho, u.depth()) * static_cast<double>(nodes_[i].sigma) /
         static_cast<double>(nodes_.size());
}

double BinaryTree::root_distance(NodeId u, double rho) const {
  require(u);
  const double n = static_cast<double>(nodes_.size());
  double d = 0.0;
  Index i = 0;
  double scale = 1.0;
  for (int j = 0; j < u.depth(); ++j) {
    i = nodes_[i].child[u.step(j)];
    scale *= rho;
    d += scale * static_cast<double>(nodes_[i].sigma) / n;
  }
  return d;
}

double BinaryTree::distance(NodeId u, NodeId v, double rho) const {
  return root_distance(u, rho) + root_distance(v, rho) - 2.0 * root_distance(lca(u, v), rho);
}

std::uint64_t BinaryTree::canonical_distance(NodeId u, NodeId v) const {
  require(u);
  require(v);
  return static_cast<std::uint64_t>(u.depth() + v.depth() - 2 * lca(u, v).depth());
}

void BinaryTree::write(std::ostream& out) const {
  for (const auto& n : nodes_) out << n.id.to_string() << '\n';
}

BinaryTree BinaryTree::read(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<BinaryTree> tree;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!tree) {
      if (line != "e") raise(ErrorCode::ParseError, "trajectory must start with the root 'e'");
      tree.emplace();
      continue;
    }
    tree->insert(NodeId::parse(line));
  }
  if (!tree) raise(ErrorCode::ParseError, "empty trajectory");
  return std::move(*tree);
}

void BinaryTree::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot open " + path + " for writing");
  write(out);
  if (!out) raise(ErrorCode::IoError, "write failed for " + path);
}

BinaryTree BinaryTree::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path);
  return read(in);
}

bool operator==(const BinaryTree& a, const BinaryTree& b) noexcept {
  if (a.nodes_.size() != b.nodes_.size()) return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
    if (a.nodes_[i].id != b.nodes_[i].id) return false;
  }
  return true;
}

}  // namespace bstlimit
