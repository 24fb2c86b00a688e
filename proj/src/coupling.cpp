#include "bstlimit/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "bstlimit/chains.hpp"
#include "bstlimit/error.hpp"

namespace bstlimit {

namespace {

std::uint64_t fresh_seed_for(std::uint64_t master_seed, std::uint64_t stream_id) {
  return mix64(master_seed ^ mix64(stream_id + 0x510E527FADE682D1ULL));
}

}  // namespace

EtaCoupling::EtaCoupling(std::uint64_t master_seed, std::uint64_t stream_id, std::size_t n,
                         int max_depth)
    : fresh_(fresh_seed_for(master_seed, stream_id)) {
  if (n < 1) raise(ErrorCode::InvalidParameter, "coupling needs n >= 1");
  RngStream rng(master_seed, stream_id);
  std::vector<double> keys(n);
  for (auto& k : keys) k = rng.uniform_open();
  build(keys, max_depth);
}

EtaCoupling::EtaCoupling(const std::vector<double>& keys, std::uint64_t fresh_seed)
    : fresh_(fresh_seed) {
  if (keys.empty()) raise(ErrorCode::InvalidParameter, "coupling needs n >= 1");
  for (const double k : keys) {
    if (!(k > 0.0 && k < 1.0)) raise(ErrorCode::InvalidParameter, "coupling keys must lie in (0,1)");
  }
  build(keys, NodeId::kMaxDepth);
}

void EtaCoupling::build(const std::vector<double>& keys, int max_depth) {
  if (max_depth < 0 || max_depth > NodeId::kMaxDepth) {
    raise(ErrorCode::InvalidParameter, "max_depth outside 0..62");
  }
  BstBuilder builder(keys.front());
  intervals_.reserve(keys.size());
  intervals_.push_back({0.0, 1.0, keys.front()});
  for (std::size_t i = 1; i < keys.size(); ++i) {
    const auto placed = builder.insert(keys[i]);
    if (builder.tree().node(placed.node).depth() > max_depth) {
      raise(ErrorCode::DepthOverflow, "coupled tree exceeds max_depth " + std::to_string(max_depth));
    }
    intervals_.push_back({placed.lo, placed.hi, keys[i]});
  }
  tree_ = std::move(builder).release();
}

double EtaCoupling::xi(NodeId u) const {
  const auto i = tree_.find(u);
  if (!i) return fresh_.xi(u);
  const auto& iv = intervals_[*i];
  return (iv.key - iv.lo) / (iv.hi - iv.lo);
}

double EtaCoupling::mass(NodeId u) const {
  BinaryTree::Index i = 0;
  int j = 0;
  for (; j < u.depth(); ++j) {
    const auto c = tree_.child_index(i, u.step(j));
    if (c == BinaryTree::npos) break;
    i = c;
  }
  if (j == u.depth()) return width(i);
  // The first missing node's gap is already fixed by its parent's key.
  const auto& iv = intervals_[i];
  double m = u.step(j) == 0 ? iv.key - iv.lo : iv.hi - iv.key;
  for (++j; j < u.depth(); ++j) {
    const double p = fresh_.xi(u.prefix(j));
    m *= u.step(j) == 0 ? p : 1.0 - p;
  }
  return m;
}

double sup_discrepancy(const BinaryTree& x, const SplitField& limit, double rho, int depth) {
  if (depth < 0 || depth > NodeId::kMaxDepth) raise(ErrorCode::DepthOverflow, "depth outside 0..62");
  if (!(rho >= 1.0)) raise(ErrorCode::InvalidParameter, "rho must be >= 1");
  const double n = static_cast<double>(x.size());
  std::vector<double> best(depth + 1, 0.0);

  // On-tree nodes, parents before children (insertion order).
  std::vector<double> mass(x.size());
  mass[0] = 1.0;
  for (BinaryTree::Index i = 1; i < x.size(); ++i) {
    const NodeId u = x.node(i);
    const auto p = x.parent_index(i);
    const double s = limit.xi(x.node(p));
    mass[i] = mass[p] * (u.last_step() == 0 ? s : 1.0 - s);
    if (u.depth() <= depth) {
      best[u.depth()] = std::max(best[u.depth()], std::abs(static_cast<double>(x.sigma(i)) / n - mass[i]));
    }
  }

  // Off-tree nodes: |0 - X(A_u)| = X(A_u), decreasing along paths.
  struct Frame {
    NodeId node;
    double mass;
  };
  std::vector<Frame> roots;
  for (int d = 1; d <= std::min(depth, x.max_external_depth()); ++d) {
    for (const auto entry : x.external_bucket(d)) {
      const auto e = BinaryTree::decode_external(entry);
      const double s = limit.xi(x.node(e.parent));
      roots.push_back({x.node(e.parent).child(e.dir), mass[e.parent] * (e.dir == 0 ? s : 1.0 - s)});
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Frame& a, const Frame& b) {
    return a.mass != b.mass ? a.mass < b.mass : a.node < b.node;
  });
  std::vector<Frame> stack = std::move(roots);
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const int d = f.node.depth();
    double floor = best[d];
    for (int k = d + 1; k <= depth; ++k) floor = std::min(floor, best[k]);
    if (f.mass <= floor) continue;
    best[d] = std::max(best[d], f.mass);
    if (d == depth) continue;
    const double p = limit.xi(f.node);
    stack.push_back({f.node.child(1), f.mass * (1.0 - p)});
    stack.push_back({f.node.child(0), f.mass * p});
  }

  double total = 0.0;
  double scale = 1.0;
  for (int k = 1; k <= depth; ++k) {
    scale *= rho;
    total += scale * best[k];
  }
  return total;
}

}  // namespace bstlimit
