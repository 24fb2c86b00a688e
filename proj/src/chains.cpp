#include "bstlimit/chains.hpp"

#include <cmath>

#include "bstlimit/error.hpp"

namespace bstlimit {

BstBuilder::BstBuilder(double first_key) : labels_{first_key} {}

BstBuilder::Placement BstBuilder::insert(double key) {
  BinaryTree::Index i = 0;
  double lo = 0.0;
  double hi = 1.0;
  for (;;) {
    const double label = labels_[i];
    if (key == label) raise(ErrorCode::DuplicateKey, "key " + std::to_string(key) + " repeats");
    const int dir = key < label ? 0 : 1;
    (dir == 0 ? hi : lo) = label;
    const auto c = tree_.child_index(i, dir);
    if (c == BinaryTree::npos) {
      const auto node = tree_.insert_child(i, dir);
      labels_.push_back(key);
      return {node, lo, hi};
    }
    i = c;
  }
}

BinaryTree bst_from_keys(std::span<const double> keys) {
  if (keys.empty()) raise(ErrorCode::InvalidParameter, "need at least one key");
  BstBuilder builder(keys.front());
  for (std::size_t i = 1; i < keys.size(); ++i) builder.insert(keys[i]);
  return std::move(builder).release();
}

BinaryTree::Index bst_step(BinaryTree& x, RngStream& rng) {
  const auto e = x.external_at(rng.below(x.external_count()));
  return x.insert_child(e.parent, e.dir);
}

DrivingMeasure DrivingMeasure::constant(double p) {
  if (!(p >= 0.0 && p <= 1.0)) raise(ErrorCode::InvalidParameter, "split must lie in [0,1]");
  return DrivingMeasure([p](NodeId) { return p; });
}

double DrivingMeasure::mass(NodeId u) const {
  double m = 1.0;
  for (int j = 0; j < u.depth(); ++j) {
    const double p = split(u.prefix(j));
    m *= u.step(j) == 0 ? p : 1.0 - p;
  }
  return m;
}

BinaryTree::Index dst_step(BinaryTree& x, const DrivingMeasure& mu, RngStream& rng) {
  BinaryTree::Index i = 0;
  for (;;) {
    const int dir = rng.uniform() < mu.split(x.node(i)) ? 0 : 1;
    const auto c = x.child_index(i, dir);
    if (c == BinaryTree::npos) return x.insert_child(i, dir);
    i = c;
  }
}

namespace {

void require_positive(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) raise(ErrorCode::InvalidParameter, "z must be positive");
}

// Per-depth proposal weights count_d * z^(d - dmax); relative scale avoids
// overflow for large z.
std::vector<double> depth_weights(const BinaryTree& x, double z) {
  const int dmax = x.max_external_depth();
  std::vector<double> w(dmax + 1, 0.0);
  const double lz = std::log(z);
  for (int d = 1; d <= dmax; ++d) {
    const auto count = x.external_bucket(d).size();
    if (count != 0) w[d] = static_cast<double>(count) * std::exp((d - dmax) * lz);
  }
  return w;
}

}  // namespace

double frontier_generating_function(const BinaryTree& x, double z) {
  double s = 0.0;
  for (int d = 1; d <= x.max_external_depth(); ++d) {
    s += static_cast<double>(x.external_bucket(d).size()) * std::pow(z, d);
  }
  return s;
}

BinaryTree::Index tilted_step(BinaryTree& x, double z, RngStream& rng) {
  require_positive(z);
  const auto w = depth_weights(x, z);
  double total = 0.0;
  for (const double v : w) total += v;

  double r = rng.uniform() * total;
  int d = 1;
  std::size_t offset = 0;
  const int dmax = x.max_external_depth();
  for (; d < dmax; ++d) {
    if (r < w[d]) break;
    r -= w[d];
    offset += x.external_bucket(d).size();
  }
  while (x.external_bucket(d).empty()) {  // rounding landed past the last weight
    --d;
    offset -= x.external_bucket(d).size();
  }
  const auto bucket = x.external_bucket(d);
  const std::size_t slot = rng.below(bucket.size());
  const std::size_t proposed = offset + slot;

  const double n = static_cast<double>(x.size());
  if (rng.uniform() < 2.0 * z / (n + 2.0 * z)) {
    const auto e = BinaryTree::decode_external(bucket[slot]);
    return x.insert_child(e.parent, e.dir);
  }
  std::size_t k = rng.below(x.size());
  if (k >= proposed) ++k;
  const auto e = x.external_at(k);
  return x.insert_child(e.parent, e.dir);
}

double tilted_transition_probability(const BinaryTree& x, double z, NodeId v) {
  require_positive(z);
  if (!x.is_external(v)) raise(ErrorCode::NotExternal, "node " + v.to_string() + " is not external");
  const double s = frontier_generating_function(x, z);
  const double n = static_cast<double>(x.size());
  return (s + std::pow(z, v.depth()) * (2.0 * z - 1.0)) / (s * (n + 2.0 * z));
}

std::vector<std::pair<NodeId, double>> tilted_transition_law(const BinaryTree& x, double z) {
  require_positive(z);
  const double s = frontier_generating_function(x, z);
  const double n = static_cast<double>(x.size());
  std::vector<std::pair<NodeId, double>> law;
  law.reserve(x.external_count());
  for (const auto& v : x.externals()) {
    law.emplace_back(v, (s + std::pow(z, v.depth()) * (2.0 * z - 1.0)) / (s * (n + 2.0 * z)));
  }
  return law;
}

}  // namespace bstlimit
