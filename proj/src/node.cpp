#include "bstlimit/node.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "bstlimit/error.hpp"
#include "bstlimit/rng.hpp"

namespace bstlimit {

NodeId NodeId::from_bits(std::uint64_t path, int depth) {
  if (depth < 0 || depth > kMaxDepth) {
    raise(ErrorCode::DepthOverflow, "node depth " + std::to_string(depth) + " outside 0..62");
  }
  if (depth < 64 && (path >> depth) != 0) {
    raise(ErrorCode::InvalidParameter, "path has bits beyond the node depth");
  }
  NodeId u;
  u.path_ = path;
  u.depth_ = static_cast<std::uint8_t>(depth);
  return u;
}

NodeId NodeId::parse(std::string_view text) {
  if (text == "e") return root();
  if (text.empty()) raise(ErrorCode::ParseError, "empty node word");
  if (text.size() > static_cast<std::size_t>(kMaxDepth)) {
    raise(ErrorCode::DepthOverflow, "node word longer than 62 steps");
  }
  std::uint64_t path = 0;
  for (std::size_t j = 0; j < text.size(); ++j) {
    const char c = text[j];
    if (c != '0' && c != '1') {
      raise(ErrorCode::ParseError, "invalid character in node word '" + std::string(text) + "'");
    }
    path |= static_cast<std::uint64_t>(c - '0') << j;
  }
  return from_bits(path, static_cast<int>(text.size()));
}

NodeId NodeId::child(int dir) const {
  if (depth_ >= kMaxDepth) {
    raise(ErrorCode::DepthOverflow, "child of a depth-62 node");
  }
  NodeId c;
  c.depth_ = static_cast<std::uint8_t>(depth_ + 1);
  c.path_ = path_ | (static_cast<std::uint64_t>(dir & 1) << depth_);
  return c;
}

NodeId NodeId::parent() const {
  if (depth_ == 0) raise(ErrorCode::RootHasNoParent, "the root has no parent");
  return prefix(depth_ - 1);
}

std::string NodeId::to_string() const {
  if (depth_ == 0) return "e";
  std::string s(depth_, '0');
  for (int j = 0; j < depth_; ++j) s[j] = static_cast<char>('0' + step(j));
  return s;
}

Ray Ray::dyadic(std::uint64_t numerator, int exponent) {
  if (exponent < 0 || exponent > NodeId::kMaxDepth) {
    raise(ErrorCode::InvalidParameter, "dyadic exponent outside 0..62");
  }
  if (numerator >> exponent != 0) {
    raise(ErrorCode::InvalidParameter, "dyadic ray needs numerator < 2^exponent");
  }
  return Ray(Kind::Dyadic, numerator, exponent, NodeId{});
}

Ray Ray::constant_tail(NodeId word, int tail_bit) {
  if (tail_bit != 0 && tail_bit != 1) raise(ErrorCode::InvalidParameter, "tail bit must be 0 or 1");
  return Ray(Kind::ConstantTail, 0, tail_bit, word);
}

Ray Ray::seeded(std::uint64_t seed) { return Ray(Kind::Seeded, seed, 0, NodeId{}); }

int Ray::bit_at(int k) const noexcept {
  switch (kind_) {
    case Kind::Dyadic:
      // k-th binary digit of t = a / 2^b.
      return k <= b_ ? static_cast<int>((a_ >> (b_ - k)) & 1U) : 0;
    case Kind::ConstantTail:
      return k <= word_.depth() ? word_.step(k - 1) : b_;
    case Kind::Seeded:
      return static_cast<int>(keyed_mix(a_, static_cast<std::uint64_t>(k)) >> 63);
  }
  return 0;
}

NodeId Ray::prefix(int k) const {
  if (k < 0 || k > NodeId::kMaxDepth) raise(ErrorCode::DepthOverflow, "ray prefix deeper than 62");
  std::uint64_t path = 0;
  for (int j = 1; j <= k; ++j) path |= static_cast<std::uint64_t>(bit_at(j)) << (j - 1);
  return NodeId::from_bits(path, k);
}

std::string Ray::to_string() const {
  switch (kind_) {
    case Kind::Dyadic:
      return "dyadic:" + std::to_string(a_) + "/" + std::to_string(std::uint64_t{1} << b_);
    case Kind::ConstantTail:
      return "tail:" + word_.to_string() + "+" + std::to_string(b_);
    case Kind::Seeded:
      return "seed:" + std::to_string(a_);
  }
  return {};
}

NodeId lca(const NodeId& u, const NodeId& v) noexcept {
  const int diff = std::countr_zero(u.path() ^ v.path());
  return u.prefix(std::min({u.depth(), v.depth(), diff}));
}

NodeId lca(const NodeId& u, const Ray& v) {
  int k = 0;
  while (k < u.depth() && u.step(k) == v.bit_at(k + 1)) ++k;
  return u.prefix(k);
}

NodeId lca(const Ray& u, const Ray& v, int cap) {
  if (cap < 0 || cap > NodeId::kMaxDepth) raise(ErrorCode::InvalidParameter, "cap outside 0..62");
  for (int k = 1; k <= cap + 1; ++k) {
    if (u.bit_at(k) != v.bit_at(k)) return u.prefix(k - 1);
  }
  raise(ErrorCode::CommonPrefixExceedsCap,
        "rays share more than " + std::to_string(cap) + " leading bits");
}

double beta(const NodeId& u) noexcept {
  double b = 0.5;
  for (int j = 1; j <= u.depth(); ++j) {
    b += (2.0 * u.step(j - 1) - 1.0) * std::ldexp(1.0, -(j + 1));
  }
  return b;
}

double ends_distance(const NodeId& u, const NodeId& v) noexcept {
  const int k = lca(u, v).depth();
  return std::ldexp(1.0, -k) - 0.5 * (std::ldexp(1.0, -u.depth()) + std::ldexp(1.0, -v.depth()));
}

double ends_distance(const NodeId& u, const Ray& v) {
  const int k = lca(u, v).depth();
  return std::ldexp(1.0, -k) - 0.5 * std::ldexp(1.0, -u.depth());
}

double ends_distance(const Ray& u, const Ray& v, int cap) {
  return std::ldexp(1.0, -lca(u, v, cap).depth());
}

}  // namespace bstlimit
