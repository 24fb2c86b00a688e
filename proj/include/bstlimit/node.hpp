#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace bstlimit {

/// A node of the complete binary tree: a finite 0-1 word. Step j (0-based)
/// is stored in bit j of `path`; bits at positions >= depth are zero.
class NodeId {
 public:
  static constexpr int kMaxDepth = 62;

  constexpr NodeId() noexcept = default;

  static constexpr NodeId root() noexcept { return {}; }

  /// Validating constructor from a packed word.
  static NodeId from_bits(std::uint64_t path, int depth);

  /// Parses the text encoding: "e" for the root, otherwise a 0/1 string.
  static NodeId parse(std::string_view text);

  constexpr int depth() const noexcept { return depth_; }
  constexpr std::uint64_t path() const noexcept { return path_; }
  constexpr bool is_root() const noexcept { return depth_ == 0; }

  /// Step j in {0,1}, 0 <= j < depth.
  constexpr int step(int j) const noexcept { return static_cast<int>((path_ >> j) & 1U); }

  /// Last step; meaningless for the root.
  constexpr int last_step() const noexcept { return step(depth_ - 1); }

  NodeId child(int dir) const;
  NodeId parent() const;

  /// The ancestor at depth k (k <= depth).
  constexpr NodeId prefix(int k) const noexcept {
    NodeId p;
    p.depth_ = static_cast<std::uint8_t>(k);
    p.path_ = k == 0 ? 0 : (path_ & (~0ULL >> (64 - k)));
    return p;
  }

  /// Prefix order: *this <= other.
  constexpr bool is_prefix_of(const NodeId& other) const noexcept {
    return depth_ <= other.depth_ && other.prefix(depth_).path_ == path_;
  }

  /// Injective 64-bit key: a leading one bit above the path marks the depth.
  constexpr std::uint64_t key() const noexcept { return (1ULL << depth_) | path_; }

  std::string to_string() const;

  friend constexpr bool operator==(const NodeId&, const NodeId&) noexcept = default;
  friend constexpr auto operator<=>(const NodeId& a, const NodeId& b) noexcept {
    return a.key() <=> b.key();
  }

 private:
  std::uint64_t path_ = 0;
  std::uint8_t depth_ = 0;
};

/// An infinite 0-1 sequence; bits are indexed from 1 as v_1, v_2, ...
class Ray {
 public:
  enum class Kind { Dyadic, ConstantTail, Seeded };

  /// Binary expansion of t = numerator / 2^exponent in [0,1), terminating in
  /// zeros.
  static Ray dyadic(std::uint64_t numerator, int exponent);

  /// `word` followed by tail_bit repeated forever.
  static Ray constant_tail(NodeId word, int tail_bit);

  /// Pseudo-random bits drawn from a keyed mix of the seed.
  static Ray seeded(std::uint64_t seed);

  /// v_k for k >= 1.
  int bit_at(int k) const noexcept;

  /// The node v(k) = (v_1, ..., v_k), k <= 62.
  NodeId prefix(int k) const;

  Kind kind() const noexcept { return kind_; }

  /// Text form used in CSV columns, e.g. "dyadic:3/8", "tail:01+0", "seed:7".
  std::string to_string() const;

 private:
  Ray(Kind kind, std::uint64_t a, int b, NodeId word) noexcept
      : kind_(kind), a_(a), b_(b), word_(word) {}

  Kind kind_;
  std::uint64_t a_;
  int b_;
  NodeId word_;
};

/// Last common ancestor.
NodeId lca(const NodeId& u, const NodeId& v) noexcept;
NodeId lca(const NodeId& u, const Ray& v);
inline NodeId lca(const Ray& u, const NodeId& v) { return lca(v, u); }
/// Throws CommonPrefixExceedsCap when the rays agree on more than `cap`
/// leading bits.
NodeId lca(const Ray& u, const Ray& v, int cap);

/// Left-to-right embedding of the nodes into (0,1).
double beta(const NodeId& u) noexcept;

/// The ends metric: 2^{-|u^v|} - (2^{-|u|} + 2^{-|v|})/2, with 2^{-inf} = 0
/// for rays.
double ends_distance(const NodeId& u, const NodeId& v) noexcept;
double ends_distance(const NodeId& u, const Ray& v);
inline double ends_distance(const Ray& u, const NodeId& v) { return ends_distance(v, u); }
double ends_distance(const Ray& u, const Ray& v, int cap);

}  // namespace bstlimit

template <>
struct std::hash<bstlimit::NodeId> {
  std::size_t operator()(const bstlimit::NodeId& u) const noexcept {
    return std::hash<std::uint64_t>{}(u.key());
  }
};
