#pragma once

#include <cstdint>
#include <vector>

#include "bstlimit/node.hpp"
#include "bstlimit/rng.hpp"
#include "bstlimit/tree.hpp"

namespace bstlimit {

/// A realization of the limit tree: split ratios xi_u in (0,1) for every
/// node, and the masses X(A_u) they generate multiplicatively.
class SplitField {
 public:
  virtual ~SplitField() = default;

  /// Left-split ratio X(A_{u0}) / X(A_u).
  virtual double xi(NodeId u) const = 0;

  /// X(A_u): product along the root path of xi (left steps) or 1 - xi
  /// (right steps).
  virtual double mass(NodeId u) const;
};

/// The limit tree as a deterministic seeded field of independent uniforms.
/// xi(u) is a keyed hash of (seed, u); no state is kept, so queries are
/// order-independent and safe from concurrent readers.
class LimitTree final : public SplitField {
 public:
  explicit LimitTree(std::uint64_t seed) noexcept : seed_(seed) {}

  double xi(NodeId u) const override { return to_open_unit(keyed_mix(seed_, u.key())); }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Exact per-level maxima of the masses, levels 0..depth, found by
/// branch-and-bound (masses decrease along paths).
struct LevelMaxima {
  std::vector<double> value;    ///< value[k] = max over |u| = k of X(A_u)
  std::vector<NodeId> argmax;   ///< a node attaining value[k]
};

LevelMaxima level_maxima(const SplitField& field, int depth);

/// Truncated rho-norm: sum_{k=1..depth} rho^k max_{|u|=k} X(A_u).
double rho_norm(const SplitField& field, double rho, int depth);

/// Prefix of length `depth` of a ray drawn from the limit measure: left at u
/// with probability xi(u).
NodeId sample_ray(const SplitField& field, RngStream& rng, int depth);

/// E[X(A_u) | F_n] = (sigma(x,u) + 1) / (n + 1) for u in x.
double projected_mass(const BinaryTree& x, NodeId u);

/// Constants of the height/fill and weighted-metric phase transitions.
struct Constants {
  double rho0;         ///< smaller root of 2e ln(rho) = rho
  double alpha_minus;  ///< smaller root of x ln(2e/x) = 1
  double alpha_plus;   ///< larger root of x ln(2e/x) = 1
  double alpha0;       ///< log2(rho0)
  double euler_gamma;
};

Constants constants();

/// Large-deviation envelope of the associated branching random walk.
struct BranchingEnvelope {
  double m_tilde;  ///< 2 a e^{1-a}
  double theta;    ///< optimizing parameter 1/a - 1
  double m_theta;  ///< m(theta) = 2 / (1 + theta)
};

BranchingEnvelope branching_envelope(double a);

/// m(theta) = 2 / (1 + theta).
double branching_mean(double theta);

}  // namespace bstlimit
