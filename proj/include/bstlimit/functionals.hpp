#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bstlimit/limit_tree.hpp"
#include "bstlimit/node.hpp"
#include "bstlimit/tree.hpp"

namespace bstlimit {

using Rational = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------------------
// Harmonic numbers and the entropy-like function C

/// H(n) in floating point.
double harmonic(std::uint64_t n);

/// H(n) as an exact rational (n <= 30).
Rational harmonic_exact(std::uint64_t n);

/// C(s) = 1 + 2 (s ln s + (1-s) ln(1-s)), extended by continuity to C(0) =
/// C(1) = 1.
double c_function(double s);

// ---------------------------------------------------------------------------
// Path length and Wiener index

/// Internal path length: sum of node depths.
std::uint64_t ipl(const BinaryTree& x);

/// The same quantity as sum of subtree sizes minus the node count.
std::uint64_t ipl_via_subtree_sizes(const BinaryTree& x);

/// IPL(x)/n - 2 ln n.
double ipl_centered(const BinaryTree& x);

/// E[Y | F_n] = (IPL + 2n)/(n+1) + 2 - 2 H(n+1).
double ipl_projection(const BinaryTree& x);
Rational ipl_projection_exact(const BinaryTree& x);

/// E[C(xi_u) | F_n] from the Beta posterior of xi_u.
double cond_c_expectation(const BinaryTree& x, NodeId u);

/// Sum over nodes of sigma(x,u)^2.
std::uint64_t sum_sigma_squared(const BinaryTree& x);

/// Wiener index from subtree sizes: n IPL + n^2 - sum sigma^2.
std::uint64_t wiener(const BinaryTree& x);

/// WI/n^2 - 2 ln n.
double wiener_centered(const BinaryTree& x);

/// E[Z | F_n] = sum_u (sigma+1)(sigma+2) / ((n+1)(n+2)) + 6/(n+2).
double wiener_projection(const BinaryTree& x);
Rational wiener_projection_exact(const BinaryTree& x);

// ---------------------------------------------------------------------------
// Limit series

/// A truncated series over the limit tree together with an estimate of the
/// omitted part.
struct LimitSeries {
  enum class Kind { Y, Z, W, Sigma };
  Kind kind;
  int truncation_depth;
  double mass_floor;  ///< subtrees of smaller mass were not expanded
  double value;
  double tail_bound;
};

/// Default truncation depth and mass floor of the limit series.
inline constexpr int kDefaultTruncation = 40;
inline constexpr double kDefaultMassFloor = 1e-6;

/// Y = sum over |u| <= K with X(A_u) >= floor of X(A_u) C(xi_u). The tail
/// bound is a one-standard-deviation estimate sqrt(3 kappa sum m^2) over the
/// unexpanded frontier.
LimitSeries y_limit(const SplitField& field, int depth = kDefaultTruncation,
                    double mass_floor = kDefaultMassFloor);

/// Z = sum over the same node set of X(A_u)^2 (root included). Tail bound:
/// the conditional mean 2 sum m^2 of the omitted subtrees.
LimitSeries z_limit(const SplitField& field, int depth = kDefaultTruncation,
                    double mass_floor = kDefaultMassFloor);

/// W = 2 gamma - 3 + Y - Z.
LimitSeries w_limit(const SplitField& field, int depth = kDefaultTruncation,
                    double mass_floor = kDefaultMassFloor);

/// Y, Z and W from a single traversal.
struct LimitTriple {
  LimitSeries y, z, w;
};
LimitTriple limit_series(const SplitField& field, int depth = kDefaultTruncation,
                         double mass_floor = kDefaultMassFloor);

/// kappa = integral of C(s)^2 over (0,1), by adaptive quadrature.
double kappa();

// ---------------------------------------------------------------------------
// Silhouettes

/// Exit level: min{k : v(k) not in x}.
int silhouette(const BinaryTree& x, const Ray& v);

/// sum_k sigma(x, v(k)).
std::uint64_t metric_silhouette(const BinaryTree& x, const Ray& v);

/// E[Sigma(v) | F_n] = (mSil + Sil)/(n+1) + 1/(n+1).
double msil_projection(const BinaryTree& x, const Ray& v);

/// Sigma(v) = sum_{k=1..K} X(A_{v(k)}); tail bound X(A_{v(K)}).
LimitSeries sigma_potential(const SplitField& field, const Ray& v,
                            int depth = kDefaultTruncation);

/// The dyadic rays t = i / grid, i = 0..grid-1 (grid a power of two).
std::vector<Ray> dyadic_grid(std::uint64_t grid);

/// Max over pairs of |Sigma_K(u) - Sigma_K(v)| / d(u,v)^alpha, 0 < alpha < 1.
double holder_quotient(const SplitField& field, double alpha,
                       const std::vector<std::pair<Ray, Ray>>& pairs, int depth);

/// Ray pairs that split at the heaviest node of each level 0..depth-1, each
/// ray continuing along zeros.
std::vector<std::pair<Ray, Ray>> heavy_split_pairs(const SplitField& field, int depth);

// ---------------------------------------------------------------------------
// Profile martingale

/// C(n) = prod_{k=1}^{n-1} (k+1)/(k+2z).
double profile_normalizer(std::uint64_t n, double z);

/// Y_n = sum over the frontier of z^{|u|}, times C(n).
double jabbour_martingale(const BinaryTree& x, double z);

/// Psi_z(x) = sum_u sigma(x,u) z^{|u|}.
double psi_z(const BinaryTree& x, double z);

/// Both sides of Y_n = (2z - 3 + 1/z) Psi_z + (2 - 1/z) n + 1.
std::pair<double, double> yn_identity(const BinaryTree& x, double z);

}  // namespace bstlimit
