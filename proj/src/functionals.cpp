#include "bstlimit/functionals.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "bstlimit/chains.hpp"
#include "bstlimit/error.hpp"

namespace bstlimit {

double harmonic(std::uint64_t n) {
  if (n <= 1000) {
    double h = 0.0;
    for (std::uint64_t i = n; i >= 1; --i) h += 1.0 / static_cast<double>(i);
    return h;
  }
  // Asymptotic expansion; the omitted term is below 1/(252 n^6).
  const double x = static_cast<double>(n);
  const double inv2 = 1.0 / (x * x);
  return std::log(x) + std::numbers::egamma + 0.5 / x - inv2 / 12.0 + inv2 * inv2 / 120.0;
}

Rational harmonic_exact(std::uint64_t n) {
  Rational h = 0;
  for (std::uint64_t i = 1; i <= n; ++i) h += Rational(1, i);
  return h;
}

namespace {

double xlogx(double s) { return s > 0.0 ? s * std::log(s) : 0.0; }

void require_z(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) raise(ErrorCode::InvalidParameter, "z must be positive");
}

}  // namespace

double c_function(double s) {
  if (!(s >= 0.0 && s <= 1.0)) raise(ErrorCode::InvalidParameter, "C(s) needs s in [0,1]");
  return 1.0 + 2.0 * (xlogx(s) + xlogx(1.0 - s));
}

std::uint64_t ipl(const BinaryTree& x) {
  std::uint64_t total = 0;
  for (BinaryTree::Index i = 0; i < x.size(); ++i) total += static_cast<std::uint64_t>(x.node(i).depth());
  return total;
}

std::uint64_t ipl_via_subtree_sizes(const BinaryTree& x) {
  std::uint64_t total = 0;
  for (BinaryTree::Index i = 0; i < x.size(); ++i) total += x.sigma(i);
  return total - x.size();
}

double ipl_centered(const BinaryTree& x) {
  const double n = static_cast<double>(x.size());
  return static_cast<double>(ipl(x)) / n - 2.0 * std::log(n);
}

double ipl_projection(const BinaryTree& x) {
  const double n = static_cast<double>(x.size());
  return (static_cast<double>(ipl(x)) + 2.0 * n) / (n + 1.0) + 2.0 - 2.0 * harmonic(x.size() + 1);
}

Rational ipl_projection_exact(const BinaryTree& x) {
  const std::uint64_t n = x.size();
  return Rational(ipl(x) + 2 * n, n + 1) + 2 - 2 * harmonic_exact(n + 1);
}

double cond_c_expectation(const BinaryTree& x, NodeId u) {
  std::uint64_t s0 = 0;
  std::uint64_t s1 = 0;
  if (const auto i = x.find(u)) {
    s0 = x.child_sigma(*i, 0);
    s1 = x.child_sigma(*i, 1);
  }
  const auto tau = [](std::uint64_t s) { return static_cast<double>(s + 1) * harmonic(s + 1); };
  const std::uint64_t m = s0 + s1 + 2;
  return 1.0 + 2.0 * (tau(s0) + tau(s1)) / static_cast<double>(m) - 2.0 * harmonic(m);
}

std::uint64_t sum_sigma_squared(const BinaryTree& x) {
  std::uint64_t total = 0;
  for (BinaryTree::Index i = 0; i < x.size(); ++i) total += x.sigma(i) * x.sigma(i);
  return total;
}

std::uint64_t wiener(const BinaryTree& x) {
  const std::uint64_t n = x.size();
  return n * ipl(x) + n * n - sum_sigma_squared(x);
}

double wiener_centered(const BinaryTree& x) {
  const double n = static_cast<double>(x.size());
  return static_cast<double>(wiener(x)) / (n * n) - 2.0 * std::log(n);
}

double wiener_projection(const BinaryTree& x) {
  const double n = static_cast<double>(x.size());
  double sum = 0.0;
  for (BinaryTree::Index i = 0; i < x.size(); ++i) {
    const double s = static_cast<double>(x.sigma(i));
    sum += (s + 1.0) * (s + 2.0);
  }
  return sum / ((n + 1.0) * (n + 2.0)) + 6.0 / (n + 2.0);
}

Rational wiener_projection_exact(const BinaryTree& x) {
  const std::uint64_t n = x.size();
  Rational sum = 0;
  for (BinaryTree::Index i = 0; i < x.size(); ++i) {
    const std::uint64_t s = x.sigma(i);
    sum += Rational((s + 1) * (s + 2));
  }
  return sum / Rational((n + 1) * (n + 2)) + Rational(6, n + 2);
}

double kappa() {
  static const double value = [] {
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate([](double s) {
      const double c = c_function(s);
      return c * c;
    }, 0.0, 1.0, 1e-12);
  }();
  return value;
}

LimitTriple limit_series(const SplitField& field, int depth, double mass_floor) {
  if (depth < 0 || depth > NodeId::kMaxDepth) raise(ErrorCode::DepthOverflow, "depth outside 0..62");
  if (!(mass_floor >= 0.0)) raise(ErrorCode::InvalidParameter, "mass floor must be >= 0");

  struct Frame {
    NodeId node;
    double mass;
  };
  double y = 0.0;
  double z = 0.0;
  double frontier_sq = 0.0;
  std::vector<Frame> stack{{NodeId::root(), 1.0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const double p = field.xi(f.node);
    y += f.mass * c_function(p);
    z += f.mass * f.mass;
    const Frame kids[2] = {{NodeId{}, f.mass * p}, {NodeId{}, f.mass * (1.0 - p)}};
    for (int dir = 1; dir >= 0; --dir) {
      const double m = kids[dir].mass;
      if (f.node.depth() < depth && m >= mass_floor) {
        stack.push_back({f.node.child(dir), m});
      } else {
        frontier_sq += m * m;
      }
    }
  }

  LimitTriple t;
  t.y = {LimitSeries::Kind::Y, depth, mass_floor, y, std::sqrt(3.0 * kappa() * frontier_sq)};
  t.z = {LimitSeries::Kind::Z, depth, mass_floor, z, 3.0 * frontier_sq};
  t.w = {LimitSeries::Kind::W, depth, mass_floor, 2.0 * std::numbers::egamma - 3.0 + y - z,
         t.y.tail_bound + t.z.tail_bound};
  return t;
}

LimitSeries y_limit(const SplitField& field, int depth, double mass_floor) {
  return limit_series(field, depth, mass_floor).y;
}

LimitSeries z_limit(const SplitField& field, int depth, double mass_floor) {
  return limit_series(field, depth, mass_floor).z;
}

LimitSeries w_limit(const SplitField& field, int depth, double mass_floor) {
  return limit_series(field, depth, mass_floor).w;
}

int silhouette(const BinaryTree& x, const Ray& v) {
  BinaryTree::Index i = 0;
  for (int k = 1;; ++k) {
    const auto c = x.child_index(i, v.bit_at(k));
    if (c == BinaryTree::npos) return k;
    i = c;
  }
}

std::uint64_t metric_silhouette(const BinaryTree& x, const Ray& v) {
  std::uint64_t total = 0;
  BinaryTree::Index i = 0;
  for (int k = 1;; ++k) {
    const auto c = x.child_index(i, v.bit_at(k));
    if (c == BinaryTree::npos) return total;
    total += x.sigma(c);
    i = c;
  }
}

double msil_projection(const BinaryTree& x, const Ray& v) {
  const double n = static_cast<double>(x.size());
  return (static_cast<double>(metric_silhouette(x, v)) + silhouette(x, v) + 1.0) / (n + 1.0);
}

LimitSeries sigma_potential(const SplitField& field, const Ray& v, int depth) {
  if (depth < 0 || depth > NodeId::kMaxDepth) raise(ErrorCode::DepthOverflow, "depth outside 0..62");
  double total = 0.0;
  double m = 1.0;
  NodeId u = NodeId::root();
  for (int k = 1; k <= depth; ++k) {
    const double p = field.xi(u);
    const int bit = v.bit_at(k);
    m *= bit == 0 ? p : 1.0 - p;
    u = u.child(bit);
    total += m;
  }
  return {LimitSeries::Kind::Sigma, depth, 0.0, total, m};
}

std::vector<Ray> dyadic_grid(std::uint64_t grid) {
  if (grid == 0 || !std::has_single_bit(grid) || grid > (std::uint64_t{1} << NodeId::kMaxDepth)) {
    raise(ErrorCode::InvalidParameter, "grid must be a power of two");
  }
  const int exponent = std::countr_zero(grid);
  std::vector<Ray> rays;
  rays.reserve(grid);
  for (std::uint64_t i = 0; i < grid; ++i) rays.push_back(Ray::dyadic(i, exponent));
  return rays;
}

double holder_quotient(const SplitField& field, double alpha,
                       const std::vector<std::pair<Ray, Ray>>& pairs, int depth) {
  if (!(alpha > 0.0 && alpha < 1.0)) raise(ErrorCode::InvalidParameter, "alpha must lie in (0,1)");
  double q = 0.0;
  for (const auto& [u, v] : pairs) {
    double d = 0.0;
    try {
      d = ends_distance(u, v, NodeId::kMaxDepth);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CommonPrefixExceedsCap) throw;
      continue;  // indistinguishable at this resolution
    }
    const double diff = std::abs(sigma_potential(field, u, depth).value -
                                 sigma_potential(field, v, depth).value);
    q = std::max(q, diff / std::pow(d, alpha));
  }
  return q;
}

std::vector<std::pair<Ray, Ray>> heavy_split_pairs(const SplitField& field, int depth) {
  if (depth < 1 || depth > NodeId::kMaxDepth) raise(ErrorCode::DepthOverflow, "depth outside 1..62");
  const auto lm = level_maxima(field, depth - 1);
  std::vector<std::pair<Ray, Ray>> pairs;
  for (int k = 0; k < depth; ++k) {
    const NodeId u = lm.argmax[k];
    pairs.emplace_back(Ray::constant_tail(u.child(0), 0), Ray::constant_tail(u.child(1), 0));
  }
  return pairs;
}

double profile_normalizer(std::uint64_t n, double z) {
  require_z(z);
  double c = 1.0;
  for (std::uint64_t k = 1; k < n; ++k) {
    c *= (static_cast<double>(k) + 1.0) / (static_cast<double>(k) + 2.0 * z);
  }
  return c;
}

double jabbour_martingale(const BinaryTree& x, double z) {
  require_z(z);
  return profile_normalizer(x.size(), z) * frontier_generating_function(x, z);
}

double psi_z(const BinaryTree& x, double z) {
  require_z(z);
  double total = 0.0;
  for (BinaryTree::Index i = 0; i < x.size(); ++i) {
    total += static_cast<double>(x.sigma(i)) * std::pow(z, x.node(i).depth());
  }
  return total;
}

std::pair<double, double> yn_identity(const BinaryTree& x, double z) {
  require_z(z);
  const double n = static_cast<double>(x.size());
  const double lhs = frontier_generating_function(x, z);
  const double rhs = (2.0 * z - 3.0 + 1.0 / z) * psi_z(x, z) + (2.0 - 1.0 / z) * n + 1.0;
  return {lhs, rhs};
}

}  // namespace bstlimit
