#include "bstlimit/limit_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bstlimit/error.hpp"

namespace bstlimit {

double SplitField::mass(NodeId u) const {
  double m = 1.0;
  for (int j = 0; j < u.depth(); ++j) {
    const double p = xi(u.prefix(j));
    m *= u.step(j) == 0 ? p : 1.0 - p;
  }
  return m;
}

namespace {

void check_depth(int depth) {
  if (depth < 0 || depth > NodeId::kMaxDepth) {
    raise(ErrorCode::DepthOverflow, "truncation depth outside 0..62");
  }
}

}  // namespace

LevelMaxima level_maxima(const SplitField& field, int depth) {
  check_depth(depth);
  LevelMaxima lm;
  lm.value.assign(depth + 1, 0.0);
  lm.argmax.assign(depth + 1, NodeId::root());

  // Seed the bounds with the greedy heavy path.
  NodeId u = NodeId::root();
  double m = 1.0;
  lm.value[0] = 1.0;
  for (int k = 1; k <= depth; ++k) {
    const double p = field.xi(u);
    const int dir = p >= 0.5 ? 0 : 1;
    m *= dir == 0 ? p : 1.0 - p;
    u = u.child(dir);
    lm.value[k] = m;
    lm.argmax[k] = u;
  }

  struct Frame {
    NodeId node;
    double mass;
  };
  std::vector<Frame> stack{{NodeId::root(), 1.0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const int d = f.node.depth();
    if (f.mass > lm.value[d]) {
      lm.value[d] = f.mass;
      lm.argmax[d] = f.node;
    }
    if (d == depth) continue;
    // A child can only matter at a level whose current maximum it exceeds.
    double floor = lm.value[d + 1];
    for (int k = d + 2; k <= depth; ++k) floor = std::min(floor, lm.value[k]);
    const double p = field.xi(f.node);
    const Frame left{f.node.child(0), f.mass * p};
    const Frame right{f.node.child(1), f.mass * (1.0 - p)};
    const Frame& heavy = left.mass >= right.mass ? left : right;
    const Frame& light = left.mass >= right.mass ? right : left;
    if (light.mass > floor) stack.push_back(light);
    if (heavy.mass > floor) stack.push_back(heavy);
  }
  return lm;
}

double rho_norm(const SplitField& field, double rho, int depth) {
  if (!(rho >= 1.0) || !std::isfinite(rho)) raise(ErrorCode::InvalidParameter, "rho must be >= 1");
  const auto lm = level_maxima(field, depth);
  double norm = 0.0;
  double scale = 1.0;
  for (int k = 1; k <= depth; ++k) {
    scale *= rho;
    norm += scale * lm.value[k];
  }
  return norm;
}

NodeId sample_ray(const SplitField& field, RngStream& rng, int depth) {
  check_depth(depth);
  NodeId u = NodeId::root();
  for (int k = 0; k < depth; ++k) u = u.child(rng.uniform() < field.xi(u) ? 0 : 1);
  return u;
}

double projected_mass(const BinaryTree& x, NodeId u) {
  const auto i = x.find(u);
  if (!i) raise(ErrorCode::NotInTree, "node " + u.to_string() + " is not in the tree");
  return (static_cast<double>(x.sigma(*i)) + 1.0) / (static_cast<double>(x.size()) + 1.0);
}

namespace {

// Bisection on a sign-changing bracket, to the resolution of doubles.
template <class F>
double bisect(F f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Constants constants() {
  const double e = std::numbers::e;
  Constants c{};
  c.rho0 = bisect([e](double r) { return 2.0 * e * std::log(r) - r; }, 1.0, 2.0);
  const auto height_eq = [e](double x) { return x * std::log(2.0 * e / x) - 1.0; };
  c.alpha_minus = bisect(height_eq, 0.1, 1.0);
  c.alpha_plus = bisect(height_eq, 2.0, 6.0);
  c.alpha0 = std::log2(c.rho0);
  c.euler_gamma = std::numbers::egamma;
  return c;
}

double branching_mean(double theta) {
  if (!(theta > -1.0)) raise(ErrorCode::InvalidParameter, "theta must exceed -1");
  return 2.0 / (1.0 + theta);
}

BranchingEnvelope branching_envelope(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) raise(ErrorCode::InvalidParameter, "a must be positive");
  const double theta = 1.0 / a - 1.0;
  return {2.0 * a * std::exp(1.0 - a), theta, branching_mean(theta)};
}

}  // namespace bstlimit
