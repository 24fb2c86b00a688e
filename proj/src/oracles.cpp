#include "bstlimit/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "bstlimit/chains.hpp"
#include "bstlimit/error.hpp"

namespace bstlimit {

std::string shape_key(const BinaryTree& x) {
  auto nodes = x.insertion_log();
  std::sort(nodes.begin(), nodes.end());
  std::string key;
  for (const auto& u : nodes) {
    if (!key.empty()) key += '|';
    key += u.to_string();
  }
  return key;
}

ShapeDistribution enumerate_shapes(std::size_t n) {
  if (n < 1) raise(ErrorCode::InvalidParameter, "shape enumeration needs n >= 1");
  if (n > 8) raise(ErrorCode::TooLarge, "shape enumeration is limited to n <= 8");
  std::vector<double> ranks(n);
  std::iota(ranks.begin(), ranks.end(), 1.0);
  std::map<std::string, std::uint64_t> counts;
  ShapeDistribution law;
  law.n = n;
  std::uint64_t total = 0;
  do {
    BinaryTree t = bst_from_keys(ranks);
    auto key = shape_key(t);
    ++counts[key];
    law.representative.try_emplace(key, std::move(t));
    ++total;
  } while (std::next_permutation(ranks.begin(), ranks.end()));
  for (const auto& [key, c] : counts) law.probability[key] = Rational(c, total);
  return law;
}

std::uint64_t wiener_bruteforce(const BinaryTree& x) {
  if (x.size() > 200) raise(ErrorCode::TooLarge, "brute-force Wiener index is limited to n <= 200");
  const auto nodes = x.insertion_log();
  std::uint64_t ordered = 0;
  for (const auto& u : nodes) {
    for (const auto& v : nodes) {
      // Walk both root paths to the last common ancestor.
      int k = 0;
      while (k < u.depth() && k < v.depth() && u.step(k) == v.step(k)) ++k;
      ordered += static_cast<std::uint64_t>(u.depth() - k + v.depth() - k);
    }
  }
  return ordered / 2;
}

std::uint64_t lca_double_sum(const BinaryTree& x) {
  if (x.size() > 60) raise(ErrorCode::TooLarge, "double sum oracle is limited to n <= 60");
  const auto nodes = x.insertion_log();
  std::uint64_t total = 0;
  for (const auto& u : nodes) {
    for (const auto& v : nodes) {
      int k = 0;
      while (k < u.depth() && k < v.depth() && u.step(k) == v.step(k)) ++k;
      total += static_cast<std::uint64_t>(k);
    }
  }
  return total;
}

Lemma41 lemma41_integral(int i, int j) {
  if (i < 0 || j < 0 || i > 20 || j > 20) raise(ErrorCode::InvalidParameter, "i, j must lie in 0..20");
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double integral = integrator.integrate(
      [i, j](double x, double xc) {
        // xc = 1 - x, supplied accurately near the right endpoint.
        const double one_minus = x < 0.5 ? 1.0 - x : xc;
        return std::pow(x, i) * std::pow(one_minus, j) * std::log(x);
      },
      0.0, 1.0, 1e-14);
  const double normalizer =
      std::exp(std::lgamma(i + j + 2.0) - std::lgamma(i + 1.0) - std::lgamma(j + 1.0));
  return {normalizer * integral,
          harmonic(static_cast<std::uint64_t>(i)) - harmonic(static_cast<std::uint64_t>(i + j + 1))};
}

double c_integral() {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate([](double s) { return c_function(s); }, 0.0, 1.0, 1e-14);
}

GofResult chi_square(std::span<const std::uint64_t> observed, std::span<const double> probs,
                     double level) {
  if (observed.size() != probs.size()) raise(ErrorCode::InvalidParameter, "size mismatch");
  const std::uint64_t total = std::accumulate(observed.begin(), observed.end(), std::uint64_t{0});
  if (total < 1000) raise(ErrorCode::InsufficientSamples, "chi-square needs >= 1000 observations");
  double stat = 0.0;
  std::size_t categories = 0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double expected = static_cast<double>(total) * probs[k];
    if (expected <= 0.0) {
      if (observed[k] != 0) stat = std::numeric_limits<double>::infinity();
      continue;
    }
    ++categories;
    const double diff = static_cast<double>(observed[k]) - expected;
    stat += diff * diff / expected;
  }
  GofResult r{stat, 1.0, categories > 0 ? categories - 1 : 0, true};
  if (r.dof == 0) {
    r.p_value = stat == 0.0 ? 1.0 : 0.0;
  } else if (std::isinf(stat)) {
    r.p_value = 0.0;
  } else {
    const boost::math::chi_squared dist(static_cast<double>(r.dof));
    r.p_value = boost::math::cdf(boost::math::complement(dist, stat));
  }
  r.passed = r.p_value >= level;
  return r;
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.18) {
    // Small-argument form of the CDF.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double t = (2.0 * k - 1.0);
      sum += std::exp(-t * t * pi2 / (8.0 * x * x));
    }
    return 1.0 - std::sqrt(2.0 * std::numbers::pi) / x * sum;
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

GofResult ks_uniform(std::vector<double> samples, double level) {
  if (samples.size() < 1000) raise(ErrorCode::InsufficientSamples, "KS test needs >= 1000 samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = std::clamp(samples[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  const double rn = std::sqrt(n);
  const double p = kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d);
  return {d, p, 0, p >= level};
}

bool within_binomial_sigma(std::uint64_t hits, std::uint64_t trials, double p, double sigmas) {
  const double t = static_cast<double>(trials);
  return std::abs(static_cast<double>(hits) / t - p) <= sigmas * std::sqrt(p * (1.0 - p) / t);
}

}  // namespace bstlimit
