#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bstlimit/functionals.hpp"
#include "bstlimit/tree.hpp"

namespace bstlimit {

/// Canonical key of a tree shape: its node words in key() order, joined by
/// '|' (safe inside CSV fields).
std::string shape_key(const BinaryTree& x);

/// Exact law of the BST shape after n insertions.
struct ShapeDistribution {
  std::size_t n = 0;
  std::map<std::string, Rational> probability;
  std::map<std::string, BinaryTree> representative;
};

/// Enumerates all n! rank orders (n <= 8); throws TooLarge beyond.
ShapeDistribution enumerate_shapes(std::size_t n);

/// Wiener index as half the sum of all ordered-pair graph distances
/// (n <= 200).
std::uint64_t wiener_bruteforce(const BinaryTree& x);

/// sum over ordered pairs (u,v) of |u ^ v| by a direct double loop (n <= 60).
std::uint64_t lca_double_sum(const BinaryTree& x);

/// Both sides of the Beta-log integral identity for 0 <= i,j <= 20.
struct Lemma41 {
  double quadrature;  ///< B(i+1,j+1)^{-1} * integral of x^i (1-x)^j ln x
  double harmonic_form;  ///< H(i) - H(i+j+1)
};
Lemma41 lemma41_integral(int i, int j);

/// Integral of C over (0,1) by quadrature (0 up to quadrature error).
double c_integral();

/// Goodness-of-fit result.
struct GofResult {
  double statistic;
  double p_value;
  std::size_t dof;
  bool passed;  ///< p_value >= level
};

/// Pearson chi-square of counts against probabilities. Categories with zero
/// expectation must have zero counts. Needs at least 1000 observations.
GofResult chi_square(std::span<const std::uint64_t> observed, std::span<const double> probs,
                     double level = 0.01);

/// Kolmogorov-Smirnov of samples against Unif(0,1) (asymptotic Kolmogorov
/// distribution). Needs at least 1000 samples.
GofResult ks_uniform(std::vector<double> samples, double level = 0.01);

/// Survival function of the Kolmogorov distribution.
double kolmogorov_survival(double x);

/// |observed/trials - p| <= sigmas * sqrt(p (1-p) / trials).
bool within_binomial_sigma(std::uint64_t hits, std::uint64_t trials, double p, double sigmas = 3.0);

}  // namespace bstlimit
