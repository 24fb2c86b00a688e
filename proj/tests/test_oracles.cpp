#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "bstlimit/error.hpp"
#include "bstlimit/oracles.hpp"

using namespace bstlimit;
using testing::tree_of;

TEST_CASE("exact shape laws") {
  const auto two = enumerate_shapes(2);
  CHECK(two.probability.size() == 2);
  CHECK(two.probability.at(shape_key(tree_of({"0"}))) == Rational(1, 2));
  CHECK(two.probability.at(shape_key(tree_of({"1"}))) == Rational(1, 2));

  const auto three = enumerate_shapes(3);
  CHECK(three.probability.size() == 5);
  CHECK(three.probability.at(shape_key(tree_of({"0", "1"}))) == Rational(1, 3));
  for (const char* deep : {"00", "01", "10", "11"}) {
    CHECK(three.probability.at(shape_key(tree_of({deep[0] == '0' ? "0" : "1", deep}))) == Rational(1, 6));
  }
  // Catalan counts of shapes and total mass one.
  const std::size_t catalan[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430};
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto law = enumerate_shapes(n);
    CHECK(law.probability.size() == catalan[n]);
    Rational total = 0;
    for (const auto& [key, p] : law.probability) {
      total += p;
      CHECK(law.representative.at(key).size() == n);
      CHECK(shape_key(law.representative.at(key)) == key);
    }
    CHECK(total == 1);
  }
  CHECK_THROWS_AS((void)enumerate_shapes(9), Error);
  CHECK(shape_key(tree_of({"1", "0"})) == shape_key(tree_of({"0", "1"})));
  CHECK(shape_key(tree_of({"0"})).find(',') == std::string::npos);
}

TEST_CASE("brute-force Wiener index") {
  CHECK(wiener_bruteforce(BinaryTree{}) == 0);
  CHECK(wiener_bruteforce(tree_of({"0"})) == 1);
  CHECK(wiener_bruteforce(tree_of({"0", "1"})) == 4);
  CHECK(wiener_bruteforce(tree_of({"0", "00"})) == 4);
  const auto big = testing::random_tree(1, 0, 201);
  CHECK_THROWS_AS((void)wiener_bruteforce(big), Error);
  CHECK_THROWS_AS((void)lca_double_sum(big), Error);
}

TEST_CASE("Beta-log integral identity") {
  const auto a = lemma41_integral(0, 0);
  CHECK(a.quadrature == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(a.harmonic_form == doctest::Approx(-1.0).epsilon(1e-15));
  const auto b = lemma41_integral(1, 0);
  CHECK(b.quadrature == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(b.harmonic_form == doctest::Approx(-0.5).epsilon(1e-15));
  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const auto r = lemma41_integral(i, j);
      worst = std::max(worst, std::abs(r.quadrature - r.harmonic_form));
    }
  }
  CHECK(worst < 1e-8);
  CHECK_THROWS_AS((void)lemma41_integral(21, 0), Error);
  CHECK_THROWS_AS((void)lemma41_integral(0, -1), Error);
}

TEST_CASE("goodness-of-fit helpers") {
  const std::vector<std::uint64_t> exact = {250, 500, 250};
  const std::vector<double> probs = {0.25, 0.5, 0.25};
  const auto r = chi_square(exact, probs);
  CHECK(r.statistic == doctest::Approx(0.0));
  CHECK(r.dof == 2);
  CHECK(r.p_value == doctest::Approx(1.0));
  CHECK(r.passed);

  const std::vector<std::uint64_t> skewed = {400, 350, 250};
  CHECK_FALSE(chi_square(skewed, probs).passed);

  const std::vector<std::uint64_t> few = {2, 5, 3};
  CHECK_THROWS_AS((void)chi_square(few, probs), Error);

  RngStream rng(3, 3);
  std::vector<double> u(20000);
  for (auto& v : u) v = rng.uniform();
  CHECK(ks_uniform(u).passed);
  std::vector<double> squared = u;
  for (auto& v : squared) v *= v;
  CHECK_FALSE(ks_uniform(squared).passed);
  CHECK_THROWS_AS((void)ks_uniform(std::vector<double>(10, 0.5)), Error);

  CHECK(kolmogorov_survival(0.0) == doctest::Approx(1.0));
  CHECK(kolmogorov_survival(1.3580986) == doctest::Approx(0.05).epsilon(1e-4));
  CHECK(within_binomial_sigma(500, 1000, 0.5));
  CHECK_FALSE(within_binomial_sigma(600, 1000, 0.5));
}
