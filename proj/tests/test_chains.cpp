#include <cmath>
#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "bstlimit/error.hpp"
#include "bstlimit/oracles.hpp"

using namespace bstlimit;
using testing::random_tree;
using testing::tree_of;

namespace {

NodeId N(const char* w) { return NodeId::parse(w); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

// Monte Carlo law of the node inserted by `step` from a copy of x.
template <class Step>
std::map<NodeId, std::uint64_t> insertion_counts(const BinaryTree& x, std::uint64_t reps, Step step) {
  std::map<NodeId, std::uint64_t> counts;
  RngStream rng(99, 1);
  for (std::uint64_t r = 0; r < reps; ++r) {
    BinaryTree y = x;
    ++counts[y.node(step(y, rng))];
  }
  return counts;
}

}  // namespace

TEST_CASE("bst from keys") {
  const std::vector<double> a{0.4, 0.7, 0.2};
  CHECK(bst_from_keys(a).insertion_log() == std::vector<NodeId>{NodeId::root(), N("1"), N("0")});
  const std::vector<double> b{0.4, 0.2, 0.1};
  CHECK(bst_from_keys(b).insertion_log() == std::vector<NodeId>{NodeId::root(), N("0"), N("00")});
  const std::vector<double> c{0.5, 0.5};
  CHECK(code_of([&] { (void)bst_from_keys(c); }) == ErrorCode::DuplicateKey);
}

TEST_CASE("builder records gaps") {
  BstBuilder b(0.5);
  auto p = b.insert(0.25);
  CHECK(p.lo == 0.0);
  CHECK(p.hi == 0.5);
  p = b.insert(0.4);
  CHECK(p.lo == 0.25);
  CHECK(p.hi == 0.5);
  CHECK(b.tree().node(p.node) == N("01"));
}

TEST_CASE("bst step from the singleton") {
  const auto counts = insertion_counts(BinaryTree{}, 20000, [](BinaryTree& y, RngStream& r) { return bst_step(y, r); });
  CHECK(within_binomial_sigma(counts.at(N("0")), 20000, 0.5));
  CHECK(counts.at(N("0")) + counts.at(N("1")) == 20000);
}

TEST_CASE("bst step is uniform over the frontier") {
  const auto x = tree_of({"0", "01", "010"});
  const auto counts = insertion_counts(x, 50000, [](BinaryTree& y, RngStream& r) { return bst_step(y, r); });
  CHECK(counts.size() == 5);
  for (const auto& [u, c] : counts) CHECK(within_binomial_sigma(c, 50000, 0.2));
}

TEST_CASE("dst step") {
  const auto half = DrivingMeasure::constant(0.5);
  const auto counts = insertion_counts(tree_of({"0"}), 40000,
                                       [&](BinaryTree& y, RngStream& r) { return dst_step(y, half, r); });
  CHECK(within_binomial_sigma(counts.at(N("1")), 40000, 0.5));
  CHECK(within_binomial_sigma(counts.at(N("00")), 40000, 0.25));
  CHECK(within_binomial_sigma(counts.at(N("01")), 40000, 0.25));
  const auto p = DrivingMeasure::constant(0.3);
  const auto c1 = insertion_counts(BinaryTree{}, 40000, [&](BinaryTree& y, RngStream& r) { return dst_step(y, p, r); });
  CHECK(within_binomial_sigma(c1.at(N("0")), 40000, 0.3));
  // Degenerate measure: always the leftmost external node.
  const auto left = DrivingMeasure::constant(1.0);
  BinaryTree x;
  RngStream rng(3, 3);
  for (int i = 1; i < 10; ++i) {
    const auto idx = dst_step(x, left, rng);
    CHECK(x.node(idx) == NodeId::from_bits(0, i));
  }
  // Split 1/2 puts mass 2^{-|u|} on each external node.
  const auto y = random_tree(4, 2, 6);
  const auto cy = insertion_counts(y, 60000, [&](BinaryTree& t, RngStream& r) { return dst_step(t, half, r); });
  for (const auto& u : y.externals()) {
    const auto it = cy.find(u);
    CHECK(within_binomial_sigma(it == cy.end() ? 0 : it->second, 60000, std::ldexp(1.0, -u.depth())));
  }
}

TEST_CASE("tilted transition law") {
  const auto x = tree_of({"0"});
  CHECK(tilted_transition_probability(x, 2.0, N("1")) == doctest::Approx(16.0 / 60.0).epsilon(1e-14));
  CHECK(tilted_transition_probability(x, 2.0, N("00")) == doctest::Approx(22.0 / 60.0).epsilon(1e-14));
  CHECK(tilted_transition_probability(x, 2.0, N("01")) == doctest::Approx(22.0 / 60.0).epsilon(1e-14));
  CHECK(code_of([&] { (void)tilted_transition_probability(x, 0.0, N("1")); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([&] { (void)tilted_transition_probability(x, 1.0, N("0")); }) == ErrorCode::NotExternal);
  BinaryTree y;
  RngStream rng(1, 1);
  CHECK(code_of([&] { (void)tilted_step(y, -1.0, rng); }) == ErrorCode::InvalidParameter);

  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto t = random_tree(8, s, 1 + s % 60);
    const double n = static_cast<double>(t.size());
    for (const double z : {0.3, 0.5, 1.0, 1.7, 2.0}) {
      const auto law = tilted_transition_law(t, z);
      double total = 0.0;
      double s_sum = 0.0;
      for (const auto& u : t.externals()) s_sum += std::pow(z, u.depth());
      const double accept = 2.0 * z / (n + 2.0 * z);
      for (const auto& [v, p] : law) {
        total += p;
        // Acceptance scheme: propose v and accept, or propose another node,
        // reject, and pick v among the other n.
        const double w = std::pow(z, v.depth()) / s_sum;
        const double scheme = w * accept + (1.0 - w) * (1.0 - accept) / n;
        CHECK(p == doctest::Approx(scheme).epsilon(1e-12));
        if (z == 1.0 || z == 0.5) CHECK(p == doctest::Approx(1.0 / (n + 1.0)).epsilon(1e-12));
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("tilted step matches its law") {
  const auto x = tree_of({"0", "1", "10"});
  for (const double z : {0.3, 2.0}) {
    const auto counts =
        insertion_counts(x, 40000, [z](BinaryTree& y, RngStream& r) { return tilted_step(y, z, r); });
    for (const auto& [v, p] : tilted_transition_law(x, z)) {
      const auto it = counts.find(v);
      CHECK(within_binomial_sigma(it == counts.end() ? 0 : it->second, 40000, p));
    }
  }
}
