#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "bstlimit/error.hpp"
#include "bstlimit/functionals.hpp"

using namespace bstlimit;
using testing::random_tree;
using testing::tree_of;

namespace {

NodeId N(const char* w) { return NodeId::parse(w); }

std::set<NodeId> frontier(const BinaryTree& x) {
  const auto e = x.externals();
  return {e.begin(), e.end()};
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("singleton") {
  const BinaryTree x;
  CHECK(x.size() == 1);
  CHECK(x.subtree_size(NodeId::root()) == 1);
  CHECK(frontier(x) == std::set<NodeId>{N("0"), N("1")});
  CHECK(ipl(x) == 0);
  CHECK(x.height() == 0);
  CHECK(x.fill_level() == 0);
}

TEST_CASE("insert") {
  BinaryTree x;
  x.insert(N("0"));
  CHECK(x.subtree_size(NodeId::root()) == 2);
  CHECK(x.subtree_size(N("0")) == 1);
  CHECK(code_of([] {
          BinaryTree y;
          y.insert(N("00"));
        }) == ErrorCode::NotExternal);
  CHECK(code_of([&] { x.insert(N("0")); }) == ErrorCode::NotExternal);
  x.insert(N("01"));
  CHECK(frontier(x) == std::set<NodeId>{N("1"), N("00"), N("010"), N("011")});
}

TEST_CASE("subtree sizes, profiles, height and fill") {
  const auto x = tree_of({"0", "1"});
  CHECK(x.subtree_size(NodeId::root()) == 3);
  CHECK(x.subtree_size(N("0")) == 1);
  CHECK(BinaryTree().subtree_size(N("0")) == 0);
  const auto p = x.profiles();
  CHECK(p.internal == std::vector<std::uint64_t>{1, 2});
  CHECK(p.external == std::vector<std::uint64_t>{0, 0, 4});
  const auto q = BinaryTree().profiles();
  CHECK(q.internal == std::vector<std::uint64_t>{1});
  CHECK(q.external == std::vector<std::uint64_t>{0, 2});
  CHECK(x.height() == 1);
  CHECK(x.fill_level() == 1);
  const auto path = tree_of({"0", "00"});
  CHECK(path.height() == 2);
  CHECK(path.fill_level() == 0);
}

TEST_CASE("weighted metric examples") {
  const auto x = tree_of({"0"});
  CHECK(x.edge_weight(N("0"), 1.0) == 0.5);
  const auto y = tree_of({"0", "1"});
  CHECK(y.edge_weight(N("1"), 2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(code_of([] { (void)BinaryTree().edge_weight(NodeId::root(), 1.0); }) == ErrorCode::RootHasNoParent);
  CHECK(code_of([&] { (void)y.edge_weight(N("00"), 1.0); }) == ErrorCode::NotInTree);
  CHECK(y.distance(N("0"), N("0"), 1.0) == 0.0);
  CHECK(y.distance(N("0"), N("1"), 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(y.canonical_distance(N("0"), N("1")) == 2);
  CHECK(code_of([&] { (void)y.distance(N("0"), N("11"), 1.0); }) == ErrorCode::NotInTree);
}

TEST_CASE("serialization") {
  const auto x = tree_of({"0"});
  std::ostringstream out;
  x.write(out);
  CHECK(out.str() == "e\n0\n");
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto t = random_tree(5, s, 1 + 10 * s);
    std::ostringstream o;
    t.write(o);
    std::istringstream in(o.str());
    const auto back = BinaryTree::read(in);
    CHECK(back == t);
    CHECK(back.insertion_log() == t.insertion_log());
  }
  std::istringstream bad("e\n00\n");
  CHECK(code_of([&] { (void)BinaryTree::read(bad); }) == ErrorCode::NotExternal);
  std::istringstream no_root("0\n");
  CHECK(code_of([&] { (void)BinaryTree::read(no_root); }) == ErrorCode::ParseError);
  std::istringstream junk("e\n0x\n");
  CHECK(code_of([&] { (void)BinaryTree::read(junk); }) == ErrorCode::ParseError);
}

TEST_CASE("structural invariants on random trees") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto x = random_tree(17, s, 1 + (s * 7) % 200);
    const auto nodes = x.insertion_log();
    const std::set<NodeId> set(nodes.begin(), nodes.end());
    // Subtree sizes recounted from scratch.
    std::map<NodeId, std::uint64_t> recount;
    for (const auto& v : nodes) {
      for (int k = 0; k <= v.depth(); ++k) ++recount[v.prefix(k)];
    }
    for (const auto& u : nodes) {
      REQUIRE(x.subtree_size(u) == recount[u]);
      if (!u.is_root()) CHECK(set.count(u.parent()) == 1);
    }
    CHECK(x.subtree_size(NodeId::root()) == x.size());
    // Frontier.
    const auto ext = x.externals();
    CHECK(ext.size() == x.size() + 1);
    double kraft = 0.0;
    for (const auto& u : ext) {
      CHECK(set.count(u) == 0);
      CHECK(set.count(u.parent()) == 1);
      CHECK(x.is_external(u));
      kraft += std::ldexp(1.0, -u.depth());
    }
    CHECK(kraft == 1.0);
    std::size_t via_index = 0;
    for (std::size_t k = 0; k < x.external_count(); ++k) {
      via_index += set.count(x.external_node(x.external_at(k))) == 0 ? 1 : 0;
    }
    CHECK(via_index == ext.size());
    // Profiles.
    const auto p = x.profiles();
    std::uint64_t wsum = 0, vsum = 0;
    for (const auto w : p.internal) wsum += w;
    for (const auto v : p.external) vsum += v;
    CHECK(wsum == x.size());
    CHECK(vsum == x.size() + 1);
    for (std::size_t k = 0; k + 1 < p.external.size(); ++k) {
      const std::uint64_t w_next = k + 1 < p.internal.size() ? p.internal[k + 1] : 0;
      CHECK(p.external[k + 1] == 2 * p.internal[k] - w_next);
    }
    // Height and fill.
    int h = 0;
    for (const auto& u : nodes) h = std::max(h, u.depth());
    CHECK(x.height() == h);
    int f = 0;
    while (f + 1 < static_cast<int>(p.internal.size()) && p.internal[f + 1] == (1ULL << (f + 1))) ++f;
    CHECK(x.fill_level() == f);
    // Sum of subtree sizes.
    std::uint64_t sigma_sum = 0;
    for (const auto& u : nodes) sigma_sum += x.subtree_size(u);
    CHECK(sigma_sum == ipl(x) + x.size());
    // Prefixes replay the insertion log.
    const std::size_t m = 1 + s % x.size();
    const auto pre = x.prefix(m);
    CHECK(pre.size() == m);
    CHECK(pre.insertion_log() == std::vector<NodeId>(nodes.begin(), nodes.begin() + m));
  }
}

TEST_CASE("metric against root-path sums") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto x = random_tree(23, s, 40);
    const auto nodes = x.insertion_log();
    const double rho = 1.0 + 0.1 * static_cast<double>(s % 5);
    auto root_d = [&](NodeId u) {
      double d = 0.0;
      for (int k = 1; k <= u.depth(); ++k) {
        d += std::pow(rho, k) * static_cast<double>(x.subtree_size(u.prefix(k))) / static_cast<double>(x.size());
      }
      return d;
    };
    for (std::size_t i = 0; i < nodes.size(); i += 3) {
      for (std::size_t j = 0; j < nodes.size(); j += 5) {
        const auto u = nodes[i], v = nodes[j];
        const double expect = root_d(u) + root_d(v) - 2.0 * root_d(lca(u, v));
        CHECK(x.distance(u, v, rho) == doctest::Approx(expect).epsilon(1e-12));
        CHECK(x.canonical_distance(u, v) ==
              static_cast<std::uint64_t>(u.depth() + v.depth() - 2 * lca(u, v).depth()));
      }
    }
  }
}

TEST_CASE("depth cap") {
  BinaryTree x;
  BinaryTree::Index i = 0;
  for (int d = 1; d <= NodeId::kMaxDepth; ++d) i = x.insert_child(i, 0);
  CHECK(x.height() == NodeId::kMaxDepth);
  CHECK(code_of([&] { x.insert_child(i, 0); }) == ErrorCode::DepthOverflow);
  CHECK(code_of([&] { (void)x.externals(); }) == ErrorCode::DepthOverflow);
}
