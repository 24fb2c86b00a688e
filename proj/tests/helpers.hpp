#pragma once

#include <cstdint>

#include "bstlimit/chains.hpp"
#include "bstlimit/rng.hpp"
#include "bstlimit/tree.hpp"

namespace testing {

// Random tree of size n; odd streams use a skewed digital-search chain so the
// sample covers deep and unbalanced shapes too.
inline bstlimit::BinaryTree random_tree(std::uint64_t seed, std::uint64_t stream, std::size_t n) {
  bstlimit::RngStream rng(seed, stream);
  bstlimit::BinaryTree x;
  const auto skew = bstlimit::DrivingMeasure::constant(0.15 + 0.7 * rng.uniform());
  while (x.size() < n) {
    if (stream % 2 == 0) bstlimit::bst_step(x, rng);
    else bstlimit::dst_step(x, skew, rng);
  }
  return x;
}

inline bstlimit::BinaryTree tree_of(std::initializer_list<const char*> words) {
  bstlimit::BinaryTree x;
  for (const char* w : words) x.insert(bstlimit::NodeId::parse(w));
  return x;
}

}  // namespace testing
