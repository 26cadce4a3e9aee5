#include "qnnv/core/sum_tree.hpp"

#include <algorithm>
#include <cassert>

namespace qnnv {

namespace {

int build(SumTree& tree, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) {
    tree.nodes.push_back({-1, -1, static_cast<int>(lo), 0});
    return static_cast<int>(tree.nodes.size() - 1);
  }
  const std::size_t mid = lo + (hi - lo + 1) / 2;
  const int left = build(tree, lo, mid);
  const int right = build(tree, mid, hi);
  const unsigned height = std::max(tree.nodes[left].height, tree.nodes[right].height) + 1;
  tree.nodes.push_back({left, right, -1, height});
  return static_cast<int>(tree.nodes.size() - 1);
}

} // namespace

SumTree SumTree::balanced(std::size_t leaves) {
  assert(leaves > 0);
  SumTree tree;
  tree.leaves = leaves;
  tree.nodes.reserve(2 * leaves - 1);
  build(tree, 0, leaves);
  return tree;
}

std::size_t summand_count(const FixedPointLayer& layer, std::size_t row) {
  return layer.inputs() + (layer.bias[row] != 0 ? 1 : 0);
}

} // namespace qnnv
