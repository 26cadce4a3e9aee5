#pragma once

#include "qnnv/core/network.hpp"

#include <cstddef>
#include <vector>

namespace qnnv {

/// Shape of the balanced addition tree used to sum one neuron's summands.
/// The interval analysis and the encoder both walk this structure, so every
/// intermediate sum has an interval and a bit-vector of its own.
struct SumTree {
  struct Node {
    int left = -1;
    int right = -1;
    int leaf = -1; // summand index for leaves, -1 for internal nodes
    unsigned height = 0;

    bool is_leaf() const { return leaf >= 0; }
  };

  std::vector<Node> nodes; // children always precede their parent
  std::size_t leaves = 0;

  std::size_t root() const { return nodes.size() - 1; }
  unsigned depth() const { return nodes.back().height; }

  /// Recursive halving: the left half takes ceil(n/2) summands.
  static SumTree balanced(std::size_t leaves);
};

/// Summands of one row: one product per input column, then the bias if it is
/// nonzero.  Index inputs() denotes the bias leaf.
std::size_t summand_count(const FixedPointLayer& layer, std::size_t row);

} // namespace qnnv
