#include "doctest.h"

#include "qnnv/core/error.hpp"
#include "qnnv/core/interpreter.hpp"
#include "qnnv/core/model_io.hpp"
#include "qnnv/core/sum_tree.hpp"

#include "../support/random_nets.hpp"
#include "../support/reference.hpp"

#include <fstream>
#include <sstream>

using namespace qnnv;

namespace {

FixedPointLayer layer(std::vector<IntVector> w, IntVector b, std::vector<unsigned> k, std::vector<unsigned> n) {
  return {std::move(w), std::move(b), std::move(k), std::move(n), std::nullopt};
}

IntVector iv(std::initializer_list<int> v) { return IntVector(v.begin(), v.end()); }

Errc load_error(const std::string& text) {
  std::istringstream in(text);
  try {
    load_model(in);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("document was accepted");
  return Errc::io_error;
}

} // namespace

TEST_CASE("round_shift floors") {
  CHECK(round_shift(3, 2) == 0);
  CHECK(round_shift(-3, 2) == -1);
  CHECK(round_shift(26, 0) == 26);
  CHECK(round_shift(-4, 2) == -1);
  CHECK(round_shift(-5, 2) == -2);
}

TEST_CASE("clamp_relu_n") {
  CHECK(clamp_relu_n(-1, 4) == 0);
  CHECK(clamp_relu_n(99, 4) == 15);
  CHECK(clamp_relu_n(6, 4) == 6);
  CHECK(clamp_relu_n(15, 4) == 15);
  CHECK(clamp_relu_n(16, 4) == 15);
}

TEST_CASE("eval_layer hand examples") {
  const auto l = layer({iv({3, -2})}, iv({5}), {2}, {4});
  const auto t1 = trace_layer(l, iv({4, 7}));
  CHECK(t1.pre_round == iv({3}));
  CHECK(t1.post_round == iv({0}));
  CHECK(t1.output == iv({0}));
  const auto t2 = trace_layer(l, iv({7, 0}));
  CHECK(t2.pre_round == iv({26}));
  CHECK(t2.post_round == iv({6}));
  CHECK(t2.output == iv({6}));
  const auto z = layer({iv({0, 0})}, iv({0}), {0}, {4});
  CHECK(eval_layer(z, iv({5, 9})) == iv({0}));
}

TEST_CASE("identity network maps x to x") {
  QuantizedNetwork net;
  net.input_bits = 3;
  net.weight_bits = 1;
  net.layers.push_back(layer({iv({1, 0}), iv({0, 1})}, iv({0, 0}), {0, 0}, {3, 3}));
  test::for_each_point(test::full_domain(net), [&](const IntVector& x) { CHECK(eval_network(net, x) == x); });
}

TEST_CASE("eval_network matches the reference evaluator exhaustively") {
  test::NetGenerator gen(11);
  test::NetShape shape;
  shape.edge_shifts = true;
  for (int n = 0; n < 30; ++n) {
    const auto net = gen.network(shape);
    validate(net);
    test::for_each_point(test::full_domain(net), [&](const IntVector& x) {
      const auto trace = trace_network(net, x);
      const auto ref = test::ref_network(net, x);
      REQUIRE(trace.size() == ref.size());
      for (std::size_t t = 0; t < ref.size(); ++t) {
        CHECK(trace[t].pre_round == ref[t].pre);
        CHECK(trace[t].post_round == ref[t].post);
        CHECK(trace[t].output == ref[t].out);
      }
    });
  }
}

TEST_CASE("eval_network rejects out-of-domain inputs") {
  QuantizedNetwork net;
  net.input_bits = 2;
  net.layers.push_back(layer({iv({1})}, iv({0}), {0}, {2}));
  CHECK_THROWS_AS(eval_network(net, iv({4})), Error);
  CHECK_THROWS_AS(eval_network(net, iv({-1})), Error);
  CHECK_THROWS_AS(eval_network(net, iv({1, 1})), Error);
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  CHECK(argmax(iv({0, 5, 3})) == 1);
  CHECK(argmax(iv({4, 4})) == 0);
  CHECK(argmax(iv({2, 2, 2})) == 0);
  CHECK(wins_tie(0, 1));
  CHECK_FALSE(wins_tie(2, 1));
}

TEST_CASE("load_model") {
  const std::string minimal =
      R"({"format_version":1,"input_bits":2,"weight_bits":2,"layers":[{"weights":[[1,-3]],"bias":[0],"bit_shift":[0],"clamp_bits":[2]}]})";
  std::istringstream in(minimal);
  const auto net = load_model(in);
  CHECK(net.layers.size() == 1);
  CHECK(net.input_size() == 2);
  CHECK(net.parameter_count() == 3);

  SUBCASE("weight at 2^k_w is rejected") {
    const std::string doc =
        R"({"format_version":1,"input_bits":2,"weight_bits":2,"layers":[{"weights":[[4]],"bias":[0],"bit_shift":[0],"clamp_bits":[2]}]})";
    std::istringstream bad(doc);
    try {
      load_model(bad);
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::weight_out_of_range);
      CHECK(std::string(e.what()).find("exceeds declared width") != std::string::npos);
    }
  }
  SUBCASE("error classes") {
    CHECK(load_error("{not json") == Errc::malformed_model);
    CHECK(load_error(R"({"format_version":2,"input_bits":2,"weight_bits":2,"layers":[]})") == Errc::malformed_model);
    CHECK(load_error(R"({"format_version":1,"input_bits":2,"weight_bits":2,"layers":[{"weights":[[1]],"bias":[0,1],"bit_shift":[0],"clamp_bits":[2]}]})") ==
          Errc::shape_mismatch);
    CHECK(load_error(R"({"format_version":1,"input_bits":2,"weight_bits":2,"layers":[{"weights":[[1]],"bias":[0],"bit_shift":[0],"clamp_bits":[0]}]})") ==
          Errc::invalid_input);
    CHECK(load_error(R"({"format_version":1,"input_bits":2,"weight_bits":2,"layers":[{"weights":[[1]],"bias":[0],"bit_shift":[0],"clamp_bits":[2]},{"weights":[[1,1]],"bias":[0],"bit_shift":[0],"clamp_bits":[2]}]})") ==
          Errc::shape_mismatch);
  }
  SUBCASE("round trip") {
    test::NetGenerator gen(3);
    test::NetShape shape;
    shape.edge_shifts = true;
    for (int i = 0; i < 20; ++i) {
      const auto a = gen.network(shape);
      const auto b = model_from_json(model_to_json(a));
      CHECK(model_to_json(a) == model_to_json(b));
    }
  }
  SUBCASE("big integers travel as strings") {
    QuantizedNetwork big;
    big.input_bits = 1;
    big.weight_bits = 1;
    big.layers.push_back(layer({iv({1})}, {Integer("123456789012345678901234567890")}, {0}, {2}));
    const auto back = model_from_json(model_to_json(big));
    CHECK(back.layers[0].bias[0] == Integer("123456789012345678901234567890"));
  }
}

TEST_CASE("benchmark-sized model has 52,650 parameters") {
  const auto net = load_model(test::data_dir() / "mnist_784_64_32_10_w6.json");
  CHECK(net.parameter_count() == 52650);
  CHECK(net.input_bits == 6);
  CHECK(net.weight_bits == 6);
}

TEST_CASE("balanced sum tree shape") {
  const auto one = SumTree::balanced(1);
  CHECK(one.nodes.size() == 1);
  CHECK(one.depth() == 0);
  const auto four = SumTree::balanced(4);
  CHECK(four.depth() == 2);
  const auto& root = four.nodes[four.root()];
  const auto& l = four.nodes[static_cast<std::size_t>(root.left)];
  const auto& r = four.nodes[static_cast<std::size_t>(root.right)];
  CHECK(four.nodes[static_cast<std::size_t>(l.left)].leaf == 0);
  CHECK(four.nodes[static_cast<std::size_t>(l.right)].leaf == 1);
  CHECK(four.nodes[static_cast<std::size_t>(r.left)].leaf == 2);
  CHECK(four.nodes[static_cast<std::size_t>(r.right)].leaf == 3);
  for (std::size_t n = 1; n < 50; ++n) {
    const auto t = SumTree::balanced(n);
    CHECK(t.leaves == n);
    CHECK(t.nodes.size() == 2 * n - 1);
    unsigned depth = 0;
    while ((std::size_t{1} << depth) < n) ++depth;
    CHECK(t.depth() == depth);
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
      if (!t.nodes[i].is_leaf()) {
        CHECK(static_cast<std::size_t>(t.nodes[i].left) < i);
        CHECK(static_cast<std::size_t>(t.nodes[i].right) < i);
      }
  }
}

TEST_CASE("integer helpers") {
  CHECK(floor_div_pow2(-1, 1) == -1);
  CHECK(floor_div_pow2(7, 1) == 3);
  CHECK(signed_width(0) == 1);
  CHECK(signed_width(-1) == 1);
  CHECK(signed_width(1) == 2);
  CHECK(signed_width(7) == 4);
  CHECK(signed_width(-8) == 4);
  CHECK(signed_width(-9) == 5);
  CHECK(magnitude_bits(0) == 0);
  CHECK(magnitude_bits(8) == 4);
}
