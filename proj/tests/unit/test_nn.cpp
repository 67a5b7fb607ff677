#include <doctest.h>

#include <cmath>
#include <numeric>

#include "gcgail/errors.hpp"
#include "gcgail/nn.hpp"
#include "gcgail/rng.hpp"

using namespace gcgail;
using namespace gcgail::nn;

namespace {

MlpSpec spec(std::size_t in, std::vector<std::size_t> hidden, Head head) {
  MlpSpec s;
  s.input_dim = in;
  s.hidden_dims = std::move(hidden);
  s.head = head;
  return s;
}

// 2-2-1 network with every weight set by hand.
Network tiny(Head head) {
  Network n = Network::zeros(spec(2, {2}, head));
  n.layers[0].w = {1.0, -1.0, 0.5, 2.0};
  n.layers[0].b = {0.0, -1.0};
  if (head.outputs == 2) {
    n.layers[1].w = {1.0, 0.0, 0.0, 1.0};
    n.layers[1].b = {0.0, 0.0};
  } else {
    n.layers[1].w = {2.0, -3.0};
    n.layers[1].b = {0.25};
  }
  return n;
}

double loss_of(const Network& net, const std::vector<double>& x, const OutputLoss& loss) {
  auto y = forward(net, x);
  std::vector<double> g(y.size());
  return loss(y, g);
}

// Independent central-difference oracle over every parameter.
double fd_max_rel_error(Network net, const std::vector<double>& x, const OutputLoss& loss) {
  auto y = forward(net, x);
  std::vector<double> dy(y.size());
  loss(y, dy);
  const auto g = backprop(net, x, dy);
  double worst = 0.0;
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    auto visit = [&](std::vector<double>& params, const std::vector<double>& grads) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double keep = params[i];
        params[i] = keep + 1e-6;
        const double up = loss_of(net, x, loss);
        params[i] = keep - 1e-6;
        const double down = loss_of(net, x, loss);
        params[i] = keep;
        const double num = (up - down) / 2e-6;
        const double den = std::max({std::abs(num), std::abs(grads[i]), 1e-6});
        worst = std::max(worst, std::abs(num - grads[i]) / den);
      }
    };
    visit(net.layers[k].w, g.layers[k].w);
    visit(net.layers[k].b, g.layers[k].b);
  }
  return worst;
}

// Random biases keep pre-activations off the ReLU kink, where central
// differences and the subgradient legitimately disagree.
Network with_random_biases(Network n, Rng& rng) {
  for (auto& l : n.layers) {
    for (double& b : l.b) b = uniform01(rng) - 0.5;
  }
  return n;
}

}  // namespace

TEST_CASE("spec validation") {
  CHECK_NOTHROW(spec(11, {64, 64}, Head::softmax(2)).validate());
  CHECK_THROWS_AS(spec(0, {64}, Head::linear()).validate(), ShapeError);
  CHECK_THROWS_AS(spec(3, {}, Head::linear()).validate(), ShapeError);
  CHECK_THROWS_AS(spec(3, {0}, Head::linear()).validate(), ShapeError);
  CHECK_THROWS_AS(spec(3, {4}, Head{HeadKind::Sigmoid, 2}).validate(), ShapeError);
}

TEST_CASE("forward pass of a hand-built network") {
  // hidden = relu([1*1 - 1*2, 0.5*1 + 2*2 - 1]) = relu([-1, 3.5]) = [0, 3.5]
  const std::vector<double> x{1.0, 2.0};
  SUBCASE("linear head") {
    const auto y = forward(tiny(Head::linear()), x);
    CHECK(y[0] == doctest::Approx(2.0 * 0.0 - 3.0 * 3.5 + 0.25));
  }
  SUBCASE("sigmoid head") {
    const auto y = forward(tiny(Head::sigmoid()), x);
    CHECK(y[0] == doctest::Approx(1.0 / (1.0 + std::exp(10.25))));
  }
  SUBCASE("softmax head") {
    const auto y = forward(tiny(Head::softmax(2)), x);
    const double e0 = std::exp(0.0), e1 = std::exp(3.5);
    CHECK(y[0] == doctest::Approx(e0 / (e0 + e1)));
    CHECK(y[1] == doctest::Approx(e1 / (e0 + e1)));
  }
}

TEST_CASE("input length mismatch is a shape error") {
  const Network n = tiny(Head::linear());
  CHECK_THROWS_AS(forward(n, std::vector<double>{1.0}), ShapeError);
  CHECK_THROWS_AS(backprop(n, std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 1.0}),
                  ShapeError);
}

TEST_CASE("non-finite input to backprop is a numeric error") {
  const Network n = tiny(Head::linear());
  CHECK_THROWS_AS(backprop(n, std::vector<double>{NAN, 1.0}, std::vector<double>{1.0}),
                  NumericError);
}

TEST_CASE("head helpers") {
  std::vector<double> v{1000.0, -1000.0};
  softmax_in_place(v);
  CHECK(v[0] < 1.0);
  CHECK(v[1] > 0.0);
  CHECK(std::isfinite(std::log(v[1])));
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(800.0) < 1.0);
  CHECK(sigmoid(-800.0) > 0.0);
  const std::vector<double> logits{0.3, -1.2};
  const double lse = std::log(std::exp(0.3) + std::exp(-1.2));
  CHECK(log_softmax_at(logits, 1) == doctest::Approx(-1.2 - lse).epsilon(1e-14));
  const std::vector<double> huge{1000.0, -1000.0};
  CHECK(log_softmax_at(huge, 1) == doctest::Approx(-2000.0));
}

TEST_CASE("relu derivative at the kink is zero") {
  // Hidden unit 0 sits exactly at z = 0: its incoming weights get no gradient.
  Network n = tiny(Head::linear());
  n.layers[0].w = {1.0, -0.5, 0.5, 2.0};
  const std::vector<double> x{1.0, 2.0};  // z0 = 1 - 1 + 0 = 0
  const auto g = backprop(n, x, std::vector<double>{1.0});
  CHECK(g.layers[0].w[0] == 0.0);
  CHECK(g.layers[0].w[1] == 0.0);
  CHECK(g.layers[0].b[0] == 0.0);
  CHECK(g.layers[1].w[0] == 0.0);  // activation 0
}

TEST_CASE("backprop matches central differences for every head") {
  Rng rng = make_rng(11);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<double> x(5);
    for (double& v : x) v = 2.0 * uniform01(rng) - 1.0;
    const Network soft =
        with_random_biases(Network::glorot(spec(5, {7, 6}, Head::softmax(3)), 100 + trial), rng);
    const Network lin = with_random_biases(Network::glorot(spec(5, {7}, Head::linear()), 200 + trial), rng);
    const Network sig =
        with_random_biases(Network::glorot(spec(5, {4, 4, 4}, Head::sigmoid()), 300 + trial), rng);
    CHECK(fd_max_rel_error(soft, x, cross_entropy_loss(trial % 3)) < 1e-5);
    CHECK(fd_max_rel_error(lin, x, squared_error_loss({0.7})) < 1e-5);
    CHECK(fd_max_rel_error(sig, x, binary_log_loss(trial % 2)) < 1e-5);
  }
}

TEST_CASE("grad_check reports small error on correct gradients") {
  CHECK(grad_check(spec(11, {64, 64}, Head::softmax(2)), cross_entropy_loss(1), 3) < 1e-4);
  CHECK(grad_check(spec(25, {64, 64}, Head::sigmoid()), binary_log_loss(1.0), 4) < 1e-4);
}

TEST_CASE("grad_check detects a wrong loss gradient") {
  const Network n = Network::glorot(spec(4, {5}, Head::linear()), 9);
  const OutputLoss wrong = [](std::span<const double> y, std::span<double> g) {
    g[0] = 3.0 * y[0];  // true gradient of 0.5 y^2 is y
    return 0.5 * y[0] * y[0];
  };
  const std::vector<double> x{0.1, -0.4, 0.8, 0.3};
  CHECK(grad_check(n, x, wrong) > 0.5);
}

TEST_CASE("glorot initialization is seeded and bounded") {
  const auto s = spec(11, {64, 64}, Head::softmax(2));
  const Network a = Network::glorot(s, 5), b = Network::glorot(s, 5), c = Network::glorot(s, 6);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  for (const auto& l : a.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.rows + l.cols));
    for (double w : l.w) CHECK(std::abs(w) <= limit);
    for (double bias : l.b) CHECK(bias == 0.0);
  }
  CHECK(a.parameter_count() == 11 * 64 + 64 + 64 * 64 + 64 + 64 * 2 + 2);
}

TEST_CASE("adam first step follows the bias-corrected closed form") {
  Network n = tiny(Head::linear());
  Gradients g = n.zero_gradients();
  g.layers[1].b[0] = 0.2;
  AdamState st = AdamState::for_network(n, AdamConfig{0.01});
  const double before = n.layers[1].b[0];
  adam_update(n, g, st);
  // m_hat = g, v_hat = g^2, step = lr * g / (|g| + eps)
  CHECK(n.layers[1].b[0] == doctest::Approx(before - 0.01 * 0.2 / (0.2 + 1e-8)).epsilon(1e-12));
  CHECK(n.layers[1].w[0] == 2.0);  // zero gradient leaves the weight unchanged
  CHECK(st.step_count == 1);
}

TEST_CASE("adam descends a regression loss") {
  Network n = Network::glorot(spec(3, {16}, Head::linear()), 1);
  AdamState st = AdamState::for_network(n, AdamConfig{1e-2});
  const std::vector<std::vector<double>> xs{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
  const std::vector<double> ts{1.0, -1.0, 0.5, 0.5};
  auto total = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += loss_of(n, xs[i], squared_error_loss({ts[i]}));
    return s;
  };
  const double start = total();
  for (int step = 0; step < 300; ++step) {
    Gradients acc = n.zero_gradients();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto y = forward(n, xs[i]);
      acc.add(backprop(n, xs[i], std::vector<double>{y[0] - ts[i]}));
    }
    adam_update(n, acc, st);
  }
  CHECK(total() < 0.01 * start);
}

TEST_CASE("adam rejects bad gradients") {
  Network n = tiny(Head::linear());
  AdamState st = AdamState::for_network(n);
  Gradients g = n.zero_gradients();
  g.layers[0].w[2] = INFINITY;
  CHECK_THROWS_AS(adam_update(n, g, st), NumericError);
  Gradients wrong = Network::zeros(spec(3, {2}, Head::linear())).zero_gradients();
  CHECK_THROWS_AS(adam_update(n, wrong, st), ShapeError);
  CHECK(st.step_count == 0);
}

TEST_CASE("network and optimizer state survive a json round trip") {
  Network n = Network::glorot(spec(6, {8, 8}, Head::softmax(2)), 21);
  AdamState st = AdamState::for_network(n, AdamConfig{3e-4});
  Gradients g = n.zero_gradients();
  g.layers[0].w[3] = 0.125;
  g.layers[2].b[1] = -1.0 / 3.0;
  adam_update(n, g, st);
  const auto j = to_json(n, &st);
  const auto text = j.dump();
  const auto back = nlohmann::json::parse(text);
  const Network n2 = network_from_json(back);
  const AdamState st2 = adam_from_json(back, n2);
  CHECK(n2 == n);
  CHECK(st2 == st);
  CHECK(to_json(n2, &st2).dump() == text);
}

TEST_CASE("malformed checkpoints are rejected") {
  Network n = Network::glorot(spec(2, {3}, Head::linear()), 1);
  auto j = to_json(n);
  j["layers"][0]["w"].erase(0);
  CHECK_THROWS_AS(network_from_json(j), ShapeError);
}
