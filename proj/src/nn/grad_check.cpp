#include <algorithm>
#include <cmath>

#include "gcgail/errors.hpp"
#include "gcgail/nn.hpp"
#include "gcgail/rng.hpp"
#include "gcgail/simd.hpp"

namespace gcgail::nn {

OutputLoss cross_entropy_loss(std::size_t target) {
  return [target](std::span<const double> y, std::span<double> grad) {
    if (target >= y.size()) throw ShapeError("cross-entropy target out of range");
    std::fill(grad.begin(), grad.end(), 0.0);
    grad[target] = -1.0 / y[target];
    return -std::log(y[target]);
  };
}

OutputLoss squared_error_loss(std::vector<double> target) {
  return [target = std::move(target)](std::span<const double> y, std::span<double> grad) {
    if (target.size() != y.size()) throw ShapeError("squared-error target length mismatch");
    double loss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double d = y[i] - target[i];
      loss += 0.5 * d * d;
      grad[i] = d;
    }
    return loss;
  };
}

OutputLoss binary_log_loss(double label) {
  return [label](std::span<const double> y, std::span<double> grad) {
    const double p = y[0];
    grad[0] = -label / p + (1.0 - label) / (1.0 - p);
    return -(label * std::log(p) + (1.0 - label) * std::log(1.0 - p));
  };
}

namespace {

double loss_at(const Network& net, std::span<const double> input, const OutputLoss& loss) {
  const auto y = forward(net, input);
  std::vector<double> scratch(y.size());
  return loss(y, scratch);
}

}  // namespace

double grad_check(const Network& net, std::span<const double> input, const OutputLoss& loss,
                  double h) {
  const auto y = forward(net, input);
  std::vector<double> dy(y.size());
  loss(y, dy);
  const Gradients analytic = backprop(net, input, dy);

  Network probe = net;
  double worst = 0.0;
  auto compare = [&](double& param, double a) {
    const double saved = param;
    param = saved + h;
    const double up = loss_at(probe, input, loss);
    param = saved - h;
    const double down = loss_at(probe, input, loss);
    param = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-7});
    worst = std::max(worst, std::abs(a - numeric) / denom);
  };
  for (std::size_t k = 0; k < probe.layers.size(); ++k) {
    auto& l = probe.layers[k];
    const auto& g = analytic.layers[k];
    for (std::size_t i = 0; i < l.w.size(); ++i) compare(l.w[i], g.w[i]);
    for (std::size_t i = 0; i < l.b.size(); ++i) compare(l.b[i], g.b[i]);
  }
  return worst;
}

double grad_check(const MlpSpec& spec, const OutputLoss& loss, std::uint64_t seed) {
  const Network net = Network::glorot(spec, seed);
  Rng rng = make_rng(seed, 1, 0x6763);
  std::vector<double> input(spec.input_dim);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (double& v : input) v = 2.0 * uniform01(rng) - 1.0;
    // Reject inputs that put any hidden pre-activation near a ReLU kink.
    bool near_kink = false;
    std::vector<double> x = input;
    for (std::size_t k = 0; k + 1 < net.layers.size() && !near_kink; ++k) {
      const auto& l = net.layers[k];
      std::vector<double> next(l.rows);
      for (std::size_t r = 0; r < l.rows; ++r) {
        const double z = simd::dot(l.row(r), x) + l.b[r];
        if (std::abs(z) < 1e-3) near_kink = true;
        next[r] = std::max(z, 0.0);
      }
      x = std::move(next);
    }
    if (!near_kink) break;
  }
  return grad_check(net, input, loss);
}

}  // namespace gcgail::nn
