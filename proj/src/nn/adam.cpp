#include <cmath>

#include "gcgail/errors.hpp"
#include "gcgail/nn.hpp"
#include "gcgail/simd.hpp"

namespace gcgail::nn {

AdamState AdamState::for_network(const Network& net, AdamConfig config) {
  AdamState st;
  st.config = config;
  st.first_moment = net.zero_gradients().layers;
  st.second_moment = st.first_moment;
  return st;
}

void adam_update(Network& net, const Gradients& grads, AdamState& state) {
  const std::size_t n = net.layers.size();
  if (grads.layers.size() != n || state.first_moment.size() != n ||
      state.second_moment.size() != n) {
    throw ShapeError("adam: layer count mismatch");
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = net.layers[k];
    const auto& g = grads.layers[k];
    if (g.w.size() != p.w.size() || g.b.size() != p.b.size() ||
        state.first_moment[k].w.size() != p.w.size() ||
        state.second_moment[k].b.size() != p.b.size()) {
      throw ShapeError("adam: layer " + std::to_string(k) + " shape mismatch");
    }
    for (double v : g.w) if (!std::isfinite(v)) throw NumericError("adam: non-finite gradient");
    for (double v : g.b) if (!std::isfinite(v)) throw NumericError("adam: non-finite gradient");
  }

  state.step_count += 1;
  const auto& cfg = state.config;
  const double t = static_cast<double>(state.step_count);
  simd::AdamCoefficients c{};
  c.beta1 = cfg.beta1;
  c.beta2 = cfg.beta2;
  c.step_size = cfg.learning_rate / (1.0 - std::pow(cfg.beta1, t));
  c.second_scale = 1.0 / (1.0 - std::pow(cfg.beta2, t));
  c.eps = cfg.eps;

  const auto& kernels = simd::active();
  for (std::size_t k = 0; k < n; ++k) {
    auto& p = net.layers[k];
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    const auto& g = grads.layers[k];
    kernels.adam_step(p.w.data(), m.w.data(), v.w.data(), g.w.data(), p.w.size(), c);
    kernels.adam_step(p.b.data(), m.b.data(), v.b.data(), g.b.data(), p.b.size(), c);
  }
}

}  // namespace gcgail::nn
