#include <algorithm>
#include <cmath>
#include <limits>

#include "gcgail/errors.hpp"
#include "gcgail/nn.hpp"
#include "gcgail/rng.hpp"
#include "gcgail/simd.hpp"

namespace gcgail::nn {

std::string head_name(HeadKind kind) {
  switch (kind) {
    case HeadKind::Softmax: return "softmax";
    case HeadKind::Linear: return "linear";
    case HeadKind::Sigmoid: return "sigmoid";
  }
  return "unknown";
}

HeadKind parse_head(const std::string& name) {
  if (name == "softmax") return HeadKind::Softmax;
  if (name == "linear") return HeadKind::Linear;
  if (name == "sigmoid") return HeadKind::Sigmoid;
  throw ValidationError("unknown head kind: " + name);
}

void MlpSpec::validate() const {
  if (input_dim == 0) throw ShapeError("input_dim must be >= 1");
  if (hidden_dims.empty()) throw ShapeError("hidden_dims must be non-empty");
  for (std::size_t d : hidden_dims) {
    if (d == 0) throw ShapeError("hidden dimension must be >= 1");
  }
  if (head.outputs == 0) throw ShapeError("head must have at least one output");
  if (head.kind != HeadKind::Softmax && head.outputs != 1) {
    throw ShapeError(head_name(head.kind) + " head has exactly one output");
  }
}

namespace {

std::vector<std::size_t> layer_dims(const MlpSpec& spec) {
  std::vector<std::size_t> dims;
  dims.reserve(spec.hidden_dims.size() + 2);
  dims.push_back(spec.input_dim);
  dims.insert(dims.end(), spec.hidden_dims.begin(), spec.hidden_dims.end());
  dims.push_back(spec.output_dim());
  return dims;
}

std::vector<Layer> zero_layers(const MlpSpec& spec) {
  const auto dims = layer_dims(spec);
  std::vector<Layer> layers;
  layers.reserve(dims.size() - 1);
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    Layer l;
    l.cols = dims[k];
    l.rows = dims[k + 1];
    l.w.assign(l.rows * l.cols, 0.0);
    l.b.assign(l.rows, 0.0);
    layers.push_back(std::move(l));
  }
  return layers;
}

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericError(std::string("non-finite ") + what);
  }
}

// Keep head outputs strictly inside (0, 1) even when exp() saturates.
constexpr double kProbFloor = 1e-300;
constexpr double kProbCeil = 1.0 - 0x1.0p-53;

}  // namespace

void Gradients::set_zero() {
  for (auto& l : layers) {
    std::fill(l.w.begin(), l.w.end(), 0.0);
    std::fill(l.b.begin(), l.b.end(), 0.0);
  }
}

void Gradients::scale(double factor) {
  for (auto& l : layers) {
    for (double& v : l.w) v *= factor;
    for (double& v : l.b) v *= factor;
  }
}

void Gradients::add(const Gradients& other) {
  if (other.layers.size() != layers.size()) throw ShapeError("gradient layer count mismatch");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    auto& dst = layers[k];
    const auto& src = other.layers[k];
    if (dst.w.size() != src.w.size() || dst.b.size() != src.b.size()) {
      throw ShapeError("gradient layer shape mismatch");
    }
    simd::axpy(1.0, src.w, dst.w);
    simd::axpy(1.0, src.b, dst.b);
  }
}

double Gradients::max_abs() const {
  double m = 0.0;
  for (const auto& l : layers) {
    for (double v : l.w) m = std::max(m, std::abs(v));
    for (double v : l.b) m = std::max(m, std::abs(v));
  }
  return m;
}

Network Network::zeros(const MlpSpec& spec) {
  spec.validate();
  return Network{spec, zero_layers(spec)};
}

Network Network::glorot(const MlpSpec& spec, std::uint64_t seed) {
  Network net = zeros(spec);
  Rng rng = make_rng(seed, 0, 0x6e6e);
  for (auto& l : net.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.rows + l.cols));
    for (double& v : l.w) v = (2.0 * uniform01(rng) - 1.0) * limit;
  }
  return net;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.w.size() + l.b.size();
  return n;
}

bool Network::all_finite() const {
  for (const auto& l : layers) {
    for (double v : l.w) if (!std::isfinite(v)) return false;
    for (double v : l.b) if (!std::isfinite(v)) return false;
  }
  return true;
}

Gradients Network::zero_gradients() const { return Gradients{zero_layers(spec)}; }

double sigmoid(double z) {
  double y;
  if (z >= 0.0) {
    y = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    y = e / (1.0 + e);
  }
  return std::clamp(y, kProbFloor, kProbCeil);
}

void softmax_in_place(std::span<double> values) {
  const double mx = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double& v : values) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : values) v = std::clamp(v / sum, kProbFloor, kProbCeil);
}

double log_softmax_at(std::span<const double> logits, std::size_t index) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  return logits[index] - mx - std::log(sum);
}

void forward_into(const Network& net, std::span<const double> input, Trace& trace) {
  if (input.size() != net.input_dim()) {
    throw ShapeError("input has length " + std::to_string(input.size()) + ", network expects " +
                     std::to_string(net.input_dim()));
  }
  const std::size_t n_layers = net.layers.size();
  trace.activations.resize(n_layers);
  trace.activations[0].assign(input.begin(), input.end());
  for (std::size_t k = 0; k < n_layers; ++k) {
    const Layer& l = net.layers[k];
    const auto& x = trace.activations[k];
    const bool is_head = (k + 1 == n_layers);
    std::vector<double>& out = is_head ? trace.logits : trace.activations[k + 1];
    out.resize(l.rows);
    for (std::size_t r = 0; r < l.rows; ++r) {
      const double z = simd::dot(l.row(r), x) + l.b[r];
      out[r] = is_head ? z : (z > 0.0 ? z : 0.0);
    }
  }
  trace.output = trace.logits;
  switch (net.spec.head.kind) {
    case HeadKind::Softmax: softmax_in_place(trace.output); break;
    case HeadKind::Sigmoid: trace.output[0] = sigmoid(trace.logits[0]); break;
    case HeadKind::Linear: break;
  }
}

std::vector<double> forward(const Network& net, std::span<const double> input) {
  Trace trace;
  forward_into(net, input, trace);
  return trace.output;
}

void accumulate_from_logits(const Network& net, Trace& trace,
                            std::span<const double> logit_grad, Gradients& grads) {
  if (logit_grad.size() != net.output_dim()) throw ShapeError("logit gradient length mismatch");
  check_finite(logit_grad, "gradient");
  if (grads.layers.size() != net.layers.size()) throw ShapeError("gradient layout mismatch");

  auto& delta = trace.delta;
  auto& delta_prev = trace.delta_prev;
  delta.assign(logit_grad.begin(), logit_grad.end());

  for (std::size_t k = net.layers.size(); k-- > 0;) {
    const Layer& l = net.layers[k];
    Layer& g = grads.layers[k];
    const auto& x = trace.activations[k];
    for (std::size_t r = 0; r < l.rows; ++r) {
      const double d = delta[r];
      if (d == 0.0) continue;
      g.b[r] += d;
      simd::axpy(d, x, g.row(r));
    }
    if (k == 0) break;
    delta_prev.assign(l.cols, 0.0);
    for (std::size_t r = 0; r < l.rows; ++r) {
      if (delta[r] != 0.0) simd::axpy(delta[r], l.row(r), delta_prev);
    }
    // ReLU mask of layer k-1's output; subgradient 0 at the kink.
    for (std::size_t i = 0; i < l.cols; ++i) {
      if (x[i] <= 0.0) delta_prev[i] = 0.0;
    }
    delta.swap(delta_prev);
  }
}

Gradients backprop(const Network& net, std::span<const double> input,
                   std::span<const double> output_grad) {
  check_finite(input, "input");
  if (output_grad.size() != net.output_dim()) {
    throw ShapeError("output gradient has length " + std::to_string(output_grad.size()) +
                     ", network output is " + std::to_string(net.output_dim()));
  }
  check_finite(output_grad, "gradient");
  Trace trace;
  forward_into(net, input, trace);

  std::vector<double> logit_grad(output_grad.begin(), output_grad.end());
  const auto& y = trace.output;
  switch (net.spec.head.kind) {
    case HeadKind::Softmax: {
      double gy = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) gy += output_grad[i] * y[i];
      for (std::size_t i = 0; i < y.size(); ++i) logit_grad[i] = y[i] * (output_grad[i] - gy);
      break;
    }
    case HeadKind::Sigmoid:
      logit_grad[0] = output_grad[0] * y[0] * (1.0 - y[0]);
      break;
    case HeadKind::Linear: break;
  }
  Gradients grads = net.zero_gradients();
  accumulate_from_logits(net, trace, logit_grad, grads);
  return grads;
}

}  // namespace gcgail::nn
