#pragma once

// Fixed-shape feed-forward networks with hand-written backprop and Adam.
//
// All hidden layers are affine + ReLU; the head is softmax, identity or
// logistic sigmoid. ReLU'(0) is taken as 0. Everything is double precision.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace gcgail::nn {

enum class HeadKind { Softmax, Linear, Sigmoid };

std::string head_name(HeadKind kind);
HeadKind parse_head(const std::string& name);

struct Head {
  HeadKind kind = HeadKind::Linear;
  std::size_t outputs = 1;

  static Head softmax(std::size_t n_actions) { return {HeadKind::Softmax, n_actions}; }
  static Head linear() { return {HeadKind::Linear, 1}; }
  static Head sigmoid() { return {HeadKind::Sigmoid, 1}; }

  bool operator==(const Head&) const = default;
};

struct MlpSpec {
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden_dims{64, 64};
  Head head;

  std::size_t output_dim() const { return head.outputs; }
  // Throws ShapeError when a dimension is zero, the hidden list is empty, or
  // the head's output count contradicts its kind.
  void validate() const;

  bool operator==(const MlpSpec&) const = default;
};

// One affine layer; `w` is row-major with `rows` = fan_out, `cols` = fan_in.
struct Layer {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> w;
  std::vector<double> b;

  std::span<const double> row(std::size_t r) const { return {w.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) { return {w.data() + r * cols, cols}; }

  bool operator==(const Layer&) const = default;
};

// Gradients share the exact layer layout of the parameters they belong to.
struct Gradients {
  std::vector<Layer> layers;

  void set_zero();
  void scale(double factor);
  void add(const Gradients& other);
  double max_abs() const;
};

struct Network {
  MlpSpec spec;
  std::vector<Layer> layers;

  static Network zeros(const MlpSpec& spec);
  // Glorot-uniform weights, zero biases.
  static Network glorot(const MlpSpec& spec, std::uint64_t seed);

  std::size_t input_dim() const { return spec.input_dim; }
  std::size_t output_dim() const { return spec.output_dim(); }
  std::size_t parameter_count() const;
  bool all_finite() const;
  Gradients zero_gradients() const;

  bool operator==(const Network&) const = default;
};

// Intermediate values of one forward pass, reusable across calls to avoid
// per-sample allocation. activations[0] is the input, activations[k] the
// post-ReLU output of hidden layer k; logits holds the head pre-activation.
struct Trace {
  std::vector<std::vector<double>> activations;
  std::vector<double> logits;
  std::vector<double> output;
  // backward scratch
  std::vector<double> delta;
  std::vector<double> delta_prev;
};

void forward_into(const Network& net, std::span<const double> input, Trace& trace);
std::vector<double> forward(const Network& net, std::span<const double> input);

// Accumulates d(loss)/d(params) into `grads` given d(loss)/d(logits) for the
// trace produced by forward_into on the same network. Only the trace's
// backward scratch is modified.
void accumulate_from_logits(const Network& net, Trace& trace,
                            std::span<const double> logit_grad, Gradients& grads);

// Gradient of a loss with respect to every parameter, given the gradient of
// that loss with respect to the network output (post-head).
Gradients backprop(const Network& net, std::span<const double> input,
                   std::span<const double> output_grad);

// Head helpers shared with the trainers.
void softmax_in_place(std::span<double> values);
double sigmoid(double z);
double log_softmax_at(std::span<const double> logits, std::size_t index);

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  bool operator==(const AdamConfig&) const = default;
};

struct AdamState {
  AdamConfig config;
  std::vector<Layer> first_moment;
  std::vector<Layer> second_moment;
  std::uint64_t step_count = 0;

  static AdamState for_network(const Network& net, AdamConfig config = {});

  bool operator==(const AdamState&) const = default;
};

// One bias-corrected Adam step (in place). Throws ShapeError on layout
// mismatch and NumericError on non-finite gradients.
void adam_update(Network& net, const Gradients& grads, AdamState& state);

// Scalar loss over a network output; writes d(loss)/d(output) into grad.
using OutputLoss = std::function<double(std::span<const double> output, std::span<double> grad)>;

OutputLoss cross_entropy_loss(std::size_t target);
OutputLoss squared_error_loss(std::vector<double> target);
// Binary log-loss for a sigmoid head: -[y log p + (1-y) log(1-p)].
OutputLoss binary_log_loss(double label);

// Maximum elementwise relative error |a - n| / max(|a|, |n|, 1e-7) between
// backprop and central differences with step h. Two zero gradients count as
// zero error.
double grad_check(const Network& net, std::span<const double> input, const OutputLoss& loss,
                  double h = 1e-5);
// Builds a Glorot network and a random input from `seed` (input redrawn
// until every hidden pre-activation is at least 1e-3 away from the ReLU
// kink) and checks it.
double grad_check(const MlpSpec& spec, const OutputLoss& loss, std::uint64_t seed);

// Checkpoint format:
// {spec, layers: [{w, rows, cols, b}], adam: {m, v, t, ...}}
nlohmann::json to_json(const Network& net, const AdamState* adam = nullptr);
Network network_from_json(const nlohmann::json& j);
AdamState adam_from_json(const nlohmann::json& j, const Network& net);

}  // namespace gcgail::nn
