#include <algorithm>
#include <chrono>
#include <cmath>

#include "gcgail/errors.hpp"
#include "gcgail/rng.hpp"
#include "gcgail/trainers.hpp"

namespace gcgail::trainers {

namespace {

constexpr std::uint64_t kBcSalt = 0x6263;

struct Sample {
  std::vector<double> x;
  int a = 0;
};

std::vector<Sample> samples_of(std::span<const mdp::ExpertTrajectory> trajs,
                               const mdp::FeatureNormalizer& norm, mdp::ConditioningMode mode) {
  std::vector<Sample> out;
  for (const auto& t : trajs) {
    for (const auto& o : t.observations) {
      Sample s;
      s.x = norm.encode(o.state, t.condition, mode).features;
      s.a = mdp::to_int(o.action);
      out.push_back(std::move(s));
    }
  }
  return out;
}

// Mean cross-entropy and accuracy.
std::pair<double, double> evaluate(const nn::Network& policy, const std::vector<Sample>& data) {
  nn::Trace tr;
  double loss = 0.0;
  std::size_t correct = 0;
  for (const auto& s : data) {
    nn::forward_into(policy, s.x, tr);
    loss -= nn::log_softmax_at(tr.logits, static_cast<std::size_t>(s.a));
    correct += (tr.logits[1] > tr.logits[0] ? 1 : 0) == s.a ? 1 : 0;
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, data.size()));
  return {loss / n, static_cast<double>(correct) / n};
}

}  // namespace

TrainResult train_bc(std::span<const mdp::ExpertTrajectory> train, const TrainConfig& cfg) {
  cfg.validate();
  if (train.empty()) throw ValidationError("empty training set");
  const auto mode = cfg.mode;
  auto [fit, val] = validation_split(train, cfg.validation_fraction, cfg.seed);

  Model m;
  m.kind = ModelKind::Bc;
  m.mode = mode;
  m.normalizer = mdp::FeatureNormalizer::fit(fit);
  nn::MlpSpec spec;
  spec.input_dim = mdp::encoded_dim(mode);
  spec.hidden_dims = cfg.hidden;
  spec.head = nn::Head::softmax(2);
  m.policy = nn::Network::glorot(spec, derive_seed(cfg.seed, 1));
  m.policy_adam = nn::AdamState::for_network(m.policy, nn::AdamConfig{cfg.learning_rate});

  const auto data = samples_of(fit, m.normalizer, mode);
  const auto held = val.empty() ? data : samples_of(val, m.normalizer, mode);
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  StoppingRule stop(cfg.patience, 0, 0, cfg.disc_acc_low, cfg.disc_acc_high);
  nn::Gradients g = m.policy.zero_gradients();
  nn::Trace tr;
  double logit_grad[2];

  for (int epoch = 1; epoch <= cfg.max_iterations; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng = make_rng(cfg.seed, static_cast<std::uint64_t>(epoch), kBcSalt);
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
      std::swap(order[i - 1], order[std::min(j, i - 1)]);
    }
    double train_loss = 0.0;
    try {
      for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch_size) {
        const std::size_t hi = std::min(order.size(), lo + cfg.batch_size);
        g.set_zero();
        for (std::size_t k = lo; k < hi; ++k) {
          const Sample& s = data[order[k]];
          nn::forward_into(m.policy, s.x, tr);
          train_loss -= nn::log_softmax_at(tr.logits, static_cast<std::size_t>(s.a));
          for (std::size_t a = 0; a < 2; ++a) {
            logit_grad[a] = tr.output[a] - (static_cast<int>(a) == s.a ? 1.0 : 0.0);
          }
          nn::accumulate_from_logits(m.policy, tr, logit_grad, g);
        }
        g.scale(1.0 / static_cast<double>(hi - lo));
        nn::adam_update(m.policy, g, m.policy_adam);
      }
      if (!m.policy.all_finite() || !std::isfinite(train_loss)) {
        throw NumericError("behaviour cloning diverged");
      }
    } catch (const NumericError& e) {
      result.abort_message = "epoch " + std::to_string(epoch) + ": " + e.what();
      result.iterations = epoch;
      break;
    }
    const auto [val_loss, val_acc] = evaluate(m.policy, held);
    LogRow row;
    row.iter = epoch;
    row.ppo_objective = -train_loss / static_cast<double>(std::max<std::size_t>(1, data.size()));
    row.value_loss = val_loss;
    row.eval_acc = val_acc;
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    result.log.push_back(row);
    result.iterations = epoch;
    if (stop.observe_eval(-val_loss)) {
      result.model = m;
      result.best_iteration = epoch;
      result.best_score = val_acc;
    }
    result.stop = stop.verdict();
    if (result.stop != StopReason::None) break;
  }
  if (result.stop == StopReason::None && !result.abort_message) result.stop = StopReason::MaxIterations;
  if (result.best_iteration == 0) result.model = m;
  return result;
}

}  // namespace gcgail::trainers
