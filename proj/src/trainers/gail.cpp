#include <algorithm>
#include <chrono>
#include <cmath>

#include "gcgail/errors.hpp"
#include "gcgail/rng.hpp"
#include "gcgail/trainers.hpp"

namespace gcgail::trainers {

namespace {

constexpr std::uint64_t kValidationSalt = 0x76616c;
constexpr std::uint64_t kSelectSalt = 0x73656c;
constexpr std::uint64_t kIterSalt = 0x697472;
constexpr std::uint64_t kPpoSalt = 0x707073;

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(v[i - 1], v[std::min(j, i - 1)]);
  }
}

nn::MlpSpec spec_for(std::size_t input, const TrainConfig& cfg, nn::Head head) {
  nn::MlpSpec s;
  s.input_dim = input;
  s.hidden_dims = cfg.hidden;
  s.head = head;
  return s;
}

}  // namespace

mdp::Action argmax_action(std::span<const double> probs) {
  if (probs.size() != 2) throw ShapeError("policy output must have two entries");
  return probs[1] > probs[0] ? mdp::Action::OffPeak : mdp::Action::Other;
}

mdp::Action predict_action(const nn::Network& policy, const mdp::FeatureNormalizer& norm,
                           const mdp::StateVector& s, const mdp::ConditionVector& c,
                           mdp::ConditioningMode mode) {
  const auto x = norm.encode(s, c, mode);
  nn::Trace tr;
  nn::forward_into(policy, x.features, tr);
  // Compare logits: the probabilities may both clamp near the boundaries.
  return tr.logits[1] > tr.logits[0] ? mdp::Action::OffPeak : mdp::Action::Other;
}

double action_accuracy(const nn::Network& policy, const mdp::FeatureNormalizer& norm,
                       std::span<const mdp::ExpertTrajectory> trajs, mdp::ConditioningMode mode) {
  std::size_t n = 0, correct = 0;
  std::vector<double> x(mdp::encoded_dim(mode));
  nn::Trace tr;
  for (const auto& t : trajs) {
    for (const auto& o : t.observations) {
      norm.encode_into(o.state, t.condition, mode, x);
      nn::forward_into(policy, x, tr);
      const int pred = tr.logits[1] > tr.logits[0] ? 1 : 0;
      correct += pred == mdp::to_int(o.action) ? 1 : 0;
      ++n;
    }
  }
  return n == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(n);
}

std::pair<std::vector<mdp::ExpertTrajectory>, std::vector<mdp::ExpertTrajectory>>
validation_split(std::span<const mdp::ExpertTrajectory> train, double fraction, std::uint64_t seed) {
  std::vector<std::size_t> idx(train.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng = make_rng(seed, 0, kValidationSalt);
  shuffle(idx, rng);
  auto n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(train.size())));
  if (n_val >= train.size()) n_val = train.size() - 1;
  std::vector<std::size_t> val_idx(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> fit_idx(idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  std::sort(fit_idx.begin(), fit_idx.end());
  std::pair<std::vector<mdp::ExpertTrajectory>, std::vector<mdp::ExpertTrajectory>> out;
  for (auto i : fit_idx) out.first.push_back(train[i]);
  for (auto i : val_idx) out.second.push_back(train[i]);
  return out;
}

TrainResult train_gail(std::span<const mdp::ExpertTrajectory> train, const TrainConfig& cfg,
                       ModelKind kind, const Model* warm_start) {
  cfg.validate();
  if (train.empty()) throw ValidationError("empty training set");
  if (kind == ModelKind::Bc) throw ValidationError("train_gail cannot train a bc model");
  const auto mode = cfg.mode;
  auto [fit, val] = validation_split(train, cfg.validation_fraction, cfg.seed);
  const auto& eval_set = val.empty() ? fit : val;
  const std::size_t dim = mdp::encoded_dim(mode);

  Model m;
  m.kind = kind;
  m.mode = mode;
  if (warm_start) {
    if (warm_start->mode != mode || !warm_start->value || !warm_start->discriminator) {
      throw ConfigError("warm start model does not match the requested conditioning");
    }
    m = *warm_start;
    m.kind = kind;
  } else {
    m.normalizer = mdp::FeatureNormalizer::fit(fit);
    m.policy = nn::Network::glorot(spec_for(dim, cfg, nn::Head::softmax(2)), derive_seed(cfg.seed, 1));
    m.value = nn::Network::glorot(spec_for(dim, cfg, nn::Head::linear()), derive_seed(cfg.seed, 2));
    m.discriminator = nn::Network::glorot(spec_for(disc_input_dim(mode), cfg, nn::Head::sigmoid()),
                                          derive_seed(cfg.seed, 3));
  }
  nn::AdamConfig pa{cfg.learning_rate};
  nn::AdamConfig da{cfg.disc_lr()};
  if (!warm_start) {
    m.policy_adam = nn::AdamState::for_network(m.policy, pa);
    m.value_adam = nn::AdamState::for_network(*m.value, pa);
    m.disc_adam = nn::AdamState::for_network(*m.discriminator, da);
  } else {
    m.policy_adam.config = pa;
    m.value_adam->config = pa;
    m.disc_adam->config = da;
  }

  TrainResult result;
  StoppingRule stop(cfg);
  std::vector<std::size_t> order(fit.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t per_iter = std::min<std::size_t>(fit.size(), static_cast<std::size_t>(cfg.rollout_passengers));
  std::vector<double> x(dim);

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng sel = make_rng(cfg.seed, static_cast<std::uint64_t>(iter), kSelectSalt);
    shuffle(order, sel);
    std::vector<std::size_t> picked(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(per_iter));
    std::sort(picked.begin(), picked.end());
    std::vector<mdp::ExpertTrajectory> chosen;
    chosen.reserve(per_iter);
    for (auto i : picked) chosen.push_back(fit[i]);

    LogRow row;
    row.iter = iter;
    try {
      RolloutBatch batch = collect_rollouts(m.policy, *m.value, chosen, m.normalizer, mode,
                                            derive_seed(cfg.seed, static_cast<std::uint64_t>(iter), kIterSalt));
      DiscBatch expert, policy;
      for (const auto& t : chosen) {
        for (const auto& o : t.observations) {
          m.normalizer.encode_into(o.state, t.condition, mode, x);
          expert.inputs.push_back(disc_input(x, mdp::to_int(o.action)));
        }
      }
      for (const auto& ep : batch.episodes) {
        for (const auto& s : ep.steps) policy.inputs.push_back(disc_input(s.input, s.action));
      }
      const DiscResult dres = discriminator_update(*m.discriminator, *m.disc_adam, expert, policy);
      row.disc_loss = dres.objective;
      row.disc_acc = dres.accuracy;

      nn::Trace tr;
      double reward_sum = 0.0;
      std::size_t k = 0;
      for (auto& ep : batch.episodes) {
        for (auto& s : ep.steps) {
          nn::forward_into(*m.discriminator, policy.inputs[k++], tr);
          s.reward = surrogate_reward(tr.output[0]);
          reward_sum += s.reward;
        }
      }
      row.mean_reward = reward_sum / static_cast<double>(std::max<std::size_t>(1, k));
      assign_advantages(batch, cfg.gamma, cfg.gae_lambda);
      const PpoStats ps = ppo_update(m.policy, m.policy_adam, *m.value, *m.value_adam, batch, cfg,
                                     derive_seed(cfg.seed, static_cast<std::uint64_t>(iter), kPpoSalt));
      row.ppo_objective = ps.objective;
      row.value_loss = ps.value_loss;
      if (!std::isfinite(row.disc_loss) || !std::isfinite(row.mean_reward)) {
        throw NumericError("non-finite discriminator loss or reward");
      }
      // the last iteration is always scored so short runs still pick a model
      if (iter % cfg.eval_interval == 0 || iter == cfg.max_iterations) {
        row.eval_acc = action_accuracy(m.policy, m.normalizer, eval_set, mode);
      }
    } catch (const NumericError& e) {
      result.abort_message = "iteration " + std::to_string(iter) + ": " + e.what();
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      result.log.push_back(row);
      result.iterations = iter;
      break;
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    result.log.push_back(row);
    result.iterations = iter;

    if (row.eval_acc && stop.observe_eval(*row.eval_acc)) {
      result.model = m;
      result.best_iteration = iter;
      result.best_score = *row.eval_acc;
    }
    stop.observe_disc(row.disc_acc);
    result.stop = stop.verdict();
    if (result.stop != StopReason::None) break;
  }
  if (result.stop == StopReason::None && !result.abort_message) result.stop = StopReason::MaxIterations;
  if (result.best_iteration == 0) result.model = m;
  return result;
}

}  // namespace gcgail::trainers
