#include <algorithm>
#include <cmath>

#include "gcgail/errors.hpp"
#include "gcgail/trainers.hpp"

namespace gcgail::trainers {

double clamp_d(double d) { return std::clamp(d, kDiscClamp, 1.0 - kDiscClamp); }

double surrogate_reward(double d) { return -std::log(1.0 - clamp_d(d)); }

std::vector<double> disc_input(std::span<const double> encoded, int action) {
  std::vector<double> x(encoded.begin(), encoded.end());
  x.push_back(action == 0 ? 1.0 : 0.0);
  x.push_back(action == 1 ? 1.0 : 0.0);
  return x;
}

std::size_t disc_input_dim(mdp::ConditioningMode mode) { return mdp::encoded_dim(mode) + 2; }

DiscResult discriminator_objective(const nn::Network& disc, const DiscBatch& expert,
                                   const DiscBatch& policy) {
  if (expert.inputs.empty() || policy.inputs.empty()) {
    throw ValidationError("discriminator needs non-empty expert and policy batches");
  }
  nn::Trace tr;
  double le = 0.0, lp = 0.0;
  std::size_t correct = 0;
  for (const auto& x : expert.inputs) {
    nn::forward_into(disc, x, tr);
    const double d = tr.output[0];
    le += std::log(clamp_d(d));
    if (d > 0.5) ++correct;
  }
  for (const auto& x : policy.inputs) {
    nn::forward_into(disc, x, tr);
    const double d = tr.output[0];
    lp += std::log(1.0 - clamp_d(d));
    if (d <= 0.5) ++correct;
  }
  DiscResult r;
  r.objective = le / static_cast<double>(expert.inputs.size()) +
                lp / static_cast<double>(policy.inputs.size());
  r.accuracy = static_cast<double>(correct) /
               static_cast<double>(expert.inputs.size() + policy.inputs.size());
  return r;
}

DiscResult discriminator_update(nn::Network& disc, nn::AdamState& adam, const DiscBatch& expert,
                                const DiscBatch& policy) {
  if (expert.inputs.empty() || policy.inputs.empty()) {
    throw ValidationError("discriminator needs non-empty expert and policy batches");
  }
  nn::Gradients g = disc.zero_gradients();
  nn::Trace tr;
  double grad[1];
  // Descend -L_D. With z the logit: d(-log D)/dz = D - 1, d(-log(1-D))/dz = D.
  const double we = 1.0 / static_cast<double>(expert.inputs.size());
  const double wp = 1.0 / static_cast<double>(policy.inputs.size());
  for (const auto& x : expert.inputs) {
    nn::forward_into(disc, x, tr);
    grad[0] = we * (tr.output[0] - 1.0);
    nn::accumulate_from_logits(disc, tr, grad, g);
  }
  for (const auto& x : policy.inputs) {
    nn::forward_into(disc, x, tr);
    grad[0] = wp * tr.output[0];
    nn::accumulate_from_logits(disc, tr, grad, g);
  }
  nn::adam_update(disc, g, adam);
  if (!disc.all_finite()) throw NumericError("discriminator parameters went non-finite");
  return discriminator_objective(disc, expert, policy);
}

}  // namespace gcgail::trainers
