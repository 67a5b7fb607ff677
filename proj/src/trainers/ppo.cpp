#include <algorithm>
#include <cmath>

#include "gcgail/errors.hpp"
#include "gcgail/rng.hpp"
#include "gcgail/trainers.hpp"

namespace gcgail::trainers {

double ppo_clip_term(double ratio, double advantage, double eps) {
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
  return std::min(ratio * advantage, clipped * advantage);
}

PpoStats ppo_update(nn::Network& policy, nn::AdamState& policy_adam, nn::Network& value,
                    nn::AdamState& value_adam, const RolloutBatch& batch, const TrainConfig& cfg,
                    std::uint64_t shuffle_seed) {
  std::vector<const StepRecord*> steps;
  steps.reserve(batch.size());
  for (const auto& ep : batch.episodes) {
    for (const auto& s : ep.steps) steps.push_back(&s);
  }
  PpoStats stats;
  if (steps.empty()) return stats;

  Rng rng = make_rng(shuffle_seed, 0, 0x70706f);
  nn::Gradients pg = policy.zero_gradients();
  nn::Gradients vg = value.zero_gradients();
  nn::Trace pt, vt;
  double logit_grad[2];
  double value_grad[1];
  double obj_sum = 0.0, vloss_sum = 0.0;
  std::size_t processed = 0;

  for (int epoch = 0; epoch < cfg.ppo_epochs; ++epoch) {
    for (std::size_t i = steps.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
      std::swap(steps[i - 1], steps[std::min(j, i - 1)]);
    }
    for (std::size_t lo = 0; lo < steps.size(); lo += cfg.batch_size) {
      const std::size_t hi = std::min(steps.size(), lo + cfg.batch_size);
      pg.set_zero();
      vg.set_zero();
      std::size_t used = 0;
      for (std::size_t k = lo; k < hi; ++k) {
        const StepRecord& s = *steps[k];
        nn::forward_into(policy, s.input, pt);
        const double logp = nn::log_softmax_at(pt.logits, static_cast<std::size_t>(s.action));
        const double ratio = std::exp(logp - s.log_prob);
        if (!std::isfinite(ratio)) {
          ++stats.skipped;
          continue;
        }
        ++used;
        const double A = s.advantage;
        const double term = ppo_clip_term(ratio, A, cfg.clip_eps);
        obj_sum += term;
        // The min picks the unclipped branch exactly when w A <= clip(w) A;
        // only then does the term depend on the parameters.
        const double clipped = std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
        const double dterm_dlogp = ratio * A <= clipped * A ? ratio * A : 0.0;
        // Descend -term: d/dlogits = -dterm/dlogp * (onehot - softmax).
        for (std::size_t a = 0; a < 2; ++a) {
          const double onehot = a == static_cast<std::size_t>(s.action) ? 1.0 : 0.0;
          logit_grad[a] = -dterm_dlogp * (onehot - pt.output[a]);
        }
        nn::accumulate_from_logits(policy, pt, logit_grad, pg);

        nn::forward_into(value, s.input, vt);
        const double err = vt.output[0] - s.ret;
        vloss_sum += err * err;
        value_grad[0] = cfg.value_coef * 2.0 * err;
        nn::accumulate_from_logits(value, vt, value_grad, vg);
        ++processed;
      }
      if (used == 0) continue;
      const double inv = 1.0 / static_cast<double>(used);
      pg.scale(inv);
      vg.scale(inv);
      nn::adam_update(policy, pg, policy_adam);
      nn::adam_update(value, vg, value_adam);
    }
  }
  if (processed > 0) {
    stats.objective = obj_sum / static_cast<double>(processed);
    stats.value_loss = vloss_sum / static_cast<double>(processed);
  }
  if (!std::isfinite(stats.objective) || !std::isfinite(stats.value_loss) ||
      !policy.all_finite() || !value.all_finite()) {
    throw NumericError("ppo update produced non-finite values");
  }
  return stats;
}

}  // namespace gcgail::trainers
