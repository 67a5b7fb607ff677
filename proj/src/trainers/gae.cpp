#include <cmath>

#include "gcgail/errors.hpp"
#include "gcgail/trainers.hpp"

namespace gcgail::trainers {

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      double gamma, double lambda) {
  const std::size_t T = rewards.size();
  if (values.size() != T + 1) {
    throw ShapeError("gae: " + std::to_string(T) + " rewards need " + std::to_string(T + 1) +
                     " values, got " + std::to_string(values.size()));
  }
  GaeResult out;
  out.advantages.assign(T, 0.0);
  out.returns.assign(T, 0.0);
  double next = 0.0;
  for (std::size_t t = T; t-- > 0;) {
    const double delta = rewards[t] + gamma * values[t + 1] - values[t];
    next = delta + gamma * lambda * next;
    out.advantages[t] = next;
    out.returns[t] = next + values[t];
  }
  return out;
}

void assign_advantages(RolloutBatch& batch, double gamma, double lambda) {
  std::vector<double> rewards, values;
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (auto& ep : batch.episodes) {
    rewards.clear();
    values.clear();
    for (const auto& s : ep.steps) {
      rewards.push_back(s.reward);
      values.push_back(s.value);
    }
    values.push_back(0.0);  // episodes end at the panel end
    const auto g = compute_gae(rewards, values, gamma, lambda);
    for (std::size_t t = 0; t < ep.steps.size(); ++t) {
      ep.steps[t].raw_advantage = g.advantages[t];
      ep.steps[t].ret = g.returns[t];
      sum += g.advantages[t];
      ++n;
    }
  }
  if (n == 0) return;
  const double mean = sum / static_cast<double>(n);
  for (const auto& ep : batch.episodes) {
    for (const auto& s : ep.steps) sq += (s.raw_advantage - mean) * (s.raw_advantage - mean);
  }
  const double sd = std::sqrt(sq / static_cast<double>(n));
  for (auto& ep : batch.episodes) {
    for (auto& s : ep.steps) {
      s.advantage = sd > 1e-12 ? (s.raw_advantage - mean) / sd : s.raw_advantage - mean;
    }
  }
}

std::size_t RolloutBatch::size() const {
  std::size_t n = 0;
  for (const auto& ep : episodes) n += ep.steps.size();
  return n;
}

}  // namespace gcgail::trainers
