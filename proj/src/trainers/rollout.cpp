#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>

#include "gcgail/errors.hpp"
#include "gcgail/rng.hpp"
#include "gcgail/trainers.hpp"

namespace gcgail::trainers {

namespace {

constexpr std::uint64_t kRolloutSalt = 0x726f6c;

Episode run_episode(const nn::Network& policy, const nn::Network& value,
                    const mdp::ExpertTrajectory& traj, const mdp::FeatureNormalizer& norm,
                    mdp::ConditioningMode mode, std::uint64_t seed) {
  Episode ep;
  ep.passenger_id = traj.passenger_id;
  if (traj.observations.empty()) return ep;
  Rng rng = make_rng(seed, static_cast<std::uint64_t>(traj.passenger_id), kRolloutSalt);
  const std::size_t dim = mdp::encoded_dim(mode);
  nn::Trace pt, vt;
  std::optional<mdp::StateVector> s = traj.observations.front().state;
  ep.steps.reserve(traj.observations.size());
  for (std::size_t t = 0; t < traj.observations.size() && s; ++t) {
    StepRecord rec;
    rec.input.resize(dim);
    norm.encode_into(*s, traj.condition, mode, rec.input);
    nn::forward_into(policy, rec.input, pt);
    rec.action = uniform01(rng) < pt.output[1] ? 1 : 0;
    rec.log_prob = nn::log_softmax_at(pt.logits, static_cast<std::size_t>(rec.action));
    nn::forward_into(value, rec.input, vt);
    rec.value = vt.output[0];
    const auto* next = t + 1 < traj.observations.size() ? &traj.observations[t + 1] : nullptr;
    s = mdp::transition(*s, mdp::action_from_int(rec.action), next);
    ep.steps.push_back(std::move(rec));
  }
  return ep;
}

}  // namespace

std::size_t thread_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GCGAIL_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return n;
}

RolloutBatch collect_rollouts(const nn::Network& policy, const nn::Network& value,
                              std::span<const mdp::ExpertTrajectory> passengers,
                              const mdp::FeatureNormalizer& norm, mdp::ConditioningMode mode,
                              std::uint64_t seed) {
  if (passengers.empty()) throw ValidationError("no passengers to roll out");
  if (policy.output_dim() != 2) throw ShapeError("policy must have two outputs");
  RolloutBatch batch;
  batch.episodes.resize(passengers.size());
  const std::size_t workers = std::min(thread_count(), passengers.size());
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      batch.episodes[i] = run_episode(policy, value, passengers[i], norm, mode, seed);
    }
  };
  if (workers <= 1) {
    work(0, passengers.size());
    return batch;
  }
  const std::size_t chunk = (passengers.size() + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(passengers.size(), lo + chunk);
      pool.emplace_back([&, w, lo, hi] {
        try {
          work(lo, hi);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return batch;
}

}  // namespace gcgail::trainers
