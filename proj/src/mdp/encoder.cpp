#include <algorithm>
#include <cmath>

#include "gcgail/errors.hpp"
#include "gcgail/mdp.hpp"

namespace gcgail::mdp {

std::string mode_name(ConditioningMode mode) {
  switch (mode) {
    case ConditioningMode::Unconditioned: return "Unconditioned";
    case ConditioningMode::RawConditioned: return "RawConditioned";
    case ConditioningMode::GroupConditioned: return "GroupConditioned";
  }
  return "Unknown";
}

ConditioningMode parse_mode(const std::string& name) {
  if (name == "Unconditioned") return ConditioningMode::Unconditioned;
  if (name == "RawConditioned") return ConditioningMode::RawConditioned;
  if (name == "GroupConditioned") return ConditioningMode::GroupConditioned;
  throw ValidationError("unknown conditioning mode: " + name);
}

std::size_t encoded_dim(ConditioningMode mode) {
  switch (mode) {
    case ConditioningMode::Unconditioned: return kStateDim;
    case ConditioningMode::RawConditioned: return kStateDim + kConditionDim;
    case ConditioningMode::GroupConditioned: return kStateDim + kConditionDim * kGroupCount;
  }
  return kStateDim;
}

namespace {

template <std::size_t N>
void moments(const std::vector<std::array<double, N>>& rows, std::array<double, N>& mean,
             std::array<double, N>& stdev) {
  mean.fill(0.0);
  stdev.fill(0.0);
  if (rows.empty()) return;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < N; ++i) mean[i] += r[i];
  }
  for (double& m : mean) m /= n;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < N; ++i) stdev[i] += (r[i] - mean[i]) * (r[i] - mean[i]);
  }
  for (double& s : stdev) s = std::sqrt(s / n);
}

double zscore(double v, double mean, double sd) {
  if (!(sd > 0.0)) return 0.0;
  return std::clamp((v - mean) / sd, -kClip, kClip);
}

}  // namespace

FeatureNormalizer FeatureNormalizer::fit(std::span<const ExpertTrajectory> training) {
  std::vector<std::array<double, kContinuous>> state_rows;
  std::vector<std::array<double, kConditionDim>> cond_rows;
  for (const auto& traj : training) {
    cond_rows.push_back(traj.condition.raw());
    for (const auto& obs : traj.observations) {
      const auto full = obs.state.to_array();
      std::array<double, kContinuous> row{};
      std::copy_n(full.begin(), kContinuous, row.begin());
      state_rows.push_back(row);
    }
  }
  if (state_rows.empty()) throw ValidationError("cannot fit normalizer on empty training set");
  FeatureNormalizer n;
  moments(state_rows, n.state_mean_, n.state_std_);
  moments(cond_rows, n.cond_mean_, n.cond_std_);
  n.fitted_ = true;
  return n;
}

void FeatureNormalizer::encode_into(const StateVector& s, const ConditionVector& c,
                                    ConditioningMode mode, std::span<double> out) const {
  if (!fitted_) throw StateError("normalizer used before fit");
  if (out.size() != encoded_dim(mode)) throw ShapeError("encode buffer has wrong length");
  const auto full = s.to_array();
  for (std::size_t i = 0; i < kContinuous; ++i) {
    out[i] = zscore(full[i], state_mean_[i], state_std_[i]);
  }
  for (std::size_t i = kContinuous; i < kStateDim; ++i) out[i] = full[i];

  switch (mode) {
    case ConditioningMode::Unconditioned: break;
    case ConditioningMode::RawConditioned: {
      const auto raw = c.raw();
      for (std::size_t i = 0; i < kConditionDim; ++i) {
        out[kStateDim + i] = zscore(raw[i], cond_mean_[i], cond_std_[i]);
      }
      break;
    }
    case ConditioningMode::GroupConditioned: {
      std::fill(out.begin() + kStateDim, out.end(), 0.0);
      for (std::size_t i = 0; i < kConditionDim; ++i) {
        const int g = c.groups[i];
        if (g < 1 || g > static_cast<int>(kGroupCount)) {
          throw ValidationError("group label must be in 1..4, got " + std::to_string(g));
        }
        out[kStateDim + i * kGroupCount + static_cast<std::size_t>(g - 1)] = 1.0;
      }
      break;
    }
  }
}

EncodedInput FeatureNormalizer::encode(const StateVector& s, const ConditionVector& c,
                                       ConditioningMode mode) const {
  EncodedInput e;
  e.mode = mode;
  e.features.resize(encoded_dim(mode));
  encode_into(s, c, mode, e.features);
  return e;
}

nlohmann::json FeatureNormalizer::to_json() const {
  return nlohmann::json{{"fitted", fitted_},
                        {"state_mean", state_mean_},
                        {"state_std", state_std_},
                        {"cond_mean", cond_mean_},
                        {"cond_std", cond_std_}};
}

FeatureNormalizer FeatureNormalizer::from_json(const nlohmann::json& j) {
  FeatureNormalizer n;
  n.fitted_ = j.at("fitted").get<bool>();
  n.state_mean_ = j.at("state_mean").get<std::array<double, kContinuous>>();
  n.state_std_ = j.at("state_std").get<std::array<double, kContinuous>>();
  n.cond_mean_ = j.at("cond_mean").get<std::array<double, kConditionDim>>();
  n.cond_std_ = j.at("cond_std").get<std::array<double, kConditionDim>>();
  return n;
}

}  // namespace gcgail::mdp
