#include <cmath>

#include "gcgail/errors.hpp"
#include "gcgail/panel.hpp"
#include "gcgail/trainers.hpp"

namespace gcgail::trainers {

std::string model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Bc: return "bc";
    case ModelKind::Gail: return "gail";
    case ModelKind::Cgail: return "cgail";
    case ModelKind::Gcgail: return "gcgail";
  }
  return "unknown";
}

ModelKind parse_model(const std::string& name) {
  if (name == "bc") return ModelKind::Bc;
  if (name == "gail") return ModelKind::Gail;
  if (name == "cgail") return ModelKind::Cgail;
  if (name == "gcgail") return ModelKind::Gcgail;
  throw ValidationError("unknown model '" + name + "' (expected bc, gail, cgail or gcgail)");
}

// BC sees the raw condition features, like cGAIL.
mdp::ConditioningMode default_mode(ModelKind kind) {
  switch (kind) {
    case ModelKind::Gail: return mdp::ConditioningMode::Unconditioned;
    case ModelKind::Bc:
    case ModelKind::Cgail: return mdp::ConditioningMode::RawConditioned;
    case ModelKind::Gcgail: return mdp::ConditioningMode::GroupConditioned;
  }
  return mdp::ConditioningMode::Unconditioned;
}

void TrainConfig::validate() const {
  if (!(clip_eps > 0.0 && clip_eps < 1.0)) throw ConfigError("clip_eps must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (!(gae_lambda > 0.0 && gae_lambda <= 1.0)) throw ConfigError("gae_lambda must lie in (0, 1]");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (ppo_epochs < 1) throw ConfigError("ppo_epochs must be >= 1");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (rollout_passengers < 1) throw ConfigError("rollout_passengers must be >= 1");
  if (eval_interval < 1) throw ConfigError("eval_interval must be >= 1");
  if (band_dwell < 0 || band_warmup < 0) throw ConfigError("band_dwell and band_warmup must be >= 0");
  if (!(disc_acc_low <= disc_acc_high)) throw ConfigError("disc_acc_low must not exceed disc_acc_high");
  if (!(learning_rate >= 0.0) || !(disc_lr() >= 0.0)) throw ConfigError("learning rates must be >= 0");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation_fraction must lie in [0, 1)");
  }
  if (entropy_coef != 0.0 || grad_clip != 0.0) {
    throw ConfigError("entropy bonus and gradient clipping are not supported");
  }
  if (hidden.empty()) throw ConfigError("hidden must list at least one layer width");
  for (auto h : hidden) {
    if (h == 0) throw ConfigError("hidden layer widths must be >= 1");
  }
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json j = {{"clip_eps", clip_eps},
                      {"gae_lambda", gae_lambda},
                      {"gamma", gamma},
                      {"learning_rate", learning_rate},
                      {"disc_learning_rate", disc_lr()},
                      {"batch_size", batch_size},
                      {"ppo_epochs", ppo_epochs},
                      {"seed", seed},
                      {"patience", patience},
                      {"disc_acc_band", {disc_acc_low, disc_acc_high}},
                      {"band_dwell", band_dwell},
                      {"band_warmup", band_warmup},
                      {"eval_interval", eval_interval},
                      {"rollout_passengers", rollout_passengers},
                      {"max_iterations", max_iterations},
                      {"conditioning", mdp::mode_name(mode)},
                      {"value_coef", value_coef},
                      {"entropy_coef", entropy_coef},
                      {"grad_clip", grad_clip},
                      {"hidden", hidden},
                      {"validation_fraction", validation_fraction}};
  return j;
}

namespace {

constexpr std::string_view kTrainKeys[] = {
    "clip_eps",   "gae_lambda",         "gamma",         "learning_rate",      "disc_learning_rate",
    "batch_size", "ppo_epochs",         "patience",      "disc_acc_low",       "disc_acc_high",
    "band_dwell", "band_warmup", "eval_interval",        "rollout_passengers", "max_iterations", "value_coef",
    "hidden",     "validation_fraction"};

}  // namespace

std::span<const std::string_view> TrainConfig::keys() { return kTrainKeys; }

void TrainConfig::apply(const panel::KvFile& kv) {
  clip_eps = kv.get_double("clip_eps", clip_eps);
  gae_lambda = kv.get_double("gae_lambda", gae_lambda);
  gamma = kv.get_double("gamma", gamma);
  learning_rate = kv.get_double("learning_rate", learning_rate);
  if (kv.has("disc_learning_rate")) disc_learning_rate = kv.get_double("disc_learning_rate", 0.0);
  const auto bs = kv.get_int("batch_size", static_cast<long long>(batch_size));
  if (bs < 1) throw ConfigError("batch_size must be >= 1");
  batch_size = static_cast<std::size_t>(bs);
  ppo_epochs = static_cast<int>(kv.get_int("ppo_epochs", ppo_epochs));
  patience = static_cast<int>(kv.get_int("patience", patience));
  disc_acc_low = kv.get_double("disc_acc_low", disc_acc_low);
  disc_acc_high = kv.get_double("disc_acc_high", disc_acc_high);
  band_dwell = static_cast<int>(kv.get_int("band_dwell", band_dwell));
  band_warmup = static_cast<int>(kv.get_int("band_warmup", band_warmup));
  eval_interval = static_cast<int>(kv.get_int("eval_interval", eval_interval));
  rollout_passengers = static_cast<int>(kv.get_int("rollout_passengers", rollout_passengers));
  max_iterations = static_cast<int>(kv.get_int("max_iterations", max_iterations));
  value_coef = kv.get_double("value_coef", value_coef);
  validation_fraction = kv.get_double("validation_fraction", validation_fraction);
  if (kv.has("hidden")) {
    hidden.clear();
    for (const auto& h : kv.get_list("hidden")) {
      try {
        const long long v = std::stoll(h);
        if (v < 1) throw ConfigError("hidden layer widths must be >= 1");
        hidden.push_back(static_cast<std::size_t>(v));
      } catch (const std::logic_error&) {
        throw ConfigError(kv.origin() + ": bad hidden width '" + h + "'");
      }
    }
  }
  validate();
}

std::string stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::None: return "none";
    case StopReason::Patience: return "patience";
    case StopReason::DiscriminatorBand: return "discriminator_band";
    case StopReason::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

StoppingRule::StoppingRule(int patience, int band_dwell, int band_warmup, double band_low,
                           double band_high)
    : patience_(patience), dwell_(band_dwell), warmup_(band_warmup), low_(band_low),
      high_(band_high) {}

bool StoppingRule::observe_eval(double score) {
  ++evaluations_;
  if (evaluations_ == 1 || score > best_) {
    best_ = score;
    since_improvement_ = 0;
    return true;
  }
  ++since_improvement_;
  return false;
}

void StoppingRule::observe_disc(double accuracy) {
  ++iterations_;
  band_streak_ = (accuracy >= low_ && accuracy <= high_) ? band_streak_ + 1 : 0;
}

StopReason StoppingRule::verdict() const {
  if (since_improvement_ >= patience_) return StopReason::Patience;
  if (dwell_ > 0 && band_streak_ >= dwell_ && iterations_ >= warmup_) {
    return StopReason::DiscriminatorBand;
  }
  return StopReason::None;
}

}  // namespace gcgail::trainers
