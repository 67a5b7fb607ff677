#include <cstdio>
#include <ostream>

#include "gcgail/errors.hpp"
#include "gcgail/trainers.hpp"

namespace gcgail::trainers {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "gcgail-checkpoint/1";

}  // namespace

json checkpoint_to_json(const Model& model, const TrainConfig& cfg, const TrainResult* result) {
  json j;
  j["format"] = kFormat;
  j["model"] = model_name(model.kind);
  j["conditioning"] = mdp::mode_name(model.mode);
  j["config"] = cfg.to_json();
  j["normalizer"] = model.normalizer.to_json();
  j["policy"] = nn::to_json(model.policy, &model.policy_adam);
  j["value"] = model.value ? nn::to_json(*model.value, model.value_adam ? &*model.value_adam : nullptr)
                           : json(nullptr);
  j["discriminator"] = model.discriminator
                           ? nn::to_json(*model.discriminator, model.disc_adam ? &*model.disc_adam : nullptr)
                           : json(nullptr);
  if (result) {
    j["training"] = {{"iterations", result->iterations},
                     {"best_iteration", result->best_iteration},
                     {"best_score", result->best_score},
                     {"stop_reason", stop_reason_name(result->stop)}};
  }
  return j;
}

Model checkpoint_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kFormat) {
      throw ValidationError("unsupported checkpoint format '" + j.at("format").get<std::string>() + "'");
    }
    Model m;
    m.kind = parse_model(j.at("model").get<std::string>());
    m.mode = mdp::parse_mode(j.at("conditioning").get<std::string>());
    m.normalizer = mdp::FeatureNormalizer::from_json(j.at("normalizer"));
    m.policy = nn::network_from_json(j.at("policy"));
    m.policy_adam = nn::adam_from_json(j.at("policy"), m.policy);
    if (m.policy.input_dim() != mdp::encoded_dim(m.mode) || m.policy.output_dim() != 2) {
      throw ShapeError("checkpoint policy shape does not match its conditioning mode");
    }
    if (!j.at("value").is_null()) {
      m.value = nn::network_from_json(j.at("value"));
      m.value_adam = nn::adam_from_json(j.at("value"), *m.value);
    }
    if (!j.at("discriminator").is_null()) {
      m.discriminator = nn::network_from_json(j.at("discriminator"));
      m.disc_adam = nn::adam_from_json(j.at("discriminator"), *m.discriminator);
    }
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed checkpoint: ") + e.what());
  }
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void write_train_log(std::ostream& out, const LogHeader& header, const TrainConfig& cfg,
                     std::span<const LogRow> rows) {
  out << "# model=" << header.model << '\n'
      << "# scenario=" << header.scenario << '\n'
      << "# excluded_groups=" << header.excluded_groups << '\n'
      << "# seed=" << header.seed << '\n'
      << "# conditioning=" << mdp::mode_name(cfg.mode) << '\n'
      << "# value_coef=" << num(cfg.value_coef) << '\n'
      << "# entropy_coef=" << num(cfg.entropy_coef) << '\n'
      << "# grad_clip=" << (cfg.grad_clip == 0.0 ? std::string("none") : num(cfg.grad_clip)) << '\n'
      << "# disc_learning_rate=" << num(cfg.disc_lr()) << '\n'
      << "# eval_interval=" << cfg.eval_interval << '\n'
      << "# band_dwell=" << cfg.band_dwell << " band_warmup=" << cfg.band_warmup << '\n'
      << "iter,disc_loss,disc_acc,mean_reward,ppo_objective,value_loss,eval_acc,wall_ms\n";
  for (const auto& r : rows) {
    out << r.iter << ',' << num(r.disc_loss) << ',' << num(r.disc_acc) << ',' << num(r.mean_reward)
        << ',' << num(r.ppo_objective) << ',' << num(r.value_loss) << ','
        << (r.eval_acc ? num(*r.eval_acc) : std::string("NA")) << ',' << num(r.wall_ms) << '\n';
  }
}

}  // namespace gcgail::trainers
