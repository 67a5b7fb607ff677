#pragma once

// Behaviour cloning and the adversarial imitation family (GAIL, cGAIL,
// gcGAIL). The three adversarial variants share every line of code and
// differ only in the ConditioningMode used to encode inputs.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gcgail/mdp.hpp"
#include "gcgail/nn.hpp"

namespace gcgail::panel {
class KvFile;
}

namespace gcgail::trainers {

enum class ModelKind { Bc, Gail, Cgail, Gcgail };

std::string model_name(ModelKind kind);
ModelKind parse_model(const std::string& name);  // ValidationError
mdp::ConditioningMode default_mode(ModelKind kind);

struct TrainConfig {
  double clip_eps = 0.2;
  double gae_lambda = 0.95;
  double gamma = 0.95;
  double learning_rate = 1e-4;
  std::size_t batch_size = 256;
  int ppo_epochs = 30;
  std::uint64_t seed = 0;
  int patience = 20;
  double disc_acc_low = 0.45;
  double disc_acc_high = 0.55;
  int band_dwell = 5;    // 0 disables the discriminator-accuracy stop
  int band_warmup = 100;  // iterations before the band stop may fire
  int eval_interval = 5;  // iterations per held-out evaluation
  int rollout_passengers = 64;
  int max_iterations = 200;
  mdp::ConditioningMode mode = mdp::ConditioningMode::GroupConditioned;

  double value_coef = 0.5;
  double entropy_coef = 0.0;
  double grad_clip = 0.0;  // 0 = none
  // Discriminator step size; defaults to learning_rate when unset.
  std::optional<double> disc_learning_rate;
  std::vector<std::size_t> hidden{64, 64};
  // Share of the training passengers held out for per-iteration evaluation.
  double validation_fraction = 0.1;

  void validate() const;  // ConfigError
  double disc_lr() const { return disc_learning_rate.value_or(learning_rate); }
  nlohmann::json to_json() const;
  // Keys of `kv` that name TrainConfig fields override the defaults.
  void apply(const panel::KvFile& kv);
  static std::span<const std::string_view> keys();
};

// ---------------------------------------------------------------------------
// Rollouts

struct StepRecord {
  std::vector<double> input;  // encoded (state, condition)
  int action = 0;
  double log_prob = 0.0;  // under the behaviour policy
  double value = 0.0;
  double reward = 0.0;
  double advantage = 0.0;      // normalized over the batch
  double raw_advantage = 0.0;  // before normalization
  double ret = 0.0;
};

struct Episode {
  std::int64_t passenger_id = 0;
  std::vector<StepRecord> steps;
};

struct RolloutBatch {
  std::vector<Episode> episodes;

  std::size_t size() const;
};

// Replays every passenger's panel under `policy`: the first stored state is
// the start, each sampled action feeds transition(). The RNG stream of each
// episode depends only on (seed, passenger id), never on thread scheduling.
// GCGAIL_THREADS caps the worker count. Throws ValidationError when empty.
RolloutBatch collect_rollouts(const nn::Network& policy, const nn::Network& value,
                              std::span<const mdp::ExpertTrajectory> passengers,
                              const mdp::FeatureNormalizer& norm, mdp::ConditioningMode mode,
                              std::uint64_t seed);

std::size_t thread_count();

// ---------------------------------------------------------------------------
// Discriminator

inline constexpr double kDiscClamp = 1e-8;

double clamp_d(double d);
// -log(1 - d) with d clamped first.
double surrogate_reward(double d);

// Discriminator input: encoded state followed by a one-hot action.
std::vector<double> disc_input(std::span<const double> encoded, int action);
std::size_t disc_input_dim(mdp::ConditioningMode mode);

struct DiscBatch {
  std::vector<std::vector<double>> inputs;  // disc_input rows
};

struct DiscResult {
  double objective = 0.0;  // mean log D(expert) + mean log(1 - D(policy))
  double accuracy = 0.0;   // threshold 0.5, D = 0.5 counts as policy
};

DiscResult discriminator_objective(const nn::Network& disc, const DiscBatch& expert,
                                   const DiscBatch& policy);
// One ascent step on the objective over both full batches; returns the
// post-update objective and accuracy.
DiscResult discriminator_update(nn::Network& disc, nn::AdamState& adam, const DiscBatch& expert,
                                const DiscBatch& policy);

// ---------------------------------------------------------------------------
// GAE and PPO

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// values has T + 1 entries; the last is the terminal bootstrap.
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      double gamma, double lambda);

// Fills advantage/raw_advantage/ret of every step (terminal value 0) and
// normalizes advantages to zero mean and unit std over the whole batch.
void assign_advantages(RolloutBatch& batch, double gamma, double lambda);

// min(w A, clip(w, 1 - eps, 1 + eps) A)
double ppo_clip_term(double ratio, double advantage, double eps);

struct PpoStats {
  double objective = 0.0;   // mean clipped term over every processed sample
  double value_loss = 0.0;  // mean squared error to returns, same samples
  std::size_t skipped = 0;  // samples with a non-finite ratio
};

PpoStats ppo_update(nn::Network& policy, nn::AdamState& policy_adam, nn::Network& value,
                    nn::AdamState& value_adam, const RolloutBatch& batch, const TrainConfig& cfg,
                    std::uint64_t shuffle_seed);

// ---------------------------------------------------------------------------
// Stopping

enum class StopReason { None, Patience, DiscriminatorBand, MaxIterations };

std::string stop_reason_name(StopReason r);

class StoppingRule {
 public:
  StoppingRule(int patience, int band_dwell, int band_warmup, double band_low, double band_high);
  explicit StoppingRule(const TrainConfig& cfg)
      : StoppingRule(cfg.patience, cfg.band_dwell, cfg.band_warmup, cfg.disc_acc_low,
                     cfg.disc_acc_high) {}

  // Records one evaluation; returns true when it is a new best.
  bool observe_eval(double score);
  // Records one iteration's post-update discriminator accuracy.
  void observe_disc(double accuracy);

  StopReason verdict() const;

  int evaluations() const { return evaluations_; }
  int evals_since_improvement() const { return since_improvement_; }
  double best() const { return best_; }
  int in_band_streak() const { return band_streak_; }

 private:
  int patience_;
  int dwell_;
  int warmup_;
  double low_;
  double high_;
  int evaluations_ = 0;
  int since_improvement_ = 0;
  double best_ = -1.0;
  int iterations_ = 0;
  int band_streak_ = 0;
};

// ---------------------------------------------------------------------------
// Training

struct LogRow {
  int iter = 0;
  double disc_loss = 0.0;
  double disc_acc = 0.0;
  double mean_reward = 0.0;
  double ppo_objective = 0.0;
  double value_loss = 0.0;
  std::optional<double> eval_acc;  // only on evaluation iterations
  double wall_ms = 0.0;
};

struct Model {
  ModelKind kind = ModelKind::Gcgail;
  mdp::ConditioningMode mode = mdp::ConditioningMode::GroupConditioned;
  mdp::FeatureNormalizer normalizer;
  nn::Network policy;
  nn::AdamState policy_adam;
  std::optional<nn::Network> value;
  std::optional<nn::AdamState> value_adam;
  std::optional<nn::Network> discriminator;
  std::optional<nn::AdamState> disc_adam;
};

struct TrainResult {
  Model model;  // best-scoring checkpoint
  std::vector<LogRow> log;
  StopReason stop = StopReason::None;
  int iterations = 0;
  int best_iteration = 0;
  double best_score = 0.0;
  std::optional<std::string> abort_message;  // set when training diverged
};

// Argmax of the policy; ties go to action 0.
mdp::Action predict_action(const nn::Network& policy, const mdp::FeatureNormalizer& norm,
                           const mdp::StateVector& s, const mdp::ConditionVector& c,
                           mdp::ConditioningMode mode);
mdp::Action argmax_action(std::span<const double> probs);

// Action accuracy of the policy on stored expert states.
double action_accuracy(const nn::Network& policy, const mdp::FeatureNormalizer& norm,
                       std::span<const mdp::ExpertTrajectory> trajs, mdp::ConditioningMode mode);

// Deterministic split of a training set into (fit, validation) parts.
std::pair<std::vector<mdp::ExpertTrajectory>, std::vector<mdp::ExpertTrajectory>>
validation_split(std::span<const mdp::ExpertTrajectory> train, double fraction, std::uint64_t seed);

// Adversarial training loop. Divergence does not throw: the result carries
// abort_message and the log up to the failing iteration.
// `warm_start` resumes from existing networks and normalizer (mode must
// match cfg.mode); the Adam step sizes are taken from cfg.
TrainResult train_gail(std::span<const mdp::ExpertTrajectory> train, const TrainConfig& cfg,
                       ModelKind kind = ModelKind::Gcgail, const Model* warm_start = nullptr);

// Cross-entropy fit with Adam; one evaluation (validation loss) per epoch,
// patience as in cfg; max_iterations caps the epoch count.
TrainResult train_bc(std::span<const mdp::ExpertTrajectory> train, const TrainConfig& cfg);

// ---------------------------------------------------------------------------
// Files

nlohmann::json checkpoint_to_json(const Model& model, const TrainConfig& cfg,
                                  const TrainResult* result = nullptr);
Model checkpoint_from_json(const nlohmann::json& j);

struct LogHeader {
  std::string model;
  std::string scenario;
  std::string excluded_groups;
  std::uint64_t seed = 0;
};

void write_train_log(std::ostream& out, const LogHeader& header, const TrainConfig& cfg,
                     std::span<const LogRow> rows);

}  // namespace gcgail::trainers
