#pragma once

// Monthly departure-time MDP: state features, binary action, deterministic
// replay transition and the three input encodings used by the learners.
//
// A state observed at month m describes the most recently completed month
// (m - 1): its morning-trip averages and its mode label (lambda_t), plus the
// label of month m - 2 (lambda_prev). The action at month m is that month's
// mode label, so nothing in s_m is computed from month m's own trips.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace gcgail::mdp {

inline constexpr std::size_t kStateDim = 11;
inline constexpr std::size_t kConditionDim = 3;
inline constexpr std::size_t kGroupCount = 4;

enum class Action : std::uint8_t { Other = 0, OffPeak = 1 };

inline int to_int(Action a) { return static_cast<int>(a); }
// Throws ValidationError for anything other than 0 or 1.
Action action_from_int(int value);

struct StateVector {
  int l_home = 0;
  int l_work = 0;
  double d_t = 0.0;    // mean morning tap-in, minutes after midnight
  double e_t = 0.0;    // mean morning tap-out
  double c_t = 0.0;    // mean deducted fare
  double b_t = 0.0;    // mean minutes of shift needed to exit inside the window
  int m_p_t = 0;       // months since launch, negative before
  double m_s_t = 0.0;  // mean saving over discounted trips
  int w_u = 0;
  int lambda_t = 0;
  int lambda_prev = 0;

  // Table order: l_home, l_work, d, e, c, b, m_p, m_s, w, lambda_t, lambda_prev.
  std::array<double, kStateDim> to_array() const;
  static StateVector from_array(std::span<const double> values);
  // Throws ValidationError when a documented invariant is violated.
  void validate() const;

  bool operator==(const StateVector&) const = default;
};

struct ConditionVector {
  double flex_raw = 0.0;
  double con_raw = 0.0;
  double dis_raw = 0.0;
  std::array<int, kConditionDim> groups{1, 1, 1};  // flex, con, dis

  int g_flex() const { return groups[0]; }
  int g_con() const { return groups[1]; }
  int g_dis() const { return groups[2]; }
  std::array<double, kConditionDim> raw() const { return {flex_raw, con_raw, dis_raw}; }

  bool operator==(const ConditionVector&) const = default;
};

struct MonthlyObservation {
  std::int64_t passenger_id = 0;
  int month_index = 0;
  StateVector state;
  Action action = Action::Other;

  bool operator==(const MonthlyObservation&) const = default;
};

struct ExpertTrajectory {
  std::int64_t passenger_id = 0;
  std::vector<MonthlyObservation> observations;
  ConditionVector condition;

  bool operator==(const ExpertTrajectory&) const = default;
};

// Next state after taking `a` in `s`; std::nullopt when there is no next
// observation (end of the passenger's panel, episode terminates).
std::optional<StateVector> transition(const StateVector& s, Action a,
                                      const MonthlyObservation* next);

// States produced by starting from the first stored state and feeding the
// stored actions through transition().
std::vector<StateVector> replay(const ExpertTrajectory& traj);

enum class ConditioningMode { Unconditioned, RawConditioned, GroupConditioned };

std::string mode_name(ConditioningMode mode);
ConditioningMode parse_mode(const std::string& name);
std::size_t encoded_dim(ConditioningMode mode);

struct EncodedInput {
  std::vector<double> features;
  ConditioningMode mode = ConditioningMode::Unconditioned;
};

inline constexpr double kClip = 5.0;

// z-score statistics for the continuous state features and the raw
// condition values, fitted on training trajectories only. A feature whose
// training std is zero always normalizes to 0.
class FeatureNormalizer {
 public:
  static constexpr std::size_t kContinuous = 8;  // state indices 0..7

  static FeatureNormalizer fit(std::span<const ExpertTrajectory> training);

  bool fitted() const { return fitted_; }

  // Throws StateError when unfitted and ValidationError on a group label
  // outside 1..4.
  EncodedInput encode(const StateVector& s, const ConditionVector& c,
                      ConditioningMode mode) const;
  // Writes encoded_dim(mode) values into out.
  void encode_into(const StateVector& s, const ConditionVector& c, ConditioningMode mode,
                   std::span<double> out) const;

  nlohmann::json to_json() const;
  static FeatureNormalizer from_json(const nlohmann::json& j);

  const std::array<double, kContinuous>& state_mean() const { return state_mean_; }
  const std::array<double, kContinuous>& state_std() const { return state_std_; }

  bool operator==(const FeatureNormalizer&) const = default;

 private:
  bool fitted_ = false;
  std::array<double, kContinuous> state_mean_{};
  std::array<double, kContinuous> state_std_{};
  std::array<double, kConditionDim> cond_mean_{};
  std::array<double, kConditionDim> cond_std_{};
};

}  // namespace gcgail::mdp
