#pragma once

// Synthetic smart-card panel: ground-truth generator, trip-level feature
// extraction, quartile grouping, adopter classification, train/test
// scenarios and file formats.

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gcgail/mdp.hpp"

namespace gcgail::panel {

// Observation window relative to the launch month.
inline constexpr int kFirstMonth = -2;
inline constexpr int kLastMonth = 13;
inline constexpr int kMonthCount = kLastMonth - kFirstMonth + 1;

// Minutes after midnight. The discount window is judged at tap-out.
inline constexpr double kEarlyOpen = 375.0;    // 6:15
inline constexpr double kWindowOpen = 435.0;   // 7:15
inline constexpr double kWindowClose = 495.0;  // 8:15
inline constexpr double kPeakClose = 555.0;    // 9:15
inline constexpr double kMorningCutoff = 720.0;
inline constexpr double kDiscountRate = 0.25;

// ---------------------------------------------------------------------------
// Key-value configuration files: `key = value` lines, '#' comments.

class KvFile {
 public:
  static KvFile parse(std::istream& in, const std::string& origin);
  static KvFile load(const std::string& path);  // IoError when unreadable

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }
  const std::string& origin() const { return origin_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;

  // ConfigError naming the first key not in `allowed`.
  void require_known(std::span<const std::string_view> allowed) const;

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

// ---------------------------------------------------------------------------
// Network and promotion.

struct PromotionConfig {
  std::chrono::year_month launch{std::chrono::year{2014}, std::chrono::September};
  int n_stations = 20;
  std::vector<int> discount_stations;  // sorted

  int month_index(std::chrono::year_month_day date) const;
  std::chrono::year_month month(int month_index) const;
  bool is_discount_station(int station) const;
  // Discount rule: weekday, launch reached, tap-out in [7:15, 8:15) and the
  // exit station is designated.
  bool discount_eligible(std::chrono::year_month_day date, double tap_out, int destination) const;
};

// Contiguous central block of ceil(29/98 * n_stations) stations.
std::vector<int> default_discount_stations(int n_stations);

// Minutes a trip's exit would have to move to land inside the window
// (0 when already inside).
double shift_to_window(double tap_out);

// ---------------------------------------------------------------------------
// Records.

struct TripRecord {
  std::int64_t passenger_id = 0;
  std::chrono::year_month_day date{};
  int month_index = 0;
  double tap_in = 0.0;
  double tap_out = 0.0;
  int origin = 0;
  int destination = 0;
  double fare = 0.0;  // undiscounted
  bool discount_applied = false;

  double deducted_fare() const { return discount_applied ? fare * (1.0 - kDiscountRate) : fare; }
  bool morning() const { return tap_in < kMorningCutoff; }

  bool operator==(const TripRecord&) const = default;
};

std::string iso_date(std::chrono::year_month_day d);
std::chrono::year_month_day parse_iso_date(const std::string& s);

enum AdopterType : unsigned {
  kEarly = 1u << 0,
  kLate = 1u << 1,
  kEarlyMorning = 1u << 2,
  kMorningPeak = 1u << 3,
  kAttrition = 1u << 4,
  kSustained = 1u << 5,
};

inline constexpr AdopterType kAllAdopterTypes[] = {kEarly,       kLate,      kEarlyMorning,
                                                   kMorningPeak, kAttrition, kSustained};

// Empty set = non-adopter.
struct AdopterTypes {
  unsigned bits = 0;

  bool adopter() const { return bits != 0; }
  bool has(AdopterType t) const { return (bits & t) != 0; }
  void add(AdopterType t) { bits |= t; }
  bool operator==(const AdopterTypes&) const = default;
};

std::string adopter_type_name(AdopterType t);
std::string describe(AdopterTypes types);

enum class BaselineBand { EarlyMorning, MorningPeak };

struct PassengerProfile {
  std::int64_t passenger_id = 0;
  int home_station = 0;
  int work_station = 0;
  double latent_flex = 0.0;  // daily tap-in std, minutes
  double latent_con = 0.0;   // baseline distance of exit time to the window
  double latent_dis = 0.0;   // mean morning trip duration
  BaselineBand band = BaselineBand::MorningPeak;
  double propensity = 0.0;
  AdopterTypes archetype;
  std::optional<int> adoption_month;
  std::optional<int> attrition_month;

  // Ground-truth monthly mode implied by the archetype schedule.
  int scheduled_mode(int month_index) const;
};

// ---------------------------------------------------------------------------
// Generator.

struct GeneratorConfig {
  int n_passengers = 2000;
  int n_stations = 20;
  std::vector<int> discount_stations;  // empty -> default block
  std::chrono::year_month launch{std::chrono::year{2014}, std::chrono::September};
  int weekdays_per_month = 10;

  // logit(p_adopt) = beta0 + beta_flex*[flex in Q3] + beta_con*[con in Q2]
  //                  + beta_dis*[dis in Q2] + beta_work*w
  double beta0 = -3.0;
  double beta_flex = 2.5;
  double beta_con = 2.5;
  double beta_dis = 2.5;
  double beta_work = 1.0;
  // Monthly adoption hazard = clamp(hazard_scale * p_adopt, 0.05, 0.95).
  double hazard_scale = 1.0;

  // Adopter persistence mixture (must sum to 1).
  double mix_sustained = 0.7;
  double mix_attrition = 0.3;
  // Pre-launch exit band mixture (must sum to 1).
  double band_early_morning = 0.35;
  double band_morning_peak = 0.65;

  double work_in_discount_prob = 0.5;
  double flex_median = 7.0;
  double flex_spread = 0.45;
  // Probability that an adopter exits in the old band on a given day.
  double slip_prob = 0.05;

  void validate() const;  // ConfigError
  PromotionConfig promotion() const;
  // Unknown keys are a ConfigError unless listed in `extra` (keys owned by
  // other sections of a shared configuration file).
  static GeneratorConfig from_kv(const KvFile& kv, std::span<const std::string_view> extra = {});
  static std::span<const std::string_view> keys();
  nlohmann::json to_json() const;
};

struct Population {
  std::vector<TripRecord> trips;  // ordered by passenger, date, tap-in
  std::vector<PassengerProfile> profiles;
};

Population synthesize_population(const GeneratorConfig& cfg, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Feature extraction.

// Modal home/work stations; ties go to the smallest id. Throws
// InsufficientDataError on an empty trip set.
std::pair<int, int> infer_home_work(std::span<const TripRecord> trips);

struct ModeLabel {
  mdp::Action action = mdp::Action::Other;
  bool no_data = false;
  int off_peak = 0;
  int peak = 0;
};

ModeLabel monthly_mode_label(std::span<const TripRecord> trips);

struct MonthStats {
  bool has_morning = false;
  double d = 0.0;
  double e = 0.0;
  double c = 0.0;
  double b = 0.0;
  double m_s = 0.0;
};

MonthStats month_statistics(std::span<const TripRecord> trips);

// Raw part only; group labels are assigned later across the population.
// Throws InsufficientDataError when either pre-launch month is missing.
mdp::ConditionVector compute_condition_features(std::span<const TripRecord> trips);

// Labels 1..4 by the 25/50/75 percentiles (linear interpolation); a value on
// a boundary takes the lower label. Throws ValidationError for < 4 values.
std::vector<int> quartile_grouping(std::span<const double> values);

struct Extraction {
  std::vector<mdp::ExpertTrajectory> trajectories;  // by passenger id
  int excluded = 0;
};

Extraction extract_features(std::span<const TripRecord> trips, const PromotionConfig& promo);

// ---------------------------------------------------------------------------
// Adopters.

// First month >= 0 that starts a run of at least two off-peak months.
std::optional<int> change_point(const mdp::ExpertTrajectory& traj);
AdopterTypes classify_adopter(const mdp::ExpertTrajectory& traj);
std::map<std::int64_t, AdopterTypes> classify_adopters(std::span<const mdp::ExpertTrajectory> trajs);

// ---------------------------------------------------------------------------
// Scenarios.

struct Scenario {
  enum class Kind { Full, HalfStations, Proportion, Wf3, Wc2, Wd2, Ges };
  Kind kind = Kind::Full;
  double proportion = 1.0;

  std::string name() const;
  // Group exclusions applied to the training side, e.g. "{flex:3,con:2,dis:2}".
  std::string excluded_groups() const;
  static Scenario parse(const std::string& name);  // ValidationError
};

struct SplitResult {
  std::vector<mdp::ExpertTrajectory> train;
  std::vector<mdp::ExpertTrajectory> test;
  std::vector<int> kept_stations;  // half_stations only
};

inline constexpr double kTrainFraction = 0.8;

SplitResult split_and_filter(std::span<const mdp::ExpertTrajectory> trajs, const Scenario& scenario,
                             std::uint64_t seed, const PromotionConfig& promo);

// ---------------------------------------------------------------------------
// Files.

void write_trajectories(std::ostream& out, std::span<const mdp::ExpertTrajectory> trajs);
std::vector<mdp::ExpertTrajectory> read_trajectories(std::istream& in);
nlohmann::json trajectory_to_json(const mdp::ExpertTrajectory& traj);
mdp::ExpertTrajectory trajectory_from_json(const nlohmann::json& j);

void write_trips_csv(std::ostream& out, std::span<const TripRecord> trips);
std::vector<TripRecord> read_trips_csv(std::istream& in, const PromotionConfig& promo);

void write_profiles(std::ostream& out, std::span<const PassengerProfile> profiles);
std::vector<PassengerProfile> read_profiles(std::istream& in);

}  // namespace gcgail::panel
