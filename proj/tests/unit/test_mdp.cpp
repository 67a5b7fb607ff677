#include <doctest.h>

#include <cmath>

#include "gcgail/errors.hpp"
#include "gcgail/mdp.hpp"
#include "gcgail/panel.hpp"
#include "gcgail/rng.hpp"

using namespace gcgail;
using namespace gcgail::mdp;

namespace {

StateVector sample_state(int month, double shift) {
  StateVector s;
  s.l_home = 2;
  s.l_work = 9;
  s.d_t = 480.0 + shift;
  s.e_t = 505.0 + shift;
  s.c_t = 9.0;
  s.b_t = 10.0 + shift;
  s.m_p_t = month;
  s.m_s_t = 0.0;
  s.w_u = 1;
  return s;
}

ExpertTrajectory sample_trajectory(std::int64_t pid, int months, std::uint64_t seed) {
  Rng rng = make_rng(seed, static_cast<std::uint64_t>(pid), 7);
  ExpertTrajectory t;
  t.passenger_id = pid;
  t.condition = {5.0 + uniform01(rng), 20.0 + 10.0 * uniform01(rng), 30.0 * uniform01(rng), {1, 2, 3}};
  int prev = 0, cur = 0;
  for (int k = 0; k < months; ++k) {
    MonthlyObservation o;
    o.passenger_id = pid;
    o.month_index = k - 2;
    o.state = sample_state(k - 2, 20.0 * uniform01(rng));
    o.state.lambda_t = cur;
    o.state.lambda_prev = prev;
    o.action = uniform01(rng) < 0.5 ? Action::Other : Action::OffPeak;
    prev = cur;
    cur = to_int(o.action);
    t.observations.push_back(o);
  }
  return t;
}

ConditionVector groups(int f, int c, int d) { return {1.0, 2.0, 3.0, {f, c, d}}; }

}  // namespace

TEST_CASE("action labels are strictly binary") {
  CHECK(action_from_int(0) == Action::Other);
  CHECK(action_from_int(1) == Action::OffPeak);
  CHECK_THROWS_AS(action_from_int(2), ValidationError);
  CHECK_THROWS_AS(action_from_int(-1), ValidationError);
}

TEST_CASE("state vector array round trip and validation") {
  StateVector s = sample_state(3, 1.5);
  s.lambda_t = 1;
  const auto a = s.to_array();
  CHECK(a[0] == 2.0);
  CHECK(a[6] == 3.0);
  CHECK(a[9] == 1.0);
  CHECK(StateVector::from_array(a) == s);
  CHECK_NOTHROW(s.validate());

  auto bad = a;
  bad[10] = 2.0;
  CHECK_THROWS_AS(StateVector::from_array(bad), ValidationError);
  CHECK_THROWS_AS(StateVector::from_array(std::span<const double>(a.data(), 5)), ShapeError);

  StateVector late = s;
  late.d_t = late.e_t + 1.0;
  CHECK_THROWS_AS(late.validate(), ValidationError);
  StateVector neg = s;
  neg.b_t = -0.5;
  CHECK_THROWS_AS(neg.validate(), ValidationError);
  StateVector nan = s;
  nan.c_t = std::nan("");
  CHECK_THROWS_AS(nan.validate(), ValidationError);
}

TEST_CASE("transition advances month and shifts labels") {
  StateVector s = sample_state(3, 0.0);
  s.lambda_prev = 1;
  s.lambda_t = 0;
  MonthlyObservation next;
  next.month_index = 4;
  next.state = sample_state(4, 7.0);
  const auto out = transition(s, Action::OffPeak, &next);
  REQUIRE(out.has_value());
  CHECK(out->lambda_prev == 0);
  CHECK(out->lambda_t == 1);
  CHECK(out->m_p_t == 4);
  CHECK(out->d_t == next.state.d_t);
  CHECK(out->b_t == next.state.b_t);
  CHECK(out->l_work == s.l_work);

  // pure: same inputs, same output
  CHECK(*transition(s, Action::OffPeak, &next) == *out);
  CHECK_FALSE(transition(s, Action::Other, nullptr).has_value());
  CHECK_FALSE(transition(s, Action::OffPeak, nullptr).has_value());
}

TEST_CASE("replay reproduces synthetic trajectories") {
  for (std::int64_t pid = 0; pid < 20; ++pid) {
    const auto t = sample_trajectory(pid, 16, 3);
    const auto states = replay(t);
    REQUIRE(states.size() == t.observations.size());
    for (std::size_t i = 0; i < states.size(); ++i) CHECK(states[i] == t.observations[i].state);
  }
  CHECK(replay(ExpertTrajectory{}).empty());
}

TEST_CASE("replay reproduces states extracted from generated trips") {
  panel::GeneratorConfig cfg;
  cfg.n_passengers = 60;
  const auto pop = panel::synthesize_population(cfg, 11);
  const auto ex = panel::extract_features(pop.trips, cfg.promotion());
  REQUIRE(ex.trajectories.size() >= 50);
  for (const auto& t : ex.trajectories) {
    REQUIRE(t.observations.size() == static_cast<std::size_t>(panel::kMonthCount));
    const auto states = replay(t);
    for (std::size_t i = 0; i < states.size(); ++i) {
      CHECK(states[i] == t.observations[i].state);
      CHECK_NOTHROW(states[i].validate());
    }
  }
}

TEST_CASE("encoded lengths per conditioning mode") {
  CHECK(encoded_dim(ConditioningMode::Unconditioned) == 11);
  CHECK(encoded_dim(ConditioningMode::RawConditioned) == 14);
  CHECK(encoded_dim(ConditioningMode::GroupConditioned) == 23);
  std::vector<ExpertTrajectory> train{sample_trajectory(1, 16, 5), sample_trajectory(2, 16, 5)};
  const auto norm = FeatureNormalizer::fit(train);
  for (auto mode : {ConditioningMode::Unconditioned, ConditioningMode::RawConditioned,
                    ConditioningMode::GroupConditioned}) {
    const auto e = norm.encode(train[0].observations[3].state, train[0].condition, mode);
    CHECK(e.features.size() == encoded_dim(mode));
    CHECK(e.mode == mode);
    std::vector<double> wrong(encoded_dim(mode) + 1);
    CHECK_THROWS_AS(norm.encode_into(train[0].observations[0].state, train[0].condition, mode, wrong),
                    ShapeError);
  }
  CHECK(parse_mode(mode_name(ConditioningMode::RawConditioned)) == ConditioningMode::RawConditioned);
  CHECK_THROWS_AS(parse_mode("Grouped"), ValidationError);
}

TEST_CASE("z-score normalization against an independent moment oracle") {
  std::vector<ExpertTrajectory> train;
  for (std::int64_t pid = 0; pid < 8; ++pid) train.push_back(sample_trajectory(pid, 16, 9));
  const auto norm = FeatureNormalizer::fit(train);

  // population mean and std of d_t, computed here
  double sum = 0.0, n = 0.0;
  for (const auto& t : train)
    for (const auto& o : t.observations) sum += o.state.d_t, n += 1.0;
  const double mean = sum / n;
  double ss = 0.0;
  for (const auto& t : train)
    for (const auto& o : t.observations) ss += (o.state.d_t - mean) * (o.state.d_t - mean);
  const double sd = std::sqrt(ss / n);
  CHECK(norm.state_mean()[2] == doctest::Approx(mean).epsilon(1e-12));
  CHECK(norm.state_std()[2] == doctest::Approx(sd).epsilon(1e-12));

  StateVector s = train[0].observations[0].state;
  s.d_t = mean;
  auto e = norm.encode(s, train[0].condition, ConditioningMode::Unconditioned);
  CHECK(std::abs(e.features[2]) < 1e-12);

  s.d_t = mean + 1.7 * sd;
  e = norm.encode(s, train[0].condition, ConditioningMode::Unconditioned);
  CHECK(e.features[2] == doctest::Approx(1.7).epsilon(1e-9));

  // clipped to the +-5 band
  s.d_t = mean + 100.0 * sd;
  s.e_t = s.d_t + 10.0;
  e = norm.encode(s, train[0].condition, ConditioningMode::RawConditioned);
  CHECK(e.features[2] == 5.0);
  for (double v : e.features) {
    CHECK(std::isfinite(v));
    CHECK(std::abs(v) <= 5.0);
  }

  // binary features pass through unscaled
  s.lambda_t = 1;
  e = norm.encode(s, train[0].condition, ConditioningMode::Unconditioned);
  CHECK(e.features[9] == 1.0);
  CHECK(e.features[8] == 1.0);
}

TEST_CASE("zero-variance features normalize to zero") {
  // every sample state has m_s = 0 and c = 9
  std::vector<ExpertTrajectory> train{sample_trajectory(1, 16, 2), sample_trajectory(2, 16, 2)};
  const auto norm = FeatureNormalizer::fit(train);
  StateVector s = train[0].observations[5].state;
  s.c_t = 123.0;
  s.m_s_t = 4.0;
  const auto e = norm.encode(s, train[0].condition, ConditioningMode::Unconditioned);
  CHECK(e.features[4] == 0.0);
  CHECK(e.features[7] == 0.0);
}

TEST_CASE("group one-hot blocks") {
  std::vector<ExpertTrajectory> train{sample_trajectory(1, 4, 2)};
  const auto norm = FeatureNormalizer::fit(train);
  const auto& s = train[0].observations[0].state;
  const auto e = norm.encode(s, groups(3, 1, 4), ConditioningMode::GroupConditioned);
  const std::vector<double> tail(e.features.begin() + 11, e.features.end());
  CHECK(tail == std::vector<double>{0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 1});

  CHECK_THROWS_AS(norm.encode(s, groups(0, 1, 1), ConditioningMode::GroupConditioned),
                  ValidationError);
  CHECK_THROWS_AS(norm.encode(s, groups(1, 5, 1), ConditioningMode::GroupConditioned),
                  ValidationError);
  // group labels are ignored by the other encodings
  CHECK_NOTHROW(norm.encode(s, groups(9, 9, 9), ConditioningMode::RawConditioned));
}

TEST_CASE("normalizer errors and persistence") {
  FeatureNormalizer blank;
  CHECK_FALSE(blank.fitted());
  CHECK_THROWS_AS(blank.encode(sample_state(0, 0.0), groups(1, 1, 1), ConditioningMode::Unconditioned),
                  StateError);
  CHECK_THROWS_AS(FeatureNormalizer::fit(std::vector<ExpertTrajectory>{}), ValidationError);

  std::vector<ExpertTrajectory> train{sample_trajectory(4, 16, 8), sample_trajectory(5, 16, 8)};
  const auto norm = FeatureNormalizer::fit(train);
  const auto back = FeatureNormalizer::from_json(nlohmann::json::parse(norm.to_json().dump()));
  CHECK(back == norm);
  const auto& s = train[1].observations[7].state;
  CHECK(back.encode(s, train[1].condition, ConditioningMode::RawConditioned).features ==
        norm.encode(s, train[1].condition, ConditioningMode::RawConditioned).features);
}
