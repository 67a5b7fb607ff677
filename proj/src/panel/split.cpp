#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gcgail/errors.hpp"
#include "gcgail/panel.hpp"
#include "gcgail/rng.hpp"

namespace gcgail::panel {

namespace {

constexpr std::uint64_t kSplitSalt = 0x73706c;
constexpr std::uint64_t kStationSalt = 0x737461;
constexpr std::uint64_t kProportionSalt = 0x70726f;
constexpr double kHalfStationDiscountShare = 16.0 / 29.0;

// Fisher-Yates on the portable uniform, so the permutation does not depend on
// the standard library's distribution implementations.
template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(v[i - 1], v[std::min(j, i - 1)]);
  }
}

std::vector<int> pick(std::vector<int> pool, std::size_t k, Rng& rng) {
  shuffle(pool, rng);
  pool.resize(std::min(k, pool.size()));
  std::sort(pool.begin(), pool.end());
  return pool;
}

bool by_pid(const mdp::ExpertTrajectory& a, const mdp::ExpertTrajectory& b) {
  return a.passenger_id < b.passenger_id;
}

}  // namespace

std::string Scenario::name() const {
  switch (kind) {
    case Kind::Full: return "full";
    case Kind::HalfStations: return "half_stations";
    case Kind::Proportion: {
      char buf[16];
      std::snprintf(buf, sizeof buf, "p%02d", static_cast<int>(std::lround(proportion * 100.0)));
      return buf;
    }
    case Kind::Wf3: return "wf3";
    case Kind::Wc2: return "wc2";
    case Kind::Wd2: return "wd2";
    case Kind::Ges: return "ges";
  }
  return "unknown";
}

std::string Scenario::excluded_groups() const {
  switch (kind) {
    case Kind::Wf3: return "{flex:3}";
    case Kind::Wc2: return "{con:2}";
    case Kind::Wd2: return "{dis:2}";
    case Kind::Ges: return "{flex:3,con:2,dis:2}";
    default: return "{}";
  }
}

Scenario Scenario::parse(const std::string& name) {
  Scenario s;
  if (name == "full") return s;
  if (name == "half_stations") {
    s.kind = Kind::HalfStations;
    return s;
  }
  if (name == "wf3") s.kind = Kind::Wf3;
  else if (name == "wc2") s.kind = Kind::Wc2;
  else if (name == "wd2") s.kind = Kind::Wd2;
  else if (name == "ges") s.kind = Kind::Ges;
  if (s.kind != Kind::Full) return s;

  double p = -1.0;
  try {
    if (name.size() == 3 && name[0] == 'p') p = std::stoi(name.substr(1)) / 100.0;
    if (name.rfind("proportion:", 0) == 0) p = std::stod(name.substr(11));
  } catch (const std::exception&) {
    p = -1.0;
  }
  for (double allowed : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    if (std::abs(p - allowed) < 1e-9) {
      s.kind = Kind::Proportion;
      s.proportion = allowed;
      return s;
    }
  }
  throw ValidationError("unknown scenario '" + name + "'");
}

SplitResult split_and_filter(std::span<const mdp::ExpertTrajectory> trajs, const Scenario& scenario,
                             std::uint64_t seed, const PromotionConfig& promo) {
  if (trajs.empty()) throw InsufficientDataError("no trajectories to split");
  std::vector<std::size_t> order(trajs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return trajs[a].passenger_id < trajs[b].passenger_id;
  });
  Rng rng = make_rng(seed, 0, kSplitSalt);
  shuffle(order, rng);

  const auto n_train = static_cast<std::size_t>(
      std::llround(kTrainFraction * static_cast<double>(trajs.size())));
  SplitResult out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? out.train : out.test).push_back(trajs[order[i]]);
  }
  std::sort(out.train.begin(), out.train.end(), by_pid);
  std::sort(out.test.begin(), out.test.end(), by_pid);

  auto drop_if = [&](auto pred) {
    std::erase_if(out.train, pred);
  };
  using Kind = Scenario::Kind;
  switch (scenario.kind) {
    case Kind::Full: break;
    case Kind::HalfStations: {
      Rng srng = make_rng(seed, 0, kStationSalt);
      std::vector<int> inside, outside;
      for (int s = 0; s < promo.n_stations; ++s) {
        (promo.is_discount_station(s) ? inside : outside).push_back(s);
      }
      const auto total = static_cast<std::size_t>(promo.n_stations / 2);
      const auto k_in = std::min<std::size_t>(
          static_cast<std::size_t>(std::lround(kHalfStationDiscountShare *
                                               static_cast<double>(inside.size()))),
          total);
      auto kept = pick(inside, k_in, srng);
      const auto rest = pick(outside, total - kept.size(), srng);
      kept.insert(kept.end(), rest.begin(), rest.end());
      std::sort(kept.begin(), kept.end());
      out.kept_stations = kept;
      drop_if([&](const mdp::ExpertTrajectory& t) {
        const int work = t.observations.empty() ? -1 : t.observations.front().state.l_work;
        return !std::binary_search(kept.begin(), kept.end(), work);
      });
      break;
    }
    case Kind::Proportion: {
      Rng prng = make_rng(seed, 0, kProportionSalt);
      const auto keep = static_cast<std::size_t>(
          std::llround(scenario.proportion * static_cast<double>(out.train.size())));
      shuffle(out.train, prng);
      out.train.resize(keep);
      std::sort(out.train.begin(), out.train.end(), by_pid);
      break;
    }
    case Kind::Wf3:
      drop_if([](const mdp::ExpertTrajectory& t) { return t.condition.g_flex() == 3; });
      break;
    case Kind::Wc2:
      drop_if([](const mdp::ExpertTrajectory& t) { return t.condition.g_con() == 2; });
      break;
    case Kind::Wd2:
      drop_if([](const mdp::ExpertTrajectory& t) { return t.condition.g_dis() == 2; });
      break;
    case Kind::Ges:
      drop_if([](const mdp::ExpertTrajectory& t) {
        return t.condition.g_flex() == 3 || t.condition.g_con() == 2 || t.condition.g_dis() == 2;
      });
      break;
  }
  if (out.train.empty()) {
    throw ConfigError("scenario '" + scenario.name() + "' leaves no training trajectories");
  }
  return out;
}

}  // namespace gcgail::panel
