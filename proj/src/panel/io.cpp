#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "gcgail/errors.hpp"
#include "gcgail/panel.hpp"

namespace gcgail::panel {

using nlohmann::json;

namespace {

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ValidationError("malformed " + what + " '" + s + "'");
  }
  return v;
}

long long parse_integer(const std::string& s, const std::string& what) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ValidationError("malformed " + what + " '" + s + "'");
  }
  return v;
}

json optional_int(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

std::optional<int> read_optional_int(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<int>();
}

}  // namespace

json trajectory_to_json(const mdp::ExpertTrajectory& traj) {
  const auto& c = traj.condition;
  json obs = json::array();
  for (const auto& o : traj.observations) {
    const auto arr = o.state.to_array();
    obs.push_back({{"m", o.month_index}, {"s", std::vector<double>(arr.begin(), arr.end())},
                   {"a", mdp::to_int(o.action)}});
  }
  return {{"pid", traj.passenger_id},
          {"cond", {{"flex", c.flex_raw}, {"con", c.con_raw}, {"dis", c.dis_raw},
                    {"g", {c.groups[0], c.groups[1], c.groups[2]}}}},
          {"obs", std::move(obs)}};
}

mdp::ExpertTrajectory trajectory_from_json(const json& j) {
  mdp::ExpertTrajectory t;
  try {
    t.passenger_id = j.at("pid").get<std::int64_t>();
    const auto& c = j.at("cond");
    t.condition.flex_raw = c.at("flex").get<double>();
    t.condition.con_raw = c.at("con").get<double>();
    t.condition.dis_raw = c.at("dis").get<double>();
    const auto& g = c.at("g");
    if (!g.is_array() || g.size() != mdp::kConditionDim) throw ValidationError("cond.g must hold 3 labels");
    for (std::size_t k = 0; k < mdp::kConditionDim; ++k) {
      t.condition.groups[k] = g[k].get<int>();
      if (t.condition.groups[k] < 1 || t.condition.groups[k] > 4) {
        throw ValidationError("group label outside 1..4");
      }
    }
    for (const auto& o : j.at("obs")) {
      mdp::MonthlyObservation obs;
      obs.passenger_id = t.passenger_id;
      obs.month_index = o.at("m").get<int>();
      const auto s = o.at("s").get<std::vector<double>>();
      obs.state = mdp::StateVector::from_array(s);
      obs.action = mdp::action_from_int(o.at("a").get<int>());
      t.observations.push_back(obs);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed trajectory record: ") + e.what());
  }
  return t;
}

void write_trajectories(std::ostream& out, std::span<const mdp::ExpertTrajectory> trajs) {
  for (const auto& t : trajs) out << trajectory_to_json(t).dump() << '\n';
}

std::vector<mdp::ExpertTrajectory> read_trajectories(std::istream& in) {
  std::vector<mdp::ExpertTrajectory> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError("trajectory line " + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(trajectory_from_json(j));
  }
  return out;
}

void write_trips_csv(std::ostream& out, std::span<const TripRecord> trips) {
  out << "pid,date,tin,tout,orig,dest,fare,disc\n";
  for (const auto& t : trips) {
    out << t.passenger_id << ',' << iso_date(t.date) << ',' << format_number(t.tap_in) << ','
        << format_number(t.tap_out) << ',' << t.origin << ',' << t.destination << ','
        << format_number(t.fare) << ',' << (t.discount_applied ? 1 : 0) << '\n';
  }
}

std::vector<TripRecord> read_trips_csv(std::istream& in, const PromotionConfig& promo) {
  std::string line;
  if (!std::getline(in, line) || line != "pid,date,tin,tout,orig,dest,fare,disc") {
    throw ValidationError("trip file must start with header pid,date,tin,tout,orig,dest,fare,disc");
  }
  std::vector<TripRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 8) {
      throw ValidationError("trip line " + std::to_string(lineno) + ": expected 8 fields");
    }
    TripRecord t;
    t.passenger_id = parse_integer(f[0], "pid");
    t.date = parse_iso_date(f[1]);
    t.month_index = promo.month_index(t.date);
    t.tap_in = parse_number(f[2], "tin");
    t.tap_out = parse_number(f[3], "tout");
    t.origin = static_cast<int>(parse_integer(f[4], "orig"));
    t.destination = static_cast<int>(parse_integer(f[5], "dest"));
    t.fare = parse_number(f[6], "fare");
    const auto disc = parse_integer(f[7], "disc");
    if (disc != 0 && disc != 1) throw ValidationError("disc must be 0 or 1");
    t.discount_applied = disc == 1;
    if (!(t.tap_in < t.tap_out) || !(t.fare > 0.0)) {
      throw ValidationError("trip line " + std::to_string(lineno) + ": need tin < tout and fare > 0");
    }
    out.push_back(t);
  }
  return out;
}

void write_profiles(std::ostream& out, std::span<const PassengerProfile> profiles) {
  for (const auto& p : profiles) {
    const json j = {{"pid", p.passenger_id},
                    {"home", p.home_station},
                    {"work", p.work_station},
                    {"latent_flex", p.latent_flex},
                    {"latent_con", p.latent_con},
                    {"latent_dis", p.latent_dis},
                    {"band", p.band == BaselineBand::EarlyMorning ? "early_morning" : "morning_peak"},
                    {"propensity", p.propensity},
                    {"archetype", describe(p.archetype)},
                    {"types", p.archetype.bits},
                    {"adoption_month", optional_int(p.adoption_month)},
                    {"attrition_month", optional_int(p.attrition_month)}};
    out << j.dump() << '\n';
  }
}

std::vector<PassengerProfile> read_profiles(std::istream& in) {
  std::vector<PassengerProfile> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      PassengerProfile p;
      p.passenger_id = j.at("pid").get<std::int64_t>();
      p.home_station = j.at("home").get<int>();
      p.work_station = j.at("work").get<int>();
      p.latent_flex = j.at("latent_flex").get<double>();
      p.latent_con = j.at("latent_con").get<double>();
      p.latent_dis = j.at("latent_dis").get<double>();
      p.band = j.at("band").get<std::string>() == "early_morning" ? BaselineBand::EarlyMorning
                                                                  : BaselineBand::MorningPeak;
      p.propensity = j.at("propensity").get<double>();
      p.archetype.bits = j.at("types").get<unsigned>();
      p.adoption_month = read_optional_int(j, "adoption_month");
      p.attrition_month = read_optional_int(j, "attrition_month");
      out.push_back(p);
    } catch (const json::exception& e) {
      throw ValidationError(std::string("malformed profile record: ") + e.what());
    }
  }
  return out;
}

}  // namespace gcgail::panel
