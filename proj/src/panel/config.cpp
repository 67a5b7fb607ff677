#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gcgail/errors.hpp"
#include "gcgail/panel.hpp"

namespace gcgail::panel {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

KvFile KvFile::parse(std::istream& in, const std::string& origin) {
  KvFile kv;
  kv.origin_ = origin;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (kv.values_.count(key) != 0) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    kv.values_[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KvFile KvFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  return parse(in, path);
}

std::string KvFile::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KvFile::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(it->second, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != it->second.size() || !std::isfinite(v)) {
    throw ConfigError(origin_ + ": '" + key + "' is not a number: " + it->second);
  }
  return v;
}

long long KvFile::get_int(const std::string& key, long long fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(it->second, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != it->second.size()) {
    throw ConfigError(origin_ + ": '" + key + "' is not an integer: " + it->second);
  }
  return v;
}

bool KvFile::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError(origin_ + ": '" + key + "' is not a boolean: " + it->second);
}

std::vector<std::string> KvFile::get_list(const std::string& key) const {
  std::vector<std::string> out;
  const auto it = values_.find(key);
  if (it == values_.end()) return out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void KvFile::require_known(std::span<const std::string_view> allowed) const {
  for (const auto& [key, value] : values_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(origin_ + ": unknown key '" + key + "'");
    }
  }
}

// ---------------------------------------------------------------------------

std::string iso_date(std::chrono::year_month_day d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::chrono::year_month_day parse_iso_date(const std::string& s) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3) {
    throw ValidationError("bad ISO date: " + s);
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) throw ValidationError("invalid calendar date: " + s);
  return ymd;
}

int PromotionConfig::month_index(std::chrono::year_month_day date) const {
  const int a = static_cast<int>(date.year()) * 12 + static_cast<int>(static_cast<unsigned>(date.month()));
  const int b = static_cast<int>(launch.year()) * 12 + static_cast<int>(static_cast<unsigned>(launch.month()));
  return a - b;
}

std::chrono::year_month PromotionConfig::month(int month_index) const {
  return launch + std::chrono::months{month_index};
}

bool PromotionConfig::is_discount_station(int station) const {
  return std::binary_search(discount_stations.begin(), discount_stations.end(), station);
}

bool PromotionConfig::discount_eligible(std::chrono::year_month_day date, double tap_out,
                                        int destination) const {
  const std::chrono::weekday wd{std::chrono::sys_days{date}};
  const bool weekday = wd != std::chrono::Saturday && wd != std::chrono::Sunday;
  return weekday && month_index(date) >= 0 && tap_out >= kWindowOpen && tap_out < kWindowClose &&
         is_discount_station(destination);
}

std::vector<int> default_discount_stations(int n_stations) {
  const int count = static_cast<int>(std::ceil(29.0 / 98.0 * n_stations));
  const int start = (n_stations - count) / 2;
  std::vector<int> out;
  for (int i = 0; i < count; ++i) out.push_back(start + i);
  return out;
}

double shift_to_window(double tap_out) {
  if (tap_out >= kWindowClose) return tap_out - kWindowClose;
  if (tap_out < kWindowOpen) return kWindowOpen - tap_out;
  return 0.0;
}

// ---------------------------------------------------------------------------

void GeneratorConfig::validate() const {
  if (n_passengers < 1) throw ConfigError("n_passengers must be >= 1");
  if (n_stations < 2) throw ConfigError("n_stations must be >= 2");
  if (weekdays_per_month < 1 || weekdays_per_month > 20) {
    throw ConfigError("weekdays_per_month must be in 1..20");
  }
  for (int s : discount_stations) {
    if (s < 0 || s >= n_stations) throw ConfigError("discount station out of range");
  }
  auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!unit(mix_sustained) || !unit(mix_attrition) ||
      std::abs(mix_sustained + mix_attrition - 1.0) > 1e-9) {
    throw ConfigError("mix_sustained + mix_attrition must sum to 1");
  }
  if (!unit(band_early_morning) || !unit(band_morning_peak) ||
      std::abs(band_early_morning + band_morning_peak - 1.0) > 1e-9) {
    throw ConfigError("band_early_morning + band_morning_peak must sum to 1");
  }
  if (!unit(work_in_discount_prob) || !unit(slip_prob)) {
    throw ConfigError("probabilities must lie in [0, 1]");
  }
  if (!(flex_median > 0.0) || flex_spread < 0.0 || !(hazard_scale > 0.0)) {
    throw ConfigError("flex_median and hazard_scale must be positive");
  }
}

PromotionConfig GeneratorConfig::promotion() const {
  PromotionConfig p;
  p.launch = launch;
  p.n_stations = n_stations;
  p.discount_stations =
      discount_stations.empty() ? default_discount_stations(n_stations) : discount_stations;
  std::sort(p.discount_stations.begin(), p.discount_stations.end());
  p.discount_stations.erase(std::unique(p.discount_stations.begin(), p.discount_stations.end()),
                            p.discount_stations.end());
  return p;
}

namespace {

constexpr std::string_view kGeneratorKeys[] = {
    "n_passengers",  "n_stations",       "discount_stations",  "launch",
    "weekdays_per_month", "beta0",       "beta_flex",          "beta_con",
    "beta_dis",      "beta_work",        "hazard_scale",       "mix_sustained",
    "mix_attrition", "band_early_morning", "band_morning_peak", "work_in_discount_prob",
    "flex_median",   "flex_spread",      "slip_prob"};

}  // namespace

std::span<const std::string_view> GeneratorConfig::keys() { return kGeneratorKeys; }

GeneratorConfig GeneratorConfig::from_kv(const KvFile& kv, std::span<const std::string_view> extra) {
  std::vector<std::string_view> allowed(std::begin(kGeneratorKeys), std::end(kGeneratorKeys));
  allowed.insert(allowed.end(), extra.begin(), extra.end());
  kv.require_known(allowed);
  GeneratorConfig c;
  c.n_passengers = static_cast<int>(kv.get_int("n_passengers", c.n_passengers));
  c.n_stations = static_cast<int>(kv.get_int("n_stations", c.n_stations));
  for (const auto& s : kv.get_list("discount_stations")) {
    try {
      c.discount_stations.push_back(std::stoi(s));
    } catch (const std::exception&) {
      throw ConfigError(kv.origin() + ": bad discount station '" + s + "'");
    }
  }
  if (kv.has("launch")) {
    const auto d = parse_iso_date(kv.get_string("launch", "") + "-01");
    c.launch = d.year() / d.month();
  }
  c.weekdays_per_month = static_cast<int>(kv.get_int("weekdays_per_month", c.weekdays_per_month));
  c.beta0 = kv.get_double("beta0", c.beta0);
  c.beta_flex = kv.get_double("beta_flex", c.beta_flex);
  c.beta_con = kv.get_double("beta_con", c.beta_con);
  c.beta_dis = kv.get_double("beta_dis", c.beta_dis);
  c.beta_work = kv.get_double("beta_work", c.beta_work);
  c.hazard_scale = kv.get_double("hazard_scale", c.hazard_scale);
  c.mix_sustained = kv.get_double("mix_sustained", c.mix_sustained);
  c.mix_attrition = kv.get_double("mix_attrition", c.mix_attrition);
  c.band_early_morning = kv.get_double("band_early_morning", c.band_early_morning);
  c.band_morning_peak = kv.get_double("band_morning_peak", c.band_morning_peak);
  c.work_in_discount_prob = kv.get_double("work_in_discount_prob", c.work_in_discount_prob);
  c.flex_median = kv.get_double("flex_median", c.flex_median);
  c.flex_spread = kv.get_double("flex_spread", c.flex_spread);
  c.slip_prob = kv.get_double("slip_prob", c.slip_prob);
  c.validate();
  return c;
}

nlohmann::json GeneratorConfig::to_json() const {
  char launch_buf[16];
  std::snprintf(launch_buf, sizeof launch_buf, "%04d-%02u", static_cast<int>(launch.year()),
                static_cast<unsigned>(launch.month()));
  return nlohmann::json{{"n_passengers", n_passengers},
                        {"n_stations", n_stations},
                        {"discount_stations", promotion().discount_stations},
                        {"launch", launch_buf},
                        {"weekdays_per_month", weekdays_per_month},
                        {"beta0", beta0},
                        {"beta_flex", beta_flex},
                        {"beta_con", beta_con},
                        {"beta_dis", beta_dis},
                        {"beta_work", beta_work},
                        {"hazard_scale", hazard_scale},
                        {"mix_sustained", mix_sustained},
                        {"mix_attrition", mix_attrition},
                        {"band_early_morning", band_early_morning},
                        {"band_morning_peak", band_morning_peak},
                        {"work_in_discount_prob", work_in_discount_prob},
                        {"flex_median", flex_median},
                        {"flex_spread", flex_spread},
                        {"slip_prob", slip_prob}};
}

}  // namespace gcgail::panel
