#include <algorithm>
#include <cmath>
#include <numbers>

#include "gcgail/errors.hpp"
#include "gcgail/panel.hpp"
#include "gcgail/rng.hpp"

namespace gcgail::panel {

using namespace std::chrono;

std::string adopter_type_name(AdopterType t) {
  switch (t) {
    case kEarly: return "early";
    case kLate: return "late";
    case kEarlyMorning: return "early_morning";
    case kMorningPeak: return "morning_peak";
    case kAttrition: return "attrition";
    case kSustained: return "sustained";
  }
  return "unknown";
}

std::string describe(AdopterTypes types) {
  if (!types.adopter()) return "non_adopter";
  std::string out;
  for (AdopterType t : kAllAdopterTypes) {
    if (!types.has(t)) continue;
    if (!out.empty()) out += '+';
    out += adopter_type_name(t);
  }
  return out;
}

int PassengerProfile::scheduled_mode(int month_index) const {
  if (!adoption_month || month_index < *adoption_month) return 0;
  if (attrition_month && month_index >= *attrition_month) return 0;
  return 1;
}

namespace {

constexpr std::uint64_t kLatentSalt = 0x6c6174;
constexpr std::uint64_t kBehaviourSalt = 0x626568;
constexpr int kLastAdoptionMonth = kLastMonth - 2;  // leaves two observable months

double normal(Rng& rng) {
  // Box-Muller on the library-independent uniform so output is portable.
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int uniform_int(Rng& rng, int lo, int hi) {  // inclusive
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(span)));
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<year_month_day> month_days(year_month ym, int count) {
  std::vector<year_month_day> days;
  for (unsigned d = 1; d <= 31 && static_cast<int>(days.size()) < count; ++d) {
    const year_month_day ymd{ym.year(), ym.month(), day{d}};
    if (!ymd.ok()) break;
    const weekday wd{sys_days{ymd}};
    if (wd == Saturday || wd == Sunday) continue;
    days.push_back(ymd);
  }
  return days;
}

struct Latents {
  int home = 0;
  int work = 0;
  double flex = 0.0;
  double con = 0.0;
  double dis = 0.0;
  BaselineBand band = BaselineBand::MorningPeak;
};

Latents draw_latents(const GeneratorConfig& cfg, const PromotionConfig& promo, Rng& rng) {
  Latents l;
  const int n = cfg.n_stations;
  l.home = uniform_int(rng, 0, n - 1);
  std::vector<int> inside, outside;
  for (int s = 0; s < n; ++s) {
    if (s == l.home) continue;
    (promo.is_discount_station(s) ? inside : outside).push_back(s);
  }
  const bool want_inside = uniform01(rng) < cfg.work_in_discount_prob;
  const auto& pool = (want_inside && !inside.empty()) || outside.empty() ? inside : outside;
  l.work = pool[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(pool.size()) - 1))];

  l.flex = std::exp(std::log(cfg.flex_median) + cfg.flex_spread * normal(rng));
  l.con = 10.0 + 40.0 * uniform01(rng);
  l.dis = std::clamp(6.0 + 2.5 * std::abs(l.home - l.work) + 2.0 * normal(rng), 5.0, 80.0);
  l.band = uniform01(rng) < cfg.band_early_morning ? BaselineBand::EarlyMorning
                                                   : BaselineBand::MorningPeak;
  return l;
}

// Keeps an exit time inside [lo, hi) while preserving trip duration.
void place_trip(double target_out, double duration, double jitter, double lo, double hi,
                TripRecord& trip) {
  double tout = std::round(target_out + jitter);
  tout = std::clamp(tout, lo, hi - 1.0);
  const double dur = std::max(3.0, std::round(duration));
  trip.tap_out = tout;
  trip.tap_in = tout - dur;
}

}  // namespace

Population synthesize_population(const GeneratorConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const PromotionConfig promo = cfg.promotion();
  const auto n = static_cast<std::size_t>(cfg.n_passengers);

  std::vector<Latents> latents(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = make_rng(seed, i, kLatentSalt);
    latents[i] = draw_latents(cfg, promo, rng);
  }

  // Responsive quartiles of the latent traits: flex Q3, con Q2, dis Q2.
  std::vector<double> flex(n), con(n), dis(n);
  for (std::size_t i = 0; i < n; ++i) {
    flex[i] = latents[i].flex;
    con[i] = latents[i].con;
    dis[i] = latents[i].dis;
  }
  std::vector<int> gf(n, 1), gc(n, 1), gd(n, 1);
  if (n >= 4) {
    gf = quartile_grouping(flex);
    gc = quartile_grouping(con);
    gd = quartile_grouping(dis);
  }

  std::vector<std::vector<year_month_day>> calendar;
  for (int m = kFirstMonth; m <= kLastMonth; ++m) {
    calendar.push_back(month_days(promo.month(m), cfg.weekdays_per_month));
  }

  Population pop;
  pop.profiles.reserve(n);
  pop.trips.reserve(n * static_cast<std::size_t>(kMonthCount * cfg.weekdays_per_month * 2));

  for (std::size_t i = 0; i < n; ++i) {
    const Latents& L = latents[i];
    Rng rng = make_rng(seed, i, kBehaviourSalt);

    PassengerProfile p;
    p.passenger_id = static_cast<std::int64_t>(i);
    p.home_station = L.home;
    p.work_station = L.work;
    p.latent_flex = L.flex;
    p.latent_con = L.con;
    p.latent_dis = L.dis;
    p.band = L.band;
    const double w = promo.is_discount_station(L.work) ? 1.0 : 0.0;
    p.propensity = logistic(cfg.beta0 + cfg.beta_flex * (gf[i] == 3) + cfg.beta_con * (gc[i] == 2) +
                            cfg.beta_dis * (gd[i] == 2) + cfg.beta_work * w);

    if (uniform01(rng) < p.propensity) {
      const double hazard = std::clamp(cfg.hazard_scale * p.propensity, 0.05, 0.95);
      int month = 0;
      while (uniform01(rng) >= hazard) ++month;
      if (month <= kLastAdoptionMonth) {
        p.adoption_month = month;
        p.archetype.add(month <= 1 ? kEarly : kLate);
        p.archetype.add(L.band == BaselineBand::EarlyMorning ? kEarlyMorning : kMorningPeak);
        const bool room = month + 2 <= kLastMonth;
        if (room && uniform01(rng) < cfg.mix_attrition) {
          p.attrition_month = uniform_int(rng, month + 2, std::min(kLastMonth, month + 8));
          p.archetype.add(kAttrition);
        } else {
          p.archetype.add(kSustained);
        }
      }
    }

    const double baseline_out = L.band == BaselineBand::EarlyMorning ? kWindowOpen - L.con
                                                                     : kWindowClose + L.con;
    const double band_lo = L.band == BaselineBand::EarlyMorning ? kEarlyOpen : kWindowClose;
    const double band_hi = L.band == BaselineBand::EarlyMorning ? kWindowOpen : kPeakClose;
    const double window_out = 445.0 + 40.0 * uniform01(rng);
    const double fare = std::round((3.5 + 0.9 * std::abs(L.home - L.work)) * 10.0) / 10.0;
    const double evening_in = 1050.0 + 30.0 * normal(rng);

    for (int m = kFirstMonth; m <= kLastMonth; ++m) {
      const bool adopted = p.scheduled_mode(m) == 1;
      for (const auto& date : calendar[static_cast<std::size_t>(m - kFirstMonth)]) {
        TripRecord am;
        am.passenger_id = p.passenger_id;
        am.date = date;
        am.month_index = m;
        am.origin = L.home;
        am.destination = L.work;
        am.fare = fare;
        const double jitter = L.flex * normal(rng);
        const double duration = L.dis + 1.5 * normal(rng);
        const bool in_window = adopted && uniform01(rng) >= cfg.slip_prob;
        if (in_window) {
          place_trip(window_out, duration, jitter, kWindowOpen, kWindowClose, am);
        } else {
          place_trip(baseline_out, duration, jitter, band_lo, band_hi, am);
        }
        am.discount_applied = promo.discount_eligible(date, am.tap_out, am.destination);
        pop.trips.push_back(am);

        TripRecord pm;
        pm.passenger_id = p.passenger_id;
        pm.date = date;
        pm.month_index = m;
        pm.origin = L.work;
        pm.destination = L.home;
        pm.fare = fare;
        pm.tap_in = std::round(std::clamp(evening_in + 20.0 * normal(rng), 960.0, 1260.0));
        pm.tap_out = pm.tap_in + std::max(3.0, std::round(L.dis + 1.5 * normal(rng)));
        pm.discount_applied = false;
        pop.trips.push_back(pm);
      }
    }
    pop.profiles.push_back(std::move(p));
  }
  return pop;
}

}  // namespace gcgail::panel
