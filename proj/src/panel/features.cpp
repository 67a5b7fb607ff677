#include <algorithm>
#include <cmath>
#include <map>

#include "gcgail/errors.hpp"
#include "gcgail/panel.hpp"

namespace gcgail::panel {

namespace {

int modal(const std::map<int, int>& votes) {
  int best = -1, best_count = -1;
  for (const auto& [station, count] : votes) {  // ascending id: first max wins ties
    if (count > best_count) {
      best = station;
      best_count = count;
    }
  }
  return best;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

// Trips of one passenger grouped per day (date order), each day by tap-in.
std::vector<std::vector<TripRecord>> by_day(std::span<const TripRecord> trips) {
  std::map<std::chrono::sys_days, std::vector<TripRecord>> days;
  for (const auto& t : trips) days[std::chrono::sys_days{t.date}].push_back(t);
  std::vector<std::vector<TripRecord>> out;
  for (auto& [d, list] : days) {
    std::stable_sort(list.begin(), list.end(),
                     [](const TripRecord& a, const TripRecord& b) { return a.tap_in < b.tap_in; });
    out.push_back(std::move(list));
  }
  return out;
}

}  // namespace

std::pair<int, int> infer_home_work(std::span<const TripRecord> trips) {
  if (trips.empty()) throw InsufficientDataError("no trips to infer home/work stations from");
  std::map<int, int> home_votes, work_votes;
  for (const auto& day : by_day(trips)) {
    const auto& first = day.front();
    const auto& last = day.back();
    ++home_votes[first.origin];
    ++home_votes[last.destination];
    ++work_votes[first.destination];
    ++work_votes[last.origin];
  }
  return {modal(home_votes), modal(work_votes)};
}

ModeLabel monthly_mode_label(std::span<const TripRecord> trips) {
  ModeLabel label;
  bool any_morning = false;
  for (const auto& t : trips) {
    if (!t.morning()) continue;
    any_morning = true;
    if (t.tap_out >= kWindowOpen && t.tap_out < kWindowClose) ++label.off_peak;
    if (t.tap_out >= kWindowClose && t.tap_out < kPeakClose) ++label.peak;
  }
  if (!any_morning) {
    label.no_data = true;
    return label;
  }
  label.action = label.off_peak > 0.5 * label.peak ? mdp::Action::OffPeak : mdp::Action::Other;
  return label;
}

MonthStats month_statistics(std::span<const TripRecord> trips) {
  MonthStats s;
  std::vector<double> tin, tout, fare, shift, saving;
  for (const auto& t : trips) {
    if (!t.morning()) continue;
    tin.push_back(t.tap_in);
    tout.push_back(t.tap_out);
    fare.push_back(t.deducted_fare());
    shift.push_back(shift_to_window(t.tap_out));
    if (t.discount_applied) saving.push_back(t.fare * kDiscountRate);
  }
  if (tin.empty()) return s;
  s.has_morning = true;
  s.d = mean(tin);
  s.e = mean(tout);
  s.c = mean(fare);
  s.b = mean(shift);
  s.m_s = mean(saving);
  return s;
}

mdp::ConditionVector compute_condition_features(std::span<const TripRecord> trips) {
  std::vector<TripRecord> pre;
  bool seen[2] = {false, false};
  for (const auto& t : trips) {
    if (t.month_index == -2 || t.month_index == -1) {
      pre.push_back(t);
      seen[t.month_index + 2] = true;
    }
  }
  if (!seen[0] || !seen[1]) {
    throw InsufficientDataError("both pre-launch months are required for condition features");
  }
  std::vector<double> first_tap_in, shift, duration;
  for (const auto& day : by_day(pre)) first_tap_in.push_back(day.front().tap_in);
  for (const auto& t : pre) {
    if (!t.morning()) continue;
    shift.push_back(shift_to_window(t.tap_out));
    duration.push_back(t.tap_out - t.tap_in);
  }
  if (duration.empty()) throw InsufficientDataError("no pre-launch morning trips");
  mdp::ConditionVector c;
  c.flex_raw = population_std(first_tap_in);
  c.con_raw = mean(shift);
  c.dis_raw = mean(duration);
  return c;
}

Extraction extract_features(std::span<const TripRecord> trips, const PromotionConfig& promo) {
  std::map<std::int64_t, std::vector<TripRecord>> per_passenger;
  for (const auto& t : trips) per_passenger[t.passenger_id].push_back(t);

  Extraction out;
  for (auto& [pid, list] : per_passenger) {
    mdp::ConditionVector cond;
    try {
      cond = compute_condition_features(list);
    } catch (const InsufficientDataError&) {
      ++out.excluded;
      continue;
    }
    const auto [home, work] = infer_home_work(list);

    std::vector<std::vector<TripRecord>> months(kMonthCount);
    for (const auto& t : list) {
      if (t.month_index < kFirstMonth || t.month_index > kLastMonth) continue;
      months[static_cast<std::size_t>(t.month_index - kFirstMonth)].push_back(t);
    }
    std::vector<MonthStats> stats(kMonthCount);
    std::vector<int> label(kMonthCount);
    for (int k = 0; k < kMonthCount; ++k) {
      stats[k] = month_statistics(months[k]);
      label[k] = mdp::to_int(monthly_mode_label(months[k]).action);
      // Carry the last observed averages over a month without morning trips.
      if (!stats[k].has_morning && k > 0) {
        stats[k] = stats[k - 1];
        stats[k].m_s = 0.0;
      }
    }
    // Labels before the window repeat the first observed month.
    auto label_at = [&](int k) { return label[static_cast<std::size_t>(std::max(k, 0))]; };

    mdp::ExpertTrajectory traj;
    traj.passenger_id = pid;
    traj.condition = cond;
    for (int k = 0; k < kMonthCount; ++k) {
      const MonthStats& src = stats[static_cast<std::size_t>(std::max(k - 1, 0))];
      mdp::MonthlyObservation obs;
      obs.passenger_id = pid;
      obs.month_index = kFirstMonth + k;
      auto& s = obs.state;
      s.l_home = home;
      s.l_work = work;
      s.d_t = src.d;
      s.e_t = src.e;
      s.c_t = src.c;
      s.b_t = src.b;
      s.m_p_t = obs.month_index;
      s.m_s_t = src.m_s;
      s.w_u = promo.is_discount_station(work) ? 1 : 0;
      s.lambda_t = label_at(k - 1);
      s.lambda_prev = label_at(k - 2);
      obs.action = mdp::action_from_int(label[static_cast<std::size_t>(k)]);
      traj.observations.push_back(obs);
    }
    out.trajectories.push_back(std::move(traj));
  }

  // Quartile labels across the extracted population; a population too small
  // to have quartiles keeps label 1 everywhere.
  const std::size_t n = out.trajectories.size();
  if (n >= 4) {
    std::vector<double> flex(n), con(n), dis(n);
    for (std::size_t i = 0; i < n; ++i) {
      flex[i] = out.trajectories[i].condition.flex_raw;
      con[i] = out.trajectories[i].condition.con_raw;
      dis[i] = out.trajectories[i].condition.dis_raw;
    }
    const auto gf = quartile_grouping(flex);
    const auto gc = quartile_grouping(con);
    const auto gd = quartile_grouping(dis);
    for (std::size_t i = 0; i < n; ++i) out.trajectories[i].condition.groups = {gf[i], gc[i], gd[i]};
  }
  return out;
}

}  // namespace gcgail::panel
