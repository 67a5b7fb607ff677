#include <algorithm>

#include "gcgail/panel.hpp"

namespace gcgail::panel {

namespace {

std::vector<int> post_launch_modes(const mdp::ExpertTrajectory& traj) {
  std::vector<int> modes;
  for (const auto& obs : traj.observations) {
    if (obs.month_index >= 0) modes.push_back(mdp::to_int(obs.action));
  }
  return modes;
}

}  // namespace

std::optional<int> change_point(const mdp::ExpertTrajectory& traj) {
  std::vector<std::pair<int, int>> months;  // (month, mode) for month >= 0
  for (const auto& obs : traj.observations) {
    if (obs.month_index >= 0) months.emplace_back(obs.month_index, mdp::to_int(obs.action));
  }
  for (std::size_t i = 0; i + 1 < months.size(); ++i) {
    if (months[i].second == 1 && months[i + 1].second == 1) return months[i].first;
  }
  return std::nullopt;
}

AdopterTypes classify_adopter(const mdp::ExpertTrajectory& traj) {
  AdopterTypes types;
  const auto cp = change_point(traj);
  if (!cp) return types;
  const int c = *cp;
  types.add(c <= 1 ? kEarly : kLate);

  const auto modes = post_launch_modes(traj);
  const auto from = static_cast<std::size_t>(c);
  const bool sustained =
      std::all_of(modes.begin() + static_cast<std::ptrdiff_t>(from), modes.end(),
                  [](int m) { return m == 1; });
  if (sustained) types.add(kSustained);
  // Attrition: a run of zeros reaching the panel end that starts at c+2 or later.
  std::size_t tail_start = modes.size();
  while (tail_start > 0 && modes[tail_start - 1] == 0) --tail_start;
  if (tail_start < modes.size() && tail_start >= from + 2) types.add(kAttrition);

  // Origin band: majority of pre-adoption months' mean exit time. The state
  // at month m carries the averages of month m - 1, so states up to and
  // including month c describe the pre-adoption period.
  int early = 0, peak = 0;
  for (const auto& obs : traj.observations) {
    if (obs.month_index > c) break;
    const double e = obs.state.e_t;
    if (e >= kEarlyOpen && e < kWindowOpen) ++early;
    if (e >= kWindowClose && e < kPeakClose) ++peak;
  }
  if (early > peak) types.add(kEarlyMorning);
  if (peak > early) types.add(kMorningPeak);
  return types;
}

std::map<std::int64_t, AdopterTypes> classify_adopters(std::span<const mdp::ExpertTrajectory> trajs) {
  std::map<std::int64_t, AdopterTypes> out;
  for (const auto& t : trajs) out[t.passenger_id] = classify_adopter(t);
  return out;
}

}  // namespace gcgail::panel
