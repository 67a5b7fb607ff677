#include <cmath>

#include "gcgail/errors.hpp"
#include "gcgail/mdp.hpp"

namespace gcgail::mdp {

Action action_from_int(int value) {
  if (value == 0) return Action::Other;
  if (value == 1) return Action::OffPeak;
  throw ValidationError("action must be 0 or 1, got " + std::to_string(value));
}

std::array<double, kStateDim> StateVector::to_array() const {
  return {static_cast<double>(l_home), static_cast<double>(l_work), d_t, e_t, c_t, b_t,
          static_cast<double>(m_p_t), m_s_t, static_cast<double>(w_u),
          static_cast<double>(lambda_t), static_cast<double>(lambda_prev)};
}

namespace {

int as_int(double v, const char* name) {
  const double r = std::round(v);
  if (!std::isfinite(v) || r != v) throw ValidationError(std::string(name) + " must be integral");
  return static_cast<int>(r);
}

int as_flag(double v, const char* name) {
  const int i = as_int(v, name);
  if (i != 0 && i != 1) throw ValidationError(std::string(name) + " must be 0 or 1");
  return i;
}

}  // namespace

StateVector StateVector::from_array(std::span<const double> v) {
  if (v.size() != kStateDim) throw ShapeError("state vector needs 11 values");
  StateVector s;
  s.l_home = as_int(v[0], "l_home");
  s.l_work = as_int(v[1], "l_work");
  s.d_t = v[2];
  s.e_t = v[3];
  s.c_t = v[4];
  s.b_t = v[5];
  s.m_p_t = as_int(v[6], "m_p_t");
  s.m_s_t = v[7];
  s.w_u = as_flag(v[8], "w_u");
  s.lambda_t = as_flag(v[9], "lambda_t");
  s.lambda_prev = as_flag(v[10], "lambda_prev");
  return s;
}

void StateVector::validate() const {
  auto flag = [](int v) { return v == 0 || v == 1; };
  if (!flag(w_u) || !flag(lambda_t) || !flag(lambda_prev)) {
    throw ValidationError("w_u, lambda_t and lambda_prev must be 0 or 1");
  }
  for (double v : {d_t, e_t, c_t, b_t, m_s_t}) {
    if (!std::isfinite(v)) throw ValidationError("state feature is not finite");
  }
  if (d_t > e_t) throw ValidationError("mean tap-in after mean tap-out");
  if (c_t < 0.0 || m_s_t < 0.0 || b_t < 0.0) {
    throw ValidationError("fare, saving and shift time must be non-negative");
  }
}

std::optional<StateVector> transition(const StateVector& s, Action a,
                                      const MonthlyObservation* next) {
  if (next == nullptr) return std::nullopt;
  StateVector out = s;
  const StateVector& obs = next->state;
  out.d_t = obs.d_t;
  out.e_t = obs.e_t;
  out.c_t = obs.c_t;
  out.b_t = obs.b_t;
  out.m_s_t = obs.m_s_t;
  out.m_p_t = s.m_p_t + 1;
  out.lambda_prev = s.lambda_t;
  out.lambda_t = to_int(a);
  return out;
}

std::vector<StateVector> replay(const ExpertTrajectory& traj) {
  std::vector<StateVector> states;
  if (traj.observations.empty()) return states;
  states.reserve(traj.observations.size());
  StateVector s = traj.observations.front().state;
  states.push_back(s);
  for (std::size_t t = 0; t + 1 < traj.observations.size(); ++t) {
    auto next = transition(s, traj.observations[t].action, &traj.observations[t + 1]);
    s = *next;
    states.push_back(s);
  }
  return states;
}

}  // namespace gcgail::mdp
