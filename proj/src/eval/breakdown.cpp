#include <algorithm>
#include <cmath>
#include <map>

#include "gcgail/errors.hpp"
#include "gcgail/evaluation.hpp"

namespace gcgail::eval {

std::string axis_name(Axis a) {
  switch (a) {
    case Axis::Month: return "month";
    case Axis::Station: return "station";
    case Axis::AdopterClass: return "adopter_class";
    case Axis::AdopterType: return "adopter_type";
    case Axis::Scenario: return "scenario";
  }
  return "unknown";
}

Axis parse_axis(const std::string& name) {
  for (Axis a : {Axis::Month, Axis::Station, Axis::AdopterClass, Axis::AdopterType, Axis::Scenario}) {
    if (axis_name(a) == name) return a;
  }
  throw ValidationError("unknown breakdown axis '" + name + "'");
}

Cell summarize(const std::string& key, std::span<const SampleRecord> records, SpreadUnit unit) {
  Cell c;
  c.key = key;
  std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> per_unit;  // correct, total
  for (const auto& r : records) {
    c.cm.add(r.prediction, r.label);
    auto& u = per_unit[unit == SpreadUnit::Passenger ? r.passenger_id : r.month];
    u.first += r.prediction == r.label ? 1 : 0;
    u.second += 1;
  }
  c.metrics = metrics(c.cm);
  c.units = per_unit.size();
  double sum = 0.0;
  for (const auto& [k, u] : per_unit) sum += static_cast<double>(u.first) / static_cast<double>(u.second);
  c.mean_acc = sum / static_cast<double>(c.units);
  double sq = 0.0;
  for (const auto& [k, u] : per_unit) {
    const double a = static_cast<double>(u.first) / static_cast<double>(u.second) - c.mean_acc;
    sq += a * a;
  }
  c.std_acc = std::sqrt(sq / static_cast<double>(c.units));
  return c;
}

BreakdownReport breakdown(std::span<const SampleRecord> records, Axis axis, SpreadUnit unit) {
  BreakdownReport rep;
  rep.axis = axis;
  auto emit = [&](const std::string& key, const std::vector<SampleRecord>& rows) {
    if (!rows.empty()) rep.cells.push_back(summarize(key, rows, unit));
  };
  switch (axis) {
    case Axis::Month:
    case Axis::Station: {
      std::map<int, std::vector<SampleRecord>> groups;
      for (const auto& r : records) groups[axis == Axis::Month ? r.month : r.station].push_back(r);
      for (const auto& [k, rows] : groups) emit(std::to_string(k), rows);
      break;
    }
    case Axis::AdopterClass: {
      std::vector<SampleRecord> adopters, others;
      for (const auto& r : records) (r.types.adopter() ? adopters : others).push_back(r);
      emit("adopter", adopters);
      emit("non_adopter", others);
      break;
    }
    case Axis::AdopterType: {
      for (panel::AdopterType t : panel::kAllAdopterTypes) {
        std::vector<SampleRecord> rows;
        for (const auto& r : records) {
          if (r.types.has(t)) rows.push_back(r);
        }
        emit(panel::adopter_type_name(t), rows);
      }
      break;
    }
    case Axis::Scenario: {
      std::map<std::string, std::vector<SampleRecord>> groups;
      for (const auto& r : records) groups[r.scenario].push_back(r);
      for (const auto& [k, rows] : groups) emit(k, rows);
      break;
    }
  }
  return rep;
}

}  // namespace gcgail::eval
