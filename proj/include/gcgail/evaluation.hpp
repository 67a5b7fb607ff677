#pragma once

// Confusion-matrix metrics over predicted monthly actions and their
// breakdowns by month, station, adopter class, adopter type and scenario.
// Positive class = action 1 (off-peak).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gcgail/panel.hpp"

namespace gcgail::eval {

struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
  void add(int prediction, int label);
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  bool operator==(const ConfusionMatrix&) const = default;
};

// ShapeError on length mismatch, ValidationError on entries outside {0, 1}.
ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels);

// nullopt marks an undefined rate (zero denominator).
struct MetricsReport {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::int64_t n_samples = 0;
};

// ValidationError on an empty matrix.
MetricsReport metrics(const ConfusionMatrix& cm);

// "NA" for undefined, otherwise shortest round-trip decimal.
std::string format_metric(const std::optional<double>& v);

enum class Axis { Month, Station, AdopterClass, AdopterType, Scenario };

std::string axis_name(Axis a);
Axis parse_axis(const std::string& name);  // ValidationError

// Spread of per-unit accuracies inside a cell.
enum class SpreadUnit { Passenger, Month };

struct SampleRecord {
  std::int64_t passenger_id = 0;
  int month = 0;
  int station = 0;  // work station
  bool discount_station = false;
  panel::AdopterTypes types;  // empty = non-adopter
  std::string scenario;
  int prediction = 0;
  int label = 0;
};

struct Cell {
  std::string key;
  ConfusionMatrix cm;
  MetricsReport metrics;
  double mean_acc = 0.0;  // mean of per-unit accuracies
  double std_acc = 0.0;   // population std of per-unit accuracies
  std::size_t units = 0;
};

struct BreakdownReport {
  Axis axis = Axis::Month;
  std::vector<Cell> cells;  // numeric keys ascending, otherwise fixed order
};

Cell summarize(const std::string& key, std::span<const SampleRecord> records,
               SpreadUnit unit = SpreadUnit::Passenger);

// AdopterType allows one record in several cells; the other axes partition.
BreakdownReport breakdown(std::span<const SampleRecord> records, Axis axis,
                          SpreadUnit unit = SpreadUnit::Passenger);

inline constexpr const char* kReportHeader =
    "key,n,tp,fp,fn,tn,acc,prec,rec,f1,mean_acc,std_acc";

void write_cells_csv(std::ostream& out, std::span<const Cell> cells);

// metrics_global.csv, acc_by_month.csv, acc_by_station.csv,
// acc_by_adopter_class.csv, acc_by_adopter_type.csv, plotdata_month.csv and
// plotdata_station.csv under `dir`. Returns the file names written.
std::vector<std::string> write_reports(const std::string& dir, std::span<const SampleRecord> records,
                                       SpreadUnit unit = SpreadUnit::Passenger);

}  // namespace gcgail::eval
