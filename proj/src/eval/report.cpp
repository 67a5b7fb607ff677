#include <filesystem>
#include <fstream>
#include <map>

#include "gcgail/errors.hpp"
#include "gcgail/evaluation.hpp"

namespace gcgail::eval {

namespace {

std::string num(double v) { return format_metric(std::optional<double>(v)); }

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

}  // namespace

void write_cells_csv(std::ostream& out, std::span<const Cell> cells) {
  out << kReportHeader << '\n';
  for (const auto& c : cells) {
    out << c.key << ',' << c.cm.total() << ',' << c.cm.tp << ',' << c.cm.fp << ',' << c.cm.fn << ','
        << c.cm.tn << ',' << format_metric(c.metrics.accuracy) << ','
        << format_metric(c.metrics.precision) << ',' << format_metric(c.metrics.recall) << ','
        << format_metric(c.metrics.f1) << ',' << num(c.mean_acc) << ',' << num(c.std_acc) << '\n';
  }
}

std::vector<std::string> write_reports(const std::string& dir, std::span<const SampleRecord> records,
                                       SpreadUnit unit) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  const fs::path base(dir);
  std::vector<std::string> written;

  auto cells_file = [&](const std::string& name, const std::vector<Cell>& cells) {
    auto out = open_out(base / name);
    write_cells_csv(out, cells);
    written.push_back(name);
  };
  cells_file("metrics_global.csv", {summarize("all", records, unit)});
  cells_file("acc_by_month.csv", breakdown(records, Axis::Month, unit).cells);
  cells_file("acc_by_station.csv", breakdown(records, Axis::Station, unit).cells);
  cells_file("acc_by_adopter_class.csv", breakdown(records, Axis::AdopterClass, unit).cells);
  cells_file("acc_by_adopter_type.csv", breakdown(records, Axis::AdopterType, unit).cells);

  // Month x class, one row per (month, class) cell.
  {
    auto out = open_out(base / "plotdata_month.csv");
    out << "month,class,n,acc,mean_acc,std_acc\n";
    std::map<int, std::vector<SampleRecord>> by_month;
    for (const auto& r : records) by_month[r.month].push_back(r);
    for (const auto& [month, rows] : by_month) {
      for (const auto& c : breakdown(rows, Axis::AdopterClass, unit).cells) {
        out << month << ',' << c.key << ',' << c.cm.total() << ',' << format_metric(c.metrics.accuracy)
            << ',' << num(c.mean_acc) << ',' << num(c.std_acc) << '\n';
      }
    }
    written.push_back("plotdata_month.csv");
  }
  {
    auto out = open_out(base / "plotdata_station.csv");
    out << "station,discount_station,n,acc,prec,rec,f1\n";
    std::map<int, bool> discount;
    for (const auto& r : records) discount[r.station] = r.discount_station;
    for (const auto& c : breakdown(records, Axis::Station, unit).cells) {
      const int station = std::stoi(c.key);
      out << station << ',' << (discount[station] ? 1 : 0) << ',' << c.cm.total() << ','
          << format_metric(c.metrics.accuracy) << ',' << format_metric(c.metrics.precision) << ','
          << format_metric(c.metrics.recall) << ',' << format_metric(c.metrics.f1) << '\n';
    }
    written.push_back("plotdata_station.csv");
  }
  return written;
}

}  // namespace gcgail::eval
