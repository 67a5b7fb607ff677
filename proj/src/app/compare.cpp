#include <algorithm>
#include <map>
#include <tuple>
#include <sstream>

#include "common.hpp"
#include "gcgail/errors.hpp"

namespace gcgail::app {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

// key -> row of a report CSV written by write_cells_csv.
std::map<std::string, std::map<std::string, std::string>> read_cells(const fs::path& p) {
  std::istringstream in(read_file(p));
  std::string line;
  std::getline(in, line);
  const auto header = split_csv_line(line);
  std::map<std::string, std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw ValidationError(p.string() + ": ragged row");
    auto& row = rows[cells[0]];
    for (std::size_t i = 0; i < cells.size(); ++i) row[header[i]] = cells[i];
  }
  return rows;
}

std::string field(const std::map<std::string, std::map<std::string, std::string>>& rows,
                  const std::string& key, const std::string& column) {
  const auto it = rows.find(key);
  if (it == rows.end()) return "NA";
  const auto c = it->second.find(column);
  return c == it->second.end() ? "NA" : c->second;
}

std::string substitute_seed(std::string tmpl, std::uint64_t seed) {
  const std::string token = "{seed}";
  for (auto pos = tmpl.find(token); pos != std::string::npos; pos = tmpl.find(token)) {
    tmpl.replace(pos, token.size(), std::to_string(seed));
  }
  return tmpl;
}

}  // namespace

std::string ordering_line(std::uint64_t seed, const std::vector<std::string>& models,
                          const std::vector<double>& accuracies) {
  std::string order;
  bool holds = true;
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (i > 0) {
      order += ">=";
      holds = holds && accuracies[i - 1] >= accuracies[i];
    }
    order += models[i];
  }
  return "seed=" + std::to_string(seed) + " order=" + order + ":" + (holds ? "true" : "false");
}

CompareOutput cmd_compare(const CompareOptions& opt) {
  const auto kv = load_config(opt.config);
  auto models = kv.get_list("models");
  auto scenarios = kv.get_list("scenarios");
  std::vector<std::uint64_t> seeds;
  for (const auto& s : kv.get_list("seeds")) {
    try {
      seeds.push_back(std::stoull(s));
    } catch (const std::logic_error&) {
      throw ConfigError(kv.origin() + ": bad seed '" + s + "'");
    }
  }
  if (models.empty()) models = {"gail", "cgail", "gcgail"};
  if (scenarios.empty()) scenarios = {"full"};
  if (seeds.empty()) seeds = {0, 1, 2, 3, 4};
  for (const auto& m : models) trainers::parse_model(m);
  for (auto& s : scenarios) s = panel::Scenario::parse(s).name();
  const fs::path out(opt.out);
  const std::string data_tmpl = kv.get_string("data_dir", (out / "data" / "{seed}").string());

  struct Row {
    std::string model, scenario;
    std::uint64_t seed;
    std::map<std::string, std::map<std::string, std::string>> global, classes;
  };
  std::vector<Row> rows;
  std::vector<std::string> missing;
  for (const auto& model : models) {
    for (const auto& scenario : scenarios) {
      for (auto seed : seeds) {
        const auto run = detail::run_dir(out, model, scenario, seed);
        const auto eval_dir = run / "eval";
        const fs::path data(substitute_seed(data_tmpl, seed));
        if (!fs::exists(eval_dir / "metrics_global.csv") && opt.run_missing) {
          if (!fs::exists(data / "trajectories.jsonl")) {
            cmd_gen({opt.config, data.string(), seed, opt.quiet});
          }
          if (!fs::exists(run / "checkpoint.json")) {
            cmd_train({opt.config, data.string(), out.string(), model, scenario, seed, opt.quiet});
          }
          cmd_eval({(run / "checkpoint.json").string(), data.string(), std::nullopt, std::nullopt,
                    opt.quiet});
        }
        if (!fs::exists(eval_dir / "metrics_global.csv") ||
            !fs::exists(eval_dir / "acc_by_adopter_class.csv")) {
          missing.push_back(model + "/" + scenario + "/" + std::to_string(seed));
          continue;
        }
        rows.push_back({model, scenario, seed, read_cells(eval_dir / "metrics_global.csv"),
                        read_cells(eval_dir / "acc_by_adopter_class.csv")});
      }
    }
  }
  if (!missing.empty()) {
    std::string msg = "incomplete run matrix; missing:";
    for (const auto& m : missing) msg += "\n  " + m;
    throw IncompleteMatrix(msg);
  }

  std::ostringstream table;
  table << "model,scenario,seed,acc,prec,rec,f1,acc_adopters,std_adopters,acc_nonadopters,"
           "std_nonadopters\n";
  std::map<std::tuple<std::string, std::uint64_t, std::string>, double> acc;
  for (const auto& r : rows) {
    table << r.model << ',' << r.scenario << ',' << r.seed << ',' << field(r.global, "all", "acc")
          << ',' << field(r.global, "all", "prec") << ',' << field(r.global, "all", "rec") << ','
          << field(r.global, "all", "f1") << ',' << field(r.classes, "adopter", "mean_acc") << ','
          << field(r.classes, "adopter", "std_acc") << ',' << field(r.classes, "non_adopter", "mean_acc")
          << ',' << field(r.classes, "non_adopter", "std_acc") << '\n';
    const auto a = field(r.global, "all", "acc");
    if (a != "NA") acc[{r.scenario, r.seed, r.model}] = std::stod(a);
  }

  CompareOutput result;
  std::vector<std::string> ranked;
  for (const char* m : {"gcgail", "cgail", "gail"}) {
    if (std::find(models.begin(), models.end(), m) != models.end()) ranked.emplace_back(m);
  }
  if (ranked.size() >= 2) {
    for (const auto& scenario : scenarios) {
      for (auto seed : seeds) {
        std::vector<double> a;
        for (const auto& m : ranked) {
          const auto it = acc.find({scenario, seed, m});
          a.push_back(it == acc.end() ? 0.0 : it->second);
        }
        const auto line = ordering_line(seed, ranked, a);
        result.ordering_lines.push_back(scenario == "full" ? line : "scenario=" + scenario + " " + line);
      }
    }
  }
  result.table = out / "comparison.csv";
  write_file(result.table, table.str());
  std::string ordering;
  for (const auto& l : result.ordering_lines) ordering += l + "\n";
  write_file(out / "ordering.txt", ordering);
  write_provenance(out, "compare",
                   {{"models", models}, {"scenarios", scenarios}, {"seeds", seeds}, {"data_dir", data_tmpl}},
                   seeds.front(), {"comparison.csv", "ordering.txt"});
  return result;
}

}  // namespace gcgail::app
