#include "offac/records.hpp"

#include "offac/mdp_io.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

namespace offac {

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "run,seed,step,metric,value\n";
  for (const auto& r : records)
    out << r.run << ',' << r.seed << ',' << r.step << ',' << r.metric << ',' << format_double(r.value) << '\n';
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "run,seed,step,metric,value")
    throw ParseError("records CSV must start with the header run,seed,step,metric,value");
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string run, seed, step, metric, value;
    if (!std::getline(ss, run, ',') || !std::getline(ss, seed, ',') || !std::getline(ss, step, ',') ||
        !std::getline(ss, metric, ',') || !std::getline(ss, value))
      throw ParseError("malformed records line: " + line);
    out.push_back({std::stoull(run), std::stoull(seed), std::stoull(step), metric, parse_double(value)});
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records, std::size_t runs_per_point) {
  if (runs_per_point == 0) return {};
  using Key = std::tuple<std::size_t, std::string, std::uint64_t>;
  std::map<Key, std::vector<double>> groups;
  for (const auto& r : records)
    groups[{static_cast<std::size_t>(r.run / runs_per_point), r.metric, r.step}].push_back(r.value);

  std::vector<SummaryRow> rows;
  for (const auto& [key, values] : groups) {
    SummaryRow row;
    std::tie(row.grid, row.metric, row.step) = key;
    row.n = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    row.mean = sum / static_cast<double>(row.n);
    if (row.n > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - row.mean) * (v - row.mean);
      row.se = std::sqrt(ss / static_cast<double>(row.n - 1) / static_cast<double>(row.n));
    }
    rows.push_back(row);
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows, const std::vector<GridPoint>& grid) {
  out << "grid,lambda,alpha0,normalize,metric,step,n,mean,se\n";
  for (const auto& r : rows) {
    const GridPoint& g = grid.at(r.grid);
    out << r.grid << ',' << format_double(g.lambda) << ',' << format_double(g.alpha0) << ',' << (g.normalize ? 1 : 0)
        << ',' << r.metric << ',' << r.step << ',' << r.n << ',' << format_double(r.mean) << ','
        << format_double(r.se) << '\n';
  }
}

void write_grid_csv(std::ostream& out, const std::vector<GridPoint>& grid) {
  out << "grid,lambda,alpha0,normalize\n";
  for (const auto& g : grid)
    out << g.index << ',' << format_double(g.lambda) << ',' << format_double(g.alpha0) << ',' << (g.normalize ? 1 : 0)
        << '\n';
}

}  // namespace offac
