#ifndef OFFAC_RECORDS_HPP
#define OFFAC_RECORDS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace offac {

/// One row of run,seed,step,metric,value.
struct RunRecord {
  std::uint64_t run = 0;
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  std::string metric;
  double value = 0.0;
};

/// Settings of one sweep grid point; runs grid * runs_per_point .. + runs_per_point - 1 belong to it.
struct GridPoint {
  std::size_t index = 0;
  double lambda = 0.0;
  double alpha0 = 0.0;
  bool normalize = false;
};

struct SummaryRow {
  std::size_t grid = 0;
  std::string metric;
  std::uint64_t step = 0;
  std::size_t n = 0;
  double mean = 0.0;
  double se = 0.0;
};

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records_csv(std::istream& in);

/// Mean and standard error per (grid point, metric, step). Rows flagged with
/// metric "diverged" are counted separately and excluded from the means.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records, std::size_t runs_per_point);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows, const std::vector<GridPoint>& grid);
void write_grid_csv(std::ostream& out, const std::vector<GridPoint>& grid);

}  // namespace offac

#endif  // OFFAC_RECORDS_HPP
