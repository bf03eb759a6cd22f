#ifndef OFFAC_SWEEP_HPP
#define OFFAC_SWEEP_HPP

#include "offac/config.hpp"
#include "offac/records.hpp"

#include <vector>

namespace offac {

struct SweepResult {
  std::vector<GridPoint> grid;
  std::vector<RunRecord> records;  ///< sorted by run id, then by emission order
  std::vector<SummaryRow> summary;
  int runs_per_point = 0;
};

/// Grid = lambda x alpha0 x normalize_trace, each point run `runs` times with
/// per-run seeds shared across grid points. Runs are distributed over
/// config.threads workers and merged by run id, so the output does not depend
/// on the thread count.
SweepResult run_sweep(const ExperimentConfig& config);

/// Best (lowest final mean) value of `metric` over alpha0 for each
/// (lambda, normalize) pair.
struct BestAlpha {
  double lambda = 0.0;
  bool normalize = false;
  double alpha0 = 0.0;
  double mean = 0.0;
  double se = 0.0;
};
std::vector<BestAlpha> best_over_alpha(const SweepResult& result, const std::string& metric);

/// Writes records.csv, grid.csv, summary.csv, best_alpha.csv and SVG plots.
void write_sweep_outputs(const ExperimentConfig& config, const SweepResult& result);

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t run);

}  // namespace offac

#endif  // OFFAC_SWEEP_HPP
