/**
 * @file results.hpp
 * @brief CSV result rows and the summary table.
 *
 * results.csv: drop,ue,class,strategy,precoder,policy,metric,value,seed
 *   se      per eMBB UE, bits/s/Hz averaged over blocks
 *   sum_se  ue = -1, network sum of se
 *   outage  ue = -1, fraction of blocks with zero sum SE
 *   eps     per URLLC UE, mean error probability over its active slots
 *           ("nan" when never active)
 * summary.csv: strategy,precoder,policy,metric,stat,value
 */
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cfsim/config.hpp"
#include "cfsim/experiment.hpp"

namespace cfsim {

struct ResultRow {
  int drop = 0;
  int ue = -1;
  std::string service;  ///< "eMBB" or "URLLC"
  std::string strategy;
  std::string precoder;
  std::string policy;
  std::string metric;
  double value = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kResultsHeader =
    "drop,ue,class,strategy,precoder,policy,metric,value,seed";
inline constexpr const char* kSummaryHeader =
    "strategy,precoder,policy,metric,stat,value";

/// %.9g, with "nan", "inf" and "-inf" spelled out.
std::string format_value(double v);

std::string format_row(const ResultRow& row);

std::vector<ResultRow> result_rows(const DropResult& drop, const SimConfig& cfg);

/// Throws std::runtime_error naming the line on malformed input.
std::vector<ResultRow> read_results(std::istream& in);

struct SummaryRow {
  std::string strategy;
  std::string precoder;
  std::string policy;
  std::string metric;
  std::string stat;
  double value = 0.0;
};

/// Linear-interpolation quantile of sorted data, p in [0, 1].
double quantile(const std::vector<double>& sorted, double p);

/**
 * Per (strategy, precoder, policy, metric): count, mean, p00..p100 in steps
 * of 0.05, q1, median, q3. eps groups add availability at eps_target and the
 * number of excluded UEs; outage groups add the outage frequency. An empty
 * input yields a single row with stat "empty".
 */
std::vector<SummaryRow> summarize_rows(const std::vector<ResultRow>& rows,
                                       double eps_target);

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows);

/// Reads <dir>/results.csv (and eps_target from <dir>/config.json when
/// present) and writes <dir>/summary.csv.
void summarize_dir(const std::string& dir);

/// Runs the experiment into <dir>: config.json, results.csv, summary.csv.
void run_experiment(const SimConfig& cfg, const std::string& dir, int workers);

}  // namespace cfsim
