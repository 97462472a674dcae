#ifndef UNLBENCH_REPORT_HPP
#define UNLBENCH_REPORT_HPP

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "unlbench/stats.hpp"
#include "unlbench/sweep.hpp"

namespace unlbench::cli {

// One reconstructed metric grid: a (target, method) group of CSV rows under
// one protocol, reshaped to I rows (training seeds) x J columns.
struct MetricGrid {
    std::string protocol;
    datagen::ForgetTarget target;
    std::string method;
    std::string hyper_digest;
    int I = 0;
    int J = 0;
    std::vector<seedkit::Seed> training_seeds;
    // metric name -> I x J matrix
    std::map<std::string, std::vector<std::vector<double>>> metrics;

    std::vector<double> flat(const std::string& metric) const;
};

// Rebuilds grids from CSV rows. Each input CSV is either one protocol, or a
// common-practice + recommended mix that can be split unambiguously (exactly
// one multi-record training seed per group, the rest singletons). Colliding
// seeds or other ambiguous shapes raise ConfigError.
std::vector<MetricGrid> reconstruct_grids(const std::vector<std::vector<sweep::CsvRow>>& csvs);

std::vector<MetricGrid> grids_of_sweep(const sweep::SweepGrid& grid);

// Analysis summary document: per (protocol, target, method, metric) the
// variance decomposition, quantiles and, when both protocols are present,
// the 2-Wasserstein distance to the same cell of the other protocol.
nlohmann::ordered_json analyze_grids(const std::vector<MetricGrid>& grids);

// Boxplot figures. fig1_*: per (metric, target) one box per method and
// protocol, with retrain quantile guide lines. fig2_w2_*: per metric the
// distribution over targets of the between-protocol W2 distance (emitted
// only when both protocols are present). Returns the written file names.
std::vector<std::string> write_report_svgs(const std::vector<MetricGrid>& grids,
                                           const std::string& out_dir);

// Pixel-space box geometry, exposed for tests: an affine value->y mapping
// with higher values drawn higher (smaller y).
double map_y(double value, double lo, double hi, double y_top, double y_bottom);

// CLI entry points; diagnostics go to `diag`. Exit codes: 0 success,
// 1 runtime cell failure, 2 configuration error.
int cmd_sweep(const std::string& config_path, const std::string& out_dir, int threads,
              std::ostream& diag);
int cmd_analyze(const std::vector<std::string>& in_csvs, const std::string& out_json,
                std::ostream& diag);
int cmd_report(const std::vector<std::string>& in_csvs, const std::string& out_dir,
               std::ostream& diag);

}  // namespace unlbench::cli

#endif
