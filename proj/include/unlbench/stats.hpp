#ifndef UNLBENCH_STATS_HPP
#define UNLBENCH_STATS_HPP

#include <span>
#include <vector>

namespace unlbench::stats {

// Sorted sample of one scalar metric. Nonempty by construction.
class EmpiricalDistribution {
  public:
    explicit EmpiricalDistribution(std::vector<double> samples);

    const std::vector<double>& samples() const { return samples_; }
    std::size_t n() const { return samples_.size(); }
    double min() const { return samples_.front(); }
    double max() const { return samples_.back(); }

  private:
    std::vector<double> samples_;
};

// Population (1/N) variance convention throughout, which makes the
// between/within decomposition an exact identity on finite grids.
double population_variance(std::span<const double> values);

// Variance across unlearning seeds for one fixed training seed.
double conditional_variance(std::span<const double> row);

struct VarianceDecomposition {
    double total = 0.0;    // variance of all I*J entries
    double between = 0.0;  // variance of the I row means
    double within = 0.0;   // mean of the I row variances
    std::vector<double> row_conditionals;
};

// total = between + within up to round-off, for any rectangular grid.
VarianceDecomposition decompose(const std::vector<std::vector<double>>& grid);

// Linear interpolation between order statistics at position (n-1)*q.
double quantile(const EmpiricalDistribution& dist, double q);
std::vector<double> quantiles(const EmpiricalDistribution& dist, std::span<const double> qs);

// 2-Wasserstein distance between two empirical distributions. Equal sizes use
// the sorted-coupling closed form; unequal sizes use the exact integral of
// the two piecewise-constant inverse CDFs over merged probability breakpoints.
double wasserstein2(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

struct QuantileSummary {
    double min = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, max = 0.0;
};
QuantileSummary summarize_quantiles(const EmpiricalDistribution& dist);

struct SampleSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // population
    QuantileSummary quants;
};
SampleSummary summarize(const EmpiricalDistribution& dist);

// One comparison row between the metric samples of two evaluation protocols.
struct ProtocolComparison {
    double w2 = 0.0;
    SampleSummary a;
    SampleSummary b;
};
ProtocolComparison compare_protocols(std::span<const double> samples_a,
                                     std::span<const double> samples_b);

}  // namespace unlbench::stats

#endif
