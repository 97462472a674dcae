#include "unlbench/stats.hpp"

#include <algorithm>
#include <cmath>

#include "unlbench/errors.hpp"

namespace unlbench::stats {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples)
    : samples_(std::move(samples)) {
    if (samples_.empty()) {
        throw MetricError("empirical distribution needs at least one sample");
    }
    std::sort(samples_.begin(), samples_.end());
}

double population_variance(std::span<const double> values) {
    if (values.empty()) throw MetricError("variance: empty sample");
    // A bit-identical sample has variance 0 exactly; the two-pass formula
    // would leave ulp-level residue whenever sum/n != value.
    bool constant = true;
    for (const double v : values) {
        if (v != values.front()) {
            constant = false;
            break;
        }
    }
    if (constant) return 0.0;
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double acc = 0.0;
    for (const double v : values) {
        const double d = v - mean;
        acc += d * d;
    }
    return acc / static_cast<double>(values.size());
}

double conditional_variance(std::span<const double> row) {
    return population_variance(row);
}

VarianceDecomposition decompose(const std::vector<std::vector<double>>& grid) {
    if (grid.empty() || grid.front().empty()) {
        throw MetricError("decompose: grid must be nonempty");
    }
    const std::size_t cols = grid.front().size();
    for (const auto& row : grid) {
        if (row.size() != cols) throw MetricError("decompose: ragged grid");
    }

    VarianceDecomposition dec;
    std::vector<double> all;
    all.reserve(grid.size() * cols);
    std::vector<double> row_means;
    row_means.reserve(grid.size());
    for (const auto& row : grid) {
        double m = 0.0;
        for (const double v : row) m += v;
        row_means.push_back(m / static_cast<double>(cols));
        all.insert(all.end(), row.begin(), row.end());
        dec.row_conditionals.push_back(population_variance(row));
    }
    dec.total = population_variance(all);
    dec.between = population_variance(row_means);
    double within = 0.0;
    for (const double v : dec.row_conditionals) within += v;
    dec.within = within / static_cast<double>(grid.size());
    return dec;
}

double quantile(const EmpiricalDistribution& dist, double q) {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw MetricError("quantile: q must lie in [0, 1]");
    }
    const auto& s = dist.samples();
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    if (lo == hi) return s[lo];
    const double frac = pos - static_cast<double>(lo);
    return s[lo] + frac * (s[hi] - s[lo]);
}

std::vector<double> quantiles(const EmpiricalDistribution& dist, std::span<const double> qs) {
    std::vector<double> out;
    out.reserve(qs.size());
    for (const double q : qs) out.push_back(quantile(dist, q));
    return out;
}

double wasserstein2(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
    const auto& xs = a.samples();
    const auto& ys = b.samples();
    if (xs.size() == ys.size()) {
        double acc = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double d = xs[k] - ys[k];
            acc += d * d;
        }
        return std::sqrt(acc / static_cast<double>(xs.size()));
    }
    // Unequal sizes: integrate (Fa^-1(u) - Fb^-1(u))^2 du. Both inverse CDFs
    // are constant between consecutive breakpoints i/na and j/nb.
    const auto na = static_cast<double>(xs.size());
    const auto nb = static_cast<double>(ys.size());
    std::size_t i = 0, j = 0;
    double u = 0.0;
    double acc = 0.0;
    while (i < xs.size() && j < ys.size()) {
        const double next_a = static_cast<double>(i + 1) / na;
        const double next_b = static_cast<double>(j + 1) / nb;
        const double next = std::min(next_a, next_b);
        const double d = xs[i] - ys[j];
        acc += d * d * (next - u);
        u = next;
        if (next_a <= next) ++i;
        if (next_b <= next) ++j;
    }
    return std::sqrt(acc);
}

QuantileSummary summarize_quantiles(const EmpiricalDistribution& dist) {
    QuantileSummary q;
    q.min = dist.min();
    q.q25 = quantile(dist, 0.25);
    q.q50 = quantile(dist, 0.50);
    q.q75 = quantile(dist, 0.75);
    q.max = dist.max();
    return q;
}

SampleSummary summarize(const EmpiricalDistribution& dist) {
    SampleSummary s;
    s.n = dist.n();
    double mean = 0.0;
    for (const double v : dist.samples()) mean += v;
    s.mean = mean / static_cast<double>(dist.n());
    s.variance = population_variance(dist.samples());
    s.quants = summarize_quantiles(dist);
    return s;
}

ProtocolComparison compare_protocols(std::span<const double> samples_a,
                                     std::span<const double> samples_b) {
    EmpiricalDistribution da(std::vector<double>(samples_a.begin(), samples_a.end()));
    EmpiricalDistribution db(std::vector<double>(samples_b.begin(), samples_b.end()));
    ProtocolComparison cmp;
    cmp.w2 = wasserstein2(da, db);
    cmp.a = summarize(da);
    cmp.b = summarize(db);
    return cmp;
}

}  // namespace unlbench::stats
