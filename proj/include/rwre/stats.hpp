#pragma once

// Small statistics toolbox: running moments, exact binomial intervals, the
// verdict rule shared by every criterion, batch means, and heavy-tail
// estimators (Hill with right censoring, log-log survival regression).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rwre {

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    bool contains(double v) const { return lower <= v && v <= upper; }
};

/// Welford accumulator.
class RunningStats {
public:
    void add(double x);
    void merge(const RunningStats& other);

    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const;
    double stderr_of_mean() const;
    double max() const { return max_; }
    double sum() const { return mean_ * static_cast<double>(n_); }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double max_ = -1.0 / 0.0;
};

/// Exact (Clopper-Pearson) two-sided interval for a binomial proportion.
/// `successes` may be fractional, in which case the beta-quantile form is
/// evaluated at the real-valued count.
Interval clopper_pearson(double successes, double trials, double level = 0.99);

double normal_quantile(double p);

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

/// PASS iff upper < threshold, FAIL iff lower > threshold, INCONCLUSIVE otherwise.
Verdict decide(const Interval& ci, double threshold);

/// Ratio-of-means estimate sum(num)/sum(den) with a batch-means standard error.
struct RatioEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t batches = 0;
};
RatioEstimate batch_means_ratio(std::span<const double> num, std::span<const double> den,
                                std::size_t n_batches = 30);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

struct TailConfig {
    double k_fraction = 0.05;  ///< top order statistics used by Hill
    std::size_t bootstrap = 200;
    double level = 0.99;
    /// Light-tail test: Hill at k/10 exceeding Hill at k by this factor.
    double drift_ratio = 1.3;
    double exponent_cap = 10.0;
    std::uint64_t seed = 0x5eed;
};

struct TailEstimate {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t censored = 0;
    double hill = 0.0;  ///< tail exponent alpha, P(X > u) ~ u^-alpha
    Interval hill_ci;
    double loglog = 0.0;
    Interval loglog_ci;
    double hill_small_k = 0.0;
    bool heavy_tail_detected = true;
    bool capped = false;
};

/// Hill exponent from the top k order statistics. Censored samples (value is
/// the censoring point) count in the log-excess sum but not in the numerator.
/// Returns nullopt when no uncensored sample lies above the threshold.
std::optional<double> hill_exponent(std::span<const double> sorted_desc,
                                    std::span<const std::uint8_t> censored_sorted, std::size_t k);

/// Throws std::invalid_argument for fewer than 1000 samples, non-positive
/// samples, or a degenerate (constant) sample.
TailEstimate estimate_tail_exponent(std::span<const double> samples,
                                    std::span<const std::uint8_t> censored = {},
                                    const TailConfig& cfg = {});

/// Empirical survival P(X > u) at each u in `grid`.
std::vector<double> empirical_survival(std::span<const double> samples, std::span<const double> grid);

}  // namespace rwre
