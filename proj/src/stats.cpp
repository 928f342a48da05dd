#include "rwre/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "rwre/rng.hpp"

namespace rwre {

void RunningStats::add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
    max_ = std::max(max_, x);
}

void RunningStats::merge(const RunningStats& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double n = static_cast<double>(n_ + o.n_);
    const double delta = o.mean_ - mean_;
    mean_ += delta * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    n_ += o.n_;
    max_ = std::max(max_, o.max_);
}

double RunningStats::variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStats::stderr_of_mean() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

Interval clopper_pearson(double successes, double trials, double level) {
    if (!(trials > 0.0) || successes < 0.0 || successes > trials) {
        throw std::invalid_argument("clopper_pearson: need 0 <= successes <= trials, trials > 0");
    }
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("clopper_pearson: level in (0,1)");
    const double alpha = 1.0 - level;
    Interval ci;
    ci.lower = successes <= 0.0
                   ? 0.0
                   : boost::math::ibeta_inv(successes, trials - successes + 1.0, alpha / 2.0);
    ci.upper = successes >= trials
                   ? 1.0
                   : boost::math::ibeta_inv(successes + 1.0, trials - successes, 1.0 - alpha / 2.0);
    return ci;
}

double normal_quantile(double p) {
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

Verdict decide(const Interval& ci, double threshold) {
    if (ci.upper < threshold) return Verdict::Pass;
    if (ci.lower > threshold) return Verdict::Fail;
    return Verdict::Inconclusive;
}

RatioEstimate batch_means_ratio(std::span<const double> num, std::span<const double> den,
                                std::size_t n_batches) {
    if (num.size() != den.size() || num.empty()) {
        throw std::invalid_argument("batch_means_ratio: size mismatch or empty input");
    }
    RatioEstimate r;
    const double sn = std::accumulate(num.begin(), num.end(), 0.0);
    const double sd = std::accumulate(den.begin(), den.end(), 0.0);
    r.value = sn / sd;
    const std::size_t b = std::min(n_batches, num.size());
    if (b < 2) return r;
    const std::size_t per = num.size() / b;
    RunningStats batch;
    for (std::size_t i = 0; i < b; ++i) {
        const std::size_t lo = i * per;
        const std::size_t hi = i + 1 == b ? num.size() : lo + per;
        double a = 0.0, c = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
            a += num[j];
            c += den[j];
        }
        batch.add(a / c);
    }
    r.batches = b;
    r.std_error = batch.stderr_of_mean();
    return r;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares: need >= 2 points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("least_squares: degenerate abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

std::optional<double> hill_exponent(std::span<const double> sorted_desc,
                                    std::span<const std::uint8_t> censored_sorted, std::size_t k) {
    if (k == 0 || k >= sorted_desc.size()) return std::nullopt;
    const double u = sorted_desc[k];
    if (!(u > 0.0)) return std::nullopt;
    double sum = 0.0;
    std::size_t observed = 0;
    for (std::size_t i = 0; i < k; ++i) {
        sum += std::log(sorted_desc[i] / u);
        if (censored_sorted.empty() || censored_sorted[i] == 0) ++observed;
    }
    if (observed == 0 || !(sum > 0.0)) return std::nullopt;
    return static_cast<double>(observed) / sum;
}

namespace {

struct Sample {
    double value;
    std::uint8_t censored;
};

struct TailPoint {
    std::optional<double> hill;
    std::optional<double> loglog;
};

TailPoint tail_point(std::vector<Sample>& s, std::size_t k) {
    std::sort(s.begin(), s.end(), [](const Sample& a, const Sample& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.censored < b.censored;
    });
    std::vector<double> v(s.size());
    std::vector<std::uint8_t> c(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        v[i] = s[i].value;
        c[i] = s[i].censored;
    }
    TailPoint out;
    out.hill = hill_exponent(v, c, k);
    // survival regression over uncensored points among the top k: censoring
    // only happens at the top, so rank/n is the empirical survival there.
    std::vector<double> lx, ly;
    const double n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < k && i < v.size(); ++i) {
        if (c[i] != 0 || !(v[i] > 0.0)) continue;
        lx.push_back(std::log(v[i]));
        ly.push_back(std::log((static_cast<double>(i) + 1.0) / n));
    }
    if (lx.size() >= 3 && lx.front() != lx.back()) {
        out.loglog = -least_squares(lx, ly).slope;
    }
    return out;
}

double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= v.size()) return v.back();
    return v[i] * (1.0 - frac) + v[i + 1] * frac;
}

}  // namespace

TailEstimate estimate_tail_exponent(std::span<const double> samples,
                                    std::span<const std::uint8_t> censored, const TailConfig& cfg) {
    if (samples.size() < 1000) throw std::invalid_argument("estimate_tail_exponent: need >= 1000 samples");
    if (!censored.empty() && censored.size() != samples.size()) {
        throw std::invalid_argument("estimate_tail_exponent: censoring flags size mismatch");
    }
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    if (!(*mn > 0.0)) throw std::invalid_argument("estimate_tail_exponent: samples must be positive");
    if (*mn == *mx) throw std::invalid_argument("estimate_tail_exponent: degenerate (constant) samples");

    std::vector<Sample> s(samples.size());
    std::size_t n_cens = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        s[i] = {samples[i], censored.empty() ? std::uint8_t{0} : censored[i]};
        n_cens += s[i].censored != 0;
    }
    const std::size_t n = s.size();
    // keep the threshold below the censoring point: at least 4x the censored count
    std::size_t k = std::max<std::size_t>(
        static_cast<std::size_t>(cfg.k_fraction * static_cast<double>(n)), 4 * n_cens);
    k = std::clamp<std::size_t>(k, 10, n - 1);

    TailEstimate est;
    est.n = n;
    est.k = k;
    est.censored = n_cens;
    const auto point = tail_point(s, k);
    if (!point.hill) throw std::invalid_argument("estimate_tail_exponent: no tail information above threshold");
    est.hill = *point.hill;
    est.loglog = point.loglog.value_or(std::numeric_limits<double>::quiet_NaN());

    const std::size_t k_small = std::max<std::size_t>(10, k / 10);
    auto small = tail_point(s, k_small);
    est.hill_small_k = small.hill.value_or(std::numeric_limits<double>::infinity());

    SplitMix64 rng(cfg.seed);
    std::vector<double> hb, lb;
    std::vector<Sample> re(n);
    for (std::size_t b = 0; b < cfg.bootstrap; ++b) {
        for (auto& r : re) r = s[static_cast<std::size_t>(rng() % n)];
        const auto p = tail_point(re, k);
        if (p.hill) hb.push_back(*p.hill);
        if (p.loglog) lb.push_back(*p.loglog);
    }
    const double a = (1.0 - cfg.level) / 2.0;
    est.hill_ci = hb.empty() ? Interval{est.hill, est.hill} : Interval{percentile(hb, a), percentile(hb, 1.0 - a)};
    est.loglog_ci = lb.empty() ? Interval{est.loglog, est.loglog}
                               : Interval{percentile(lb, a), percentile(lb, 1.0 - a)};

    est.capped = est.hill > cfg.exponent_cap;
    const bool drifting = est.hill_small_k > cfg.drift_ratio * est.hill;
    est.heavy_tail_detected = !(est.capped || drifting);
    return est;
}

std::vector<double> empirical_survival(std::span<const double> samples, std::span<const double> grid) {
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(grid.size());
    for (double u : grid) {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), u);
        out.push_back(static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size()));
    }
    return out;
}

}  // namespace rwre
