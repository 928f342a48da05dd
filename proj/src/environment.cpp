#include "rwre/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rwre/rng.hpp"

namespace rwre {

namespace {

void require_probability_vector(std::span<const double> p, const char* what) {
    double s = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw std::invalid_argument(std::string(what) + ": negative entry");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument(std::string(what) + ": entries must sum to 1");
}

}  // namespace

double PhiSpec::sample(double u) const { return scale * std::pow(u, exponent); }

EnvironmentLaw::EnvironmentLaw(int dim, Variant v) : dim_(dim), v_(std::move(v)) {
    if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("EnvironmentLaw: dimension out of range");
    const auto n = static_cast<std::size_t>(2 * dim);
    std::visit(
        [&](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, DirichletLaw>) {
                if (law.beta.size() != n) throw std::invalid_argument("Dirichlet: need 2d weights");
                for (double b : law.beta) {
                    if (!(b > 0.0)) throw std::invalid_argument("Dirichlet: weights must be > 0");
                }
            } else if constexpr (std::is_same_v<T, HomogeneousLaw>) {
                if (law.p.size() != n) throw std::invalid_argument("Homogeneous: need 2d probabilities");
                require_probability_vector(law.p, "Homogeneous");
            } else if constexpr (std::is_same_v<T, TrapMixtureLaw>) {
                if (dim != 2) throw std::invalid_argument("TrapMixture: defined on Z^2 only");
                if (!(law.phi.scale > 0.0 && law.phi.scale <= 0.25 && law.phi.exponent > 0.0)) {
                    throw std::invalid_argument("TrapMixture: phi must take values in (0, 1/4)");
                }
            } else {
                if (law.direction < 0 || law.direction >= 2 * dim) {
                    throw std::invalid_argument("PointMass: direction index out of range");
                }
            }
        },
        v_);
}

EnvironmentLaw EnvironmentLaw::dirichlet(std::vector<double> beta) {
    const int d = static_cast<int>(beta.size()) / 2;
    if (beta.size() % 2 != 0) throw std::invalid_argument("Dirichlet: need an even number of weights");
    return EnvironmentLaw(d, DirichletLaw{std::move(beta)});
}

EnvironmentLaw EnvironmentLaw::homogeneous(std::vector<double> p) {
    const int d = static_cast<int>(p.size()) / 2;
    if (p.size() % 2 != 0) throw std::invalid_argument("Homogeneous: need an even number of entries");
    return EnvironmentLaw(d, HomogeneousLaw{std::move(p)});
}

EnvironmentLaw EnvironmentLaw::uniform(int dim) {
    return homogeneous(std::vector<double>(static_cast<std::size_t>(2 * dim), 1.0 / (2.0 * dim)));
}

EnvironmentLaw EnvironmentLaw::trap_mixture(PhiSpec phi) { return EnvironmentLaw(2, TrapMixtureLaw{phi}); }

EnvironmentLaw EnvironmentLaw::point_mass(int dim, int direction) {
    return EnvironmentLaw(dim, PointMassLaw{direction});
}

bool EnvironmentLaw::deterministic() const {
    return std::holds_alternative<HomogeneousLaw>(v_) || std::holds_alternative<PointMassLaw>(v_);
}

std::string EnvironmentLaw::name() const {
    switch (v_.index()) {
        case 0: return "dirichlet";
        case 1: return "homogeneous";
        case 2: return "trap";
        default: return "pointmass";
    }
}

std::string EnvironmentLaw::describe() const {
    std::ostringstream os;
    os << name() << "(";
    std::visit(
        [&](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            auto list = [&](const std::vector<double>& v) {
                for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
            };
            if constexpr (std::is_same_v<T, DirichletLaw>) {
                list(law.beta);
            } else if constexpr (std::is_same_v<T, HomogeneousLaw>) {
                list(law.p);
            } else if constexpr (std::is_same_v<T, TrapMixtureLaw>) {
                os << "phi=" << law.phi.scale << "*U^" << law.phi.exponent;
            } else {
                os << law.direction;
            }
        },
        v_);
    os << ")";
    return os.str();
}

std::uint64_t site_stream_seed(std::uint64_t seed, const Site& x) {
    std::uint64_t h = mix64(seed ^ 0xd1b54a32d192ed03ULL);
    for (int i = 0; i < kMaxDim; ++i) {
        h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x[i])) + 0x9e3779b97f4a7c15ULL * (i + 1)));
    }
    return h;
}

ProbVector sample_site(const EnvironmentLaw& law, std::uint64_t seed, const Site& x) {
    ProbVector out{};
    const int n = 2 * law.dim();
    std::visit(
        [&](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, DirichletLaw>) {
                SplitMix64 stream(site_stream_seed(seed, x));
                double total = 0.0;
                for (int e = 0; e < n; ++e) {
                    std::gamma_distribution<double> g(l.beta[static_cast<std::size_t>(e)], 1.0);
                    out[static_cast<std::size_t>(e)] = g(stream);
                    total += out[static_cast<std::size_t>(e)];
                }
                if (!(total > 0.0)) {
                    // every gamma draw underflowed; probability is astronomically small
                    for (int e = 0; e < n; ++e) out[static_cast<std::size_t>(e)] = 1.0 / n;
                    return;
                }
                for (int e = 0; e < n; ++e) out[static_cast<std::size_t>(e)] /= total;
            } else if constexpr (std::is_same_v<T, HomogeneousLaw>) {
                std::copy(l.p.begin(), l.p.end(), out.begin());
            } else if constexpr (std::is_same_v<T, TrapMixtureLaw>) {
                SplitMix64 stream(site_stream_seed(seed, x));
                const bool first_type = stream.uniform() < 0.5;
                const double phi = l.phi.sample(stream.uniform_open());
                out[0] = 2.0 * phi;
                out[2] = phi;
                out[1] = first_type ? 1.0 - 4.0 * phi : phi;
                out[3] = first_type ? phi : 1.0 - 4.0 * phi;
            } else {
                out[static_cast<std::size_t>(l.direction)] = 1.0;
            }
        },
        law.variant());
    return out;
}

// ---------------------------------------------------------------- RealizedEnvironment

RealizedEnvironment::RealizedEnvironment(EnvironmentLaw law, std::uint64_t seed)
    : law_(std::move(law)), seed_(seed), constant_(law_.deterministic()) {
    if (constant_) {
        const auto v = sample_site(law_, seed_, Site{});
        pool_.assign(v.begin(), v.begin() + 2 * law_.dim());
    } else {
        index_.reserve(1024);
    }
}

const double* RealizedEnvironment::at(const Site& x) {
    if (constant_ && index_.empty()) return pool_.data();
    const auto n = static_cast<std::size_t>(2 * law_.dim());
    auto [it, inserted] = index_.try_emplace(x, static_cast<std::uint32_t>(pool_.size()));
    if (!inserted) return pool_.data() + it->second;
    if (constant_) {
        index_.erase(it);
        return pool_.data();
    }
    const auto v = sample_site(law_, seed_, x);
    pool_.insert(pool_.end(), v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
    return pool_.data() + it->second;
}

void RealizedEnvironment::set_site(const Site& x, std::span<const double> probs) {
    const auto n = static_cast<std::size_t>(2 * law_.dim());
    if (probs.size() != n) throw std::invalid_argument("set_site: need 2d probabilities");
    require_probability_vector(probs, "set_site");
    auto it = index_.find(x);
    if (it == index_.end()) {
        index_.emplace(x, static_cast<std::uint32_t>(pool_.size()));
        pool_.insert(pool_.end(), probs.begin(), probs.end());
    } else {
        std::copy(probs.begin(), probs.end(), pool_.begin() + it->second);
    }
}

// ---------------------------------------------------------------- closed forms

double dirichlet_inverse_moment(std::span<const double> beta, int e, double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("dirichlet_inverse_moment: alpha must be >= 0");
    const double be = beta[static_cast<std::size_t>(e)];
    if (alpha >= be) return std::numeric_limits<double>::infinity();
    if (alpha == 0.0) return 1.0;
    const double total = std::accumulate(beta.begin(), beta.end(), 0.0);
    return std::exp(std::lgamma(be - alpha) + std::lgamma(total) - std::lgamma(be) -
                    std::lgamma(total - alpha));
}

double kappa(int dim, std::span<const double> alpha) {
    if (alpha.size() != static_cast<std::size_t>(2 * dim)) throw std::invalid_argument("kappa: need 2d exponents");
    double sum = 0.0, pair = 0.0;
    for (double a : alpha) {
        if (!(a > 0.0)) throw std::invalid_argument("kappa: exponents must be > 0");
        sum += a;
    }
    for (int i = 0; i < dim; ++i) {
        pair = std::max(pair, alpha[static_cast<std::size_t>(i)] + alpha[static_cast<std::size_t>(i + dim)]);
    }
    return 2.0 * sum - pair;
}

double lambda_dirichlet(int dim, std::span<const double> beta) { return kappa(dim, beta); }

bool dirichlet_es_finite(int dim, std::span<const double> beta, int axis) {
    const double total = std::accumulate(beta.begin(), beta.end(), 0.0);
    return 2.0 * total - beta[static_cast<std::size_t>(axis)] - beta[static_cast<std::size_t>(axis + dim)] > 1.0;
}

// ---------------------------------------------------------------- Monte Carlo moments

MomentEstimate summarize_moment(std::span<const double> summands, const DivergenceConfig& cfg) {
    MomentEstimate m;
    RunningStats rs;
    bool infinite = false;
    for (double v : summands) {
        if (std::isinf(v)) infinite = true;
        rs.add(v);
    }
    m.n = rs.count();
    m.mean = rs.mean();
    m.std_error = rs.stderr_of_mean();
    if (infinite) {
        m.mean = std::numeric_limits<double>::infinity();
        m.divergence_suspected = true;
        return m;
    }
    const double sum = rs.sum();
    m.max_summand_fraction = sum > 0.0 ? rs.max() / sum : 0.0;
    if (m.n >= cfg.min_samples && m.max_summand_fraction > cfg.max_fraction) m.divergence_suspected = true;

    if (m.n >= 1000) {
        std::vector<double> v(summands.begin(), summands.end());
        const auto k = std::max<std::size_t>(10, static_cast<std::size_t>(cfg.tail_fraction * static_cast<double>(m.n)));
        std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end(), std::greater<>());
        std::sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), std::greater<>());
        if (const auto h = hill_exponent(std::span<const double>(v.data(), k + 1), {}, k)) {
            m.tail_index = *h;
            if (m.tail_index <= cfg.tail_index_threshold) m.divergence_suspected = true;
        }
    }
    return m;
}

EtaEstimate estimate_eta(const EnvironmentLaw& law, double alpha, std::size_t n, std::uint64_t seed,
                         const DivergenceConfig& cfg) {
    if (n < 100) throw std::invalid_argument("estimate_eta: need n >= 100");
    const int steps = 2 * law.dim();
    std::vector<std::vector<double>> cols(static_cast<std::size_t>(steps), std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        Site x;
        x[0] = static_cast<std::int32_t>(i);
        const auto w = sample_site(law, seed, x);
        for (int e = 0; e < steps; ++e) {
            cols[static_cast<std::size_t>(e)][i] = std::pow(w[static_cast<std::size_t>(e)], -alpha);
        }
    }
    EtaEstimate out;
    out.alpha = alpha;
    out.eta = -1.0;
    for (int e = 0; e < steps; ++e) {
        out.per_direction.push_back(summarize_moment(cols[static_cast<std::size_t>(e)], cfg));
        const auto& m = out.per_direction.back();
        if (m.mean > out.eta) {
            out.eta = m.mean;
            out.argmax = e;
        }
        out.divergence_suspected = out.divergence_suspected || m.divergence_suspected;
    }
    return out;
}

ESEstimate estimate_ES(const EnvironmentLaw& law, std::size_t n, std::uint64_t seed, const DivergenceConfig& cfg) {
    if (n < 100) throw std::invalid_argument("estimate_ES: need n >= 100");
    const int d = law.dim();
    ESEstimate out;
    std::vector<double> stat(n);
    for (int i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Site a, b;
            a[0] = static_cast<std::int32_t>(2 * j);
            b[0] = static_cast<std::int32_t>(2 * j + 1);
            a[1] = b[1] = i;
            const auto wa = sample_site(law, seed, a);
            const auto wb = sample_site(law, seed, b);
            const double prod = wa[static_cast<std::size_t>(i)] * wb[static_cast<std::size_t>(i + d)];
            stat[j] = 1.0 / (1.0 - prod);
        }
        out.per_axis.push_back(summarize_moment(stat, cfg));
        out.divergence_suspected = out.divergence_suspected || out.per_axis.back().divergence_suspected;
    }
    if (const auto* dir = std::get_if<DirichletLaw>(&law.variant())) {
        std::vector<bool> fin;
        for (int i = 0; i < d; ++i) fin.push_back(dirichlet_es_finite(d, dir->beta, i));
        out.analytic_finite = fin;
    }
    return out;
}

bool direction_profile(int dim, std::span<const double> alpha, const Direction& vhat) {
    std::optional<double> common;
    for (int e = 0; e < 2 * dim; ++e) {
        const double proj = step_sign(dim, e) * vhat[step_axis(dim, e)];
        if (proj >= 0.0) {
            const double a = alpha[static_cast<std::size_t>(e)];
            if (common && *common != a) return false;
            common = a;
        }
    }
    if (!common || !(*common > 0.0)) return false;
    for (int e = 0; e < 2 * dim; ++e) {
        if (alpha[static_cast<std::size_t>(e)] > *common) return false;
    }
    return true;
}

EllipticityReport check_E_prime(const EnvironmentLaw& law, std::span<const double> alpha,
                                const Direction& vhat, std::size_t n, std::uint64_t seed,
                                const DivergenceConfig& cfg) {
    const int d = law.dim();
    EllipticityReport r;
    r.kappa = kappa(d, alpha);
    r.towards_direction = direction_profile(d, alpha, vhat);
    if (const auto* dir = std::get_if<DirichletLaw>(&law.variant())) {
        r.lambda = lambda_dirichlet(d, dir->beta);
    }
    std::vector<double> joint(n);
    for (std::size_t i = 0; i < n; ++i) {
        Site x;
        x[0] = static_cast<std::int32_t>(i);
        const auto w = sample_site(law, seed, x);
        double prod = 1.0;
        for (int e = 0; e < 2 * d; ++e) {
            prod *= std::pow(w[static_cast<std::size_t>(e)], -alpha[static_cast<std::size_t>(e)]);
        }
        joint[i] = prod;
    }
    r.joint_moment = summarize_moment(joint, cfg);
    return r;
}

double log3_c0(int dim, double eta_half_alpha_bar) {
    const double d = dim;
    const double le = std::log(eta_half_alpha_bar);
    return std::log(2.0 / 3.0) / std::log(3.0) + 120.0 * d * d * d * d + 3000.0 * d * le * le;
}

}  // namespace rwre
