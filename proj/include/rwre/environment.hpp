#pragma once

// Environment laws over single-site transition vectors, the lazy seed-keyed
// realization of an i.i.d. environment, and Monte Carlo / closed-form checks of
// the ellipticity conditions.

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "rwre/geometry.hpp"
#include "rwre/stats.hpp"

namespace rwre {

using ProbVector = std::array<double, 2 * kMaxDim>;

struct DirichletLaw {
    std::vector<double> beta;  ///< one weight per unit step, in step-index order
};
struct HomogeneousLaw {
    std::vector<double> p;
};
/// phi = scale * U^exponent with U uniform on (0,1); must take values in (0, 1/4).
struct PhiSpec {
    double scale = 0.25;
    double exponent = 2.0;
    double sample(double u) const;
};
/// Fair mixture of the two trap profiles on Z^2, one phi draw per site:
///   type 1: (e1, e2, -e1, -e2) -> (2phi, 1-4phi, phi, phi)
///   type 2: (e1, e2, -e1, -e2) -> (2phi, phi, phi, 1-4phi)
struct TrapMixtureLaw {
    PhiSpec phi;
};
struct PointMassLaw {
    int direction = 0;
};

class EnvironmentLaw {
public:
    using Variant = std::variant<DirichletLaw, HomogeneousLaw, TrapMixtureLaw, PointMassLaw>;

    /// Validates the parameters; throws std::invalid_argument.
    EnvironmentLaw(int dim, Variant v);

    static EnvironmentLaw dirichlet(std::vector<double> beta);
    static EnvironmentLaw homogeneous(std::vector<double> p);
    static EnvironmentLaw uniform(int dim);
    static EnvironmentLaw trap_mixture(PhiSpec phi = {});
    static EnvironmentLaw point_mass(int dim, int direction);

    int dim() const { return dim_; }
    const Variant& variant() const { return v_; }
    /// True when every site carries the same vector (homogeneous, point mass).
    bool deterministic() const;
    std::string name() const;
    std::string describe() const;

private:
    int dim_;
    Variant v_;
};

/// Seed of the stream that realizes site x; depends only on (seed, x).
std::uint64_t site_stream_seed(std::uint64_t seed, const Site& x);

/// omega(x): deterministic in (law, seed, x).
ProbVector sample_site(const EnvironmentLaw& law, std::uint64_t seed, const Site& x);

/// Lazily realized environment; single-threaded (one per worker).
class RealizedEnvironment {
public:
    RealizedEnvironment(EnvironmentLaw law, std::uint64_t seed);

    const EnvironmentLaw& law() const { return law_; }
    std::uint64_t seed() const { return seed_; }
    int dim() const { return law_.dim(); }

    /// Pointer to the 2d transition probabilities of x, valid until the next
    /// call that realizes a new site.
    const double* at(const Site& x);
    double prob(const Site& x, int step) { return at(x)[step]; }
    /// Fixes omega(x) explicitly; later queries return the override.
    void set_site(const Site& x, std::span<const double> probs);
    std::size_t realized_sites() const { return index_.size(); }

private:
    EnvironmentLaw law_;
    std::uint64_t seed_;
    bool constant_;
    std::vector<double> pool_;
    std::unordered_map<Site, std::uint32_t, SiteHash> index_;
};

/// E[omega(0,e)^-alpha] for the Beta(beta_e, sum(beta) - beta_e) marginal;
/// +inf when alpha >= beta_e.
double dirichlet_inverse_moment(std::span<const double> beta, int e, double alpha);

/// kappa = 2 sum alpha(e) - max_e (alpha(e) + alpha(-e)).
double kappa(int dim, std::span<const double> alpha);
/// lambda = 2 sum beta_j - max_i (beta_i + beta_{i+d}).
double lambda_dirichlet(int dim, std::span<const double> beta);
/// Closed-form finiteness of E[1/(1 - omega(0,e_i) omega(e_i,-e_i))] for a
/// Dirichlet law: 2 sum(beta) - beta_i - beta_{i+d} > 1.
bool dirichlet_es_finite(int dim, std::span<const double> beta, int axis);

struct DivergenceConfig {
    double max_fraction = 0.5;       ///< largest summand share of the sum
    std::size_t min_samples = 10000; ///< share test applies from here on
    double tail_index_threshold = 1.2;
    double tail_fraction = 0.01;     ///< top order statistics for the tail index
};

struct MomentEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    double max_summand_fraction = 0.0;
    double tail_index = std::numeric_limits<double>::infinity();
    bool divergence_suspected = false;
};

/// Summarizes i.i.d. nonnegative summands, flagging a suspected infinite mean
/// either by the largest-summand share or by a Hill tail index at or below
/// the threshold.
MomentEstimate summarize_moment(std::span<const double> summands, const DivergenceConfig& cfg = {});

struct EtaEstimate {
    double alpha = 0.0;
    std::vector<MomentEstimate> per_direction;
    double eta = 0.0;  ///< max over directions of the estimated means
    int argmax = 0;
    bool divergence_suspected = false;
};

/// Monte Carlo eta_alpha = max_e E[omega(0,e)^-alpha]; requires n >= 100.
EtaEstimate estimate_eta(const EnvironmentLaw& law, double alpha, std::size_t n, std::uint64_t seed,
                         const DivergenceConfig& cfg = {});

struct ESEstimate {
    std::vector<MomentEstimate> per_axis;
    /// Only for Dirichlet laws: closed-form finiteness per axis.
    std::optional<std::vector<bool>> analytic_finite;
    bool divergence_suspected = false;
};

/// Monte Carlo E[1/(1 - omega(0,e_i) omega(e_i,-e_i))] per axis i, drawing the
/// two sites independently.
ESEstimate estimate_ES(const EnvironmentLaw& law, std::size_t n, std::uint64_t seed,
                       const DivergenceConfig& cfg = {});

struct EllipticityReport {
    double kappa = 0.0;
    MomentEstimate joint_moment;  ///< E[prod_e omega(0,e)^-alpha(e)]
    bool towards_direction = false;
    std::optional<double> lambda;  ///< Dirichlet only
    std::vector<EtaEstimate> eta_scan;
    std::optional<ESEstimate> es;
};

/// True iff alpha(e) equals one common value on H_v = {e : e.v >= 0} and is
/// at most that value elsewhere.
bool direction_profile(int dim, std::span<const double> alpha, const Direction& vhat);

EllipticityReport check_E_prime(const EnvironmentLaw& law, std::span<const double> alpha,
                                const Direction& vhat, std::size_t n, std::uint64_t seed,
                                const DivergenceConfig& cfg = {});

/// log_3 of c_0 = (2/3) 3^{120 d^4 + 3000 d (log eta)^2}.
double log3_c0(int dim, double eta_half_alpha_bar);

}  // namespace rwre
