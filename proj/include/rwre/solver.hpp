#pragma once

// Exact quenched exit distributions on finite regions: h_c(x) = P_{x,omega}(walk
// leaves the region through boundary class c), solved by in-place sweeps of
// h(x) = sum_e omega(x,e) h(x+e) from the zero initial guess.

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/errors.hpp"
#include "rwre/geometry.hpp"

namespace rwre {

class SolverNotConverged : public std::runtime_error {
public:
    SolverNotConverged(const std::string& what, double residual, std::uint64_t sweeps)
        : std::runtime_error(what), residual_(residual), sweeps_(sweeps) {}
    double residual() const { return residual_; }
    std::uint64_t sweeps() const { return sweeps_; }

private:
    double residual_;
    std::uint64_t sweeps_;
};

struct SolveOptions {
    double tol = 1e-12;
    std::uint64_t max_sweeps = 10'000'000;
    double relaxation = 1.0;       ///< in (0, 1]; 1 is plain successive substitution
    std::size_t max_sites = 2'000'000;
    bool throw_on_failure = true;
};

/// Exit classes tracked by the solver.
inline constexpr std::array<BoundaryClass, 3> kExitClasses{BoundaryClass::Front, BoundaryClass::Back,
                                                           BoundaryClass::Lateral};

struct SolveResult {
    std::vector<Site> sites;  ///< interior sites, lexicographic
    /// probs[c][i]: probability of exiting through kExitClasses[c] from sites[i]
    std::array<std::vector<double>, 3> probs;
    std::uint64_t sweeps = 0;
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
    /// Geometric extrapolation of the remaining error, residual * q / (1 - q)
    /// with q the last ratio of successive residuals.
    double error_estimate = std::numeric_limits<double>::infinity();

    std::size_t index_of(const Site& x) const;
    double probability(const Site& x, BoundaryClass c) const;
    /// Sum over the requested classes.
    double probability(const Site& x, std::initializer_list<BoundaryClass> classes) const;
    /// probs[slot] at x; used with a custom boundary labelling.
    double slot_probability(const Site& x, int slot) const;

    std::unordered_map<Site, std::size_t, SiteHash> index;
};

/// Maps a boundary site to one of three absorbing slots.
using BoundaryLabel = std::function<int(const Site&)>;

/// Throws std::invalid_argument for unbounded regions, BudgetExhausted for more
/// than max_sites interior sites, and SolverNotConverged after max_sweeps
/// (unless throw_on_failure is false, in which case converged == false is
/// returned). Slots follow kExitClasses.
SolveResult quenched_exit_probabilities(const Region& region, RealizedEnvironment& env,
                                        const SolveOptions& opts = {});

/// Same solve with boundary sites sorted into slots 0..2 by `label`.
SolveResult quenched_exit_probabilities(const Region& region, RealizedEnvironment& env,
                                        const SolveOptions& opts, const BoundaryLabel& label);

struct RhoResult {
    double rho = 0.0;      ///< q_B / p_B, +inf when p_B < tol
    double p_front = 0.0;  ///< p_B
    double q_other = 0.0;  ///< q_B
    bool degenerate = false;
    double residual = 0.0;
    std::uint64_t sweeps = 0;
};

/// rho_B = P(exit not through the front) / P(exit through the front) from `start`.
RhoResult rho_B(RealizedEnvironment& env, const Region& box, const Site& start, const SolveOptions& opts = {});

}  // namespace rwre
