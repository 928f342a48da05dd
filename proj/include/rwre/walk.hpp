#pragma once

// Quenched trajectory simulation, exit and hitting times, and the
// regeneration-time recursion along a direction l.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/errors.hpp"
#include "rwre/geometry.hpp"
#include "rwre/rng.hpp"

namespace rwre {

/// Compact step stream; positions are recomputed on demand.
struct Trajectory {
    int dim = 2;
    Site start;
    std::vector<std::uint8_t> steps;

    std::size_t length() const { return steps.size(); }
    Site end() const;
    /// X_0, ..., X_n. Materializes n+1 sites; meant for short paths and tests.
    std::vector<Site> positions() const;
    static Trajectory from_positions(int dim, const std::vector<Site>& path);
};

/// Inverse-CDF choice over the 2d entries in step-index order.
int sample_step(const double* probs, int n_steps, double u);

/// One step of the quenched walk from x.
Site step(RealizedEnvironment& env, const Site& x, SplitMix64& rng);

Trajectory simulate_trajectory(RealizedEnvironment& env, const Site& start, std::size_t n_steps,
                               SplitMix64& rng);

struct ExitOutcome {
    bool timed_out = false;
    Site exit_site;
    std::uint64_t exit_time = 0;
    BoundaryClass boundary = BoundaryClass::Outside;
};

/// Simulates until T_A = inf{n : X_n not in A} or max_steps. Throws
/// std::invalid_argument when x0 lies outside the region.
ExitOutcome run_until_exit(RealizedEnvironment& env, const Region& region, const Site& x0,
                           SplitMix64& rng, std::uint64_t max_steps);

struct HittingTimes {
    std::optional<std::size_t> forward;   ///< T^l_u = inf{n : X_n . l >= u}
    std::optional<std::size_t> backward;  ///< inf{n : X_n . l <= u}
};
HittingTimes hitting_times(const Trajectory& t, const Direction& l, double u);

class RegenerationParams {
public:
    /// Throws std::invalid_argument unless a > 2 sqrt(d).
    RegenerationParams(Direction l, double a);
    /// a = 2 sqrt(d) + 1.
    static RegenerationParams with_default_a(Direction l);

    const Direction& direction() const { return l_; }
    double a() const { return a_; }

private:
    Direction l_;
    double a_;
};

struct RegenerationRecord {
    std::vector<std::size_t> times;   ///< tau_1 < tau_2 < ...
    std::vector<Site> positions;      ///< X_{tau_k}
    std::vector<int> radii;           ///< X^{*(k)}, k = 1..K, with tau_0 = 0
    bool censored_tail = false;       ///< the block after tau_K is unclosed
};

/// Runs the S/R/M recursion on the observed path. A candidate S_k is confirmed
/// only if no later observed index drops below its level.
RegenerationRecord detect_regenerations(const Trajectory& t, const RegenerationParams& params);

struct BlockSamples {
    std::vector<double> durations;                  ///< tau_{k+1} - tau_k
    std::vector<std::vector<double>> displacements; ///< X_{tau_{k+1}} - X_{tau_k}, per axis
    std::vector<double> first_durations;            ///< tau_1
    std::vector<std::vector<double>> first_displacements;
    std::vector<std::vector<double>> final_positions;  ///< X_horizon per trajectory
    std::size_t trajectories = 0;
    std::size_t censored_blocks = 0;
    std::size_t trajectories_without_regeneration = 0;
};

/// Streams fresh environments and trajectories (replica r uses derive_seed(seed, r, .))
/// until n_blocks closed inter-regeneration blocks are harvested. Throws
/// BudgetExhausted after max_trajectories.
BlockSamples simulate_regeneration_blocks(const EnvironmentLaw& law, const RegenerationParams& params,
                                          std::size_t n_blocks, std::size_t horizon, std::uint64_t seed,
                                          int workers = 1, std::size_t max_trajectories = 100000,
                                          std::size_t min_trajectories = 1);

struct FirstRegenerationSamples {
    std::vector<double> tau;               ///< tau_1, or the cutoff when censored
    std::vector<std::uint8_t> censored;
    std::vector<double> radius;            ///< X^{*(1)} (only uncensored)
    std::size_t cutoff = 0;
};

/// tau_1 from n independent (environment, walk) replicas of length horizon;
/// tau_1 is observed up to horizon/2 so that every confirmation has at least
/// horizon/2 steps of look-ahead, and censored beyond.
FirstRegenerationSamples first_regeneration_samples(const EnvironmentLaw& law, const RegenerationParams& params,
                                                    std::size_t n, std::size_t horizon, std::uint64_t seed,
                                                    int workers = 1);

struct LlnPoint {
    std::size_t n = 0;
    double mean = 0.0;  ///< mean over walks of X_n . l / n
    double std_error = 0.0;
};

/// X_n . l / n at each checkpoint, one fresh environment per walk.
std::vector<LlnPoint> lln_profile(const EnvironmentLaw& law, const Direction& l,
                                  const std::vector<std::size_t>& checkpoints, std::size_t n_walk,
                                  std::uint64_t seed, int workers = 1);

}  // namespace rwre
