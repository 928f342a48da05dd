#include "rwre/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwre/parallel.hpp"

namespace rwre {

Site Trajectory::end() const {
    Site x = start;
    for (auto e : steps) x[step_axis(dim, e)] += step_sign(dim, e);
    return x;
}

std::vector<Site> Trajectory::positions() const {
    std::vector<Site> out;
    out.reserve(steps.size() + 1);
    Site x = start;
    out.push_back(x);
    for (auto e : steps) {
        x[step_axis(dim, e)] += step_sign(dim, e);
        out.push_back(x);
    }
    return out;
}

Trajectory Trajectory::from_positions(int dim, const std::vector<Site>& path) {
    Trajectory t;
    t.dim = dim;
    if (path.empty()) return t;
    t.start = path.front();
    for (std::size_t i = 1; i < path.size(); ++i) {
        int found = -1;
        for (int e = 0; e < 2 * dim; ++e) {
            if (neighbor(dim, path[i - 1], e) == path[i]) found = e;
        }
        if (found < 0) throw std::invalid_argument("Trajectory: consecutive sites are not neighbours");
        t.steps.push_back(static_cast<std::uint8_t>(found));
    }
    return t;
}

int sample_step(const double* probs, int n_steps, double u) {
    double c = 0.0;
    int last_positive = 0;
    for (int e = 0; e < n_steps; ++e) {
        if (probs[e] > 0.0) {
            last_positive = e;
            c += probs[e];
            if (u < c) return e;
        }
    }
    return last_positive;
}

Site step(RealizedEnvironment& env, const Site& x, SplitMix64& rng) {
    const int d = env.dim();
    const int e = sample_step(env.at(x), 2 * d, rng.uniform());
    return neighbor(d, x, e);
}

Trajectory simulate_trajectory(RealizedEnvironment& env, const Site& start, std::size_t n_steps,
                               SplitMix64& rng) {
    const int d = env.dim();
    Trajectory t;
    t.dim = d;
    t.start = start;
    t.steps.resize(n_steps);
    Site x = start;
    for (std::size_t n = 0; n < n_steps; ++n) {
        const int e = sample_step(env.at(x), 2 * d, rng.uniform());
        t.steps[n] = static_cast<std::uint8_t>(e);
        x[step_axis(d, e)] += step_sign(d, e);
    }
    return t;
}

ExitOutcome run_until_exit(RealizedEnvironment& env, const Region& region, const Site& x0,
                           SplitMix64& rng, std::uint64_t max_steps) {
    if (!region.contains(x0)) throw std::invalid_argument("run_until_exit: start lies outside the region");
    Site x = x0;
    for (std::uint64_t t = 1; t <= max_steps; ++t) {
        x = step(env, x, rng);
        if (!region.contains(x)) return {false, x, t, region.classify(x)};
    }
    ExitOutcome out;
    out.timed_out = true;
    out.exit_site = x;
    out.exit_time = max_steps;
    return out;
}

HittingTimes hitting_times(const Trajectory& t, const Direction& l, double u) {
    HittingTimes h;
    Site x = t.start;
    for (std::size_t n = 0;; ++n) {
        const double y = l.dot(x);
        if (!h.forward && y >= u) h.forward = n;
        if (!h.backward && y <= u) h.backward = n;
        if ((h.forward && h.backward) || n == t.steps.size()) break;
        const auto e = t.steps[n];
        x[step_axis(t.dim, e)] += step_sign(t.dim, e);
    }
    return h;
}

// ---------------------------------------------------------------- regeneration

RegenerationParams::RegenerationParams(Direction l, double a) : l_(std::move(l)), a_(a) {
    if (!(a_ > 2.0 * std::sqrt(static_cast<double>(l_.dim())))) {
        throw std::invalid_argument("RegenerationParams: need a > 2 sqrt(d)");
    }
}

RegenerationParams RegenerationParams::with_default_a(Direction l) {
    const double a = 2.0 * std::sqrt(static_cast<double>(l.dim())) + 1.0;
    return RegenerationParams(std::move(l), a);
}

RegenerationRecord detect_regenerations(const Trajectory& t, const RegenerationParams& params) {
    // One pass with a stack of pending candidates. Candidate j+1 is the first
    // point of the recursion restarted at candidate j; a drop below the level
    // of candidate j rejects it and everything stacked above it, and the
    // enclosing recursion resumes with target (running max) + a.
    RegenerationRecord rec;
    if (t.steps.empty()) return rec;
    const auto& l = params.direction();
    const double a = params.a();
    struct Pending {
        std::size_t time;
        double level;
        Site pos;
    };
    std::vector<Pending> stack;
    Site x = t.start;
    double run_max = l.dot(x);
    double target = run_max + a;
    for (std::size_t n = 1; n <= t.steps.size(); ++n) {
        const auto e = t.steps[n - 1];
        x[step_axis(t.dim, e)] += step_sign(t.dim, e);
        const double y = l.dot(x);
        if (!stack.empty() && y < stack.back().level) {
            while (!stack.empty() && y < stack.back().level) stack.pop_back();
            target = run_max + a;
        }
        run_max = std::max(run_max, y);
        if (y >= target) {
            stack.push_back({n, y, x});
            target = y + a;
        }
    }
    for (const auto& p : stack) {
        rec.times.push_back(p.time);
        rec.positions.push_back(p.pos);
    }
    rec.censored_tail = !rec.times.empty();

    // X^{*(k)} = max over [tau_{k-1}, tau_k] of |X_m - X_{tau_{k-1}}|_1
    if (!rec.times.empty()) {
        std::size_t k = 0;
        Site base = t.start;
        Site cur = t.start;
        int radius = 0;
        for (std::size_t n = 1; n <= t.steps.size() && k < rec.times.size(); ++n) {
            const auto e = t.steps[n - 1];
            cur[step_axis(t.dim, e)] += step_sign(t.dim, e);
            radius = std::max(radius, l1_distance(t.dim, cur, base));
            if (n == rec.times[k]) {
                rec.radii.push_back(radius);
                base = cur;
                radius = 0;
                ++k;
            }
        }
    }
    return rec;
}

namespace {

struct ReplicaBlocks {
    std::vector<double> durations;
    std::vector<std::vector<double>> displacements;
    std::optional<double> first_duration;
    std::vector<double> first_displacement;
    std::vector<double> final_position;
    bool censored = false;
};

std::vector<double> delta(int dim, const Site& a, const Site& b) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) v[static_cast<std::size_t>(i)] = b[i] - a[i];
    return v;
}

ReplicaBlocks run_block_replica(const EnvironmentLaw& law, const RegenerationParams& params,
                                std::size_t horizon, std::uint64_t seed, std::size_t r) {
    RealizedEnvironment env(law, derive_seed(seed, r, 0));
    SplitMix64 rng(derive_seed(seed, r, 1));
    const int d = law.dim();
    const auto traj = simulate_trajectory(env, Site{}, horizon, rng);
    const auto rec = detect_regenerations(traj, params);
    ReplicaBlocks out;
    out.final_position = delta(d, Site{}, traj.end());
    out.censored = rec.censored_tail;
    if (rec.times.empty()) return out;
    out.first_duration = static_cast<double>(rec.times[0]);
    out.first_displacement = delta(d, Site{}, rec.positions[0]);
    for (std::size_t k = 1; k < rec.times.size(); ++k) {
        out.durations.push_back(static_cast<double>(rec.times[k] - rec.times[k - 1]));
        out.displacements.push_back(delta(d, rec.positions[k - 1], rec.positions[k]));
    }
    return out;
}

}  // namespace

BlockSamples simulate_regeneration_blocks(const EnvironmentLaw& law, const RegenerationParams& params,
                                          std::size_t n_blocks, std::size_t horizon, std::uint64_t seed,
                                          int workers, std::size_t max_trajectories,
                                          std::size_t min_trajectories) {
    if (n_blocks < 1) throw std::invalid_argument("simulate_regeneration_blocks: need n_blocks >= 1");
    if (params.direction().dim() != law.dim()) {
        throw std::invalid_argument("simulate_regeneration_blocks: direction/law dimension mismatch");
    }
    // fixed chunk size keeps the set of simulated replicas independent of the worker count
    constexpr std::size_t kChunk = 16;
    BlockSamples out;
    std::size_t next = 0;
    while (out.durations.size() < n_blocks || out.trajectories < min_trajectories) {
        if (next >= max_trajectories) {
            throw BudgetExhausted("simulate_regeneration_blocks: harvested " +
                                  std::to_string(out.durations.size()) + " of " + std::to_string(n_blocks) +
                                  " blocks in " + std::to_string(next) + " trajectories");
        }
        const std::size_t count = std::min(kChunk, max_trajectories - next);
        auto chunk = map_replicas<ReplicaBlocks>(count, workers, [&](std::size_t i) {
            return run_block_replica(law, params, horizon, seed, next + i);
        });
        for (auto& rb : chunk) {
            if (out.durations.size() >= n_blocks && out.trajectories >= min_trajectories) break;
            ++out.trajectories;
            out.final_positions.push_back(std::move(rb.final_position));
            if (!rb.first_duration) {
                ++out.trajectories_without_regeneration;
                continue;
            }
            out.censored_blocks += rb.censored ? 1 : 0;
            out.first_durations.push_back(*rb.first_duration);
            out.first_displacements.push_back(std::move(rb.first_displacement));
            for (std::size_t k = 0; k < rb.durations.size() && out.durations.size() < n_blocks; ++k) {
                out.durations.push_back(rb.durations[k]);
                out.displacements.push_back(std::move(rb.displacements[k]));
            }
        }
        next += count;
    }
    return out;
}

FirstRegenerationSamples first_regeneration_samples(const EnvironmentLaw& law, const RegenerationParams& params,
                                                    std::size_t n, std::size_t horizon, std::uint64_t seed,
                                                    int workers) {
    if (horizon < 2) throw std::invalid_argument("first_regeneration_samples: horizon too short");
    const std::size_t cutoff = horizon / 2;
    struct One {
        double tau = 0.0;
        std::uint8_t censored = 1;
        int radius = -1;
    };
    auto rows = map_replicas<One>(n, workers, [&](std::size_t r) {
        RealizedEnvironment env(law, derive_seed(seed, r, 0));
        SplitMix64 rng(derive_seed(seed, r, 1));
        const auto traj = simulate_trajectory(env, Site{}, horizon, rng);
        const auto rec = detect_regenerations(traj, params);
        One o;
        if (!rec.times.empty() && rec.times[0] <= cutoff) {
            o.tau = static_cast<double>(rec.times[0]);
            o.censored = 0;
            o.radius = rec.radii[0];
        } else {
            o.tau = static_cast<double>(cutoff);
        }
        return o;
    });
    FirstRegenerationSamples out;
    out.cutoff = cutoff;
    for (const auto& o : rows) {
        out.tau.push_back(o.tau);
        out.censored.push_back(o.censored);
        if (o.radius >= 0) out.radius.push_back(o.radius);
    }
    return out;
}

std::vector<LlnPoint> lln_profile(const EnvironmentLaw& law, const Direction& l,
                                  const std::vector<std::size_t>& checkpoints, std::size_t n_walk,
                                  std::uint64_t seed, int workers) {
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) || checkpoints.empty() || checkpoints[0] == 0) {
        throw std::invalid_argument("lln_profile: checkpoints must be positive and increasing");
    }
    const int d = law.dim();
    auto rows = map_replicas<std::vector<double>>(n_walk, workers, [&](std::size_t r) {
        RealizedEnvironment env(law, derive_seed(seed, r, 0));
        SplitMix64 rng(derive_seed(seed, r, 1));
        std::vector<double> v;
        Site x;
        std::size_t n = 0;
        for (std::size_t c : checkpoints) {
            for (; n < c; ++n) {
                const int e = sample_step(env.at(x), 2 * d, rng.uniform());
                x[step_axis(d, e)] += step_sign(d, e);
            }
            v.push_back(l.dot(x) / static_cast<double>(c));
        }
        return v;
    });
    std::vector<LlnPoint> out;
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        RunningStats rs;
        for (const auto& row : rows) rs.add(row[i]);
        out.push_back({checkpoints[i], rs.mean(), rs.stderr_of_mean()});
    }
    return out;
}

}  // namespace rwre
