#include "rwre/solver.hpp"

#include <algorithm>
#include <cmath>

namespace rwre {

std::size_t SolveResult::index_of(const Site& x) const {
    const auto it = index.find(x);
    if (it == index.end()) throw std::out_of_range("SolveResult: site is not interior");
    return it->second;
}

double SolveResult::probability(const Site& x, BoundaryClass c) const {
    const auto i = index_of(x);
    for (std::size_t k = 0; k < kExitClasses.size(); ++k) {
        if (kExitClasses[k] == c) return probs[k][i];
    }
    return 0.0;
}

double SolveResult::probability(const Site& x, std::initializer_list<BoundaryClass> classes) const {
    double s = 0.0;
    for (auto c : classes) s += probability(x, c);
    return s;
}

double SolveResult::slot_probability(const Site& x, int slot) const {
    if (slot < 0 || slot > 2) throw std::out_of_range("SolveResult: slot must be 0, 1 or 2");
    return probs[static_cast<std::size_t>(slot)][index_of(x)];
}

namespace {

int class_slot(BoundaryClass c) {
    switch (c) {
        case BoundaryClass::Front: return 0;
        case BoundaryClass::Back: return 1;
        case BoundaryClass::Lateral: return 2;
        default: return -1;
    }
}

}  // namespace

SolveResult quenched_exit_probabilities(const Region& region, RealizedEnvironment& env, const SolveOptions& opts) {
    return quenched_exit_probabilities(region, env, opts, [&region](const Site& y) {
        const int slot = class_slot(region.classify(y));
        if (slot < 0) throw std::logic_error("solver: neighbour of an interior site is not on the boundary");
        return slot;
    });
}

SolveResult quenched_exit_probabilities(const Region& region, RealizedEnvironment& env, const SolveOptions& opts,
                                        const BoundaryLabel& label) {
    if (!region.finite()) throw std::invalid_argument("quenched_exit_probabilities: region is unbounded");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("quenched_exit_probabilities: tol must be > 0");
    if (!(opts.relaxation > 0.0 && opts.relaxation <= 1.0)) {
        throw std::invalid_argument("quenched_exit_probabilities: relaxation must be in (0,1]");
    }
    if (region.dim() != env.dim()) throw std::invalid_argument("quenched_exit_probabilities: dimension mismatch");

    SolveResult res;
    const auto [lo, hi] = region.bounding_window();
    double window = 1.0;
    for (int i = 0; i < region.dim(); ++i) window *= static_cast<double>(hi[i] - lo[i] + 1);
    if (window > 64.0 * static_cast<double>(opts.max_sites)) {
        throw BudgetExhausted("quenched_exit_probabilities: region exceeds the site budget");
    }
    region.for_each_interior([&](const Site& x) {
        if (res.sites.size() >= opts.max_sites) {
            throw BudgetExhausted("quenched_exit_probabilities: region exceeds the site budget");
        }
        res.index.emplace(x, res.sites.size());
        res.sites.push_back(x);
    });

    const int d = region.dim();
    const std::size_t n = res.sites.size();
    // CSR rows of interior couplings plus constant boundary inflow per class
    std::vector<std::size_t> row_start{0};
    std::vector<std::size_t> cols;
    std::vector<double> weights;
    std::array<std::vector<double>, 3> inflow;
    for (auto& v : inflow) v.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* p = env.at(res.sites[i]);
        std::array<double, 2 * kMaxDim> pc{};
        std::copy(p, p + 2 * d, pc.begin());
        for (int e = 0; e < 2 * d; ++e) {
            const double w = pc[static_cast<std::size_t>(e)];
            if (w == 0.0) continue;
            const Site y = neighbor(d, res.sites[i], e);
            const auto it = res.index.find(y);
            if (it != res.index.end()) {
                cols.push_back(it->second);
                weights.push_back(w);
            } else {
                const int slot = label(y);
                if (slot < 0 || slot > 2) throw std::logic_error("solver: boundary label out of range");
                inflow[static_cast<std::size_t>(slot)][i] += w;
            }
        }
        row_start.push_back(cols.size());
    }

    for (auto& v : res.probs) v.assign(n, 0.0);
    const double relax = opts.relaxation;
    double previous = std::numeric_limits<double>::infinity();
    while (res.sweeps < opts.max_sweeps) {
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < 3; ++c) {
                auto& h = res.probs[c];
                double acc = inflow[c][i];
                for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) acc += weights[k] * h[cols[k]];
                const double updated = h[i] + relax * (acc - h[i]);
                residual = std::max(residual, std::abs(updated - h[i]));
                h[i] = updated;
            }
        }
        ++res.sweeps;
        res.residual = residual;
        if (std::isfinite(previous) && previous > 0.0) {
            const double q = std::min(residual / previous, 1.0 - 1e-15);
            res.error_estimate = residual * q / (1.0 - q);
        }
        previous = residual;
        if (residual < opts.tol) {
            res.converged = true;
            break;
        }
    }
    if (n == 0 || res.residual == 0.0) {
        res.converged = true;
        res.residual = 0.0;
        res.error_estimate = 0.0;
    }
    if (!res.converged && opts.throw_on_failure) {
        throw SolverNotConverged("quenched_exit_probabilities: no convergence after " +
                                     std::to_string(res.sweeps) + " sweeps (residual " +
                                     std::to_string(res.residual) + ")",
                                 res.residual, res.sweeps);
    }
    return res;
}

RhoResult rho_B(RealizedEnvironment& env, const Region& box, const Site& start, const SolveOptions& opts) {
    if (!box.contains(start)) throw std::invalid_argument("rho_B: start must be interior");
    const auto sol = quenched_exit_probabilities(box, env, opts);
    RhoResult r;
    r.p_front = sol.probability(start, BoundaryClass::Front);
    r.q_other = sol.probability(start, {BoundaryClass::Back, BoundaryClass::Lateral});
    r.residual = sol.residual;
    r.sweeps = sol.sweeps;
    if (r.p_front < opts.tol) {
        r.rho = std::numeric_limits<double>::infinity();
        r.degenerate = true;
    } else {
        r.rho = r.q_other / r.p_front;
    }
    return r;
}

}  // namespace rwre
