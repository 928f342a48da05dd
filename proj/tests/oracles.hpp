#pragma once

// Test-side reference implementations, written independently of the library
// kernels they check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/geometry.hpp"
#include "rwre/walk.hpp"

namespace oracle {

/// P(hit n before 0 | start k) for a walk stepping +1 w.p. p, -1 w.p. q.
inline double gamblers_ruin(double p, double q, int k, int n) {
    if (p == q) return static_cast<double>(k) / n;
    const double r = q / p;
    return (1.0 - std::pow(r, k)) / (1.0 - std::pow(r, n));
}

struct DenseSolve {
    std::vector<rwre::Site> sites;
    std::vector<double> front, back, lateral;
    double value(const std::vector<double>& h, const rwre::Site& x) const {
        for (std::size_t i = 0; i < sites.size(); ++i) {
            if (sites[i] == x) return h[i];
        }
        return std::nan("");
    }
};

/// Direct LU solve of (I - P) h = b per boundary class on the region's interior.
inline DenseSolve dense_exit_probabilities(const rwre::Region& region, rwre::RealizedEnvironment& env) {
    DenseSolve out;
    region.for_each_interior([&](const rwre::Site& x) { out.sites.push_back(x); });
    const int d = region.dim();
    const auto n = static_cast<Eigen::Index>(out.sites.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& x = out.sites[static_cast<std::size_t>(i)];
        for (int e = 0; e < 2 * d; ++e) {
            rwre::Site y = x;
            if (e < d) {
                y[e] += 1;
            } else {
                y[e - d] -= 1;
            }
            const double w = env.prob(x, e);
            const auto it = std::find(out.sites.begin(), out.sites.end(), y);
            if (it != out.sites.end()) {
                A(i, it - out.sites.begin()) -= w;
                continue;
            }
            switch (region.classify(y)) {
                case rwre::BoundaryClass::Front: b(i, 0) += w; break;
                case rwre::BoundaryClass::Back: b(i, 1) += w; break;
                case rwre::BoundaryClass::Lateral: b(i, 2) += w; break;
                default: break;
            }
        }
    }
    const Eigen::MatrixXd h = A.partialPivLu().solve(b);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.front.push_back(h(i, 0));
        out.back.push_back(h(i, 1));
        out.lateral.push_back(h(i, 2));
    }
    return out;
}

/// Literal regeneration recursion on a finite path of projected levels y_0..y_n,
/// with R = infinity meaning "no drop below the level within the observed path".
/// Returns tau_1 relative to the path start, if any.
inline std::optional<std::size_t> literal_tau1(const std::vector<double>& y, double a) {
    const std::size_t n = y.size();
    auto T = [&](double u, std::size_t from) -> std::optional<std::size_t> {
        for (std::size_t k = from; k < n; ++k) {
            if (y[k] >= u) return k;
        }
        return std::nullopt;
    };
    auto R_after = [&](std::size_t s) -> std::optional<std::size_t> {
        for (std::size_t k = s; k < n; ++k) {
            if (y[k] < y[s]) return k;
        }
        return std::nullopt;
    };
    double M = y[0];
    std::size_t from = 0;
    while (true) {
        const auto S = T(M + a, from);
        if (!S) return std::nullopt;
        const auto R = R_after(*S);
        if (!R) return *S;
        for (std::size_t k = 0; k <= *R; ++k) M = std::max(M, y[k]);
        from = *R;
    }
}

/// tau_{k+1} = tau_1 + tau_k(shifted path), all regenerations within the path.
inline std::vector<std::size_t> literal_regenerations(const std::vector<double>& y, double a) {
    std::vector<std::size_t> out;
    std::size_t offset = 0;
    std::vector<double> cur = y;
    while (true) {
        const auto t = literal_tau1(cur, a);
        if (!t || *t == 0) break;
        offset += *t;
        out.push_back(offset);
        cur.erase(cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(*t));
    }
    return out;
}

inline std::vector<double> levels(const rwre::Trajectory& t, const rwre::Direction& l) {
    std::vector<double> y;
    for (const auto& x : t.positions()) y.push_back(l.dot(x));
    return y;
}

}  // namespace oracle
