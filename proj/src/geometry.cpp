#include "rwre/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rwre/rng.hpp"

namespace rwre {

std::size_t SiteHash::operator()(const Site& s) const noexcept {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (int i = 0; i < kMaxDim; ++i) {
        h = (h ^ static_cast<std::uint32_t>(s[i])) * 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(mix64(h));
}

Site make_site(std::initializer_list<std::int32_t> coords) {
    if (coords.size() > static_cast<std::size_t>(kMaxDim)) {
        throw std::invalid_argument("make_site: too many coordinates");
    }
    Site s;
    std::copy(coords.begin(), coords.end(), s.x.begin());
    return s;
}

int l1_distance(int dim, const Site& a, const Site& b) {
    int d = 0;
    for (int i = 0; i < dim; ++i) d += std::abs(a[i] - b[i]);
    return d;
}

// ---------------------------------------------------------------- Direction

Direction::Direction(std::vector<double> components) : c_(std::move(components)) {
    if (c_.size() < 2 || c_.size() > static_cast<std::size_t>(kMaxDim)) {
        throw std::invalid_argument("Direction: dimension must be in [2, " +
                                    std::to_string(kMaxDim) + "]");
    }
    double n2 = 0.0;
    for (double v : c_) n2 += v * v;
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-12) {
        throw std::invalid_argument("Direction: vector is not a unit vector");
    }
}

Direction Direction::normalized(std::vector<double> v) {
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    if (n2 == 0.0) throw std::invalid_argument("Direction: zero vector");
    const double n = std::sqrt(n2);
    for (double& x : v) x /= n;
    // renormalization can leave a 1-ulp error; the ctor tolerance absorbs it
    return Direction(std::move(v));
}

Direction Direction::axis(int dim, int i) {
    std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
    v.at(static_cast<std::size_t>(i)) = 1.0;
    return Direction(std::move(v));
}

double Direction::dot(const Site& s) const {
    double acc = 0.0;
    for (int i = 0; i < dim(); ++i) acc += c_[static_cast<std::size_t>(i)] * s[i];
    return acc;
}

double Direction::dot(std::span<const double> v) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < c_.size(); ++i) acc += c_[i] * v[i];
    return acc;
}

// ---------------------------------------------------------------- Rotation

Rotation Rotation::identity(int dim) {
    Rotation r;
    r.dim_ = dim;
    r.m_.assign(static_cast<std::size_t>(dim * dim), 0.0);
    for (int i = 0; i < dim; ++i) r.m_[static_cast<std::size_t>(i * dim + i)] = 1.0;
    return r;
}

Rotation Rotation::mapping_e1_to(const Direction& l) {
    const int d = l.dim();
    Rotation r = identity(d);
    const double c = l[0];
    std::vector<double> u(static_cast<std::size_t>(d), 0.0);
    double s2 = 0.0;
    for (int i = 1; i < d; ++i) {
        u[static_cast<std::size_t>(i)] = l[i];
        s2 += l[i] * l[i];
    }
    const double s = std::sqrt(s2);
    if (s == 0.0) {
        if (c > 0.0) return r;
        // l = -e_1: half turn in the (e_1, e_2) plane
        r.m_[0] = -1.0;
        r.m_[static_cast<std::size_t>(d + 1)] = -1.0;
        return r;
    }
    for (double& x : u) x /= s;
    // R = I + (c-1)(e1 e1^T + u u^T) + s (u e1^T - e1 u^T)
    auto at = [&](int i, int j) -> double& { return r.m_[static_cast<std::size_t>(i * d + j)]; };
    for (int i = 0; i < d; ++i) {
        const double e1i = i == 0 ? 1.0 : 0.0;
        for (int j = 0; j < d; ++j) {
            const double e1j = j == 0 ? 1.0 : 0.0;
            const double ui = u[static_cast<std::size_t>(i)];
            const double uj = u[static_cast<std::size_t>(j)];
            at(i, j) += (c - 1.0) * (e1i * e1j + ui * uj) + s * (ui * e1j - e1i * uj);
        }
    }
    return r;
}

Rotation make_rotation(const Direction& l) { return Rotation::mapping_e1_to(l); }

std::vector<double> Rotation::apply(std::span<const double> z) const {
    std::vector<double> out(static_cast<std::size_t>(dim_), 0.0);
    for (int i = 0; i < dim_; ++i) {
        double acc = 0.0;
        for (int j = 0; j < dim_; ++j) acc += (*this)(i, j) * z[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

std::vector<double> Rotation::column(int j) const {
    std::vector<double> out(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i) out[static_cast<std::size_t>(i)] = (*this)(i, j);
    return out;
}

std::array<double, kMaxDim> Rotation::frame_coordinates(const Site& x) const {
    std::array<double, kMaxDim> out{};
    for (int j = 0; j < dim_; ++j) {
        double acc = 0.0;
        for (int i = 0; i < dim_; ++i) acc += (*this)(i, j) * x[i];
        out[static_cast<std::size_t>(j)] = acc;
    }
    return out;
}

// ---------------------------------------------------------------- projections

std::vector<double> project_P(const Direction& l, std::span<const double> z) {
    if (l[0] == 0.0) throw std::domain_error("project_P: l . e_1 == 0");
    const double f = z[0] / l[0];
    std::vector<double> out(static_cast<std::size_t>(l.dim()));
    for (int i = 0; i < l.dim(); ++i) out[static_cast<std::size_t>(i)] = f * l[i];
    return out;
}

std::vector<double> project_Q(const Direction& l, std::span<const double> z) {
    auto p = project_P(l, z);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] - p[i];
    // exact by construction: Q z . e_1 = z_1 - (z_1 / l_1) l_1
    p[0] = 0.0;
    return p;
}

std::vector<double> to_real(int dim, const Site& s) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) v[static_cast<std::size_t>(i)] = s[i];
    return v;
}

std::string to_string(BoundaryClass c) {
    switch (c) {
        case BoundaryClass::Interior: return "interior";
        case BoundaryClass::Front: return "front";
        case BoundaryClass::Back: return "back";
        case BoundaryClass::Lateral: return "lateral";
        case BoundaryClass::Outside: return "outside";
    }
    return "?";
}

// ---------------------------------------------------------------- regions

namespace {

struct TiltedCoords {
    double along;      // (y - x) . e_1
    double q_sup;      // |Q(y - x)|_inf
};

TiltedCoords tilted_coords(const TiltedBox& t, const Site& y) {
    const int d = t.asymptotic.dim();
    const double along = y[0] - t.anchor[0];
    const double f = along / t.asymptotic[0];
    double sup = 0.0;
    for (int i = 1; i < d; ++i) {
        sup = std::max(sup, std::abs((y[i] - t.anchor[i]) - f * t.asymptotic[i]));
    }
    return {along, sup};
}

}  // namespace

Region::Region(Slab s) : spec_(std::move(s)), dim_(std::get<Slab>(spec_).l.dim()) {
    if (!(std::get<Slab>(spec_).half_width > 0.0)) {
        throw std::invalid_argument("Slab: L must be > 0");
    }
}

Region::Region(RotatedBox b) : spec_(std::move(b)), dim_(std::get<RotatedBox>(spec_).rotation.dim()) {
    const auto& box = std::get<RotatedBox>(spec_);
    if (!(box.back > 0.0 && box.front > 0.0 && box.lateral > 0.0)) {
        throw std::invalid_argument("RotatedBox: back, front and lateral lengths must be > 0");
    }
}

Region::Region(TiltedBox t) : spec_(std::move(t)), dim_(std::get<TiltedBox>(spec_).asymptotic.dim()) {
    const auto& tb = std::get<TiltedBox>(spec_);
    if (!(tb.beta > 0.0 && tb.beta < 1.0)) throw std::invalid_argument("TiltedBox: beta must be in (0,1)");
    if (!(tb.rho > 0.0)) throw std::invalid_argument("TiltedBox: rho must be > 0");
    if (!(tb.length > 1.0)) throw std::invalid_argument("TiltedBox: L must be > 1");
    if (tb.asymptotic[0] <= 0.0) {
        throw std::invalid_argument("TiltedBox: asymptotic direction must satisfy v.e_1 > 0");
    }
}

Region Region::box(const Direction& l, double back, double front, double lateral) {
    return Region(RotatedBox{make_rotation(l), back, front, lateral});
}

bool Region::contains(const Site& x) const {
    return std::visit(
        [&](const auto& r) -> bool {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Slab>) {
                const double p = r.l.dot(x);
                return -r.half_width <= p && p <= r.half_width;
            } else if constexpr (std::is_same_v<T, RotatedBox>) {
                const auto y = r.rotation.frame_coordinates(x);
                if (!(-r.back < y[0] && y[0] < r.front)) return false;
                for (int j = 1; j < dim_; ++j) {
                    if (!(std::abs(y[static_cast<std::size_t>(j)]) < r.lateral)) return false;
                }
                return true;
            } else {
                const auto c = tilted_coords(r, x);
                const double lb = std::pow(r.length, r.beta);
                return -lb < c.along && c.along < r.length && c.q_sup < r.rho * lb;
            }
        },
        spec_);
}

BoundaryClass Region::boundary_side(const Site& x) const {
    return std::visit(
        [&](const auto& r) -> BoundaryClass {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Slab>) {
                return r.l.dot(x) > r.half_width ? BoundaryClass::Front : BoundaryClass::Back;
            } else if constexpr (std::is_same_v<T, RotatedBox>) {
                const auto y = r.rotation.frame_coordinates(x);
                bool within_sides = true;
                for (int j = 1; j < dim_; ++j) {
                    if (!(std::abs(y[static_cast<std::size_t>(j)]) < r.lateral)) within_sides = false;
                }
                if (within_sides && y[0] >= r.front) return BoundaryClass::Front;
                if (within_sides && y[0] <= -r.back) return BoundaryClass::Back;
                return BoundaryClass::Lateral;
            } else {
                const auto c = tilted_coords(r, x);
                if (c.along >= r.length) return BoundaryClass::Front;
                if (c.along <= -std::pow(r.length, r.beta)) return BoundaryClass::Back;
                return BoundaryClass::Lateral;
            }
        },
        spec_);
}

BoundaryClass Region::classify(const Site& x) const {
    if (contains(x)) return BoundaryClass::Interior;
    bool adjacent = false;
    for (int e = 0; e < num_steps(dim_) && !adjacent; ++e) {
        adjacent = contains(neighbor(dim_, x, e));
    }
    if (!adjacent) return BoundaryClass::Outside;
    return boundary_side(x);
}

std::pair<Site, Site> Region::bounding_window() const {
    Site lo, hi;
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Slab>) {
                throw std::logic_error("bounding_window: slab is unbounded");
            } else if constexpr (std::is_same_v<T, RotatedBox>) {
                for (int i = 0; i < dim_; ++i) {
                    double mn = 0.0, mx = 0.0;
                    for (int j = 0; j < dim_; ++j) {
                        const double a = j == 0 ? -r.back : -r.lateral;
                        const double b = j == 0 ? r.front : r.lateral;
                        const double m = r.rotation(i, j);
                        mn += std::min(m * a, m * b);
                        mx += std::max(m * a, m * b);
                    }
                    lo[i] = static_cast<std::int32_t>(std::floor(mn));
                    hi[i] = static_cast<std::int32_t>(std::ceil(mx));
                }
            } else {
                const double lb = std::pow(r.length, r.beta);
                const double v1 = r.asymptotic[0];
                lo[0] = r.anchor[0] + static_cast<std::int32_t>(std::floor(-lb));
                hi[0] = r.anchor[0] + static_cast<std::int32_t>(std::ceil(r.length));
                for (int i = 1; i < dim_; ++i) {
                    const double slope = r.asymptotic[i] / v1;
                    const double t0 = slope * -lb, t1 = slope * r.length;
                    lo[i] = r.anchor[i] +
                            static_cast<std::int32_t>(std::floor(std::min(t0, t1) - r.rho * lb));
                    hi[i] = r.anchor[i] +
                            static_cast<std::int32_t>(std::ceil(std::max(t0, t1) + r.rho * lb));
                }
            }
        },
        spec_);
    return {lo, hi};
}

void Region::for_each_interior(const std::function<void(const Site&)>& f) const {
    const auto [lo, hi] = bounding_window();
    Site cur = lo;
    while (true) {
        if (contains(cur)) f(cur);
        int i = dim_ - 1;
        while (i >= 0 && cur[i] == hi[i]) {
            cur[i] = lo[i];
            --i;
        }
        if (i < 0) break;
        ++cur[i];
    }
}

std::string Region::describe() const {
    std::ostringstream os;
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Slab>) {
                os << "slab(L=" << r.half_width << ")";
            } else if constexpr (std::is_same_v<T, RotatedBox>) {
                os << "box(back=" << r.back << ",front=" << r.front << ",lateral=" << r.lateral << ")";
            } else {
                os << "tilted(beta=" << r.beta << ",L=" << r.length << ",rho=" << r.rho << ")";
            }
        },
        spec_);
    return os.str();
}

PathConstants PathConstants::for_dimension(int dim) { return {2.0 * std::sqrt(static_cast<double>(dim))}; }

std::vector<Site> staircase_path(int dim, const Site& a, const Site& b) {
    std::vector<Site> path{a};
    Site cur = a;
    for (int i = 0; i < dim; ++i) {
        while (cur[i] != b[i]) {
            cur[i] += cur[i] < b[i] ? 1 : -1;
            path.push_back(cur);
        }
    }
    return path;
}

}  // namespace rwre
