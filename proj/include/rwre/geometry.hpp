#pragma once

// Lattice and continuum geometry: unit steps, directions, rotations with
// R(e_1) = l, projections along the hyperplane {x . e_1 = 0}, and the regions
// (slabs, rotated boxes, tilted boxes) whose outer boundary is classified into
// front / back / lateral parts.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rwre {

inline constexpr int kMaxDim = 6;

/// A point of Z^d. Coordinates beyond the working dimension are zero.
struct Site {
    std::array<std::int32_t, kMaxDim> x{};

    std::int32_t& operator[](int i) { return x[static_cast<std::size_t>(i)]; }
    std::int32_t operator[](int i) const { return x[static_cast<std::size_t>(i)]; }
    friend bool operator==(const Site&, const Site&) = default;
    friend auto operator<=>(const Site&, const Site&) = default;
};

struct SiteHash {
    std::size_t operator()(const Site& s) const noexcept;
};

Site make_site(std::initializer_list<std::int32_t> coords);

/// Unit steps are indexed e_1..e_d, -e_1..-e_d, i.e. index i < d is +e_{i+1}
/// and index d + i is -e_{i+1}.
inline int num_steps(int dim) { return 2 * dim; }
inline int opposite_step(int dim, int idx) { return idx < dim ? idx + dim : idx - dim; }
inline int step_axis(int dim, int idx) { return idx < dim ? idx : idx - dim; }
inline int step_sign(int dim, int idx) { return idx < dim ? 1 : -1; }

inline Site neighbor(int dim, const Site& s, int idx) {
    Site t = s;
    t[step_axis(dim, idx)] += step_sign(dim, idx);
    return t;
}

int l1_distance(int dim, const Site& a, const Site& b);

/// Unit vector of R^d, d >= 2.
class Direction {
public:
    Direction() = default;
    /// Throws std::invalid_argument unless d >= 2 and the norm is 1 within 1e-12.
    explicit Direction(std::vector<double> components);
    /// Normalizes an arbitrary nonzero vector.
    static Direction normalized(std::vector<double> v);
    static Direction axis(int dim, int i);

    int dim() const { return static_cast<int>(c_.size()); }
    double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
    std::span<const double> components() const { return c_; }
    double dot(const Site& s) const;
    double dot(std::span<const double> v) const;

private:
    std::vector<double> c_;
};

/// Orthogonal d x d matrix stored row-major.
class Rotation {
public:
    static Rotation identity(int dim);
    /// Planar rotation in span{e_1, l} fixing the orthogonal complement.
    static Rotation mapping_e1_to(const Direction& l);

    int dim() const { return dim_; }
    double operator()(int row, int col) const {
        return m_[static_cast<std::size_t>(row * dim_ + col)];
    }
    std::vector<double> apply(std::span<const double> z) const;
    /// Column j of R, i.e. R(e_{j+1}).
    std::vector<double> column(int j) const;
    /// Coordinates of x in the rotated frame: (R(e_j) . x)_j.
    std::array<double, kMaxDim> frame_coordinates(const Site& x) const;

private:
    int dim_ = 0;
    std::vector<double> m_;
};

Rotation make_rotation(const Direction& l);

/// P_l z = (z.e_1 / l.e_1) l. Throws std::domain_error when l.e_1 == 0.
std::vector<double> project_P(const Direction& l, std::span<const double> z);
/// Q_l z = z - P_l z.
std::vector<double> project_Q(const Direction& l, std::span<const double> z);
std::vector<double> to_real(int dim, const Site& s);

enum class BoundaryClass { Interior, Front, Back, Lateral, Outside };
std::string to_string(BoundaryClass c);

/// U_{l,L} = {x : -L <= x.l <= L}.
struct Slab {
    Direction l;
    double half_width = 1.0;
};

/// R((-back, front) x (-lateral, lateral)^{d-1}) intersected with Z^d.
struct RotatedBox {
    Rotation rotation;
    double back = 1.0;
    double front = 1.0;
    double lateral = 1.0;
};

/// {y : -L^beta < (y-x).e_1 < L, |Q(y-x)|_inf < rho L^beta}, with Q the
/// projection along `asymptotic` onto {z.e_1 = 0}.
struct TiltedBox {
    double beta = 0.75;
    double length = 2.0;
    double rho = 1.0;
    Site anchor;
    Direction asymptotic;
};

class Region {
public:
    explicit Region(Slab s);
    explicit Region(RotatedBox b);
    explicit Region(TiltedBox t);

    static Region box(const Direction& l, double back, double front, double lateral);
    /// B_{l,L,L~} = R((-L, L) x (-L~, L~)^{d-1}).
    static Region box_symmetric(const Direction& l, double length, double lateral) {
        return box(l, length, length, lateral);
    }

    int dim() const { return dim_; }
    bool contains(const Site& x) const;
    /// Exactly one class for every site of Z^d.
    BoundaryClass classify(const Site& x) const;
    bool finite() const { return !std::holds_alternative<Slab>(spec_); }
    /// Inclusive lattice window holding every interior site (finite regions only).
    std::pair<Site, Site> bounding_window() const;
    /// Calls f on every interior site in lexicographic order.
    void for_each_interior(const std::function<void(const Site&)>& f) const;

    const std::variant<Slab, RotatedBox, TiltedBox>& spec() const { return spec_; }
    std::string describe() const;

private:
    BoundaryClass boundary_side(const Site& x) const;

    std::variant<Slab, RotatedBox, TiltedBox> spec_;
    int dim_;
};

/// c_1 such that any two sites are joined by a nearest-neighbour path with at
/// most c_1 |x-y|_2 sites; default 2 sqrt(d).
struct PathConstants {
    double c1;
    static PathConstants for_dimension(int dim);
};

/// Coordinate-by-coordinate staircase path from a to b, both endpoints included.
std::vector<Site> staircase_path(int dim, const Site& a, const Site& b);

}  // namespace rwre
