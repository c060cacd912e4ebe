#ifndef PPPCI_SPACE_HPP
#define PPPCI_SPACE_HPP

#include "pppci/rational.hpp"

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pppci {

inline constexpr int kMaxDims = 16;

// Subset of the coordinate index set V = {0, ..., d-1}. Printed 1-based.
class IndexSet {
public:
    constexpr IndexSet() = default;

    static constexpr IndexSet from_mask(std::uint32_t mask) {
        IndexSet s;
        s.mask_ = mask;
        return s;
    }
    static IndexSet of(std::initializer_list<int> zero_based);
    static IndexSet of(const std::vector<int>& zero_based);
    static constexpr IndexSet full(int dims) {
        return from_mask(dims >= 32 ? ~0u : ((1u << dims) - 1u));
    }

    constexpr std::uint32_t mask() const { return mask_; }
    constexpr bool empty() const { return mask_ == 0; }
    constexpr bool contains(int v) const { return (mask_ >> v) & 1u; }
    int size() const;
    std::vector<int> members() const;

    constexpr bool intersects(IndexSet o) const { return (mask_ & o.mask_) != 0; }
    constexpr bool subset_of(IndexSet o) const { return (mask_ & ~o.mask_) == 0; }

    constexpr IndexSet operator|(IndexSet o) const { return from_mask(mask_ | o.mask_); }
    constexpr IndexSet operator&(IndexSet o) const { return from_mask(mask_ & o.mask_); }
    constexpr IndexSet operator-(IndexSet o) const { return from_mask(mask_ & ~o.mask_); }

    constexpr auto operator<=>(const IndexSet&) const = default;

    // "{1,3}" with 1-based indices; "{}" for the empty set.
    std::string to_string() const;

private:
    std::uint32_t mask_ = 0;
};

// The face of a point is the set of its non-zero coordinates.
using Face = IndexSet;

// Throws std::invalid_argument for the origin.
Face face_of(const Point& point);

Point project(const Point& point, IndexSet coords);

// Inverse of project: places sub-vector values at the given coordinates of a
// zero point of dimension `dims`.
Point embed(const Point& sub, IndexSet coords, int dims);

enum class Support { Real, Nonnegative };

// E_V^o = R^V \ {0} (or [0,inf)^V \ {0}) with the base-2 localization
// L_{h,v} = {|y_v| > 2^{-h}}.
class PuncturedSpace {
public:
    PuncturedSpace() = default;
    explicit PuncturedSpace(int dims, Support support = Support::Real);

    int dims() const { return dims_; }
    Support support() const { return support_; }
    IndexSet all() const { return IndexSet::full(dims_); }

    bool admits(const Point& p) const;

    bool operator==(const PuncturedSpace&) const = default;

private:
    int dims_ = 0;
    Support support_ = Support::Real;
};

// Layer of a non-origin point: the smallest h >= 1 with max_v |y_v| > 2^{-h}.
// For max|y| <= 1 this is the annulus (2^{-h}, 2^{-h+1}].
int layer_of(const Point& point);

// |x| > 2^{-h}, i.e. x lies in L_{h,v}.
bool in_local_set(const Rational& x, int h);

struct Interval {
    std::optional<Rational> lo;  // nullopt = -inf
    std::optional<Rational> hi;  // nullopt = +inf
    bool lo_closed = false;
    bool hi_closed = false;

    bool contains(const Rational& x) const;
    bool is_empty() const;
};

// Finite union of intervals (points are degenerate closed intervals).
class CoordSet {
public:
    CoordSet() = default;  // empty set

    static CoordSet all();
    static CoordSet points(std::vector<Rational> values);
    static CoordSet point(const Rational& value);
    static CoordSet interval(std::optional<Rational> lo, std::optional<Rational> hi, bool lo_closed,
                             bool hi_closed);
    static CoordSet abs_greater(const Rational& t);  // {|x| > t}
    static CoordSet nonzero();

    // Grammar: pieces joined by '|'; a piece is '*', '!0', '{a,b,...}', or an
    // interval such as '(1/5,11/10]' with 'inf' / '-inf' endpoints. Throws
    // ConfigError.
    static CoordSet parse(std::string_view text);

    CoordSet unite(const CoordSet& other) const;

    bool contains(const Rational& x) const;
    bool contains_zero() const { return contains(Rational(0)); }
    bool is_empty() const { return pieces_.empty(); }

    // inf{|x| : x in set}; nullopt for the empty set.
    std::optional<Rational> abs_infimum() const;
    bool zero_in_closure() const;
    // Some ((-eps, eps) ∩ support) \ {0} is contained in the set.
    bool contains_punctured_neighbourhood(Support support) const;
    // support \ {0} is contained in the set.
    bool contains_all_nonzero(Support support) const;
    // set ∩ support contains a non-zero value.
    bool has_nonzero(Support support) const;

    const std::vector<Interval>& pieces() const { return pieces_; }
    std::string to_string() const;

private:
    void normalize();
    std::vector<Interval> pieces_;
};

// Product set prod_v R_v.
class Rectangle {
public:
    Rectangle() = default;
    explicit Rectangle(std::vector<CoordSet> sets) : sets_(std::move(sets)) {}

    static Rectangle full(int dims);
    // R_{h,v} = L_{h,v} x E_{V \ {v}}.
    static Rectangle reduced(int dims, int v, int h);
    // Coordinates separated by ';', each parsed by CoordSet::parse.
    static Rectangle parse(std::string_view text);

    int dims() const { return static_cast<int>(sets_.size()); }
    const CoordSet& operator[](int v) const { return sets_[static_cast<std::size_t>(v)]; }
    CoordSet& operator[](int v) { return sets_[static_cast<std::size_t>(v)]; }

    bool contains(const Point& p) const;
    bool is_empty() const;
    // Smallest h with R ⊆ L_{h,V} certified coordinatewise; nullopt when R is
    // unbounded. An empty rectangle reports 1.
    std::optional<int> bound_depth() const;
    bool bounded() const { return bound_depth().has_value(); }

    // The cylinder {y in E_V : y_I in sub}.
    static Rectangle cylinder(const Rectangle& sub, IndexSet coords, int dims);

    std::string to_string() const;

private:
    std::vector<CoordSet> sets_;
};

}  // namespace pppci

#endif
