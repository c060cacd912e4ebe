#include "pppci/space.hpp"

#include "pppci/error.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace pppci {

IndexSet IndexSet::of(std::initializer_list<int> zero_based) {
    return of(std::vector<int>(zero_based));
}

IndexSet IndexSet::of(const std::vector<int>& zero_based) {
    std::uint32_t m = 0;
    for (int v : zero_based) {
        if (v < 0 || v >= 32) throw std::out_of_range("coordinate index out of range");
        m |= 1u << v;
    }
    return from_mask(m);
}

int IndexSet::size() const {
    return std::popcount(mask_);
}

std::vector<int> IndexSet::members() const {
    std::vector<int> out;
    for (int v = 0; v < 32; ++v) {
        if (contains(v)) out.push_back(v);
    }
    return out;
}

std::string IndexSet::to_string() const {
    std::string out = "{";
    bool first = true;
    for (int v : members()) {
        if (!first) out += ",";
        out += std::to_string(v + 1);
        first = false;
    }
    return out + "}";
}

Face face_of(const Point& point) {
    std::uint32_t m = 0;
    for (std::size_t v = 0; v < point.size(); ++v) {
        if (point[v] != 0) m |= 1u << v;
    }
    if (m == 0) throw std::invalid_argument("the origin has no face");
    return Face::from_mask(m);
}

Point project(const Point& point, IndexSet coords) {
    Point out;
    out.reserve(static_cast<std::size_t>(coords.size()));
    for (int v : coords.members()) out.push_back(point[static_cast<std::size_t>(v)]);
    return out;
}

Point embed(const Point& sub, IndexSet coords, int dims) {
    Point out = zero_point(dims);
    std::size_t i = 0;
    for (int v : coords.members()) out[static_cast<std::size_t>(v)] = sub[i++];
    return out;
}

PuncturedSpace::PuncturedSpace(int dims, Support support) : dims_(dims), support_(support) {
    if (dims < 1 || dims > kMaxDims) throw std::invalid_argument("dims must be in [1, 16]");
}

bool PuncturedSpace::admits(const Point& p) const {
    if (static_cast<int>(p.size()) != dims_ || is_origin(p)) return false;
    if (support_ == Support::Nonnegative) {
        for (const auto& x : p) {
            if (x < 0) return false;
        }
    }
    return true;
}

int layer_of(const Point& point) {
    Rational m = 0;
    for (const auto& x : point) {
        Rational a = abs(x);
        if (a > m) m = a;
    }
    if (m == 0) throw std::invalid_argument("the origin lies in no layer");
    if (m > Rational(1, 2)) return 1;
    // m <= 1/2: find h with 2^{-h} < m <= 2^{-h+1}, i.e. h = ceil(log2(1/m)).
    Rational inv = 1 / m;
    mpz_class q = inv.get_num() / inv.get_den();  // floor(1/m)
    int h = static_cast<int>(mpz_sizeinbase(q.get_mpz_t(), 2)) - 1;  // floor(log2 q)
    // Adjust so that 2^{-h} < m <= 2^{-(h-1)}.
    while (!(pow2_neg(h) < m)) ++h;
    while (h > 1 && pow2_neg(h - 1) < m) --h;
    return h;
}

bool in_local_set(const Rational& x, int h) {
    return abs(x) > pow2_neg(h);
}

bool Interval::contains(const Rational& x) const {
    if (lo) {
        if (lo_closed ? x < *lo : x <= *lo) return false;
    }
    if (hi) {
        if (hi_closed ? x > *hi : x >= *hi) return false;
    }
    return true;
}

bool Interval::is_empty() const {
    if (!lo || !hi) return false;
    if (*lo < *hi) return false;
    if (*lo == *hi) return !(lo_closed && hi_closed);
    return true;
}

CoordSet CoordSet::all() {
    CoordSet s;
    s.pieces_.push_back(Interval{});
    return s;
}

CoordSet CoordSet::points(std::vector<Rational> values) {
    CoordSet s;
    for (auto& v : values) s.pieces_.push_back(Interval{v, v, true, true});
    s.normalize();
    return s;
}

CoordSet CoordSet::point(const Rational& value) {
    return points({value});
}

CoordSet CoordSet::interval(std::optional<Rational> lo, std::optional<Rational> hi, bool lo_closed,
                            bool hi_closed) {
    CoordSet s;
    s.pieces_.push_back(Interval{std::move(lo), std::move(hi), lo_closed, hi_closed});
    s.normalize();
    return s;
}

CoordSet CoordSet::abs_greater(const Rational& t) {
    CoordSet s;
    s.pieces_.push_back(Interval{std::nullopt, Rational(-t), false, false});
    s.pieces_.push_back(Interval{t, std::nullopt, false, false});
    s.normalize();
    return s;
}

CoordSet CoordSet::nonzero() {
    return abs_greater(Rational(0));
}

CoordSet CoordSet::unite(const CoordSet& other) const {
    CoordSet s = *this;
    s.pieces_.insert(s.pieces_.end(), other.pieces_.begin(), other.pieces_.end());
    s.normalize();
    return s;
}

void CoordSet::normalize() {
    std::erase_if(pieces_, [](const Interval& i) { return i.is_empty(); });
    std::sort(pieces_.begin(), pieces_.end(), [](const Interval& a, const Interval& b) {
        if (!a.lo || !b.lo) return !a.lo && b.lo;
        if (*a.lo != *b.lo) return *a.lo < *b.lo;
        return a.lo_closed && !b.lo_closed;
    });
    std::vector<Interval> merged;
    for (auto& piece : pieces_) {
        if (merged.empty()) {
            merged.push_back(piece);
            continue;
        }
        Interval& cur = merged.back();
        bool overlaps = !cur.hi || !piece.lo || *piece.lo < *cur.hi ||
                        (*piece.lo == *cur.hi && (cur.hi_closed || piece.lo_closed));
        if (!overlaps) {
            merged.push_back(piece);
            continue;
        }
        if (!cur.hi) continue;
        if (!piece.hi) {
            cur.hi.reset();
            cur.hi_closed = false;
        } else if (*piece.hi > *cur.hi) {
            cur.hi = piece.hi;
            cur.hi_closed = piece.hi_closed;
        } else if (*piece.hi == *cur.hi) {
            cur.hi_closed = cur.hi_closed || piece.hi_closed;
        }
    }
    pieces_ = std::move(merged);
}

bool CoordSet::contains(const Rational& x) const {
    return std::any_of(pieces_.begin(), pieces_.end(), [&](const Interval& i) { return i.contains(x); });
}

std::optional<Rational> CoordSet::abs_infimum() const {
    std::optional<Rational> best;
    for (const auto& i : pieces_) {
        Rational v;
        bool below = !i.lo || *i.lo < 0;
        bool above = !i.hi || *i.hi > 0;
        if (below && above) {
            v = 0;
        } else if (i.lo && *i.lo >= 0) {
            v = *i.lo;
        } else {
            v = -*i.hi;
        }
        if (!best || v < *best) best = v;
    }
    return best;
}

bool CoordSet::zero_in_closure() const {
    auto inf = abs_infimum();
    return inf && *inf == 0;
}

bool CoordSet::contains_punctured_neighbourhood(Support support) const {
    bool right = std::any_of(pieces_.begin(), pieces_.end(), [](const Interval& i) {
        return (!i.lo || *i.lo <= 0) && (!i.hi || *i.hi > 0);
    });
    if (support == Support::Nonnegative) return right;
    bool left = std::any_of(pieces_.begin(), pieces_.end(), [](const Interval& i) {
        return (!i.lo || *i.lo < 0) && (!i.hi || *i.hi >= 0);
    });
    return right && left;
}

bool CoordSet::contains_all_nonzero(Support support) const {
    bool right = std::any_of(pieces_.begin(), pieces_.end(),
                             [](const Interval& i) { return (!i.lo || *i.lo <= 0) && !i.hi; });
    if (support == Support::Nonnegative) return right;
    bool left = std::any_of(pieces_.begin(), pieces_.end(),
                            [](const Interval& i) { return !i.lo && (!i.hi || *i.hi >= 0); });
    return right && left;
}

bool CoordSet::has_nonzero(Support support) const {
    for (const auto& i : pieces_) {
        bool positive = !i.hi || *i.hi > 0;
        if (positive) return true;
        if (support == Support::Real) {
            bool degenerate_zero = i.lo && i.hi && *i.lo == 0 && *i.hi == 0;
            if (!degenerate_zero) return true;
        }
    }
    return false;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

std::optional<Rational> parse_endpoint(std::string_view s, bool lower) {
    s = trim(s);
    if (s == "inf" || s == "+inf" || s == "-inf") {
        if ((s == "-inf") != lower) throw std::invalid_argument("bad infinite endpoint");
        return std::nullopt;
    }
    return parse_rational(s);
}

std::string endpoint(const std::optional<Rational>& e, bool lower) {
    if (!e) return lower ? "-inf" : "inf";
    return to_string(*e);
}

}  // namespace

namespace {

CoordSet parse_coord_set(std::string_view text) {
    CoordSet out;
    for (auto piece : split(text, '|')) {
        if (piece.empty()) throw std::invalid_argument("empty coordinate set piece");
        if (piece == "*") {
            out = out.unite(CoordSet::all());
        } else if (piece == "!0") {
            out = out.unite(CoordSet::nonzero());
        } else if (piece.front() == '{') {
            if (piece.back() != '}') throw std::invalid_argument("unterminated point set");
            std::vector<Rational> values;
            auto body = trim(piece.substr(1, piece.size() - 2));
            if (!body.empty()) {
                for (auto v : split(body, ',')) values.push_back(parse_rational(v));
            }
            out = out.unite(CoordSet::points(std::move(values)));
        } else if (piece.front() == '(' || piece.front() == '[') {
            char close = piece.back();
            if (close != ')' && close != ']') throw std::invalid_argument("unterminated interval");
            auto parts = split(piece.substr(1, piece.size() - 2), ',');
            if (parts.size() != 2) throw std::invalid_argument("interval needs two endpoints");
            out = out.unite(CoordSet::interval(parse_endpoint(parts[0], true), parse_endpoint(parts[1], false),
                                     piece.front() == '[', close == ']'));
        } else {
            throw std::invalid_argument("cannot parse coordinate set '" + std::string(piece) + "'");
        }
    }
    return out;
}

}  // namespace

CoordSet CoordSet::parse(std::string_view text) {
    try {
        return parse_coord_set(text);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(e.what()) + " in '" + std::string(text) + "'");
    }
}

std::string CoordSet::to_string() const {
    if (pieces_.empty()) return "{}";
    std::string out;
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        const auto& i = pieces_[k];
        if (k) out += "|";
        if (!i.lo && !i.hi) {
            out += "*";
        } else if (i.lo && i.hi && *i.lo == *i.hi) {
            out += "{" + pppci::to_string(*i.lo) + "}";
        } else {
            out += i.lo_closed ? "[" : "(";
            out += endpoint(i.lo, true) + "," + endpoint(i.hi, false);
            out += i.hi_closed ? "]" : ")";
        }
    }
    return out;
}

Rectangle Rectangle::full(int dims) {
    return Rectangle(std::vector<CoordSet>(static_cast<std::size_t>(dims), CoordSet::all()));
}

Rectangle Rectangle::reduced(int dims, int v, int h) {
    Rectangle r = full(dims);
    r[v] = CoordSet::abs_greater(pow2_neg(h));
    return r;
}

Rectangle Rectangle::parse(std::string_view text) {
    std::vector<CoordSet> sets;
    for (auto part : split(text, ';')) sets.push_back(CoordSet::parse(part));
    return Rectangle(std::move(sets));
}

bool Rectangle::contains(const Point& p) const {
    if (p.size() != sets_.size()) return false;
    for (std::size_t v = 0; v < p.size(); ++v) {
        if (!sets_[v].contains(p[v])) return false;
    }
    return true;
}

bool Rectangle::is_empty() const {
    return std::any_of(sets_.begin(), sets_.end(), [](const CoordSet& s) { return s.is_empty(); });
}

std::optional<int> Rectangle::bound_depth() const {
    if (is_empty()) return 1;
    std::optional<int> best;
    for (const auto& s : sets_) {
        auto inf = s.abs_infimum();
        if (!inf || *inf == 0) continue;
        int h = 1;
        while (!(pow2_neg(h) < *inf)) ++h;
        if (!best || h < *best) best = h;
    }
    return best;
}

Rectangle Rectangle::cylinder(const Rectangle& sub, IndexSet coords, int dims) {
    Rectangle r = full(dims);
    int i = 0;
    for (int v : coords.members()) r[v] = sub[i++];
    return r;
}

std::string Rectangle::to_string() const {
    std::string out;
    for (std::size_t v = 0; v < sets_.size(); ++v) {
        if (v) out += ";";
        out += sets_[v].to_string();
    }
    return out;
}

}  // namespace pppci
