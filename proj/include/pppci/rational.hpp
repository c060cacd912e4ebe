#ifndef PPPCI_RATIONAL_HPP
#define PPPCI_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pppci {

using Rational = mpq_class;

// A point of R^V (or of R^I for a projection). Coordinates are exact.
using Point = std::vector<Rational>;

// Parses "p", "p/q", "-p/q" or a finite decimal such as "0.2" or "-1.25e-1"
// into an exact rational. Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

// "p/q", or "p" for integers.
std::string to_string(const Rational& r);

std::string to_string(const Point& p);

// 2^{-h} as an exact rational (h may be negative).
Rational pow2_neg(int h);

Rational abs(const Rational& r);

bool is_origin(const Point& p);

Point zero_point(int dims);

// Componentwise product with a scalar.
Point scaled(const Point& p, const Rational& s);

double to_double(const Rational& r);

}  // namespace pppci

#endif
