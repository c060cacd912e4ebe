#include "pppci/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace pppci {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

[[noreturn]] void bad(std::string_view text) {
    throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) bad(text);

    bool negative = false;
    if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }

    Rational out;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        auto num = s.substr(0, slash);
        auto den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) bad(text);
        mpz_class n(std::string(num), 10);
        mpz_class d(std::string(den), 10);
        if (d == 0) bad(text);
        out = Rational(n, d);
        out.canonicalize();
    } else {
        long exponent = 0;
        if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
            auto exp_part = s.substr(e + 1);
            s = s.substr(0, e);
            bool exp_negative = false;
            if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
                exp_negative = exp_part.front() == '-';
                exp_part.remove_prefix(1);
            }
            if (!all_digits(exp_part) || exp_part.size() > 6) bad(text);
            exponent = std::stol(std::string(exp_part));
            if (exp_negative) exponent = -exponent;
        }
        std::string digits;
        long fraction_digits = 0;
        if (auto dot = s.find('.'); dot != std::string_view::npos) {
            auto whole = s.substr(0, dot);
            auto frac = s.substr(dot + 1);
            if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
                (whole.empty() && frac.empty()))
                bad(text);
            digits = std::string(whole) + std::string(frac);
            fraction_digits = static_cast<long>(frac.size());
        } else {
            if (!all_digits(s)) bad(text);
            digits = std::string(s);
        }
        mpz_class n(digits, 10);
        long shift = exponent - fraction_digits;
        mpz_class ten_pow;
        mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
        out = shift < 0 ? Rational(n, ten_pow) : Rational(n * ten_pow, 1);
        out.canonicalize();
    }
    if (negative) out = -out;
    return out;
}

std::string to_string(const Rational& r) {
    return r.get_str(10);
}

std::string to_string(const Point& p) {
    std::string out = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += ", ";
        out += to_string(p[i]);
    }
    return out + ")";
}

Rational pow2_neg(int h) {
    mpz_class p = 1;
    if (h >= 0) {
        mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(h));
        Rational out(1, p);
        out.canonicalize();
        return out;
    }
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(-h));
    return Rational(p, 1);
}

Rational abs(const Rational& r) {
    return r < 0 ? Rational(-r) : r;
}

bool is_origin(const Point& p) {
    for (const auto& x : p) {
        if (x != 0) return false;
    }
    return true;
}

Point zero_point(int dims) {
    return Point(static_cast<std::size_t>(dims), Rational(0));
}

Point scaled(const Point& p, const Rational& s) {
    Point out;
    out.reserve(p.size());
    for (const auto& x : p) out.push_back(x * s);
    return out;
}

double to_double(const Rational& r) {
    return r.get_d();
}

}  // namespace pppci
