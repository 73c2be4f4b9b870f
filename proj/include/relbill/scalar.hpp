#pragma once

// Arithmetic backends for the simulator. Every algorithm in relbill is a
// template over a scalar type; `double` is the production backend and
// `Rational` (GMP-backed exact fractions) is the cross-validation backend.

#include <boost/multiprecision/gmp.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace relbill {

using Rational = boost::multiprecision::mpq_rational;

enum class ErrorKind {
    Validation,   // bad input data
    Degenerate,   // sr = 0, pole of a map, triple collision, ...
    NoCollision,  // equal velocities: nothing to resolve
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Relative tolerance used by the floating-point backend for zero tests and
/// simultaneity. The exact backend compares against zero.
inline constexpr double kFloatTolerance = 1e-12;

template <class Real>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static constexpr bool exact = false;
    static constexpr const char* name = "float";

    static bool is_zero(double value, double scale) {
        return std::abs(value) <= kFloatTolerance * scale;
    }
    static double abs(double v) { return std::abs(v); }
    static double to_double(double v) { return v; }
    static double from_double(double v) { return v; }
};

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static constexpr const char* name = "rational";

    static bool is_zero(const Rational& value, const Rational&) { return value == 0; }
    static Rational abs(const Rational& v) { return boost::multiprecision::abs(v); }
    static double to_double(const Rational& v) { return v.convert_to<double>(); }
    // Exact binary value of the double.
    static Rational from_double(double v) { return Rational(v); }
};

template <class T>
concept Scalar = requires { ScalarTraits<T>::exact; };

template <Scalar Real>
bool is_zero(const Real& value, const Real& scale) {
    return ScalarTraits<Real>::is_zero(value, scale);
}

template <Scalar Real>
Real abs_value(const Real& v) {
    return ScalarTraits<Real>::abs(v);
}

template <Scalar Real>
double to_double(const Real& v) {
    return ScalarTraits<Real>::to_double(v);
}

template <Scalar Real>
int sign(const Real& v) {
    return (v > 0) - (v < 0);
}

/// Relative difference |a-b| / max(|a|,|b|); zero when both are zero.
inline double relative_difference(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) return 0.0;
    return std::abs(a - b) / scale;
}

namespace detail {

inline Rational pow10(int exponent) {
    Rational r(1);
    const Rational ten(10);
    for (int i = 0; i < std::abs(exponent); ++i) r *= ten;
    return exponent < 0 ? Rational(1) / r : r;
}

}  // namespace detail

/// Parses "a/b", a decimal ("-1.25"), or scientific notation ("1.7e-27")
/// into an exact fraction. Decimals are read as written, not via binary.
inline Rational parse_rational(std::string_view text) {
    auto fail = [&]() -> Error {
        return Error(ErrorKind::Validation, "not a number: '" + std::string(text) + "'");
    };
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw fail();

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_rational(text.substr(0, slash));
        Rational den = parse_rational(text.substr(slash + 1));
        if (den == 0) throw Error(ErrorKind::Validation, "zero denominator in '" + std::string(text) + "'");
        return num / den;
    }

    bool negative = false;
    if (text.front() == '+' || text.front() == '-') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    int exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        auto exp_text = text.substr(e + 1);
        if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
        auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
        if (ec != std::errc{} || ptr != exp_text.data() + exp_text.size()) throw fail();
        text = text.substr(0, e);
    }
    std::string digits;
    bool seen_point = false;
    for (char c : text) {
        if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            if (seen_point) --exponent;
        } else {
            throw fail();
        }
    }
    if (digits.empty()) throw fail();
    if (exponent > 10000 || exponent < -10000) {
        throw Error(ErrorKind::Validation, "exponent out of range in '" + std::string(text) + "'");
    }
    // A leading zero would make the integer parser read octal.
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
    Rational value{boost::multiprecision::mpz_int(digits)};
    value *= detail::pow10(exponent);
    return negative ? Rational(-value) : value;
}

/// Converts a textual literal into the chosen backend.
template <Scalar Real>
Real parse_scalar(std::string_view text) {
    if constexpr (ScalarTraits<Real>::exact) {
        return parse_rational(text);
    } else {
        if (text.find('/') != std::string_view::npos) return to_double(parse_rational(text));
        std::string s(text);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty()) throw Error(ErrorKind::Validation, "not a number: '" + s + "'");
        return v;
    }
}

/// Round-trip text form: shortest scientific notation for doubles, "a/b" for
/// fractions.
inline std::string format_scalar(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific);
    return std::string(buf, ptr);
}

inline std::string format_scalar(const Rational& v) {
    return v.str();
}

}  // namespace relbill
