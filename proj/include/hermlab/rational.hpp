#pragma once

#include "errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <string>

namespace hermlab {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline std::string to_string(const Rational& r)
{
    const Integer num = boost::multiprecision::numerator(r);
    const Integer den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

// The decimal a user would have typed: shortest round-trip representation.
inline Rational decimal_rational(double x)
{
    detail::require(std::isfinite(x), "decimal_rational needs a finite value");
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific);
    std::string s(buf, res.ptr);
    const auto e = s.find('e');
    const int exp10 = std::stoi(s.substr(e + 1));
    std::string mant = s.substr(0, e);
    bool neg = false;
    if (!mant.empty() && mant[0] == '-') {
        neg = true;
        mant.erase(0, 1);
    }
    int frac = 0;
    const auto dot = mant.find('.');
    if (dot != std::string::npos) {
        frac = static_cast<int>(mant.size() - dot - 1);
        mant.erase(dot, 1);
    }
    Rational r{Integer(mant)};
    const int p = exp10 - frac;
    const Integer ten = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(std::abs(p)));
    if (p >= 0) r *= ten;
    else r /= ten;
    return neg ? -r : r;
}

} // namespace hermlab
