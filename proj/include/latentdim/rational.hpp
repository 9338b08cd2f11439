#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace latentdim {

using Rational = mpq_class;

/// Renders "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& value);

/// Parses "p/q", "p", or a decimal literal such as "-0.125" exactly.
Rational parse_rational(std::string_view text);

inline double to_double(const Rational& value) { return value.get_d(); }
inline double to_double(double value) { return value; }

}  // namespace latentdim
