#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace progeq {

// Exact rational scalar used throughout the payoff algebra.  All game values,
// thresholds and schedule masses are kept exact; doubles appear only at the
// Monte-Carlo boundary.
// Expression templates are disabled so Rat behaves like a plain value type
// (std::min/std::max, ternaries, and auto all do the expected thing).
using Rat = boost::multiprecision::number<
    boost::multiprecision::backends::rational_adaptor<
        boost::multiprecision::backends::cpp_int_backend<>>,
    boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

// Parses "p/q", "p", or a plain integer with optional sign.  Throws
// std::invalid_argument on malformed input or zero denominator.
Rat parse_rational(const std::string& text);

// Canonical "p/q" form ("p" when the denominator is 1).
std::string format_rational(const Rat& r);

// r^e for e >= 0.
Rat rat_pow(const Rat& r, unsigned long e);

}  // namespace progeq
