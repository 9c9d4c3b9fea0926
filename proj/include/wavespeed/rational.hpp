#pragma once

#include <gmpxx.h>

#include <string>

namespace wavespeed {

// Exact rational coefficients for all symbolic construction; conversion to
// floating point happens only when an SDP instance is assembled.
using Rational = mpq_class;

inline Rational rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Exact conversion: every finite double is a binary rational.
inline Rational rational_from_double(double x) { return Rational(x); }

inline double to_double(const Rational& r) { return r.get_d(); }

inline std::string to_string(const Rational& r) { return r.get_str(); }

}  // namespace wavespeed
