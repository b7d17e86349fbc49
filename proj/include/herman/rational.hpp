#pragma once

#include <gmpxx.h>

#include <string>

namespace herman {

/// Exact arbitrary-precision rational. GMP's canonical mpq_class: always
/// stored in lowest terms with positive denominator.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }

inline std::string to_string(const Rational& q) { return q.get_str(); }

} // namespace herman
