#pragma once

#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace dppoll {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct PrecisionExhausted : std::runtime_error {
    PrecisionExhausted() : std::runtime_error("interval too wide to resolve dyadic floor") {}
};

/// Closed enclosure [lo, hi] of a real value.
struct Interval {
    Rational lo, hi;
    Rational width() const { return hi - lo; }
};

/// Enclosure of exp(x) for x >= 0 via the Taylor series with an explicit
/// geometric tail bound; `terms` must exceed 2*x for the bound to apply.
Interval exp_enclosure(const Rational& x, unsigned terms);

/// Enclosure of exp(x) refined until width <= max_width (relative to the
/// value being around exp(x)); throws PrecisionExhausted if the cap on
/// refinement rounds is hit.
Interval exp_enclosure_to_width(const Rational& x, const Rational& max_width);

inline BigInt floor_div(const BigInt& num, const BigInt& den) {
    BigInt q = num / den;
    if (q * den > num) --q;  // toward minus infinity
    return q;
}

inline BigInt rational_floor(const Rational& r) {
    return floor_div(numerator(r), denominator(r));
}

inline Rational pow2(long e) {
    if (e >= 0) return Rational(BigInt(1) << e);
    return Rational(1, BigInt(1) << (-e));
}

}  // namespace dppoll
