#include "dppoll/exact.hpp"

namespace dppoll {

Interval exp_enclosure(const Rational& x, unsigned terms) {
    if (x < 0) throw std::invalid_argument("exp enclosure requires x >= 0");
    Rational sum = 1;
    Rational term = 1;
    for (unsigned n = 1; n < terms; ++n) {
        term = term * x / n;
        sum += term;
    }
    // next term and geometric tail: requires x / terms < 1
    Rational next = term * x / terms;
    Rational ratio = x / Rational(terms);
    if (ratio >= 1) throw std::invalid_argument("too few terms for tail bound");
    Rational tail = next / (Rational(1) - ratio);
    return {sum, sum + tail};
}

Interval exp_enclosure_to_width(const Rational& x, const Rational& max_width) {
    unsigned terms = 32;
    BigInt xi = rational_floor(x);
    if (xi > 0) terms += 2 * (unsigned)xi;
    for (unsigned round = 0; round < 16; ++round) {
        Interval iv = exp_enclosure(x, terms);
        if (iv.width() <= max_width) return iv;
        terms *= 2;
    }
    throw PrecisionExhausted();
}

}  // namespace dppoll
