#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <random>
#include <vector>

#include "dppoll/dp.hpp"

namespace dppoll {

struct EnumerationTooLarge : std::runtime_error {
    EnumerationTooLarge() : std::runtime_error("nBits too large for exact enumeration") {}
};
struct InsufficientSamples : std::runtime_error {
    InsufficientSamples() : std::runtime_error("need at least 30 samples for a chi-square fit") {}
};

/// Exact output distribution of the noise mechanism over [l, u), enumerated
/// from the realized dyadic biases q_k (independent of the sampling code
/// path). Probabilities are exact rationals summing to exactly 1.
struct ExactDistribution {
    long lower = 0;
    long v = 0;
    std::vector<Rational> probs;  // index j - lower

    const Rational& at(long j) const { return probs.at((std::size_t)(j - lower)); }
    long argmax() const;
};

ExactDistribution exact_distribution(long v, const NoiseParams& params, const BiasTable& table);

/// Randomized response output distribution: {Pr[out=0], Pr[out=1]}.
std::array<Rational, 2> rr_exact_distribution(int v);

/// Set-level DP excess sum_j max(0, P(j) - e_eps * Q(j)); e_eps is passed as
/// an exact rational (lower bounds of e^eps are conservative).
Rational dp_excess(const std::vector<Rational>& p, const std::vector<Rational>& q,
                   const Rational& e_eps);

struct DpCheckReport {
    Rational epsilon_claimed;
    Rational e_eps_lower;  // rational lower bound of e^eps used in the check
    Rational delta_emp;    // worst set-level excess over all ordered pairs
    long worst_v = 0;
    long worst_v_prime = 0;
    double worst_pointwise_ratio = 0.0;
};

DpCheckReport dp_ratio_check(const NoiseParams& params, const BiasTable& table,
                             const Rational& epsilon_claimed);

/// Pearson chi-square p-value of empirical counts over [l, u) against the
/// exact distribution; tail bins with expected count < 5 are merged.
double chi_square_fit(const std::vector<std::uint64_t>& counts, const ExactDistribution& dist);

/// Monte-Carlo sampling with PRNG-supplied bit streams (fast, non-verifiable;
/// used for goodness-of-fit runs against the exact distribution).
BitArray prng_bitarray(std::mt19937_64& rng, unsigned count);
std::vector<std::uint64_t> sample_histogram(long v, const NoiseParams& params,
                                            const BiasTable& table, std::uint64_t n,
                                            std::uint64_t seed);

void emit_histogram_csv(std::ostream& os, const std::vector<std::uint64_t>& counts, long lower);
void emit_histogram_csv(std::ostream& os, const ExactDistribution& dist);

}  // namespace dppoll
