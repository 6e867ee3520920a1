#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dppoll/exact.hpp"
#include "dppoll/sponge.hpp"

namespace dppoll {

struct InvalidParams : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Survey mechanism configuration for exponentially distributed noise.
/// epsilon is an exact rational; all probability math stays in exact
/// integers/rationals plus interval-enclosed exponentials.
struct NoiseParams {
    Rational epsilon;
    long lower = 0;  // l
    long upper = 0;  // u (exclusive output bound; inputs may equal u)
    unsigned d = 20; // precision of the binary bias expansions

    long delta() const { return upper - lower; }        // sensitivity
    long domain_size() const { return upper - lower; }  // N
    unsigned n_bits() const;                            // ceil(log2(delta))
    unsigned bits_required() const { return n_bits() * (d + 3) + 1; }

    void validate() const;
};

/// Per-bit biases p_k = (1 + exp(eps*2^k/delta))^{-1}, their enclosures, and
/// the d-bit truncated expansions. The realized dyadic bias of bit k is
/// q_k = floor(p_k * 2^d) / 2^d.
struct BiasTable {
    struct Entry {
        Interval p;                   // enclosure of the exact bias
        std::vector<bool> expansion;  // most-significant-first, length d
        BigInt q_num;                 // floor(p * 2^d)
    };
    std::vector<Entry> bits;  // index k in [0, nBits)
    unsigned d = 0;

    Rational q(unsigned k) const { return Rational(bits[k].q_num, BigInt(1) << d); }
};

/// Enclosure of p_k tight enough to determine floor(p_k * 2^d) (width target
/// 2^-(d+8)); throws PrecisionExhausted if refinement cannot resolve it.
Interval bit_bias(unsigned k, const NoiseParams& params);

/// Most-significant-first bits of floor(p * 2^d).
std::vector<bool> bias_expansion(const Interval& p, unsigned d);

BiasTable make_bias_table(const NoiseParams& params);

struct BiasedBit {
    bool bit = false;
    bool exhausted = false;  // all d stream bits matched the expansion
};

/// Scan j = 0..d-1 (most significant first); at the first mismatch between
/// stream and expansion return the expansion bit. On full match return 0 with
/// exhausted set; the discrepancy is the delta ledger's base term.
BiasedBit sample_biased_bit(const std::vector<bool>& expansion, const std::vector<bool>& stream,
                            std::size_t offset = 0);

/// Binary truthful value; 1 = "Yes".
int randomized_response(int v, const BitArray& r);

struct NoiseSample {
    long value = 0;        // in [l, u)
    bool exhausted = false;
    bool uniform_fallback = false;  // "-0" path taken
};

/// Verifiable exponentially distributed noise over the fixed randomness
/// index map: bit k reads stream slice [k*d, (k+1)*d); uniform-fallback bits
/// sit at [(d+2)*nBits, (d+2)*nBits + nBits); the sign bit at nBits*(d+3).
NoiseSample exponential_noise(long v, const NoiseParams& params, const BiasTable& table,
                              const BitArray& r);

/// Itemized accounting of approximation-induced statistical slack.
struct DeltaLedger {
    Rational base;        // nBits * 2^-d: exhaustion-path discrepancy
    Rational tail;        // dyadic upper bound of 2*exp(-eps*2^d/delta)
    Rational mixing;      // (1/2)*Prob(noise=0) / N from the -0 uniform path
    Rational truncation;  // per-bit expansion truncation, bounded by base
    Rational total;
};

DeltaLedger delta_ledger(const NoiseParams& params, const BiasTable& table);

/// Estimator for the true "Yes" proportion from randomized-response counts:
/// 2*(yes/n) - 1/2, clamped to [0, 1].
double rr_debias(std::uint64_t yes_count, std::uint64_t n);

/// Biased coin via threshold comparison: d stream bits as a little-endian
/// integer x; returns 1 iff x < floor(bias * 2^d).
int biased_coin_threshold(const BitArray& r, const Rational& bias, unsigned d);

}  // namespace dppoll
