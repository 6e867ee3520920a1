#include "dppoll/dp.hpp"

#include <algorithm>

namespace dppoll {

unsigned NoiseParams::n_bits() const {
    long del = delta();
    unsigned n = 0;
    while ((1L << n) < del) ++n;
    return n;
}

void NoiseParams::validate() const {
    if (epsilon <= 0) throw InvalidParams("epsilon must be positive");
    if (upper <= lower) throw InvalidParams("upper bound must exceed lower bound");
    if (lower < 0) throw InvalidParams("lower bound must be non-negative");
    if (d < 1) throw InvalidParams("precision d must be >= 1");
}

Interval bit_bias(unsigned k, const NoiseParams& params) {
    if (k >= params.n_bits()) throw std::out_of_range("bit index beyond nBits");
    Rational x = params.epsilon * pow2((long)k) / Rational(params.delta());
    // p = 1 / (1 + exp(x)), decreasing in exp(x). Width of p is at most the
    // width of the exp enclosure divided by (1+exp(x))^2 >= 4, so asking exp
    // for the target width directly is already conservative.
    Rational target = pow2(-((long)params.d + 8));
    for (unsigned attempt = 0; attempt < 8; ++attempt) {
        Interval e = exp_enclosure_to_width(x, target);
        Interval p{Rational(1) / (Rational(1) + e.hi), Rational(1) / (Rational(1) + e.lo)};
        if (p.width() < pow2(-((long)params.d + 8))) {
            BigInt shift = BigInt(1) << params.d;
            if (rational_floor(p.lo * shift) == rational_floor(p.hi * shift)) return p;
        }
        target /= 256;
    }
    throw PrecisionExhausted();
}

std::vector<bool> bias_expansion(const Interval& p, unsigned d) {
    BigInt shift = BigInt(1) << d;
    BigInt lo = rational_floor(p.lo * shift);
    BigInt hi = rational_floor(p.hi * shift);
    if (lo != hi) throw PrecisionExhausted();
    if (lo < 0 || lo >= shift) throw std::invalid_argument("bias outside [0, 1)");
    std::vector<bool> bits(d);
    for (unsigned i = 0; i < d; ++i) {
        bits[d - 1 - i] = boost::multiprecision::bit_test(lo, i) ? true : false;
    }
    return bits;
}

BiasTable make_bias_table(const NoiseParams& params) {
    params.validate();
    BiasTable table;
    table.d = params.d;
    for (unsigned k = 0; k < params.n_bits(); ++k) {
        Interval p = bit_bias(k, params);
        std::vector<bool> expansion = bias_expansion(p, params.d);
        BigInt q = rational_floor(p.lo * (BigInt(1) << params.d));
        table.bits.push_back({p, std::move(expansion), q});
    }
    return table;
}

BiasedBit sample_biased_bit(const std::vector<bool>& expansion, const std::vector<bool>& stream,
                            std::size_t offset) {
    if (stream.size() < offset + expansion.size())
        throw std::invalid_argument("stream shorter than expansion");
    for (std::size_t j = 0; j < expansion.size(); ++j) {
        if (stream[offset + j] != expansion[j]) return {expansion[j], false};
    }
    return {false, true};
}

int randomized_response(int v, const BitArray& r) {
    if (v != 0 && v != 1) throw InvalidParams("randomized response needs a binary value");
    if (r.bits.size() < 2) throw std::invalid_argument("need at least 2 random bits");
    if (!r.bits[0]) return v;
    return r.bits[1] ? 1 : 0;
}

NoiseSample exponential_noise(long v, const NoiseParams& params, const BiasTable& table,
                              const BitArray& r) {
    params.validate();
    if (v < params.lower || v > params.upper) throw InvalidParams("value outside [l, u]");
    const unsigned n_bits = params.n_bits();
    const unsigned d = params.d;
    if (table.bits.size() != n_bits || table.d != d)
        throw InvalidParams("bias table does not match params");
    if (r.bits.size() < params.bits_required())
        throw std::invalid_argument("bit array shorter than the index map needs");

    NoiseSample out;
    long noise = 0;
    for (unsigned k = 0; k < n_bits; ++k) {
        BiasedBit bb = sample_biased_bit(table.bits[k].expansion, r.bits, (std::size_t)k * d);
        out.exhausted = out.exhausted || bb.exhausted;
        if (bb.bit) noise += 1L << k;
    }
    const bool sign = r.bits[(std::size_t)n_bits * (d + 3)];
    const long N = params.domain_size();

    if (noise == 0 && !sign) {
        out.uniform_fallback = true;
        long x = 0;
        std::size_t base = (std::size_t)(d + 2) * n_bits;
        for (unsigned i = 0; i < n_bits; ++i) {
            if (r.bits[base + i]) x += 1L << i;
        }
        out.value = params.lower + (x % N);
        return out;
    }
    long x = v + (sign ? noise : -noise);
    long m = (x - params.lower) % N;
    if (m < 0) m += N;
    out.value = params.lower + m;
    return out;
}

DeltaLedger delta_ledger(const NoiseParams& params, const BiasTable& table) {
    const unsigned n_bits = params.n_bits();
    DeltaLedger ledger;
    ledger.base = Rational(n_bits) * pow2(-(long)params.d);
    ledger.truncation = ledger.base;

    // 2*exp(-t) <= 2*2^-floor(t) for t >= 0 (dyadic, exactly representable)
    Rational t = params.epsilon * pow2((long)params.d) / Rational(params.delta());
    BigInt ft = rational_floor(t);
    if (ft < 0) ft = 0;
    // cap the exponent: 2*2^-16384 still upper-bounds 2*exp(-t) and avoids
    // materializing astronomically wide integers for large d
    if (ft > 16384) ft = 16384;
    ledger.tail = Rational(2, BigInt(1) << (unsigned long)ft);

    Rational prob0 = 1;
    for (unsigned k = 0; k < n_bits; ++k) prob0 *= Rational(1) - table.q(k);
    ledger.mixing = prob0 / 2 / Rational(params.domain_size());

    ledger.total = ledger.base + ledger.tail + ledger.mixing + ledger.truncation;
    return ledger;
}

double rr_debias(std::uint64_t yes_count, std::uint64_t n) {
    if (n == 0) throw InvalidParams("sample size must be >= 1");
    double est = 2.0 * ((double)yes_count / (double)n) - 0.5;
    return std::clamp(est, 0.0, 1.0);
}

int biased_coin_threshold(const BitArray& r, const Rational& bias, unsigned d) {
    if (bias <= 0 || bias >= 1) throw InvalidParams("bias must lie in (0, 1)");
    if (r.bits.size() < d) throw std::invalid_argument("need at least d bits");
    BigInt x = 0;
    for (unsigned i = 0; i < d; ++i) {
        if (r.bits[i]) boost::multiprecision::bit_set(x, i);
    }
    BigInt threshold = rational_floor(bias * (BigInt(1) << d));
    return x < threshold ? 1 : 0;
}

}  // namespace dppoll
