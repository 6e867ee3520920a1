#include "dppoll/stats.hpp"

#include <algorithm>

#include <boost/math/special_functions/gamma.hpp>

namespace dppoll {

long ExactDistribution::argmax() const {
    std::size_t best = 0;
    for (std::size_t j = 1; j < probs.size(); ++j) {
        if (probs[j] > probs[best]) best = j;
    }
    return lower + (long)best;
}

ExactDistribution exact_distribution(long v, const NoiseParams& params, const BiasTable& table) {
    params.validate();
    const unsigned n_bits = params.n_bits();
    if (n_bits > 16) throw EnumerationTooLarge();
    if (table.bits.size() != n_bits) throw InvalidParams("bias table does not match params");
    const long N = params.domain_size();
    const long l = params.lower;

    ExactDistribution dist;
    dist.lower = l;
    dist.v = v;
    dist.probs.assign((std::size_t)N, Rational(0));

    // fallback pattern counts: how many nBit integers land on each output
    std::vector<std::uint64_t> fallback_count((std::size_t)N, 0);
    for (std::uint64_t x = 0; x < (1ull << n_bits); ++x) {
        fallback_count[(std::size_t)((long)x % N)] += 1;
    }
    const Rational fallback_norm = pow2(-(long)n_bits);

    const Rational half(1, 2);
    for (std::uint64_t pattern = 0; pattern < (1ull << n_bits); ++pattern) {
        Rational mass = 1;
        long noise = 0;
        for (unsigned k = 0; k < n_bits; ++k) {
            if ((pattern >> k) & 1) {
                mass *= table.q(k);
                noise += 1L << k;
            } else {
                mass *= Rational(1) - table.q(k);
            }
        }
        if (mass == 0) continue;
        // sign = 1 branch
        {
            long m = (v + noise - l) % N;
            dist.probs[(std::size_t)m] += mass * half;
        }
        // sign = 0 branch
        if (noise == 0) {
            Rational unit = mass * half * fallback_norm;
            for (long j = 0; j < N; ++j) {
                if (fallback_count[(std::size_t)j])
                    dist.probs[(std::size_t)j] += unit * fallback_count[(std::size_t)j];
            }
        } else {
            long m = (v - noise - l) % N;
            if (m < 0) m += N;
            dist.probs[(std::size_t)m] += mass * half;
        }
    }

    Rational total = 0;
    for (const Rational& p : dist.probs) total += p;
    if (total != 1) throw std::logic_error("exact distribution mass is not 1");
    return dist;
}

std::array<Rational, 2> rr_exact_distribution(int v) {
    if (v != 0 && v != 1) throw InvalidParams("randomized response needs a binary value");
    // enumerate the four coin combinations: heads -> truth, else second flip
    Rational p_truth(3, 4);
    Rational p_other(1, 4);
    std::array<Rational, 2> out;
    out[(std::size_t)v] = p_truth;
    out[(std::size_t)(1 - v)] = p_other;
    return out;
}

Rational dp_excess(const std::vector<Rational>& p, const std::vector<Rational>& q,
                   const Rational& e_eps) {
    if (p.size() != q.size()) throw std::invalid_argument("distribution size mismatch");
    Rational excess = 0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        Rational diff = p[j] - e_eps * q[j];
        if (diff > 0) excess += diff;
    }
    return excess;
}

DpCheckReport dp_ratio_check(const NoiseParams& params, const BiasTable& table,
                             const Rational& epsilon_claimed) {
    const long N = params.domain_size();
    std::vector<ExactDistribution> dists;
    dists.reserve((std::size_t)N);
    for (long v = params.lower; v < params.upper; ++v) {
        dists.push_back(exact_distribution(v, params, table));
    }

    DpCheckReport report;
    report.epsilon_claimed = epsilon_claimed;
    report.e_eps_lower = epsilon_claimed >= 0
                             ? exp_enclosure_to_width(epsilon_claimed, Rational(1, 1 << 30)).lo
                             : Rational(0);

    report.delta_emp = 0;
    report.worst_pointwise_ratio = 0.0;
    for (long v = 0; v < N; ++v) {
        for (long vp = 0; vp < N; ++vp) {
            if (v == vp) continue;
            Rational excess =
                dp_excess(dists[(std::size_t)v].probs, dists[(std::size_t)vp].probs,
                          report.e_eps_lower);
            if (excess > report.delta_emp) {
                report.delta_emp = excess;
                report.worst_v = params.lower + v;
                report.worst_v_prime = params.lower + vp;
            }
            for (long j = 0; j < N; ++j) {
                const Rational& pj = dists[(std::size_t)v].probs[(std::size_t)j];
                const Rational& qj = dists[(std::size_t)vp].probs[(std::size_t)j];
                if (qj == 0) continue;  // all outputs carry fallback mass, so unreachable
                double ratio = Rational(pj / qj).convert_to<double>();
                report.worst_pointwise_ratio = std::max(report.worst_pointwise_ratio, ratio);
            }
        }
    }
    return report;
}

double chi_square_fit(const std::vector<std::uint64_t>& counts, const ExactDistribution& dist) {
    if (counts.size() != dist.probs.size())
        throw std::invalid_argument("count vector does not cover [l, u)");
    std::uint64_t n = 0;
    for (std::uint64_t c : counts) n += c;
    if (n < 30) throw InsufficientSamples();

    // merge adjacent bins until each merged bin has expected count >= 5
    std::vector<double> obs, exp;
    double acc_obs = 0, acc_exp = 0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        acc_obs += (double)counts[j];
        acc_exp += dist.probs[j].convert_to<double>() * (double)n;
        if (acc_exp >= 5.0) {
            obs.push_back(acc_obs);
            exp.push_back(acc_exp);
            acc_obs = acc_exp = 0;
        }
    }
    if (acc_exp > 0 && !exp.empty()) {  // fold the leftover tail into the last bin
        obs.back() += acc_obs;
        exp.back() += acc_exp;
    }
    if (exp.size() < 2) throw InsufficientSamples();

    double stat = 0;
    for (std::size_t i = 0; i < exp.size(); ++i) {
        double diff = obs[i] - exp[i];
        stat += diff * diff / exp[i];
    }
    double dof = (double)exp.size() - 1.0;
    return boost::math::gamma_q(dof / 2.0, stat / 2.0);
}

BitArray prng_bitarray(std::mt19937_64& rng, unsigned count) {
    BitArray out;
    out.bits.reserve(count);
    std::uint64_t word = 0;
    unsigned avail = 0;
    for (unsigned i = 0; i < count; ++i) {
        if (avail == 0) {
            word = rng();
            avail = 64;
        }
        out.bits.push_back(word & 1);
        word >>= 1;
        --avail;
    }
    return out;
}

std::vector<std::uint64_t> sample_histogram(long v, const NoiseParams& params,
                                            const BiasTable& table, std::uint64_t n,
                                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> counts((std::size_t)params.domain_size(), 0);
    for (std::uint64_t i = 0; i < n; ++i) {
        BitArray bits = prng_bitarray(rng, params.bits_required());
        NoiseSample s = exponential_noise(v, params, table, bits);
        counts[(std::size_t)(s.value - params.lower)] += 1;
    }
    return counts;
}

void emit_histogram_csv(std::ostream& os, const std::vector<std::uint64_t>& counts, long lower) {
    os << "value,count\n";
    for (std::size_t j = 0; j < counts.size(); ++j) {
        os << (lower + (long)j) << "," << counts[j] << "\n";
    }
}

void emit_histogram_csv(std::ostream& os, const ExactDistribution& dist) {
    os << "value,probability\n";
    for (std::size_t j = 0; j < dist.probs.size(); ++j) {
        os << (dist.lower + (long)j) << "," << dist.probs[j].convert_to<double>() << "\n";
    }
}

}  // namespace dppoll
