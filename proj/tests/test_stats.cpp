#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "dppoll/stats.hpp"

using namespace dppoll;

namespace {

NoiseParams reference_params() {
    NoiseParams p;
    p.epsilon = Rational(10);
    p.lower = 0;
    p.upper = 128;
    p.d = 20;
    return p;
}

NoiseParams small_params() {
    NoiseParams p;
    p.epsilon = Rational(2);
    p.lower = 0;
    p.upper = 8;
    p.d = 10;
    return p;
}

const BiasTable& table_of(const NoiseParams& p) {
    static std::map<std::string, BiasTable> cache;
    std::ostringstream key;
    key << p.epsilon << "/" << p.lower << "/" << p.upper << "/" << p.d;
    auto it = cache.find(key.str());
    if (it == cache.end()) it = cache.emplace(key.str(), make_bias_table(p)).first;
    return it->second;
}

}  // namespace

TEST_CASE("exact distribution mass and support") {
    NoiseParams p = reference_params();
    ExactDistribution dist = exact_distribution(50, p, table_of(p));
    Rational total = 0;
    for (const Rational& pr : dist.probs) {
        CHECK(pr >= 0);
        CHECK(pr > 0);  // fallback mass reaches every output
        total += pr;
    }
    CHECK(total == 1);  // exact rational identity
    CHECK(dist.probs.size() == 128);
    CHECK(dist.argmax() == 50);
    CHECK(dist.at(50) == dist.probs[50]);
}

TEST_CASE("symmetry around the true value before wraparound aliasing") {
    NoiseParams p = reference_params();
    ExactDistribution dist = exact_distribution(64, p, table_of(p));
    // independent sign bit: P(64+m) = P(64-m) for m where neither output
    // aliases under the mod-128 remap (m = 64 maps both +/- to the same bin)
    for (long m = 1; m < 64; ++m) {
        CHECK(dist.at(64 + m) == dist.at(64 - m));
    }
}

TEST_CASE("distribution shifts with v") {
    NoiseParams p = small_params();
    for (long v = 0; v < 8; ++v) {
        ExactDistribution dist = exact_distribution(v, p, table_of(p));
        CHECK(dist.argmax() == v);
    }
}

TEST_CASE("dyadic denominator structure") {
    // every probability is a sum of dyadic terms and dyadic/N terms, so
    // prob * 2^(nBits*d + 1 + nBits) * N is an integer
    NoiseParams p = small_params();
    ExactDistribution dist = exact_distribution(3, p, table_of(p));
    BigInt scale = (BigInt(1) << (p.n_bits() * p.d + 1 + p.n_bits())) * p.domain_size();
    for (const Rational& pr : dist.probs) {
        Rational scaled = pr * Rational(scale);
        CHECK(denominator(scaled) == 1);
    }
}

TEST_CASE("monte-carlo agreement with the oracle") {
    // the sampler and the enumerator share no code path; 10^6 samples, every
    // bin within 5 sigma of its exact expectation
    NoiseParams p = reference_params();
    const std::uint64_t n = 1000000;
    ExactDistribution dist = exact_distribution(50, p, table_of(p));
    std::vector<std::uint64_t> counts = sample_histogram(50, p, table_of(p), n, /*seed=*/42);
    for (long j = 0; j < 128; ++j) {
        double pj = dist.probs[(std::size_t)j].convert_to<double>();
        double sigma = std::sqrt((double)n * pj * (1 - pj));
        CHECK(std::abs((double)counts[(std::size_t)j] - (double)n * pj) < 5 * sigma + 1);
    }
}

TEST_CASE("rr exact distribution and (ln 3, 0)-DP") {
    std::array<Rational, 2> d0 = rr_exact_distribution(0);
    std::array<Rational, 2> d1 = rr_exact_distribution(1);
    CHECK(d0[0] == Rational(3, 4));
    CHECK(d0[1] == Rational(1, 4));
    CHECK(d1[1] == Rational(3, 4));

    // worst ratio is exactly 3 = e^(ln 3); delta = 0 at e_eps = 3
    std::vector<Rational> p{d0[0], d0[1]}, q{d1[0], d1[1]};
    CHECK(dp_excess(p, q, Rational(3)) == 0);
    CHECK(dp_excess(q, p, Rational(3)) == 0);
    CHECK(dp_excess(p, q, Rational(29, 10)) > 0);  // any e_eps < 3 leaks
}

TEST_CASE("dp_ratio_check on a small mechanism") {
    NoiseParams p = small_params();
    DpCheckReport report = dp_ratio_check(p, table_of(p), p.epsilon);
    DeltaLedger ledger = delta_ledger(p, table_of(p));
    CHECK(report.delta_emp >= 0);
    CHECK(report.delta_emp <= ledger.total);
    CHECK(report.e_eps_lower > Rational(7));  // e^2 ~ 7.389
    CHECK(report.e_eps_lower < Rational(74, 10));
    CHECK(report.worst_pointwise_ratio > 1.0);

    // claiming epsilon = 0 on a non-degenerate mechanism must leak
    DpCheckReport zero = dp_ratio_check(p, table_of(p), Rational(0));
    CHECK(zero.delta_emp > 0);

    // monotonicity: smaller claimed epsilon, larger excess
    DpCheckReport half = dp_ratio_check(p, table_of(p), Rational(1));
    CHECK(half.delta_emp >= report.delta_emp);
    CHECK(zero.delta_emp >= half.delta_emp);
}

TEST_CASE("chi-square self-consistency") {
    // draw from the exact distribution itself; p-value should rarely be tiny
    NoiseParams p = reference_params();
    ExactDistribution dist = exact_distribution(50, p, table_of(p));
    std::vector<double> weights;
    for (const Rational& pr : dist.probs) weights.push_back(pr.convert_to<double>());

    std::mt19937_64 rng(0x5ca1e);
    std::discrete_distribution<long> draw(weights.begin(), weights.end());
    int passed = 0;
    const int reps = 100;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<std::uint64_t> counts(128, 0);
        for (int i = 0; i < 100000; ++i) counts[(std::size_t)draw(rng)] += 1;
        if (chi_square_fit(counts, dist) > 0.001) ++passed;
    }
    CHECK(passed >= 99);
}

TEST_CASE("chi-square detects a mismatched distribution") {
    NoiseParams p = reference_params();
    ExactDistribution dist60 = exact_distribution(60, p, table_of(p));
    std::vector<std::uint64_t> counts = sample_histogram(50, p, table_of(p), 1000000, 7);
    CHECK(chi_square_fit(counts, dist60) < 1e-6);
}

TEST_CASE("chi-square input validation") {
    NoiseParams p = reference_params();
    ExactDistribution dist = exact_distribution(50, p, table_of(p));
    std::vector<std::uint64_t> few(128, 0);
    few[50] = 29;
    CHECK_THROWS_AS(chi_square_fit(few, dist), InsufficientSamples);
    std::vector<std::uint64_t> wrong(64, 100);
    CHECK_THROWS(chi_square_fit(wrong, dist));
}

TEST_CASE("enumeration bound") {
    NoiseParams p;
    p.epsilon = Rational(1);
    p.lower = 0;
    p.upper = 1 << 17;  // nBits = 17 > 16
    p.d = 4;
    BiasTable t;  // never reached
    CHECK_THROWS_AS(exact_distribution(0, p, t), EnumerationTooLarge);
}

TEST_CASE("histogram csv emission") {
    std::ostringstream os;
    emit_histogram_csv(os, std::vector<std::uint64_t>{1, 0, 2}, 10);
    CHECK(os.str() == "value,count\n10,1\n11,0\n12,2\n");

    NoiseParams p = small_params();
    ExactDistribution dist = exact_distribution(4, p, table_of(p));
    std::ostringstream os2;
    emit_histogram_csv(os2, dist);
    std::string text = os2.str();
    CHECK(text.rfind("value,probability\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 9);  // header + 8 rows
}

TEST_CASE("fallback path is uniform, conditioned on the -0 event") {
    // native-sampler conditional frequency test against uniform over [l, u)
    NoiseParams p = reference_params();
    const BiasTable& table = table_of(p);
    std::mt19937_64 rng(0xfa11);
    std::vector<std::uint64_t> counts(128, 0);
    std::uint64_t hits = 0;
    for (int i = 0; i < 400000; ++i) {
        BitArray bits = prng_bitarray(rng, p.bits_required());
        NoiseSample s = exponential_noise(50, p, table, bits);
        if (s.uniform_fallback) {
            counts[(std::size_t)s.value] += 1;
            ++hits;
        }
    }
    REQUIRE(hits > 5000);  // ~3.8% of draws
    double expect = (double)hits / 128.0;
    double stat = 0;
    for (std::uint64_t c : counts) {
        double diff = (double)c - expect;
        stat += diff * diff / expect;
    }
    // chi-square with 127 dof: mean 127, sd ~ 16; 5 sigma upper bound
    CHECK(stat < 127 + 5 * 16);
}
