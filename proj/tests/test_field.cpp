#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <boost/multiprecision/cpp_int.hpp>

#include "dppoll/field.hpp"

using namespace dppoll;
using boost::multiprecision::cpp_int;

namespace {

const cpp_int kP("21888242871839275222246405745257275088548364400416034343698204186575808495617");

cpp_int to_int(const FieldElement& f) {
    cpp_int v = 0;
    FieldElement::Limbs limbs = f.to_canonical();
    for (int i = 3; i >= 0; --i) v = (v << 64) | limbs[(std::size_t)i];
    return v;
}

FieldElement from_int(cpp_int v) {
    v %= kP;
    if (v < 0) v += kP;
    FieldElement::Limbs limbs{};
    for (std::size_t i = 0; i < 4; ++i) {
        limbs[i] = (std::uint64_t)(v & 0xffffffffffffffffULL);
        v >>= 64;
    }
    return FieldElement::from_canonical(limbs);
}

FieldElement random_fe(std::mt19937_64& rng) {
    cpp_int v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 64) | rng();
    return from_int(v);
}

}  // namespace

TEST_CASE("constants and trivia") {
    CHECK(FieldElement::zero() == FieldElement(0));
    CHECK(FieldElement::one() == FieldElement(1));
    CHECK(FieldElement(0).is_zero());
    CHECK_FALSE(FieldElement(1).is_zero());
    CHECK(to_int(FieldElement(1)) == 1);
    CHECK(to_int(FieldElement(0)) == 0);
    CHECK(FieldElement(-1) == FieldElement(0) - FieldElement(1));
    CHECK(to_int(FieldElement(-1)) == kP - 1);
}

TEST_CASE("arithmetic matches a big-integer oracle") {
    // dual route: hand-rolled Montgomery on one side, boost cpp_int mod p on
    // the other, over random inputs including near-modulus values
    std::mt19937_64 rng(0xf1e1d);
    for (int i = 0; i < 2000; ++i) {
        FieldElement a = random_fe(rng), b = random_fe(rng);
        cpp_int ia = to_int(a), ib = to_int(b);
        CHECK(to_int(a + b) == (ia + ib) % kP);
        CHECK(to_int(a - b) == ((ia - ib) % kP + kP) % kP);
        CHECK(to_int(a * b) == (ia * ib) % kP);
        CHECK(to_int(-a) == (kP - ia) % kP);
    }
    // values straddling the modulus boundary
    for (int off = -3; off <= 0; ++off) {
        FieldElement a = from_int(kP + off);
        FieldElement b = from_int(kP - 1);
        CHECK(to_int(a * b) == (((kP + off) % kP) * (kP - 1)) % kP);
        CHECK(to_int(a + b) == (((kP + off) % kP) + kP - 1) % kP);
    }
}

TEST_CASE("field axioms on random elements") {
    std::mt19937_64 rng(0xab);
    for (int i = 0; i < 500; ++i) {
        FieldElement a = random_fe(rng), b = random_fe(rng), c = random_fe(rng);
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
        CHECK((a + b) + c == a + (b + c));
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a + FieldElement(0) == a);
        CHECK(a * FieldElement(1) == a);
        CHECK(a - a == FieldElement(0));
    }
}

TEST_CASE("inverse") {
    std::mt19937_64 rng(0xcd);
    for (int i = 0; i < 200; ++i) {
        FieldElement a = random_fe(rng);
        if (a.is_zero()) continue;
        CHECK(a * a.inverse() == FieldElement(1));
    }
    CHECK(FieldElement(2) * FieldElement(2).inverse() == FieldElement(1));
    CHECK_THROWS_AS(FieldElement(0).inverse(), ZeroInverse);
}

TEST_CASE("pow matches oracle") {
    std::mt19937_64 rng(0x9e);
    for (int i = 0; i < 50; ++i) {
        FieldElement a = random_fe(rng);
        FieldElement::Limbs e{rng(), rng(), rng() & 0xffff, 0};
        cpp_int ie = (cpp_int(e[2]) << 128) | (cpp_int(e[1]) << 64) | e[0];
        CHECK(to_int(a.pow(e)) == boost::multiprecision::powm(to_int(a), ie, kP));
    }
    // x^5 is the sponge S-box; spot-check it
    FieldElement x(7);
    CHECK(x.pow({5, 0, 0, 0}) == x * x * x * x * x);
}

TEST_CASE("hex round-trip") {
    std::mt19937_64 rng(0x11);
    for (int i = 0; i < 200; ++i) {
        FieldElement a = random_fe(rng);
        std::string h = a.to_hex();
        CHECK(h.size() == 64);
        CHECK(FieldElement::from_hex(h) == a);
    }
    CHECK(FieldElement(255).to_hex() ==
          "00000000000000000000000000000000000000000000000000000000000000ff");
    CHECK(FieldElement::from_hex(
              "0000000000000000000000000000000000000000000000000000000000000100") ==
          FieldElement(256));
}

TEST_CASE("bit decomposition") {
    FieldElement a(0b1011);
    std::vector<bool> bits = a.to_bits(4);
    CHECK(bits == std::vector<bool>{true, true, false, true});
    CHECK(FieldElement::from_bits(bits) == a);
    CHECK(a.bit(0));
    CHECK(a.bit(1));
    CHECK_FALSE(a.bit(2));
    CHECK(a.bit(3));
    CHECK_FALSE(a.bit(200));
    CHECK(a.bit_length() == 4);
    CHECK(FieldElement(0).bit_length() == 0);

    // value >= 2^n must throw
    CHECK_THROWS_AS(FieldElement(16).to_bits(4), RangeExceeded);
    CHECK_NOTHROW(FieldElement(15).to_bits(4));

    // p - 1 fits exactly in 254 bits
    FieldElement top = FieldElement(0) - FieldElement(1);
    CHECK(top.bit_length() == 254);
    CHECK(FieldElement::from_bits(top.to_bits(254)) == top);

    std::mt19937_64 rng(0x77);
    for (int i = 0; i < 100; ++i) {
        FieldElement a2 = random_fe(rng);
        CHECK(FieldElement::from_bits(a2.to_bits(254)) == a2);
    }
}

TEST_CASE("u64 views") {
    CHECK(FieldElement(12345).fits_u64());
    CHECK(FieldElement(12345).as_u64() == 12345);
    FieldElement big = FieldElement(1);
    for (int i = 0; i < 65; ++i) big += big;  // 2^65
    CHECK_FALSE(big.fits_u64());
}

TEST_CASE("modulus limbs match the reference prime") {
    cpp_int p = 0;
    const FieldElement::Limbs& m = FieldElement::modulus_limbs();
    for (int i = 3; i >= 0; --i) p = (p << 64) | m[(std::size_t)i];
    CHECK(p == kP);
}
