#include "dppoll/field.hpp"

#include <algorithm>

namespace dppoll {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using Limbs = FieldElement::Limbs;

constexpr Limbs kModulus = {0x43e1f593f0000001ull, 0x2833e84879b97091ull,
                            0xb85045b68181585dull, 0x30644e72e131a029ull};
// -p^{-1} mod 2^64
constexpr u64 kN0Inv = 0xc2e1f593efffffffull;
// R mod p and R^2 mod p, R = 2^256
constexpr Limbs kR = {0xac96341c4ffffffbull, 0x36fc76959f60cd29ull,
                      0x666ea36f7879462eull, 0x0e0a77c19a07df2full};
constexpr Limbs kR2 = {0x1bb8e645ae216da7ull, 0x53fe3ab1e35c59e3ull,
                       0x8c49833d53bb8085ull, 0x0216d0b17f4e44a5ull};
constexpr Limbs kModulusMinus2 = {0x43e1f593efffffffull, 0x2833e84879b97091ull,
                                  0xb85045b68181585dull, 0x30644e72e131a029ull};

inline bool geq(const Limbs& a, const Limbs& b) {
    for (int i = 3; i >= 0; --i) {
        if (a[i] != b[i]) return a[i] > b[i];
    }
    return true;
}

// a -= p, assuming a >= p (a may carry a fifth implicit limb via `carry`).
inline void sub_modulus(Limbs& a) {
    u128 borrow = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        u128 diff = (u128)a[i] - kModulus[i] - borrow;
        a[i] = (u64)diff;
        borrow = (diff >> 64) & 1;
    }
}

inline void add_limbs(Limbs& a, const Limbs& b, u64& carry_out) {
    u128 carry = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        u128 s = (u128)a[i] + b[i] + carry;
        a[i] = (u64)s;
        carry = s >> 64;
    }
    carry_out = (u64)carry;
}

// CIOS Montgomery multiplication: returns a*b*R^{-1} mod p.
Limbs mont_mul(const Limbs& a, const Limbs& b) {
    u64 t[6] = {0, 0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < 4; ++i) {
        u128 carry = 0;
        for (std::size_t j = 0; j < 4; ++j) {
            u128 cur = (u128)t[j] + (u128)a[j] * b[i] + carry;
            t[j] = (u64)cur;
            carry = cur >> 64;
        }
        u128 cur = (u128)t[4] + carry;
        t[4] = (u64)cur;
        t[5] = (u64)(cur >> 64);

        u64 m = t[0] * kN0Inv;
        carry = 0;
        {
            u128 c0 = (u128)t[0] + (u128)m * kModulus[0];
            carry = c0 >> 64;
        }
        for (std::size_t j = 1; j < 4; ++j) {
            u128 cur2 = (u128)t[j] + (u128)m * kModulus[j] + carry;
            t[j - 1] = (u64)cur2;
            carry = cur2 >> 64;
        }
        u128 c4 = (u128)t[4] + carry;
        t[3] = (u64)c4;
        t[4] = t[5] + (u64)(c4 >> 64);
        t[5] = 0;
    }
    Limbs r = {t[0], t[1], t[2], t[3]};
    if (t[4] != 0 || geq(r, kModulus)) sub_modulus(r);
    return r;
}

Limbs to_mont(const Limbs& canonical) { return mont_mul(canonical, kR2); }
Limbs from_mont(const Limbs& mont) {
    static constexpr Limbs one = {1, 0, 0, 0};
    return mont_mul(mont, one);
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

FieldElement::FieldElement(std::uint64_t v) {
    Limbs c = {v, 0, 0, 0};
    mont_ = to_mont(c);
}

FieldElement::FieldElement(int v) {
    if (v >= 0) {
        *this = FieldElement((std::uint64_t)v);
    } else {
        *this = -FieldElement((std::uint64_t)(-(std::int64_t)v));
    }
}

FieldElement FieldElement::one() {
    FieldElement e;
    e.mont_ = kR;
    return e;
}

const Limbs& FieldElement::modulus_limbs() {
    static const Limbs m = kModulus;
    return m;
}

FieldElement FieldElement::from_canonical(const Limbs& limbs) {
    if (geq(limbs, kModulus)) throw FieldError("canonical value >= modulus");
    FieldElement e;
    e.mont_ = to_mont(limbs);
    return e;
}

Limbs FieldElement::to_canonical() const { return from_mont(mont_); }

FieldElement FieldElement::operator+(const FieldElement& o) const {
    FieldElement r;
    r.mont_ = mont_;
    u64 carry = 0;
    add_limbs(r.mont_, o.mont_, carry);
    if (carry || geq(r.mont_, kModulus)) sub_modulus(r.mont_);
    return r;
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
    return *this + (-o);
}

FieldElement FieldElement::operator-() const {
    if (is_zero()) return *this;
    FieldElement r;
    u128 borrow = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        u128 diff = (u128)kModulus[i] - mont_[i] - borrow;
        r.mont_[i] = (u64)diff;
        borrow = (diff >> 64) & 1;
    }
    return r;
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
    FieldElement r;
    r.mont_ = mont_mul(mont_, o.mont_);
    return r;
}

bool FieldElement::is_zero() const {
    return mont_[0] == 0 && mont_[1] == 0 && mont_[2] == 0 && mont_[3] == 0;
}

FieldElement FieldElement::pow(const Limbs& exponent) const {
    FieldElement acc = one();
    FieldElement base = *this;
    for (std::size_t limb = 0; limb < 4; ++limb) {
        for (unsigned b = 0; b < 64; ++b) {
            if ((exponent[limb] >> b) & 1) acc *= base;
            base *= base;
        }
    }
    return acc;
}

FieldElement FieldElement::inverse() const {
    if (is_zero()) throw ZeroInverse();
    return pow(kModulusMinus2);
}

std::vector<bool> FieldElement::to_bits(unsigned n) const {
    if (n > kModulusBits) throw FieldError("bit count exceeds field size");
    Limbs c = to_canonical();
    // check value < 2^n
    for (unsigned i = n; i < 256; ++i) {
        if ((c[i / 64] >> (i % 64)) & 1)
            throw RangeExceeded("value does not fit in requested bit count");
    }
    std::vector<bool> bits(n);
    for (unsigned i = 0; i < n; ++i) bits[i] = (c[i / 64] >> (i % 64)) & 1;
    return bits;
}

FieldElement FieldElement::from_bits(const std::vector<bool>& bits) {
    if (bits.size() > kModulusBits) throw FieldError("too many bits");
    Limbs c = {0, 0, 0, 0};
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) c[i / 64] |= (u64)1 << (i % 64);
    }
    return from_canonical(c);
}

bool FieldElement::bit(unsigned i) const {
    if (i >= 256) return false;
    Limbs c = to_canonical();
    return (c[i / 64] >> (i % 64)) & 1;
}

unsigned FieldElement::bit_length() const {
    Limbs c = to_canonical();
    for (int i = 3; i >= 0; --i) {
        if (c[i] != 0) {
            unsigned top = 63;
            while (!((c[i] >> top) & 1)) --top;
            return (unsigned)i * 64 + top + 1;
        }
    }
    return 0;
}

std::string FieldElement::to_hex() const {
    static const char* digits = "0123456789abcdef";
    Limbs c = to_canonical();
    std::string s(64, '0');
    for (unsigned i = 0; i < 64; ++i) {
        unsigned nibble_index = 63 - i;  // big-endian output
        u64 limb = c[nibble_index / 16];
        s[i] = digits[(limb >> (4 * (nibble_index % 16))) & 0xf];
    }
    return s;
}

FieldElement FieldElement::from_hex(const std::string& hex) {
    if (hex.size() != 64) throw FieldError("hex field element must be 64 chars");
    Limbs c = {0, 0, 0, 0};
    for (unsigned i = 0; i < 64; ++i) {
        int d = hex_digit(hex[i]);
        if (d < 0) throw FieldError("invalid hex digit");
        unsigned nibble_index = 63 - i;
        c[nibble_index / 16] |= (u64)d << (4 * (nibble_index % 16));
    }
    return from_canonical(c);
}

bool FieldElement::fits_u64() const {
    Limbs c = to_canonical();
    return c[1] == 0 && c[2] == 0 && c[3] == 0;
}

std::uint64_t FieldElement::as_u64() const {
    Limbs c = to_canonical();
    if (c[1] || c[2] || c[3]) throw RangeExceeded("value exceeds 64 bits");
    return c[0];
}

}  // namespace dppoll
