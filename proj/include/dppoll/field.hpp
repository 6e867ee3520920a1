#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dppoll {

struct FieldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroInverse : FieldError {
    ZeroInverse() : FieldError("inverse of zero field element") {}
};
struct RangeExceeded : FieldError {
    using FieldError::FieldError;
};

/// Element of the prime field F_p for the bn128 scalar prime
///   p = 21888242871839275222246405745257275088548364400416034343698204186575808495617.
/// Internally kept in Montgomery form (R = 2^256); canonical value is
/// recovered on demand. All operations keep the representative reduced,
/// so 0 <= value < p always holds.
class FieldElement {
  public:
    static constexpr std::size_t kLimbs = 4;
    static constexpr unsigned kModulusBits = 254;
    using Limbs = std::array<std::uint64_t, kLimbs>;

    FieldElement() : mont_{{0, 0, 0, 0}} {}
    explicit FieldElement(std::uint64_t v);
    FieldElement(int v);

    static FieldElement zero() { return FieldElement(); }
    static FieldElement one();

    /// Canonical little-endian limbs of the modulus p.
    static const Limbs& modulus_limbs();

    /// From a canonical (non-Montgomery) little-endian limb array; must be < p.
    static FieldElement from_canonical(const Limbs& limbs);
    Limbs to_canonical() const;

    FieldElement operator+(const FieldElement& o) const;
    FieldElement operator-(const FieldElement& o) const;
    FieldElement operator*(const FieldElement& o) const;
    FieldElement operator-() const;
    FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
    FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
    FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }

    bool operator==(const FieldElement& o) const { return mont_ == o.mont_; }
    bool operator!=(const FieldElement& o) const { return !(*this == o); }

    bool is_zero() const;

    /// Multiplicative inverse; throws ZeroInverse on 0.
    FieldElement inverse() const;

    FieldElement pow(const Limbs& exponent) const;

    /// Little-endian bits of the canonical value. Requires value < 2^n and
    /// n <= 254; otherwise throws RangeExceeded.
    std::vector<bool> to_bits(unsigned n) const;
    static FieldElement from_bits(const std::vector<bool>& bits);

    /// Single canonical bit, no range requirement.
    bool bit(unsigned i) const;
    unsigned bit_length() const;

    /// 64-character big-endian lowercase hex of the canonical value.
    std::string to_hex() const;
    static FieldElement from_hex(const std::string& hex);

    /// Canonical value fits in 64 bits? (used by aggregation / modulo hints)
    bool fits_u64() const;
    std::uint64_t as_u64() const;

  private:
    Limbs mont_;
};

}  // namespace dppoll
