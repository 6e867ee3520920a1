#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dppoll/field.hpp"
#include "dppoll/r1cs.hpp"

namespace dppoll {

/// Substitution-permutation sponge over 3 field elements: x^5 S-box, 64 full
/// rounds, round constants expanded from a fixed seed string, Cauchy-matrix
/// mixing layer. Test-grade random oracle; not Poseidon and not claimed
/// cryptographically vetted. Rate 2, capacity 1.
struct SpongeParams {
    static constexpr unsigned kWidth = 3;
    static constexpr unsigned kRounds = 64;
    static constexpr unsigned kRate = 2;

    std::array<std::array<FieldElement, kWidth>, kRounds> round_constants;
    std::array<std::array<FieldElement, kWidth>, kWidth> mix;  // invertible

    static const SpongeParams& instance();
};

using SpongeState = std::array<FieldElement, SpongeParams::kWidth>;

void sponge_permute(SpongeState& state);

/// Fixed-length hash: capacity lane initialized to the input count, inputs
/// absorbed rate-wise, first state element squeezed.
FieldElement hash_fields(const std::vector<FieldElement>& inputs);

/// Same permutation and absorption schedule emitted as constraints.
void sponge_permute_gadget(CircuitBuilder& b, std::array<LinearCombination, 3>& state);
LinearCombination hash_gadget(CircuitBuilder& b, const std::vector<LinearCombination>& inputs);

/// ASCII domain-separation tags as field elements (big-endian byte packing).
FieldElement domain_tag(const std::string& tag);
const FieldElement& tag_binding();  // "binding"
const FieldElement& tag_sign();     // "sign"

struct BindingKeyPair {
    FieldElement sk;
    FieldElement pk;  // hash(sk, "binding")
};

BindingKeyPair derive_keypair(const FieldElement& sk);

/// s = hash(sk, challenge, "sign"); hash-based stand-in for the in-circuit
/// signature of the challenge.
FieldElement bind_sign(const FieldElement& sk, const FieldElement& challenge);

/// Number of uniform bits taken from each squeeze. Field elements are below
/// 2^254, so the top bit of a 254-bit decomposition is biased; 253 low bits
/// keep the per-bit bias under 2^-60.
inline constexpr unsigned kBitsPerSqueeze = 253;

struct BitArray {
    std::vector<bool> bits;
    FieldElement pk;
    FieldElement challenge;
    unsigned squeezes = 0;
};

/// Deterministic joint randomness: bits of hash(s, i) for squeeze counters
/// i = 0, 1, ... until `count` bits are available.
BitArray verifiable_unif_rand(const FieldElement& sk, const FieldElement& challenge,
                              unsigned count);

inline unsigned squeezes_for(unsigned count) {
    return (count + kBitsPerSqueeze - 1) / kBitsPerSqueeze;
}

}  // namespace dppoll
