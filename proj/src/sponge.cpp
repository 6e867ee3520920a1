#include "dppoll/sponge.hpp"

namespace dppoll {

namespace {

// splitmix64 over a seed derived from the constants tag; 224 bits per
// constant so every draw is already below the modulus.
std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
        h ^= (unsigned char)c;
        h *= 0x100000001b3ull;
    }
    return h;
}

FieldElement draw_constant(std::uint64_t& state) {
    FieldElement::Limbs limbs = {splitmix64(state), splitmix64(state), splitmix64(state),
                                 splitmix64(state) & 0xffffffffull};  // 224 bits
    return FieldElement::from_canonical(limbs);
}

FieldElement pow5(const FieldElement& x) {
    FieldElement x2 = x * x;
    return x2 * x2 * x;
}

}  // namespace

const SpongeParams& SpongeParams::instance() {
    static const SpongeParams params = [] {
        SpongeParams p;
        std::uint64_t state = fnv1a("dppoll/sponge/v1/round-constants");
        for (unsigned r = 0; r < kRounds; ++r) {
            for (unsigned i = 0; i < kWidth; ++i) p.round_constants[r][i] = draw_constant(state);
        }
        // Cauchy matrix 1/(x_i + y_j), x = {1,2,3}, y = {4,5,6}: invertible,
        // so the full permutation is a bijection on states.
        for (unsigned i = 0; i < kWidth; ++i) {
            for (unsigned j = 0; j < kWidth; ++j) {
                p.mix[i][j] = FieldElement((std::uint64_t)(i + 1 + j + 4)).inverse();
            }
        }
        return p;
    }();
    return params;
}

void sponge_permute(SpongeState& state) {
    const SpongeParams& p = SpongeParams::instance();
    for (unsigned r = 0; r < SpongeParams::kRounds; ++r) {
        SpongeState sboxed;
        for (unsigned i = 0; i < SpongeParams::kWidth; ++i) {
            sboxed[i] = pow5(state[i] + p.round_constants[r][i]);
        }
        for (unsigned i = 0; i < SpongeParams::kWidth; ++i) {
            FieldElement acc;
            for (unsigned j = 0; j < SpongeParams::kWidth; ++j) acc += p.mix[i][j] * sboxed[j];
            state[i] = acc;
        }
    }
}

FieldElement hash_fields(const std::vector<FieldElement>& inputs) {
    SpongeState state = {FieldElement(), FieldElement(),
                         FieldElement((std::uint64_t)inputs.size())};
    for (std::size_t i = 0; i < inputs.size(); i += SpongeParams::kRate) {
        state[0] += inputs[i];
        if (i + 1 < inputs.size()) state[1] += inputs[i + 1];
        sponge_permute(state);
    }
    if (inputs.empty()) sponge_permute(state);
    return state[0];
}

void sponge_permute_gadget(CircuitBuilder& b, std::array<LinearCombination, 3>& state) {
    const SpongeParams& p = SpongeParams::instance();
    for (unsigned r = 0; r < SpongeParams::kRounds; ++r) {
        std::array<LinearCombination, 3> sboxed;
        for (unsigned i = 0; i < SpongeParams::kWidth; ++i) {
            LinearCombination x = state[i] + LinearCombination(p.round_constants[r][i]);
            SignalIndex x2 = gadget_mul(b, x, x);
            SignalIndex x4 =
                gadget_mul(b, LinearCombination::signal(x2), LinearCombination::signal(x2));
            SignalIndex x5 = gadget_mul(b, LinearCombination::signal(x4), x);
            sboxed[i] = LinearCombination::signal(x5);
        }
        for (unsigned i = 0; i < SpongeParams::kWidth; ++i) {
            LinearCombination acc;
            for (unsigned j = 0; j < SpongeParams::kWidth; ++j) acc += sboxed[j] * p.mix[i][j];
            state[i] = acc;
        }
    }
}

LinearCombination hash_gadget(CircuitBuilder& b, const std::vector<LinearCombination>& inputs) {
    std::array<LinearCombination, 3> state = {
        LinearCombination(), LinearCombination(),
        LinearCombination(FieldElement((std::uint64_t)inputs.size()))};
    for (std::size_t i = 0; i < inputs.size(); i += SpongeParams::kRate) {
        state[0] += inputs[i];
        if (i + 1 < inputs.size()) state[1] += inputs[i + 1];
        sponge_permute_gadget(b, state);
    }
    if (inputs.empty()) sponge_permute_gadget(b, state);
    return state[0];
}

FieldElement domain_tag(const std::string& tag) {
    FieldElement acc;
    FieldElement shift(256);
    for (char c : tag) acc = acc * shift + FieldElement((std::uint64_t)(unsigned char)c);
    return acc;
}

const FieldElement& tag_binding() {
    static const FieldElement t = domain_tag("binding");
    return t;
}

const FieldElement& tag_sign() {
    static const FieldElement t = domain_tag("sign");
    return t;
}

BindingKeyPair derive_keypair(const FieldElement& sk) {
    return {sk, hash_fields({sk, tag_binding()})};
}

FieldElement bind_sign(const FieldElement& sk, const FieldElement& challenge) {
    return hash_fields({sk, challenge, tag_sign()});
}

BitArray verifiable_unif_rand(const FieldElement& sk, const FieldElement& challenge,
                              unsigned count) {
    if (count == 0) throw std::invalid_argument("bit count must be >= 1");
    BitArray out;
    out.pk = derive_keypair(sk).pk;
    out.challenge = challenge;
    out.squeezes = squeezes_for(count);
    out.bits.reserve((std::size_t)out.squeezes * kBitsPerSqueeze);
    FieldElement s = bind_sign(sk, challenge);
    for (unsigned i = 0; i < out.squeezes; ++i) {
        FieldElement h = hash_fields({s, FieldElement((std::uint64_t)i)});
        for (unsigned j = 0; j < kBitsPerSqueeze; ++j) out.bits.push_back(h.bit(j));
    }
    return out;
}

}  // namespace dppoll
