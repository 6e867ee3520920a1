#include "dppoll/circuits.hpp"

#include <limits>

namespace dppoll {

namespace {

LinearCombination sig(SignalIndex id) { return LinearCombination::signal(id); }
LinearCombination constant(const FieldElement& v) { return LinearCombination(v); }
const LinearCombination kOne{FieldElement(1)};

/// Shared prologue: public inputs, randomness derivation (pk binding,
/// challenge signing, counter-mode squeezes), credential membership for the
/// value leaf and the binding-pk leaf. Returns randSeq as bit combinations.
std::vector<LinearCombination> build_common(CircuitBundle& bundle, unsigned squeezes,
                                            const FieldElement& params_commitment) {
    CircuitBuilder& b = bundle.builder;

    bundle.challenge = b.alloc_input(Visibility::Public);
    bundle.pk = b.alloc_input(Visibility::Public);
    bundle.root = b.alloc_input(Visibility::Public);
    bundle.params_commit = b.alloc_input(Visibility::Public);
    bundle.sk = b.alloc_input(Visibility::Private);
    bundle.value = b.alloc_input(Visibility::Private);
    bundle.attr_slot = b.alloc_input(Visibility::Private);
    bundle.attr_salt = b.alloc_input(Visibility::Private);
    bundle.pk_salt = b.alloc_input(Visibility::Private);
    for (unsigned i = 0; i < bundle.depth; ++i) {
        bundle.attr_siblings.push_back(b.alloc_input(Visibility::Private));
        bundle.attr_directions.push_back(b.alloc_input(Visibility::Private));
        bundle.pk_siblings.push_back(b.alloc_input(Visibility::Private));
        bundle.pk_directions.push_back(b.alloc_input(Visibility::Private));
    }

    bundle.params_commitment_value = params_commitment;
    b.enforce_equal(sig(bundle.params_commit), constant(params_commitment));

    // holder binding: pk = hash(sk, "binding")
    LinearCombination pk_hash = hash_gadget(b, {sig(bundle.sk), constant(tag_binding())});
    b.enforce_equal(pk_hash, sig(bundle.pk));

    // challenge signing stand-in: s = hash(sk, challenge, "sign")
    LinearCombination s =
        hash_gadget(b, {sig(bundle.sk), sig(bundle.challenge), constant(tag_sign())});

    // counter-mode squeezes; strict decomposition (value < p) so the prover
    // cannot pick an aliased bit pattern
    std::vector<LinearCombination> rand_seq;
    rand_seq.reserve((std::size_t)squeezes * kBitsPerSqueeze);
    for (unsigned i = 0; i < squeezes; ++i) {
        LinearCombination h = hash_gadget(b, {s, constant(FieldElement((std::uint64_t)i))});
        auto bits = gadget_num2bits(b, h, FieldElement::kModulusBits);
        enforce_lt_constant(b, as_lcs(bits), modulus_bits());
        for (unsigned j = 0; j < kBitsPerSqueeze; ++j) rand_seq.push_back(sig(bits[j]));
    }

    // credential membership: value leaf and binding-pk leaf share the root
    for (unsigned i = 0; i < bundle.depth; ++i) {
        enforce_boolean(b, sig(bundle.attr_directions[i]));
        enforce_boolean(b, sig(bundle.pk_directions[i]));
    }
    LinearCombination attr_leaf = hash_gadget(
        b, {sig(bundle.attr_slot), sig(bundle.value), sig(bundle.attr_salt)});
    LinearCombination attr_root = credential_binding_fragment(
        b, attr_leaf, bundle.attr_siblings, bundle.attr_directions);
    b.enforce_equal(attr_root, sig(bundle.root));

    LinearCombination pk_leaf = hash_gadget(
        b, {constant(FieldElement((std::uint64_t)kBindingSlot)), sig(bundle.pk),
            sig(bundle.pk_salt)});
    LinearCombination pk_root =
        credential_binding_fragment(b, pk_leaf, bundle.pk_siblings, bundle.pk_directions);
    b.enforce_equal(pk_root, sig(bundle.root));

    return rand_seq;
}

}  // namespace

FieldElement rr_params_commitment() { return hash_fields({domain_tag("params/rr")}); }

FieldElement noise_params_commitment(const NoiseParams& params) {
    params.validate();
    const BigInt num = numerator(params.epsilon);
    const BigInt den = denominator(params.epsilon);
    if (num > BigInt(std::numeric_limits<std::int64_t>::max()) ||
        den > BigInt(std::numeric_limits<std::int64_t>::max()))
        throw InvalidParams("epsilon terms too large to commit");
    return hash_fields({domain_tag("params/exponential"),
                        FieldElement(num.convert_to<std::uint64_t>()),
                        FieldElement(den.convert_to<std::uint64_t>()),
                        FieldElement((int)params.lower), FieldElement((int)params.upper),
                        FieldElement((std::uint64_t)params.d)});
}

LinearCombination credential_binding_fragment(CircuitBuilder& b, const LinearCombination& leaf,
                                              const std::vector<SignalIndex>& siblings,
                                              const std::vector<SignalIndex>& directions) {
    LinearCombination cur = leaf;
    for (std::size_t i = 0; i < siblings.size(); ++i) {
        LinearCombination sib = sig(siblings[i]);
        LinearCombination dir = sig(directions[i]);
        // dir = 0: (left, right) = (cur, sib); dir = 1: swapped
        SignalIndex m = gadget_mul(b, dir, sib - cur);
        LinearCombination left = cur + sig(m);
        LinearCombination right = cur + sib - left;
        cur = hash_gadget(b, {left, right});
    }
    return cur;
}

CircuitBundle build_rr_circuit(unsigned depth) {
    CircuitBundle bundle;
    bundle.depth = depth;
    CircuitBuilder& b = bundle.builder;

    auto rand_seq = build_common(bundle, 1, rr_params_commitment());

    enforce_boolean(b, sig(bundle.value));
    SignalIndex rand = gadget_mul(b, rand_seq[0], rand_seq[1]);
    SignalIndex flip = gadget_mul(b, rand_seq[0], sig(bundle.value));
    LinearCombination out_lc = sig(bundle.value) - sig(flip) + sig(rand);

    bundle.out = b.alloc_hinted(Visibility::Public,
                                [out_lc](const auto& w) { return out_lc.evaluate(w); });
    b.enforce_equal(out_lc, sig(bundle.out));
    return bundle;
}

CircuitBundle build_noise_circuit(const NoiseParams& params, const BiasTable& table,
                                  unsigned depth) {
    params.validate();
    const unsigned n_bits = params.n_bits();
    const unsigned d = params.d;
    if (table.bits.size() != n_bits || table.d != d)
        throw InvalidParams("bias table does not match params");
    const unsigned squeezes = squeezes_for(params.bits_required());
    if (params.bits_required() > squeezes * kBitsPerSqueeze) throw ParamsTooLarge();

    CircuitBundle bundle;
    bundle.depth = depth;
    CircuitBuilder& b = bundle.builder;

    auto rand_seq = build_common(bundle, squeezes, noise_params_commitment(params));

    // biased-bit chains: only the first position where the stream disagrees
    // with the bias expansion contributes, and it contributes the expansion
    // bit itself
    std::vector<LinearCombination> noise_bits;
    for (unsigned k = 0; k < n_bits; ++k) {
        LinearCombination hit = kOne;
        LinearCombination eval3;  // running return value of the scan
        for (unsigned j = 0; j < d; ++j) {
            FieldElement prob_bit(table.bits[k].expansion[j] ? 1 : 0);
            SignalIndex eq =
                gadget_is_equal(b, constant(prob_bit), rand_seq[(std::size_t)k * d + j]);
            SignalIndex hit_next = gadget_mul(b, hit, sig(eq));
            SignalIndex eval1 = gadget_mul(b, hit, kOne - sig(eq));
            SignalIndex eval2 = gadget_mul(b, sig(eval1), constant(prob_bit));
            eval3 += sig(eval2);
            hit = sig(hit_next);
        }
        noise_bits.push_back(eval3);
    }

    SignalIndex abs_noise = gadget_bits2num(b, noise_bits);
    LinearCombination abs_lc = sig(abs_noise);
    LinearCombination sign = rand_seq[(std::size_t)n_bits * (d + 3)];
    LinearCombination value = sig(bundle.value);

    SignalIndex positive = gadget_mul(b, sign, value + abs_lc);
    SignalIndex negative_part = gadget_mul(b, sign, value - abs_lc);
    LinearCombination noised = value - abs_lc - sig(negative_part) + sig(positive);

    // -0 detection and uniform fallback
    std::vector<LinearCombination> fallback_bits;
    for (unsigned i = 0; i < n_bits; ++i) {
        fallback_bits.push_back(rand_seq[(std::size_t)(d + 2) * n_bits + i]);
    }
    SignalIndex unif_val = gadget_bits2num(b, fallback_bits);
    SignalIndex is_zero = gadget_is_zero(b, abs_lc);
    SignalIndex is_unif = gadget_mul(b, sig(is_zero), kOne - sign);
    SignalIndex unif =
        gadget_mul(b, sig(is_unif), sig(unif_val) + constant(FieldElement((int)params.lower)));
    SignalIndex blended = gadget_mul(b, sig(is_unif), noised);
    LinearCombination result = noised - sig(blended) + sig(unif);

    // remap into [l, u): offset by 2N (a multiple of N, so the remainder is
    // unchanged) to keep the modulo input non-negative even for v - noise < l
    const std::uint64_t N = (std::uint64_t)params.domain_size();
    LinearCombination mod_in =
        result - constant(FieldElement((int)params.lower)) + constant(FieldElement(2 * N));
    std::uint64_t max_in = (std::uint64_t)params.delta() + (1ull << n_bits) + 2 * N;
    unsigned bit_width = 16;
    while ((1ull << bit_width) <= max_in) ++bit_width;
    SignalIndex rem = gadget_modulo(b, mod_in, N, bit_width);

    LinearCombination out_lc = sig(rem) + constant(FieldElement((int)params.lower));
    bundle.out = b.alloc_hinted(Visibility::Public,
                                [out_lc](const auto& w) { return out_lc.evaluate(w); });
    b.enforce_equal(out_lc, sig(bundle.out));
    return bundle;
}

Witness generate_witness(const CircuitBundle& bundle, const CircuitInputs& inputs) {
    if (inputs.attr_path.siblings.size() != bundle.depth ||
        inputs.pk_path.siblings.size() != bundle.depth)
        throw InconsistentInputs(0);
    std::map<SignalIndex, FieldElement> assignment;
    assignment[bundle.challenge] = inputs.challenge;
    assignment[bundle.pk] = inputs.pk;
    assignment[bundle.root] = inputs.root;
    assignment[bundle.params_commit] = bundle.params_commitment_value;
    assignment[bundle.sk] = inputs.sk;
    assignment[bundle.value] = inputs.value;
    assignment[bundle.attr_slot] = FieldElement((std::uint64_t)inputs.attr_slot);
    assignment[bundle.attr_salt] = inputs.attr_salt;
    assignment[bundle.pk_salt] = inputs.pk_salt;
    for (unsigned i = 0; i < bundle.depth; ++i) {
        assignment[bundle.attr_siblings[i]] = inputs.attr_path.siblings[i];
        assignment[bundle.attr_directions[i]] =
            FieldElement((std::uint64_t)(inputs.attr_path.directions[i] ? 1 : 0));
        assignment[bundle.pk_siblings[i]] = inputs.pk_path.siblings[i];
        assignment[bundle.pk_directions[i]] =
            FieldElement((std::uint64_t)(inputs.pk_path.directions[i] ? 1 : 0));
    }
    Witness w = bundle.builder.generate(assignment);
    SatisfactionReport report = bundle.builder.system().is_satisfied(w);
    if (!report.satisfied) throw InconsistentInputs(report.failing_constraint);
    return w;
}

FieldElement extract_output(const CircuitBundle& bundle, const Witness& w) {
    return w.values[bundle.out];
}

}  // namespace dppoll
