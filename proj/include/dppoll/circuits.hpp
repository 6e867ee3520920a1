#pragma once

#include <stdexcept>
#include <vector>

#include "dppoll/credential.hpp"
#include "dppoll/dp.hpp"
#include "dppoll/r1cs.hpp"
#include "dppoll/sponge.hpp"

namespace dppoll {

struct ParamsTooLarge : std::runtime_error {
    ParamsTooLarge() : std::runtime_error("randomness budget exceeds configured squeezes") {}
};
struct InconsistentInputs : std::runtime_error {
    explicit InconsistentInputs(std::size_t constraint)
        : std::runtime_error("witness hints violate constraint " + std::to_string(constraint)) {}
};

/// Arithmetized mechanism plus credential binding. Public input order is
/// fixed: [challenge, pk, root, params_commitment, out]. The truthful value
/// signal is shared between the credential fragment and the mechanism, so
/// the noise provably applies to the certified attribute.
struct CircuitBundle {
    CircuitBuilder builder;
    unsigned depth = kDefaultTreeDepth;

    // public
    SignalIndex challenge = 0, pk = 0, root = 0, params_commit = 0, out = 0;
    // private inputs
    SignalIndex sk = 0, value = 0;
    SignalIndex attr_slot = 0, attr_salt = 0, pk_salt = 0;
    std::vector<SignalIndex> attr_siblings, attr_directions;
    std::vector<SignalIndex> pk_siblings, pk_directions;

    FieldElement params_commitment_value;  // build-time constant
};

/// Everything a witness needs; public inputs are supplied too and checked by
/// the circuit (pk against hash(sk, "binding"), root against the paths).
struct CircuitInputs {
    FieldElement sk;
    FieldElement challenge;
    FieldElement value;
    FieldElement pk;
    FieldElement root;
    unsigned attr_slot = 0;
    FieldElement attr_salt;
    InclusionPath attr_path;
    FieldElement pk_salt;
    InclusionPath pk_path;
};

/// Survey parameter commitments (public inputs pinning the mechanism config).
FieldElement rr_params_commitment();
FieldElement noise_params_commitment(const NoiseParams& params);

CircuitBundle build_rr_circuit(unsigned depth = kDefaultTreeDepth);
CircuitBundle build_noise_circuit(const NoiseParams& params, const BiasTable& table,
                                  unsigned depth = kDefaultTreeDepth);

/// Hash-path recomputation from a leaf up to the returned root combination;
/// directions must be boolean-constrained input signals.
LinearCombination credential_binding_fragment(CircuitBuilder& b, const LinearCombination& leaf,
                                              const std::vector<SignalIndex>& siblings,
                                              const std::vector<SignalIndex>& directions);

Witness generate_witness(const CircuitBundle& bundle, const CircuitInputs& inputs);

FieldElement extract_output(const CircuitBundle& bundle, const Witness& w);

}  // namespace dppoll
