#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dppoll/sponge.hpp"

namespace dppoll {

struct CapacityExceeded : std::runtime_error {
    CapacityExceeded() : std::runtime_error("attribute count exceeds tree capacity") {}
};
struct UnknownAttribute : std::runtime_error {
    explicit UnknownAttribute(const std::string& name)
        : std::runtime_error("attestation holds no attribute named " + name) {}
};

inline constexpr unsigned kDefaultTreeDepth = 4;
/// Slot reserved for the holder-binding public key.
inline constexpr unsigned kBindingSlot = 0;

struct Attribute {
    std::string name;
    long value = 0;
    FieldElement salt;  // leaves may be disclosed; salting blocks dictionary probes
};

struct InclusionPath {
    unsigned leaf_index = 0;
    std::vector<FieldElement> siblings;  // bottom-up
    std::vector<bool> directions;        // bit i: node is the right child at level i
};

/// Leaf preimage is (slot index, value, salt); empty slots hash to 0.
FieldElement leaf_hash(unsigned slot, const FieldElement& value, const FieldElement& salt);

/// Issuer-committed attribute tree: binding pk at slot 0, attributes at
/// slots 1..; root carries a hash-based issuer tag checked against the
/// surveyor's registry.
struct Attestation {
    std::vector<Attribute> attributes;  // slot i+1
    FieldElement binding_pk;
    FieldElement binding_salt;
    unsigned depth = kDefaultTreeDepth;
    std::string issuer_id;
    FieldElement root;
    FieldElement issuer_tag;  // hash(issuer_key, root)

    std::vector<FieldElement> leaves() const;
    std::optional<unsigned> slot_of(const std::string& name) const;
};

Attestation issue(std::vector<Attribute> attributes, const FieldElement& binding_pk,
                  const FieldElement& binding_salt, const std::string& issuer_id,
                  const FieldElement& issuer_key, unsigned depth = kDefaultTreeDepth);

FieldElement merkle_root(const std::vector<FieldElement>& leaves, unsigned depth);

InclusionPath prove_leaf(const Attestation& att, const std::string& name);
InclusionPath prove_binding(const Attestation& att);

/// Native mirror of the in-circuit check: recompute the path from the leaf
/// hash and compare with the root.
bool verify_leaf(const FieldElement& root, const FieldElement& leaf, const InclusionPath& path);

}  // namespace dppoll
