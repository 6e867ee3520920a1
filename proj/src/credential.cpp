#include "dppoll/credential.hpp"

namespace dppoll {

FieldElement leaf_hash(unsigned slot, const FieldElement& value, const FieldElement& salt) {
    return hash_fields({FieldElement((std::uint64_t)slot), value, salt});
}

std::vector<FieldElement> Attestation::leaves() const {
    std::size_t count = (std::size_t)1 << depth;
    std::vector<FieldElement> out(count, FieldElement());
    out[kBindingSlot] = leaf_hash(kBindingSlot, binding_pk, binding_salt);
    for (std::size_t i = 0; i < attributes.size(); ++i) {
        unsigned slot = (unsigned)i + 1;
        out[slot] = leaf_hash(slot, FieldElement((int)attributes[i].value), attributes[i].salt);
    }
    return out;
}

std::optional<unsigned> Attestation::slot_of(const std::string& name) const {
    for (std::size_t i = 0; i < attributes.size(); ++i) {
        if (attributes[i].name == name) return (unsigned)i + 1;
    }
    return std::nullopt;
}

FieldElement merkle_root(const std::vector<FieldElement>& leaves, unsigned depth) {
    std::vector<FieldElement> level = leaves;
    level.resize((std::size_t)1 << depth, FieldElement());
    for (unsigned lvl = 0; lvl < depth; ++lvl) {
        std::vector<FieldElement> next(level.size() / 2);
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] = hash_fields({level[2 * i], level[2 * i + 1]});
        }
        level = std::move(next);
    }
    return level[0];
}

Attestation issue(std::vector<Attribute> attributes, const FieldElement& binding_pk,
                  const FieldElement& binding_salt, const std::string& issuer_id,
                  const FieldElement& issuer_key, unsigned depth) {
    if (attributes.size() > ((std::size_t)1 << depth) - 1) throw CapacityExceeded();
    Attestation att;
    att.attributes = std::move(attributes);
    att.binding_pk = binding_pk;
    att.binding_salt = binding_salt;
    att.depth = depth;
    att.issuer_id = issuer_id;
    att.root = merkle_root(att.leaves(), depth);
    att.issuer_tag = hash_fields({issuer_key, att.root});
    return att;
}

namespace {

InclusionPath path_for(const Attestation& att, unsigned slot) {
    std::vector<FieldElement> level = att.leaves();
    InclusionPath path;
    path.leaf_index = slot;
    unsigned idx = slot;
    for (unsigned lvl = 0; lvl < att.depth; ++lvl) {
        bool is_right = idx & 1;
        path.directions.push_back(is_right);
        path.siblings.push_back(level[idx ^ 1]);
        std::vector<FieldElement> next(level.size() / 2);
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] = hash_fields({level[2 * i], level[2 * i + 1]});
        }
        level = std::move(next);
        idx >>= 1;
    }
    return path;
}

}  // namespace

InclusionPath prove_leaf(const Attestation& att, const std::string& name) {
    auto slot = att.slot_of(name);
    if (!slot) throw UnknownAttribute(name);
    return path_for(att, *slot);
}

InclusionPath prove_binding(const Attestation& att) { return path_for(att, kBindingSlot); }

bool verify_leaf(const FieldElement& root, const FieldElement& leaf, const InclusionPath& path) {
    if (path.siblings.size() != path.directions.size()) return false;
    FieldElement cur = leaf;
    for (std::size_t i = 0; i < path.siblings.size(); ++i) {
        cur = path.directions[i] ? hash_fields({path.siblings[i], cur})
                                 : hash_fields({cur, path.siblings[i]});
    }
    return cur == root;
}

}  // namespace dppoll
