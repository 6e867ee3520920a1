#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dppoll/circuits.hpp"
#include "dppoll/credential.hpp"
#include "dppoll/dp.hpp"

namespace dppoll {

inline constexpr const char* kSchemaVersion = "1";

struct AttributeMissing : std::runtime_error {
    explicit AttributeMissing(const std::string& name)
        : std::runtime_error("requested attribute not in attestation: " + name) {}
};
struct UntrustedIssuer : std::runtime_error {
    explicit UntrustedIssuer(const std::string& id)
        : std::runtime_error("issuer not in the request's trusted set: " + id) {}
};
struct WitnessFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Mechanism { RandomizedResponse, Exponential };
enum class AttributeKind { Binary, Numeric };
enum class ChallengePolicy { Fixed, PerResponse };

struct SurveyConfig {
    std::string survey_id;
    Mechanism mechanism = Mechanism::RandomizedResponse;
    AttributeKind attribute_kind = AttributeKind::Binary;
    std::string attribute;
    FieldElement challenge;
    NoiseParams params;  // used by the exponential mechanism
    std::vector<std::string> trusted_issuers;
    ChallengePolicy policy = ChallengePolicy::Fixed;
    unsigned depth = kDefaultTreeDepth;
};

struct ProofRequest {
    SurveyConfig config;
    FieldElement params_commitment() const;
};

ProofRequest create_request(const SurveyConfig& config);

struct SurveyResponse {
    std::string survey_id;
    std::string issuer_id;
    FieldElement issuer_tag;
    // public inputs, in circuit order
    FieldElement challenge, pk, root, params_commit;
    long claimed_output = 0;
    std::vector<FieldElement> witness;  // transparent evidence: full witness
};

/// Surveyor-held issuer trust anchors: issuer id -> shared MAC key whose
/// hash tag over the root authenticates an attestation.
struct IssuerRegistry {
    std::map<std::string, FieldElement> keys;
};

SurveyResponse respond(const Attestation& att, const FieldElement& sk,
                       const ProofRequest& request);

enum class RejectReason {
    None,
    BadIssuer,
    PublicInputMismatch,
    UnsatisfiedConstraint,
    OutputMismatch,
};

struct VerifyResult {
    bool accepted = false;
    RejectReason reason = RejectReason::None;
    std::size_t failing_constraint = 0;  // when reason = UnsatisfiedConstraint
};

VerifyResult verify_response(const ProofRequest& request, const IssuerRegistry& registry,
                             const SurveyResponse& response);

struct AggregateResult {
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;  // pk duplicates among previously accepted responses
    double raw_mean = 0.0;
    std::optional<double> debiased_proportion;  // randomized response only
    std::vector<std::uint64_t> histogram;       // unit bins over [l, u)
    long lower = 0;
};

/// Responses must have been accepted by verify_response; duplicate pks are
/// dropped (first response wins).
AggregateResult aggregate(const ProofRequest& request, const std::vector<SurveyResponse>& responses);

/// Cached circuit for a request (bundles are immutable once built).
const CircuitBundle& bundle_for(const ProofRequest& request);
const BiasTable& bias_table_for(const NoiseParams& params);

// ---- JSON wire formats (hex field elements, schema_version mandatory) ----

std::string request_to_json(const ProofRequest& r);
ProofRequest request_from_json(const std::string& text);
std::string response_to_json(const SurveyResponse& r);
SurveyResponse response_from_json(const std::string& text);
std::string attestation_to_json(const Attestation& a);
Attestation attestation_from_json(const std::string& text);
std::string registry_to_json(const IssuerRegistry& r);
IssuerRegistry registry_from_json(const std::string& text);

}  // namespace dppoll
