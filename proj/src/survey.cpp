#include "dppoll/survey.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <sstream>

#include <json.hpp>

namespace dppoll {

namespace {

std::string mechanism_name(Mechanism m) {
    return m == Mechanism::RandomizedResponse ? "rr" : "exponential";
}
Mechanism mechanism_from(const std::string& s) {
    if (s == "rr") return Mechanism::RandomizedResponse;
    if (s == "exponential") return Mechanism::Exponential;
    throw InvalidParams("unknown mechanism: " + s);
}

std::string bundle_key(const ProofRequest& r) {
    std::ostringstream os;
    os << mechanism_name(r.config.mechanism) << "/" << r.config.depth;
    if (r.config.mechanism == Mechanism::Exponential) {
        const NoiseParams& p = r.config.params;
        os << "/" << numerator(p.epsilon) << "/" << denominator(p.epsilon) << "/" << p.lower
           << "/" << p.upper << "/" << p.d;
    }
    return os.str();
}

}  // namespace

FieldElement ProofRequest::params_commitment() const {
    return config.mechanism == Mechanism::RandomizedResponse
               ? rr_params_commitment()
               : noise_params_commitment(config.params);
}

ProofRequest create_request(const SurveyConfig& config) {
    if (config.survey_id.empty()) throw InvalidParams("survey id must be non-empty");
    if (config.attribute.empty()) throw InvalidParams("attribute name must be non-empty");
    if (config.mechanism == Mechanism::RandomizedResponse &&
        config.attribute_kind != AttributeKind::Binary)
        throw InvalidParams("randomized response requires a binary attribute");
    if (config.mechanism == Mechanism::Exponential) config.params.validate();
    return ProofRequest{config};
}

const BiasTable& bias_table_for(const NoiseParams& params) {
    static std::mutex mu;
    static std::map<std::string, BiasTable> cache;
    std::ostringstream os;
    os << numerator(params.epsilon) << "/" << denominator(params.epsilon) << "/" << params.lower
       << "/" << params.upper << "/" << params.d;
    std::scoped_lock lock(mu);
    auto it = cache.find(os.str());
    if (it == cache.end()) it = cache.emplace(os.str(), make_bias_table(params)).first;
    return it->second;
}

const CircuitBundle& bundle_for(const ProofRequest& request) {
    static std::mutex mu;
    static std::map<std::string, CircuitBundle> cache;
    std::string key = bundle_key(request);
    std::scoped_lock lock(mu);
    auto it = cache.find(key);
    if (it == cache.end()) {
        CircuitBundle bundle =
            request.config.mechanism == Mechanism::RandomizedResponse
                ? build_rr_circuit(request.config.depth)
                : build_noise_circuit(request.config.params,
                                      bias_table_for(request.config.params),
                                      request.config.depth);
        it = cache.emplace(key, std::move(bundle)).first;
    }
    return it->second;
}

SurveyResponse respond(const Attestation& att, const FieldElement& sk,
                       const ProofRequest& request) {
    const SurveyConfig& cfg = request.config;
    if (std::find(cfg.trusted_issuers.begin(), cfg.trusted_issuers.end(), att.issuer_id) ==
        cfg.trusted_issuers.end())
        throw UntrustedIssuer(att.issuer_id);
    auto slot = att.slot_of(cfg.attribute);
    if (!slot) throw AttributeMissing(cfg.attribute);
    const Attribute& attr = att.attributes[*slot - 1];
    if (att.depth != cfg.depth) throw WitnessFailure("attestation depth mismatch");

    BindingKeyPair kp = derive_keypair(sk);
    if (kp.pk != att.binding_pk)
        throw WitnessFailure("secret key does not match the credential binding");

    const CircuitBundle& bundle = bundle_for(request);
    CircuitInputs inputs;
    inputs.sk = sk;
    inputs.challenge = cfg.challenge;
    inputs.value = FieldElement((int)attr.value);
    inputs.pk = kp.pk;
    inputs.root = att.root;
    inputs.attr_slot = *slot;
    inputs.attr_salt = attr.salt;
    inputs.attr_path = prove_leaf(att, cfg.attribute);
    inputs.pk_salt = att.binding_salt;
    inputs.pk_path = prove_binding(att);

    Witness w;
    try {
        w = generate_witness(bundle, inputs);
    } catch (const InconsistentInputs& e) {
        throw WitnessFailure(e.what());
    }

    SurveyResponse resp;
    resp.survey_id = cfg.survey_id;
    resp.issuer_id = att.issuer_id;
    resp.issuer_tag = att.issuer_tag;
    resp.challenge = cfg.challenge;
    resp.pk = kp.pk;
    resp.root = att.root;
    resp.params_commit = bundle.params_commitment_value;
    resp.claimed_output = (long)extract_output(bundle, w).as_u64();
    resp.witness = w.values;
    return resp;
}

VerifyResult verify_response(const ProofRequest& request, const IssuerRegistry& registry,
                             const SurveyResponse& response) {
    const SurveyConfig& cfg = request.config;

    // (i) issuer authenticity
    if (std::find(cfg.trusted_issuers.begin(), cfg.trusted_issuers.end(), response.issuer_id) ==
        cfg.trusted_issuers.end())
        return {false, RejectReason::BadIssuer, 0};
    auto key = registry.keys.find(response.issuer_id);
    if (key == registry.keys.end()) return {false, RejectReason::BadIssuer, 0};
    if (hash_fields({key->second, response.root}) != response.issuer_tag)
        return {false, RejectReason::BadIssuer, 0};

    // (ii) public inputs match the request
    const CircuitBundle& bundle = bundle_for(request);
    if (response.survey_id != cfg.survey_id || response.challenge != cfg.challenge ||
        response.params_commit != bundle.params_commitment_value)
        return {false, RejectReason::PublicInputMismatch, 0};

    // (iii) transparent evidence: constraint satisfaction over the supplied
    // witness, with the declared publics wired into their signal slots
    const ConstraintSystem& cs = bundle.builder.system();
    if (response.witness.size() != cs.signal_count())
        return {false, RejectReason::UnsatisfiedConstraint, 0};
    if (response.witness[kOneSignal] != FieldElement(1))
        return {false, RejectReason::UnsatisfiedConstraint, 0};
    if (response.witness[bundle.challenge] != response.challenge ||
        response.witness[bundle.pk] != response.pk ||
        response.witness[bundle.root] != response.root ||
        response.witness[bundle.params_commit] != response.params_commit)
        return {false, RejectReason::PublicInputMismatch, 0};
    if (response.claimed_output < 0 ||
        response.witness[bundle.out] != FieldElement((int)response.claimed_output))
        return {false, RejectReason::OutputMismatch, 0};

    Witness w{response.witness};
    SatisfactionReport report = cs.is_satisfied(w);
    if (!report.satisfied)
        return {false, RejectReason::UnsatisfiedConstraint, report.failing_constraint};
    return {true, RejectReason::None, 0};
}

AggregateResult aggregate(const ProofRequest& request,
                          const std::vector<SurveyResponse>& responses) {
    const SurveyConfig& cfg = request.config;
    AggregateResult out;
    const bool rr = cfg.mechanism == Mechanism::RandomizedResponse;
    out.lower = rr ? 0 : cfg.params.lower;
    const long N = rr ? 2 : cfg.params.domain_size();
    out.histogram.assign((std::size_t)N, 0);

    std::set<std::string> seen_pks;
    double sum = 0;
    std::uint64_t yes = 0;
    for (const SurveyResponse& r : responses) {
        if (!seen_pks.insert(r.pk.to_hex()).second) {
            out.rejected += 1;  // pk deduplication
            continue;
        }
        out.accepted += 1;
        sum += (double)r.claimed_output;
        long bin = r.claimed_output - out.lower;
        if (bin >= 0 && bin < N) out.histogram[(std::size_t)bin] += 1;
        if (r.claimed_output == 1) yes += 1;
    }
    if (out.accepted > 0) {
        out.raw_mean = sum / (double)out.accepted;
        if (rr) out.debiased_proportion = rr_debias(yes, out.accepted);
    }
    return out;
}

// ---- JSON wire formats --------------------------------------------------

namespace {

using nlohmann::json;

void require_schema(const json& j) {
    if (!j.contains("schema_version") || j["schema_version"] != kSchemaVersion)
        throw InvalidParams("missing or unsupported schema_version");
}

json params_to_json(const NoiseParams& p) {
    return json{{"epsilon",
                 {{"num", numerator(p.epsilon).convert_to<std::int64_t>()},
                  {"den", denominator(p.epsilon).convert_to<std::int64_t>()}}},
                {"l", p.lower},
                {"u", p.upper},
                {"d", p.d}};
}

NoiseParams params_from_json(const json& j) {
    NoiseParams p;
    p.epsilon = Rational(BigInt(j.at("epsilon").at("num").get<std::int64_t>()),
                         BigInt(j.at("epsilon").at("den").get<std::int64_t>()));
    p.lower = j.at("l").get<long>();
    p.upper = j.at("u").get<long>();
    p.d = j.at("d").get<unsigned>();
    return p;
}

}  // namespace

std::string request_to_json(const ProofRequest& r) {
    const SurveyConfig& c = r.config;
    json j{{"schema_version", kSchemaVersion},
           {"survey_id", c.survey_id},
           {"mechanism", mechanism_name(c.mechanism)},
           {"attribute", c.attribute},
           {"attribute_kind", c.attribute_kind == AttributeKind::Binary ? "binary" : "numeric"},
           {"challenge", c.challenge.to_hex()},
           {"trusted_issuers", c.trusted_issuers},
           {"challenge_policy", c.policy == ChallengePolicy::Fixed ? "fixed" : "per-response"},
           {"depth", c.depth}};
    if (c.mechanism == Mechanism::Exponential) j["params"] = params_to_json(c.params);
    return j.dump();
}

ProofRequest request_from_json(const std::string& text) {
    json j = json::parse(text);
    require_schema(j);
    SurveyConfig c;
    c.survey_id = j.at("survey_id").get<std::string>();
    c.mechanism = mechanism_from(j.at("mechanism").get<std::string>());
    c.attribute = j.at("attribute").get<std::string>();
    c.attribute_kind = j.at("attribute_kind").get<std::string>() == "binary"
                           ? AttributeKind::Binary
                           : AttributeKind::Numeric;
    c.challenge = FieldElement::from_hex(j.at("challenge").get<std::string>());
    c.trusted_issuers = j.at("trusted_issuers").get<std::vector<std::string>>();
    c.policy = j.at("challenge_policy").get<std::string>() == "fixed"
                   ? ChallengePolicy::Fixed
                   : ChallengePolicy::PerResponse;
    c.depth = j.at("depth").get<unsigned>();
    if (c.mechanism == Mechanism::Exponential) c.params = params_from_json(j.at("params"));
    return create_request(c);
}

std::string response_to_json(const SurveyResponse& r) {
    json witness = json::array();
    for (const FieldElement& w : r.witness) witness.push_back(w.to_hex());
    json j{{"schema_version", kSchemaVersion},
           {"survey_id", r.survey_id},
           {"issuer_id", r.issuer_id},
           {"issuer_tag", r.issuer_tag.to_hex()},
           {"public_inputs",
            {{"challenge", r.challenge.to_hex()},
             {"pk", r.pk.to_hex()},
             {"root", r.root.to_hex()},
             {"params_commitment", r.params_commit.to_hex()}}},
           {"claimed_output", r.claimed_output},
           {"evidence", {{"type", "transparent"}, {"witness", std::move(witness)}}}};
    return j.dump();
}

SurveyResponse response_from_json(const std::string& text) {
    json j = json::parse(text);
    require_schema(j);
    SurveyResponse r;
    r.survey_id = j.at("survey_id").get<std::string>();
    r.issuer_id = j.at("issuer_id").get<std::string>();
    r.issuer_tag = FieldElement::from_hex(j.at("issuer_tag").get<std::string>());
    const json& pi = j.at("public_inputs");
    r.challenge = FieldElement::from_hex(pi.at("challenge").get<std::string>());
    r.pk = FieldElement::from_hex(pi.at("pk").get<std::string>());
    r.root = FieldElement::from_hex(pi.at("root").get<std::string>());
    r.params_commit = FieldElement::from_hex(pi.at("params_commitment").get<std::string>());
    r.claimed_output = j.at("claimed_output").get<long>();
    const json& ev = j.at("evidence");
    if (ev.at("type") != "transparent") throw InvalidParams("unknown evidence type");
    for (const auto& w : ev.at("witness")) {
        r.witness.push_back(FieldElement::from_hex(w.get<std::string>()));
    }
    return r;
}

std::string attestation_to_json(const Attestation& a) {
    json attrs = json::array();
    for (const Attribute& at : a.attributes) {
        attrs.push_back({{"name", at.name}, {"value", at.value}, {"salt", at.salt.to_hex()}});
    }
    json j{{"schema_version", kSchemaVersion},
           {"issuer_id", a.issuer_id},
           {"depth", a.depth},
           {"binding", {{"pk", a.binding_pk.to_hex()}, {"salt", a.binding_salt.to_hex()}}},
           {"attributes", std::move(attrs)},
           {"root", a.root.to_hex()},
           {"issuer_tag", a.issuer_tag.to_hex()}};
    return j.dump();
}

Attestation attestation_from_json(const std::string& text) {
    json j = json::parse(text);
    require_schema(j);
    Attestation a;
    a.issuer_id = j.at("issuer_id").get<std::string>();
    a.depth = j.at("depth").get<unsigned>();
    a.binding_pk = FieldElement::from_hex(j.at("binding").at("pk").get<std::string>());
    a.binding_salt = FieldElement::from_hex(j.at("binding").at("salt").get<std::string>());
    for (const auto& at : j.at("attributes")) {
        a.attributes.push_back({at.at("name").get<std::string>(), at.at("value").get<long>(),
                                FieldElement::from_hex(at.at("salt").get<std::string>())});
    }
    a.root = FieldElement::from_hex(j.at("root").get<std::string>());
    a.issuer_tag = FieldElement::from_hex(j.at("issuer_tag").get<std::string>());
    return a;
}

std::string registry_to_json(const IssuerRegistry& r) {
    json issuers = json::object();
    for (const auto& [id, key] : r.keys) issuers[id] = key.to_hex();
    return json{{"schema_version", kSchemaVersion}, {"issuers", std::move(issuers)}}.dump();
}

IssuerRegistry registry_from_json(const std::string& text) {
    json j = json::parse(text);
    require_schema(j);
    IssuerRegistry r;
    for (const auto& [id, key] : j.at("issuers").items()) {
        r.keys[id] = FieldElement::from_hex(key.get<std::string>());
    }
    return r;
}

}  // namespace dppoll
