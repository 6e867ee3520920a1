// dppoll: verifiable locally-private polling over files and streams.
//
// Exit codes: 0 accept/success, 1 reject, 2 usage or input error.

#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dppoll/stats.hpp"
#include "dppoll/survey.hpp"

namespace {

using namespace dppoll;
using nlohmann::json;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

void write_or_print(const std::optional<std::string>& path, const std::string& text) {
    if (path)
        spill(*path, text);
    else
        std::cout << text << "\n";
}

FieldElement random_element(std::mt19937_64& rng) {
    std::vector<bool> bits(253);
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = rng() & 1;
    return FieldElement::from_bits(bits);
}

NoiseParams params_from_config(const json& j) {
    NoiseParams p;
    const json& eps = j.at("epsilon");
    if (eps.is_number_integer())
        p.epsilon = Rational(eps.get<std::int64_t>());
    else
        p.epsilon = Rational(BigInt(eps.at("num").get<std::int64_t>()),
                             BigInt(eps.at("den").get<std::int64_t>()));
    p.lower = j.at("l").get<long>();
    p.upper = j.at("u").get<long>();
    p.d = j.value("d", 20u);
    return p;
}

std::vector<SurveyResponse> read_responses(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<SurveyResponse> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(response_from_json(line));
    }
    return out;
}

int cmd_keygen(const std::optional<std::string>& out_path, std::optional<std::uint64_t> seed) {
    std::mt19937_64 rng(seed ? *seed : std::random_device{}());
    BindingKeyPair kp = derive_keypair(random_element(rng));
    json j{{"schema_version", kSchemaVersion}, {"sk", kp.sk.to_hex()}, {"pk", kp.pk.to_hex()}};
    write_or_print(out_path, j.dump());
    return 0;
}

int cmd_issue(const std::string& config_path, const std::optional<std::string>& out_path) {
    json cfg = json::parse(slurp(config_path));
    std::mt19937_64 rng(cfg.value("salt_seed", (std::uint64_t)std::random_device{}()));

    std::vector<Attribute> attrs;
    for (const auto& a : cfg.at("attributes")) {
        FieldElement salt = a.contains("salt") ? FieldElement::from_hex(a["salt"].get<std::string>())
                                               : random_element(rng);
        attrs.push_back({a.at("name").get<std::string>(), a.at("value").get<long>(), salt});
    }
    FieldElement binding_salt = cfg.contains("binding_salt")
                                    ? FieldElement::from_hex(cfg["binding_salt"].get<std::string>())
                                    : random_element(rng);
    Attestation att = issue(std::move(attrs),
                            FieldElement::from_hex(cfg.at("binding_pk").get<std::string>()),
                            binding_salt, cfg.at("issuer_id").get<std::string>(),
                            FieldElement::from_hex(cfg.at("issuer_key").get<std::string>()),
                            cfg.value("depth", kDefaultTreeDepth));
    write_or_print(out_path, attestation_to_json(att));
    return 0;
}

int cmd_request(const std::string& config_path, const std::optional<std::string>& out_path) {
    json cfg = json::parse(slurp(config_path));
    SurveyConfig c;
    c.survey_id = cfg.at("survey_id").get<std::string>();
    std::string mech = cfg.at("mechanism").get<std::string>();
    if (mech == "rr")
        c.mechanism = Mechanism::RandomizedResponse;
    else if (mech == "exponential")
        c.mechanism = Mechanism::Exponential;
    else
        throw std::runtime_error("unknown mechanism: " + mech);
    c.attribute = cfg.at("attribute").get<std::string>();
    c.attribute_kind =
        cfg.value("attribute_kind", std::string("binary")) == "binary" ? AttributeKind::Binary
                                                                       : AttributeKind::Numeric;
    c.challenge = FieldElement::from_hex(cfg.at("challenge").get<std::string>());
    c.trusted_issuers = cfg.at("trusted_issuers").get<std::vector<std::string>>();
    if (cfg.value("challenge_policy", std::string("fixed")) == "per-response")
        c.policy = ChallengePolicy::PerResponse;
    c.depth = cfg.value("depth", kDefaultTreeDepth);
    if (c.mechanism == Mechanism::Exponential) c.params = params_from_config(cfg.at("params"));
    write_or_print(out_path, request_to_json(create_request(c)));
    return 0;
}

int cmd_respond(const std::string& request_path, const std::string& attestation_path,
                const std::string& key_path, const std::optional<std::string>& out_path) {
    ProofRequest req = request_from_json(slurp(request_path));
    Attestation att = attestation_from_json(slurp(attestation_path));
    json key = json::parse(slurp(key_path));
    FieldElement sk = FieldElement::from_hex(key.at("sk").get<std::string>());
    write_or_print(out_path, response_to_json(respond(att, sk, req)));
    return 0;
}

int cmd_verify(const std::string& request_path, const std::string& registry_path,
               const std::string& response_path) {
    ProofRequest req = request_from_json(slurp(request_path));
    IssuerRegistry reg = registry_from_json(slurp(registry_path));
    std::vector<SurveyResponse> responses = read_responses(response_path);
    bool all_ok = !responses.empty();
    for (std::size_t i = 0; i < responses.size(); ++i) {
        VerifyResult r = verify_response(req, reg, responses[i]);
        json line{{"index", i}, {"accepted", r.accepted}};
        if (!r.accepted) {
            static const char* names[] = {"none", "bad-issuer", "public-input-mismatch",
                                          "unsatisfied-constraint", "output-mismatch"};
            line["reason"] = names[(int)r.reason];
            if (r.reason == RejectReason::UnsatisfiedConstraint)
                line["failing_constraint"] = r.failing_constraint;
            all_ok = false;
        }
        std::cout << line.dump() << "\n";
    }
    return all_ok ? 0 : 1;
}

int cmd_aggregate(const std::string& request_path, const std::string& registry_path,
                  const std::string& response_path, const std::optional<std::string>& out_path,
                  const std::optional<std::string>& csv_path) {
    ProofRequest req = request_from_json(slurp(request_path));
    IssuerRegistry reg = registry_from_json(slurp(registry_path));

    std::vector<SurveyResponse> accepted;
    std::uint64_t rejected = 0;
    for (const SurveyResponse& r : read_responses(response_path)) {
        if (verify_response(req, reg, r).accepted)
            accepted.push_back(r);
        else
            rejected += 1;
    }
    AggregateResult agg = aggregate(req, accepted);
    agg.rejected += rejected;

    json j{{"schema_version", kSchemaVersion},
           {"accepted", agg.accepted},
           {"rejected", agg.rejected},
           {"raw_mean", agg.raw_mean},
           {"histogram", agg.histogram},
           {"lower", agg.lower}};
    if (agg.debiased_proportion) j["debiased_proportion"] = *agg.debiased_proportion;
    write_or_print(out_path, j.dump());

    if (csv_path) {
        std::ofstream csv(*csv_path);
        if (!csv) throw std::runtime_error("cannot write " + *csv_path);
        emit_histogram_csv(csv, agg.histogram, agg.lower);
    }
    return 0;
}

std::vector<std::uint64_t> read_counts(const std::string& path, const NoiseParams& p) {
    // "value,count" rows (header optional); missing values count zero
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::uint64_t> counts((std::size_t)p.domain_size(), 0);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        long value;
        char comma;
        std::uint64_t count;
        if (!(ls >> value >> comma >> count)) continue;  // skips a header row
        long bin = value - p.lower;
        if (bin < 0 || bin >= p.domain_size())
            throw std::runtime_error("sample value out of [l, u): " + std::to_string(value));
        counts[(std::size_t)bin] = count;
    }
    return counts;
}

int cmd_stats(const std::string& config_path, long v, bool exact, bool dp_check,
              const std::optional<std::string>& chi2_path,
              const std::optional<std::string>& csv_path, std::uint64_t sample_n,
              std::uint64_t seed, const std::optional<std::string>& out_path) {
    json cfg = json::parse(slurp(config_path));
    NoiseParams params = params_from_config(cfg.contains("params") ? cfg.at("params") : cfg);
    params.validate();
    const BiasTable& table = bias_table_for(params);

    json report{{"schema_version", kSchemaVersion},
                {"l", params.lower},
                {"u", params.upper},
                {"d", params.d},
                {"v", v}};

    DeltaLedger ledger = delta_ledger(params, table);
    auto rat = [](const Rational& r) {
        return json{{"num", numerator(r).str()}, {"den", denominator(r).str()},
                    {"approx", r.convert_to<double>()}};
    };
    report["delta_ledger"] = json{{"base", rat(ledger.base)},
                                  {"tail", rat(ledger.tail)},
                                  {"mixing", rat(ledger.mixing)},
                                  {"truncation", rat(ledger.truncation)},
                                  {"total", rat(ledger.total)}};

    std::optional<ExactDistribution> dist;
    if (exact || chi2_path || csv_path) dist = exact_distribution(v, params, table);

    if (exact) {
        report["exact"] = json{{"argmax", dist->argmax()},
                               {"mass_at_v", dist->at(v).convert_to<double>()}};
    }
    if (dp_check) {
        DpCheckReport dp = dp_ratio_check(params, table, params.epsilon);
        report["dp_check"] = json{{"delta_emp", rat(dp.delta_emp)},
                                  {"e_eps_lower", rat(dp.e_eps_lower)},
                                  {"worst_v", dp.worst_v},
                                  {"worst_v_prime", dp.worst_v_prime},
                                  {"worst_pointwise_ratio", dp.worst_pointwise_ratio},
                                  {"within_ledger", dp.delta_emp <= ledger.total}};
    }
    if (chi2_path) {
        std::vector<std::uint64_t> counts =
            sample_n > 0 ? sample_histogram(v, params, table, sample_n, seed)
                         : read_counts(*chi2_path, params);
        if (sample_n > 0) {
            std::ofstream csv(*chi2_path);
            emit_histogram_csv(csv, counts, params.lower);
        }
        report["chi2"] = json{{"p_value", chi_square_fit(counts, *dist)},
                              {"samples", sample_n > 0 ? sample_n
                                                       : std::accumulate(counts.begin(),
                                                                         counts.end(),
                                                                         std::uint64_t{0})}};
    }
    if (csv_path) {
        if (sample_n > 0 && !chi2_path) {
            std::ofstream csv(*csv_path);
            emit_histogram_csv(csv, sample_histogram(v, params, table, sample_n, seed),
                               params.lower);
        } else {
            std::ofstream csv(*csv_path);
            emit_histogram_csv(csv, *dist);
        }
    }
    write_or_print(out_path, report.dump(2));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verifiable locally-private polling toolkit"};
    app.require_subcommand(1);

    std::optional<std::string> out_path, csv_path, chi2_path;
    std::string config_path, request_path, attestation_path, key_path, registry_path,
        response_path;
    std::optional<std::uint64_t> keygen_seed;
    long stats_v = 0;
    bool stats_exact = false, stats_dp = false;
    std::uint64_t stats_sample = 0, stats_seed = 1;

    auto* keygen = app.add_subcommand("keygen", "generate a binding key pair");
    keygen->add_option("--out", out_path, "output JSON file (default stdout)");
    keygen->add_option("--seed", keygen_seed, "deterministic seed (testing only)");

    auto* issue = app.add_subcommand("issue", "issue an attribute attestation");
    issue->add_option("--config", config_path, "issuer config JSON")->required();
    issue->add_option("--out", out_path, "attestation JSON file");

    auto* request = app.add_subcommand("request", "create a survey proof request");
    request->add_option("--config", config_path, "survey config JSON")->required();
    request->add_option("--out", out_path, "request JSON file");

    auto* respond = app.add_subcommand("respond", "answer a proof request");
    respond->add_option("--request", request_path, "request JSON")->required();
    respond->add_option("--attestation", attestation_path, "attestation JSON")->required();
    respond->add_option("--key", key_path, "key pair JSON (from keygen)")->required();
    respond->add_option("--out", out_path, "response JSON file");

    auto* verify = app.add_subcommand("verify", "verify responses (exit 1 on any reject)");
    verify->add_option("--request", request_path, "request JSON")->required();
    verify->add_option("--registry", registry_path, "issuer registry JSON")->required();
    verify->add_option("--responses", response_path, "JSON-lines responses")->required();

    auto* aggregate = app.add_subcommand("aggregate", "verify and aggregate responses");
    aggregate->add_option("--request", request_path, "request JSON")->required();
    aggregate->add_option("--registry", registry_path, "issuer registry JSON")->required();
    aggregate->add_option("--responses", response_path, "JSON-lines responses")->required();
    aggregate->add_option("--out", out_path, "aggregate report JSON");
    aggregate->add_option("--histogram-csv", csv_path, "value,count CSV output");

    auto* stats = app.add_subcommand("stats", "analytic validation of the noise mechanism");
    stats->add_option("--config", config_path, "noise params JSON")->required();
    stats->add_option("--v", stats_v, "truthful input value");
    stats->add_flag("--exact", stats_exact, "report exact-distribution summary");
    stats->add_flag("--dp-check", stats_dp, "all-pairs (eps, delta) check");
    stats->add_option("--chi2", chi2_path, "value,count CSV of empirical samples");
    stats->add_option("--sample", stats_sample, "draw N Monte-Carlo samples instead of reading");
    stats->add_option("--seed", stats_seed, "Monte-Carlo seed");
    stats->add_option("--histogram-csv", csv_path, "exact-distribution CSV output");
    stats->add_option("--out", out_path, "JSON report file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (keygen->parsed()) return cmd_keygen(out_path, keygen_seed);
        if (issue->parsed()) return cmd_issue(config_path, out_path);
        if (request->parsed()) return cmd_request(config_path, out_path);
        if (respond->parsed())
            return cmd_respond(request_path, attestation_path, key_path, out_path);
        if (verify->parsed()) return cmd_verify(request_path, registry_path, response_path);
        if (aggregate->parsed())
            return cmd_aggregate(request_path, registry_path, response_path, out_path, csv_path);
        if (stats->parsed())
            return cmd_stats(config_path, stats_v, stats_exact, stats_dp, chi2_path, csv_path,
                             stats_sample, stats_seed, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
