#include "mpgame/transcript.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mpgame/errors.hpp"

namespace mpgame {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json real_json(const HPReal& x) {
    return ordered_json{{"dec", x.to_decimal()}, {"prec", static_cast<long>(x.prec())}};
}

HPReal real_from(const ordered_json& j) {
    if (!j.is_object() || !j.contains("dec") || !j.contains("prec"))
        throw DomainError("malformed real value in JSON");
    return HPReal::from_decimal(j.at("dec").get<std::string>(),
                                static_cast<mpfr_prec_t>(j.at("prec").get<long>()));
}

ordered_json interval_json(const ClosedInterval& iv) {
    return ordered_json::array({real_json(iv.left), real_json(iv.right)});
}

ClosedInterval interval_from(const ordered_json& j) {
    if (!j.is_array() || j.size() != 2) throw DomainError("malformed interval in JSON");
    return ClosedInterval(real_from(j.at(0)), real_from(j.at(1)));
}

const char* case_name(CaseTag tag) {
    switch (tag) {
        case CaseTag::case1: return "case1";
        case CaseTag::case2: return "case2";
        default: return "none";
    }
}

CaseTag case_from(const std::string& name) {
    if (name == "case1") return CaseTag::case1;
    if (name == "case2") return CaseTag::case2;
    return CaseTag::none;
}

}  // namespace

std::string transcript_to_json(const Transcript& t) {
    ordered_json j;
    j["format"] = "mpgame-transcript-1";
    j["config"] = {
        {"alpha", real_json(t.config.alpha)},
        {"beta", real_json(t.config.beta)},
        {"variant", t.config.variant == Variant::classic ? "classic" : "strong"},
        {"max_rounds", t.config.max_rounds},
        {"prec_bits", static_cast<long>(t.config.prec_bits)},
        {"field", interval_json(t.config.field)},
    };
    j["alice"] = t.alice_kind;
    j["bob"] = t.bob_kind;
    j["bob_seed"] = t.bob_seed;
    j["gamma"] = real_json(t.gamma);
    j["C5_hat"] = real_json(t.C5_hat);
    j["C2_hat"] = real_json(t.C2_hat);
    j["d1"] = real_json(t.d1);
    j["d2"] = real_json(t.d2);
    j["K_target"] = t.K_target;
    j["M"] = t.M;
    j["lift_n"] = t.lift_n;
    j["status"] = t.status;

    ordered_json cps = ordered_json::array();
    for (const auto& c : t.checkpoints)
        cps.push_back({{"j", c.j},
                       {"n", c.n_j},
                       {"g", c.g_j},
                       {"case", case_name(c.tag)},
                       {"subcase", c.subcase}});
    j["checkpoints"] = std::move(cps);

    ordered_json hist = ordered_json::array();
    for (const auto& iv : t.history) hist.push_back(interval_json(iv));
    j["history"] = std::move(hist);

    return j.dump(2) + "\n";
}

Transcript transcript_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw DomainError(std::string("transcript parse error: ") + e.what());
    }
    if (!j.is_object() || j.value("format", "") != "mpgame-transcript-1")
        throw DomainError("not a transcript document");

    try {
        const auto& jc = j.at("config");
        GameConfig config{real_from(jc.at("alpha")),
                          real_from(jc.at("beta")),
                          jc.at("variant").get<std::string>() == "classic" ? Variant::classic
                                                                           : Variant::strong,
                          jc.at("max_rounds").get<long>(),
                          static_cast<mpfr_prec_t>(jc.at("prec_bits").get<long>()),
                          interval_from(jc.at("field"))};

        Transcript t{.config = config};
        t.alice_kind = j.at("alice").get<std::string>();
        t.bob_kind = j.at("bob").get<std::string>();
        t.bob_seed = j.at("bob_seed").get<std::uint64_t>();
        t.gamma = real_from(j.at("gamma"));
        t.C5_hat = real_from(j.at("C5_hat"));
        t.C2_hat = real_from(j.at("C2_hat"));
        t.d1 = real_from(j.at("d1"));
        t.d2 = real_from(j.at("d2"));
        t.K_target = j.at("K_target").get<long>();
        t.M = j.at("M").get<long>();
        t.lift_n = j.at("lift_n").get<long>();
        t.status = j.at("status").get<std::string>();

        for (const auto& jc2 : j.at("checkpoints"))
            t.checkpoints.push_back({jc2.at("j").get<long>(), jc2.at("n").get<long>(),
                                     jc2.at("g").get<long>(),
                                     case_from(jc2.at("case").get<std::string>()),
                                     jc2.at("subcase").get<int>()});

        for (const auto& ji : j.at("history")) t.history.push_back(interval_from(ji));
        if (t.history.empty()) throw DomainError("transcript has no history");
        return t;
    } catch (const ordered_json::exception& e) {
        throw DomainError(std::string("transcript field error: ") + e.what());
    }
}

void save_transcript(const Transcript& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open '" + path + "' for writing");
    out << transcript_to_json(t);
    if (!out) throw DomainError("write to '" + path + "' failed");
}

Transcript load_transcript(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return transcript_from_json(buf.str());
}

std::string bob_script_json(const std::vector<ClosedInterval>& moves) {
    ordered_json j = ordered_json::array();
    for (const auto& iv : moves) j.push_back(interval_json(iv));
    return j.dump(2) + "\n";
}

std::vector<ClosedInterval> parse_bob_script(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw DomainError(std::string("bob script parse error: ") + e.what());
    }
    if (!j.is_array()) throw DomainError("bob script must be a JSON list of endpoint pairs");
    std::vector<ClosedInterval> moves;
    for (const auto& ji : j) moves.push_back(interval_from(ji));
    return moves;
}

std::string audit_report_json(const AuditReport& rep) {
    ordered_json j;
    j["pass"] = rep.pass();
    ordered_json rows = ordered_json::array();
    for (const auto& c : rep.checkpoints)
        rows.push_back({{"j", c.j},
                        {"P1", c.P1},
                        {"P2", c.P2},
                        {"P3", c.P3},
                        {"note", c.note}});
    j["checkpoints"] = std::move(rows);
    return j.dump(2) + "\n";
}

std::string avoidance_report_json(const AvoidanceReport& rep) {
    ordered_json j;
    j["kind"] = rep.kind;
    j["status"] = rep.status;
    j["verified_t"] = rep.verified_t;
    j["symbols"] = rep.symbols;
    j["note"] = rep.note;
    return j.dump(2) + "\n";
}

}  // namespace mpgame
