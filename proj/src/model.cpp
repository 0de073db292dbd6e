#include "kerrj/model.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace kerrj {

const char* envelope_name(Envelope e) {
    switch (e) {
    case Envelope::Monochromatic: return "mono";
    case Envelope::UncorrelatedGaussian: return "uncorr_gauss";
    case Envelope::CorrelatedGaussian: return "corr_gauss";
    }
    return "?";
}

Envelope parse_envelope(const std::string& s) {
    if (s == "mono") return Envelope::Monochromatic;
    if (s == "uncorr_gauss") return Envelope::UncorrelatedGaussian;
    if (s == "corr_gauss") return Envelope::CorrelatedGaussian;
    throw Error(ErrorKind::Config, "BadEnvelope", "unknown envelope '" + s + "'");
}

std::vector<Issue> check(const CavityParams& c, const PulseSpec& p) {
    std::vector<Issue> out;
    const bool finite = std::isfinite(c.omega_c) && std::isfinite(c.u) && std::isfinite(c.gamma_L) &&
                        std::isfinite(c.gamma_R) && std::isfinite(p.omega_0) && std::isfinite(p.b.real()) &&
                        std::isfinite(p.b.imag()) && !std::isnan(p.tau);
    if (!finite) out.push_back({"NonFiniteInput", "all parameters must be finite (tau may be +inf)"});
    if (c.gamma_L < 0) out.push_back({"NegativeCoupling", "gamma_L < 0"});
    if (c.gamma_R < 0) out.push_back({"NegativeCoupling", "gamma_R < 0"});
    if (!(c.gamma() > 0)) out.push_back({"NonPositiveGamma", "gamma = (gamma_L + gamma_R)/2 must be > 0"});
    if (p.envelope != Envelope::Monochromatic && !(p.tau > 0 && std::isfinite(p.tau)))
        out.push_back({"BadTau", "finite pulses need 0 < tau < inf"});
    if (p.envelope == Envelope::Monochromatic && !(p.tau > 0))
        out.push_back({"BadTau", "tau must be > 0 (or inf)"});
    return out;
}

Config validate(const CavityParams& c, const PulseSpec& p) {
    auto issues = check(c, p);
    if (!issues.empty()) throw Error(ErrorKind::Config, std::move(issues));
    return Config{c, p};
}

Config nondimensionalize(const Config& cfg, Units& units_out) {
    units_out = Units{cfg.cavity.gamma()};
    const Units& u = units_out;
    Config r = cfg;
    r.cavity.omega_c = u.to_dimless_freq(cfg.cavity.omega_c);
    r.cavity.u = u.to_dimless_freq(cfg.cavity.u);
    r.cavity.gamma_L = u.to_dimless_freq(cfg.cavity.gamma_L);
    r.cavity.gamma_R = u.to_dimless_freq(cfg.cavity.gamma_R);
    r.pulse.omega_0 = u.to_dimless_freq(cfg.pulse.omega_0);
    r.pulse.tau = u.to_dimless_time(cfg.pulse.tau);
    return r;
}

Config nondimensionalize(const Config& cfg) {
    Units u;
    return nondimensionalize(cfg, u);
}

Config redimensionalize(const Config& cfg, const Units& u) {
    Config r = cfg;
    r.cavity.omega_c = u.to_physical_freq(cfg.cavity.omega_c);
    r.cavity.u = u.to_physical_freq(cfg.cavity.u);
    r.cavity.gamma_L = u.to_physical_freq(cfg.cavity.gamma_L);
    r.cavity.gamma_R = u.to_physical_freq(cfg.cavity.gamma_R);
    r.pulse.omega_0 = u.to_physical_freq(cfg.pulse.omega_0);
    r.pulse.tau = u.to_physical_time(cfg.pulse.tau);
    return r;
}

namespace {

using nlohmann::json;

double number_field(const json& j, const char* key, std::vector<Issue>& issues, double fallback,
                    bool required) {
    auto it = j.find(key);
    if (it == j.end()) {
        if (required) issues.push_back({"MissingKey", std::string("missing key '") + key + "'"});
        return fallback;
    }
    if (!it->is_number()) {
        issues.push_back({"BadType", std::string("'") + key + "' must be a number"});
        return fallback;
    }
    return it->get<double>();
}

} // namespace

Config config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Config, "BadJson", e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::Config, "BadJson", "top level must be an object");

    static const std::set<std::string> known = {"omega_c", "u",   "gamma_L",  "gamma_R", "omega_0",
                                                "tau",     "envelope", "b_re", "b_im"};
    std::vector<Issue> issues;
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) issues.push_back({"UnknownKey", "unknown key '" + it.key() + "'"});

    CavityParams c;
    PulseSpec p;
    c.omega_c = number_field(j, "omega_c", issues, 0.0, true);
    c.u = number_field(j, "u", issues, 0.0, true);
    c.gamma_L = number_field(j, "gamma_L", issues, 1.0, true);
    c.gamma_R = number_field(j, "gamma_R", issues, 1.0, true);
    p.omega_0 = number_field(j, "omega_0", issues, 0.0, true);
    p.b = {number_field(j, "b_re", issues, 0.0, false), number_field(j, "b_im", issues, 0.0, false)};

    if (auto it = j.find("envelope"); it != j.end()) {
        if (!it->is_string()) {
            issues.push_back({"BadType", "'envelope' must be a string"});
        } else {
            try {
                p.envelope = parse_envelope(it->get<std::string>());
            } catch (const Error& e) {
                issues.push_back({e.code(), e.what()});
            }
        }
    }
    if (auto it = j.find("tau"); it != j.end()) {
        if (it->is_null() || (it->is_string() && it->get<std::string>() == "inf"))
            p.tau = std::numeric_limits<double>::infinity();
        else if (it->is_number())
            p.tau = it->get<double>();
        else
            issues.push_back({"BadType", "'tau' must be a number, null or \"inf\""});
    }
    if (!issues.empty()) throw Error(ErrorKind::Config, std::move(issues));
    return validate(c, p);
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "ReadFailed", "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

std::string config_to_json_text(const Config& cfg) {
    nlohmann::ordered_json j;
    j["omega_c"] = cfg.cavity.omega_c;
    j["u"] = cfg.cavity.u;
    j["gamma_L"] = cfg.cavity.gamma_L;
    j["gamma_R"] = cfg.cavity.gamma_R;
    j["omega_0"] = cfg.pulse.omega_0;
    if (std::isfinite(cfg.pulse.tau))
        j["tau"] = cfg.pulse.tau;
    else
        j["tau"] = "inf";
    j["envelope"] = envelope_name(cfg.pulse.envelope);
    j["b_re"] = cfg.pulse.b.real();
    j["b_im"] = cfg.pulse.b.imag();
    return j.dump();
}

} // namespace kerrj
