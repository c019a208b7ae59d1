#include "reins/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace reins {

namespace {

using nlohmann::json;

void require_known_keys(const json& obj, const std::string& section,
                        const std::set<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.count(it.key())) {
            const std::string path = section.empty() ? it.key() : section + "." + it.key();
            throw ConfigError("unknown configuration key: " + path, path);
        }
    }
}

double get_number(const json& obj, const std::string& section, const std::string& key,
                  double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number())
        throw ConfigError("expected a number at " + section + "." + key, section + "." + key);
    return v.get<double>();
}

int get_int(const json& obj, const std::string& section, const std::string& key, int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer())
        throw ConfigError("expected an integer at " + section + "." + key, section + "." + key);
    return v.get<int>();
}

bool get_bool(const json& obj, const std::string& section, const std::string& key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean())
        throw ConfigError("expected a boolean at " + section + "." + key, section + "." + key);
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& section, const std::string& key,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string())
        throw ConfigError("expected a string at " + section + "." + key, section + "." + key);
    return v.get<std::string>();
}

}  // namespace

ModelBundle parse_config_text(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what(), "");
    }
    if (!root.is_object()) throw ConfigError("configuration root must be an object", "");
    require_known_keys(root, "",
                       {"market", "insurer", "reinsurer", "claims", "numerics", "conventions"});

    ModelBundle b;

    if (root.contains("market")) {
        const json& m = root.at("market");
        require_known_keys(m, "market", {"r", "xi", "kappa", "delta", "sigma", "rho0", "T", "y0"});
        b.market.r = get_number(m, "market", "r", b.market.r);
        b.market.xi = get_number(m, "market", "xi", b.market.xi);
        b.market.kappa = get_number(m, "market", "kappa", b.market.kappa);
        b.market.delta = get_number(m, "market", "delta", b.market.delta);
        b.market.sigma = get_number(m, "market", "sigma", b.market.sigma);
        b.market.rho0 = get_number(m, "market", "rho0", b.market.rho0);
        b.market.T = get_number(m, "market", "T", b.market.T);
        // y0 tracks the long-run level unless given explicitly
        b.market.y0 = get_number(m, "market", "y0", m.contains("delta") ? b.market.delta
                                                                        : b.market.y0);
    }

    if (root.contains("insurer")) {
        const json& p = root.at("insurer");
        require_known_keys(p, "insurer", {"alpha", "gamma", "beta", "beta0", "betaY", "theta"});
        b.insurer.alpha = get_number(p, "insurer", "alpha", b.insurer.alpha);
        b.insurer.gamma = get_number(p, "insurer", "gamma", b.insurer.gamma);
        b.insurer.beta = get_number(p, "insurer", "beta", b.insurer.beta);
        b.insurer.beta0 = get_number(p, "insurer", "beta0", b.insurer.beta0);
        b.insurer.betaY = get_number(p, "insurer", "betaY", b.insurer.betaY);
        b.insurer.theta = get_number(p, "insurer", "theta", b.insurer.theta);
    }

    if (root.contains("reinsurer")) {
        const json& p = root.at("reinsurer");
        require_known_keys(p, "reinsurer", {"alphaR", "gammaR", "betaR", "betaR0", "betaRY"});
        b.reinsurer.alphaR = get_number(p, "reinsurer", "alphaR", b.reinsurer.alphaR);
        b.reinsurer.gammaR = get_number(p, "reinsurer", "gammaR", b.reinsurer.gammaR);
        b.reinsurer.betaR = get_number(p, "reinsurer", "betaR", b.reinsurer.betaR);
        b.reinsurer.betaR0 = get_number(p, "reinsurer", "betaR0", b.reinsurer.betaR0);
        b.reinsurer.betaRY = get_number(p, "reinsurer", "betaRY", b.reinsurer.betaRY);
    }

    if (root.contains("claims")) {
        const json& c = root.at("claims");
        require_known_keys(c, "claims", {"type", "lambda0", "lambda", "atoms"});
        const std::string type = get_string(c, "claims", "type", "rayleigh");
        if (type == "rayleigh") {
            if (c.contains("atoms"))
                throw ConfigError("claims.atoms is only valid for type \"discrete_atoms\"",
                                  "claims.atoms");
            b.claims = ClaimMeasure::rayleigh_compound_poisson(
                get_number(c, "claims", "lambda0", 1.0), get_number(c, "claims", "lambda", 1.0));
        } else if (type == "discrete_atoms") {
            if (c.contains("lambda0") || c.contains("lambda"))
                throw ConfigError("claims.lambda0/lambda are only valid for type \"rayleigh\"",
                                  "claims.lambda0");
            if (!c.contains("atoms") || !c.at("atoms").is_array())
                throw ConfigError("claims.atoms must be an array of [size, weight] pairs",
                                  "claims.atoms");
            std::vector<ClaimAtom> atoms;
            for (const auto& entry : c.at("atoms")) {
                if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
                    !entry[1].is_number())
                    throw ConfigError("claims.atoms entries must be [size, weight] pairs",
                                      "claims.atoms");
                atoms.push_back({entry[0].get<double>(), entry[1].get<double>()});
            }
            b.claims = ClaimMeasure::discrete_atoms(std::move(atoms));
        } else {
            throw ConfigError("claims.type must be \"rayleigh\" or \"discrete_atoms\"",
                              "claims.type");
        }
    }

    if (root.contains("numerics")) {
        const json& n = root.at("numerics");
        require_known_keys(n, "numerics",
                           {"ode_steps", "root_abs_tol", "root_rel_tol", "quad_abs_tol",
                            "quad_rel_tol", "tail_rel_tol"});
        b.conventions.ode_steps = get_int(n, "numerics", "ode_steps", b.conventions.ode_steps);
        b.conventions.root_abs_tol =
            get_number(n, "numerics", "root_abs_tol", b.conventions.root_abs_tol);
        b.conventions.root_rel_tol =
            get_number(n, "numerics", "root_rel_tol", b.conventions.root_rel_tol);
        b.conventions.quad_abs_tol =
            get_number(n, "numerics", "quad_abs_tol", b.conventions.quad_abs_tol);
        b.conventions.quad_rel_tol =
            get_number(n, "numerics", "quad_rel_tol", b.conventions.quad_rel_tol);
        b.conventions.tail_rel_tol =
            get_number(n, "numerics", "tail_rel_tol", b.conventions.tail_rel_tol);
    }

    if (root.contains("conventions")) {
        const json& c = root.at("conventions");
        require_known_keys(c, "conventions",
                           {"retention_discount_sign", "riccati_variant", "reinsurer_pi_mirror",
                            "intercept_claim_scale"});
        const std::string sign = get_string(c, "conventions", "retention_discount_sign",
                                            "negative");
        if (sign == "negative")
            b.conventions.retention_discount_sign = RetentionDiscountSign::Negative;
        else if (sign == "positive")
            b.conventions.retention_discount_sign = RetentionDiscountSign::Positive;
        else
            throw ConfigError("conventions.retention_discount_sign must be \"negative\" or "
                              "\"positive\"",
                              "conventions.retention_discount_sign");
        const std::string variant = get_string(c, "conventions", "riccati_variant", "theorem");
        if (variant == "theorem")
            b.conventions.riccati_variant = RiccatiVariant::Theorem;
        else if (variant == "appendix")
            b.conventions.riccati_variant = RiccatiVariant::Appendix;
        else
            throw ConfigError("conventions.riccati_variant must be \"theorem\" or \"appendix\"",
                              "conventions.riccati_variant");
        b.conventions.reinsurer_pi_mirror =
            get_bool(c, "conventions", "reinsurer_pi_mirror", b.conventions.reinsurer_pi_mirror);
        b.conventions.intercept_claim_scale =
            get_bool(c, "conventions", "intercept_claim_scale", b.conventions.intercept_claim_scale);
    }

    return b;
}

ModelBundle load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file: " + path, "");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string config_to_json(const ModelBundle& b) {
    json root;
    root["market"] = {{"r", b.market.r},         {"xi", b.market.xi},
                      {"kappa", b.market.kappa}, {"delta", b.market.delta},
                      {"sigma", b.market.sigma}, {"rho0", b.market.rho0},
                      {"T", b.market.T},         {"y0", b.market.y0}};
    root["insurer"] = {{"alpha", b.insurer.alpha}, {"gamma", b.insurer.gamma},
                       {"beta", b.insurer.beta},   {"beta0", b.insurer.beta0},
                       {"betaY", b.insurer.betaY}, {"theta", b.insurer.theta}};
    root["reinsurer"] = {{"alphaR", b.reinsurer.alphaR},
                         {"gammaR", b.reinsurer.gammaR},
                         {"betaR", b.reinsurer.betaR},
                         {"betaR0", b.reinsurer.betaR0},
                         {"betaRY", b.reinsurer.betaRY}};
    if (b.claims.kind() == ClaimMeasure::Kind::RayleighCompoundPoisson) {
        root["claims"] = {{"type", "rayleigh"},
                          {"lambda0", b.claims.lambda0()},
                          {"lambda", b.claims.lambda()}};
    } else {
        json atoms = json::array();
        for (const auto& a : b.claims.atoms()) atoms.push_back({a.size, a.weight});
        root["claims"] = {{"type", "discrete_atoms"}, {"atoms", atoms}};
    }
    root["numerics"] = {{"ode_steps", b.conventions.ode_steps},
                        {"root_abs_tol", b.conventions.root_abs_tol},
                        {"root_rel_tol", b.conventions.root_rel_tol},
                        {"quad_abs_tol", b.conventions.quad_abs_tol},
                        {"quad_rel_tol", b.conventions.quad_rel_tol},
                        {"tail_rel_tol", b.conventions.tail_rel_tol}};
    root["conventions"] = {
        {"retention_discount_sign",
         b.conventions.retention_discount_sign == RetentionDiscountSign::Negative ? "negative"
                                                                                  : "positive"},
        {"riccati_variant",
         b.conventions.riccati_variant == RiccatiVariant::Theorem ? "theorem" : "appendix"},
        {"reinsurer_pi_mirror", b.conventions.reinsurer_pi_mirror},
        {"intercept_claim_scale", b.conventions.intercept_claim_scale}};
    return root.dump(2);
}

}  // namespace reins
