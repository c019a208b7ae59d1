// reins: equilibrium solver and sensitivity-sweep front end.
//
// Exit codes: 0 success, 1 malformed configuration, 2 validation failure,
// 3 solver failure.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "reins/config.hpp"
#include "reins/equilibrium.hpp"
#include "reins/riccati.hpp"
#include "reins/strategies.hpp"
#include "reins/sweep.hpp"

namespace {

using namespace reins;

constexpr int kExitConfig = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

struct OutputTarget {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    bool open(const std::string& path) {
        if (path.empty()) return true;
        file.open(path);
        if (!file) return false;
        stream = &file;
        return true;
    }
};

ModelBundle load_or_default(const std::string& config_path) {
    if (config_path.empty()) return ModelBundle{};
    return load_config(config_path);
}

int require_valid(const ModelBundle& bundle, std::ostream& err) {
    const ValidationReport report = validate(bundle);
    if (!report.ok()) {
        err << report.to_string() << '\n';
        return kExitValidation;
    }
    return 0;
}

std::vector<double> parse_values(const std::string& text) {
    // either "lo:hi:n" or a comma-separated list
    const auto colons = std::count(text.begin(), text.end(), ':');
    if (colons == 2) {
        double lo, hi;
        int n;
        char c1, c2;
        std::istringstream is(text);
        if (!(is >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':')
            throw ConfigError("cannot parse value range: " + text, "");
        return linspace(lo, hi, n);
    }
    std::vector<double> vals;
    std::istringstream is(text);
    std::string piece;
    while (std::getline(is, piece, ',')) {
        if (piece.empty()) continue;
        vals.push_back(std::stod(piece));
    }
    if (vals.empty()) throw ConfigError("empty value list: " + text, "");
    return vals;
}

int cmd_solve(const std::string& config_path, double t_eval, const std::string& out_path) {
    const ModelBundle bundle = load_or_default(config_path);
    if (int rc = require_valid(bundle, std::cerr)) return rc;

    OutputTarget out;
    if (!out.open(out_path)) {
        std::cerr << "cannot open output file: " << out_path << '\n';
        return kExitSolver;
    }
    std::ostream& os = *out.stream;

    const ExistenceBound bound = existence_bound(bundle);
    const StrategyProfile profile = StrategyProfile::solve(bundle, t_eval);
    const StackelbergEquilibrium& eq = profile.equilibrium;
    const double discounted = retention_policy(eq.a0_star, t_eval,
                                               std::numeric_limits<double>::infinity(),
                                               bundle.market,
                                               bundle.conventions.retention_discount_sign);

    os << "t_eval=" << format_g17(t_eval) << '\n';
    os << "eta_star=" << format_g17(eq.eta_star) << '\n';
    os << "a0_star=" << format_g17(eq.a0_star) << '\n';
    os << "retention_cap_at_t=" << format_g17(discounted) << '\n';
    os << "da0_deta=" << format_g17(eq.da0_deta) << '\n';
    os << "pi_insurer=" << format_g17(pi_insurer(t_eval, profile)) << '\n';
    os << "pi_reinsurer=" << format_g17(pi_reinsurer(t_eval, profile)) << '\n';
    os << "retention_residual=" << format_g17(eq.retention_residual) << '\n';
    os << "premium_residual=" << format_g17(eq.premium_residual) << '\n';
    if (eq.multiple_roots_warning)
        os << "warning=multiple premium roots detected; smallest returned\n";
    os << "riccati_fd_residual_insurer=" << format_g17(profile.insurer_riccati.max_fd_residual)
       << '\n';
    os << "riccati_fd_residual_reinsurer=" << format_g17(profile.reinsurer_riccati.max_fd_residual)
       << '\n';
    os << "existence_bound: " << bound.to_string() << '\n';
    return 0;
}

int cmd_riccati(const std::string& config_path, const std::string& agent_name,
                const std::string& out_path) {
    const ModelBundle bundle = load_or_default(config_path);
    if (int rc = require_valid(bundle, std::cerr)) return rc;
    const Agent agent = agent_name == "reinsurer" ? Agent::Reinsurer : Agent::Insurer;

    RiccatiSolution sol;
    try {
        sol = solve_riccati(agent, bundle);
    } catch (const OdeBlowUpError& e) {
        std::cerr << "riccati blow-up at t=" << format_g17(e.time) << '\n'
                  << "existence_bound: " << existence_bound(bundle, agent).to_string() << '\n';
        return kExitSolver;
    }

    OutputTarget out;
    if (!out.open(out_path)) {
        std::cerr << "cannot open output file: " << out_path << '\n';
        return kExitSolver;
    }
    std::ostream& os = *out.stream;
    os << "t,A,H_lo,H_hi\n";
    for (int k = 0; k < sol.path.grid.size(); ++k) {
        os << format_g17(sol.path.grid.node(k)) << ',' << format_g17(sol.path.states(0, k)) << ','
           << format_g17(sol.path.states(1, k)) << ',' << format_g17(sol.path.states(2, k))
           << '\n';
    }
    os << "# max_fd_residual=" << format_g17(sol.max_fd_residual) << '\n';
    return 0;
}

int cmd_check(const std::string& config_path, double t_eval, const std::string& out_path) {
    const ModelBundle bundle = load_or_default(config_path);

    OutputTarget out;
    if (!out.open(out_path)) {
        std::cerr << "cannot open output file: " << out_path << '\n';
        return kExitSolver;
    }
    std::ostream& os = *out.stream;

    const ValidationReport report = validate(bundle);
    os << "validation: " << report.to_string() << '\n';

    const ExistenceBound bound = existence_bound(bundle);
    os << "existence_bound: " << bound.to_string() << '\n';
    os << "horizon T=" << format_g17(bundle.market.T) << " t_max=" << format_g17(bound.t_max)
       << " within_bound=" << (bound.horizon_ok ? "yes" : "no") << '\n';

    if (report.ok()) {
        // premium-condition sign pattern on 64 points above the loading
        const double theta = bundle.insurer.theta;
        const double lo = theta + 1e-6, hi = theta + 4.0;
        os << "premium_scan t=" << format_g17(t_eval) << " range=[" << format_g17(lo) << ','
           << format_g17(hi) << "] signs=";
        int changes = 0;
        char prev = 0;
        for (int i = 0; i < 64; ++i) {
            const double eta = lo + (hi - lo) * i / 63.0;
            double m;
            try {
                m = reinsurer_foc(eta, bundle, t_eval);
            } catch (const std::exception&) {
                os << '?';
                continue;
            }
            const char s = m > 0.0 ? '+' : (m < 0.0 ? '-' : '0');
            if (prev && s != prev && s != '0') ++changes;
            prev = s;
            os << s;
        }
        os << '\n' << "premium_sign_changes=" << changes << '\n';
    }
    return 0;
}

int cmd_strategies(const std::string& config_path, double t_eval, int points,
                   const std::string& out_path) {
    const ModelBundle bundle = load_or_default(config_path);
    if (int rc = require_valid(bundle, std::cerr)) return rc;

    OutputTarget out;
    if (!out.open(out_path)) {
        std::cerr << "cannot open output file: " << out_path << '\n';
        return kExitSolver;
    }
    std::ostream& os = *out.stream;

    const StrategyProfile profile = StrategyProfile::solve(bundle, t_eval);
    os << "t,pi_I,pi_R,pi_tilde\n";
    for (int i = 0; i < points; ++i) {
        const double t = bundle.market.T * i / (points - 1);
        os << format_g17(t) << ',' << format_g17(pi_insurer(t, profile)) << ','
           << format_g17(pi_reinsurer(t, profile)) << ','
           << format_g17(pi_no_sv_tied(t, bundle.market, bundle.insurer)) << '\n';
    }
    return 0;
}

int cmd_distortions(const std::string& config_path, double t_eval, const std::string& agent_name,
                    const std::vector<double>& z_values, double y, const std::string& out_path) {
    const ModelBundle bundle = load_or_default(config_path);
    if (int rc = require_valid(bundle, std::cerr)) return rc;

    OutputTarget out;
    if (!out.open(out_path)) {
        std::cerr << "cannot open output file: " << out_path << '\n';
        return kExitSolver;
    }
    std::ostream& os = *out.stream;

    const StrategyProfile profile = StrategyProfile::solve(bundle, t_eval);
    const double variance = std::isnan(y) ? bundle.market.y0 : y;
    const bool insurer_side = agent_name != "reinsurer";
    os << "t,z,phi0_lo,phiY_lo,phiZ_lo,phi0_hi,phiY_hi,phiZ_hi\n";
    for (double z : z_values) {
        const DistortionSet d = insurer_side
                                    ? distortions_insurer(t_eval, variance, z, profile)
                                    : distortions_reinsurer(t_eval, variance, z, profile);
        os << format_g17(t_eval) << ',' << format_g17(z) << ',' << format_g17(d.phi0_lo) << ','
           << format_g17(d.phiY_lo) << ',' << format_g17(d.phiZ_lo) << ','
           << format_g17(d.phi0_hi) << ',' << format_g17(d.phiY_hi) << ','
           << format_g17(d.phiZ_hi) << '\n';
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const SweepSpec& spec, const std::string& out_path) {
    const ModelBundle bundle = load_or_default(config_path);
    if (int rc = require_valid(bundle, std::cerr)) return rc;

    OutputTarget out;
    if (!out.open(out_path)) {
        std::cerr << "cannot open output file: " << out_path << '\n';
        return kExitSolver;
    }
    const int ok = run_sweep(bundle, spec, *out.stream, std::cerr);
    return ok == 0 ? kExitSolver : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stackelberg reinsurance-investment equilibrium solver"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags remain valid after the subcommand name

    std::string config_path, out_path;
    double t_eval = 5.0;
    app.add_option("--config", config_path, "JSON configuration file (defaults apply if omitted)");
    app.add_option("--t", t_eval, "evaluation time for the premium condition (default 5)");
    app.add_option("--out", out_path, "write output to a file instead of standard output");

    auto* solve = app.add_subcommand("solve", "solve the equilibrium and print a summary");

    auto* sweep = app.add_subcommand("sweep", "sweep a parameter and emit CSV");
    std::string param, param2, values_text, values2_text, target = "a0_star";
    double eta_feedback = 0.7;
    int jobs = 1;
    sweep->add_option("--param", param, "dotted config path, e.g. insurer.alpha")->required();
    sweep->add_option("--values", values_text, "comma list or lo:hi:n range")->required();
    sweep->add_option("--param2", param2, "optional second parameter for 2-D sweeps");
    sweep->add_option("--values2", values2_text, "values for the second parameter");
    sweep->add_option("--target", target,
                      "a0_star | eta_star | pi_I | pi_R | retention_feedback");
    sweep->add_option("--eta", eta_feedback,
                      "premium loading used by the retention_feedback target");
    sweep->add_option("--jobs", jobs, "max concurrent sweep cells");

    auto* riccati = app.add_subcommand("riccati", "dump one agent's ODE solution as CSV");
    std::string agent_name = "insurer";
    riccati->add_option("--agent", agent_name, "insurer | reinsurer")
        ->check(CLI::IsMember({"insurer", "reinsurer"}));

    auto* check = app.add_subcommand("check", "validation, existence bound and premium scan");

    auto* strategies = app.add_subcommand("strategies",
                                          "allocation curves t,pi_I,pi_R,pi_tilde as CSV");
    int strategy_points = 201;
    strategies->add_option("--points", strategy_points, "number of time samples (default 201)")
        ->check(CLI::PositiveNumber);

    auto* distortions = app.add_subcommand(
        "distortions", "distortion series t,z,phi0_lo,phiY_lo,phiZ_lo,phi0_hi,phiY_hi,phiZ_hi");
    std::string dist_agent = "insurer";
    std::string dist_z_text = "0.25:5.0:20";
    double dist_y = std::numeric_limits<double>::quiet_NaN();
    distortions->add_option("--agent", dist_agent, "insurer | reinsurer")
        ->check(CLI::IsMember({"insurer", "reinsurer"}));
    distortions->add_option("--z", dist_z_text, "claim sizes, comma list or lo:hi:n");
    distortions->add_option("--y", dist_y, "variance level (defaults to market.y0)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(config_path, t_eval, out_path);
        if (riccati->parsed()) return cmd_riccati(config_path, agent_name, out_path);
        if (check->parsed()) return cmd_check(config_path, t_eval, out_path);
        if (strategies->parsed())
            return cmd_strategies(config_path, t_eval, std::max(2, strategy_points), out_path);
        if (distortions->parsed())
            return cmd_distortions(config_path, t_eval, dist_agent, parse_values(dist_z_text),
                                   dist_y, out_path);
        if (sweep->parsed()) {
            SweepSpec spec;
            spec.param1 = param;
            spec.values1 = parse_values(values_text);
            if (!param2.empty()) {
                spec.param2 = param2;
                spec.values2 = parse_values(values2_text);
            }
            spec.target = target;
            spec.t_eval = t_eval;
            spec.eta_feedback = eta_feedback;
            spec.jobs = jobs;
            return cmd_sweep(config_path, spec, out_path);
        }
    } catch (const reins::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kExitSolver;
    }
    return 0;
}
