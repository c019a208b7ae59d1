#include "reins/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <thread>

#include "reins/config.hpp"
#include "reins/equilibrium.hpp"
#include "reins/riccati.hpp"
#include "reins/strategies.hpp"

namespace reins {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    if (n < 2) throw std::invalid_argument("linspace: need at least two points");
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
    out.back() = hi;
    return out;
}

void apply_param(ModelBundle& b, const std::string& path, double value) {
    if (path == "market.r") b.market.r = value;
    else if (path == "market.xi") b.market.xi = value;
    else if (path == "market.kappa") b.market.kappa = value;
    else if (path == "market.delta") b.market.delta = value;
    else if (path == "market.sigma") b.market.sigma = value;
    else if (path == "market.rho0") b.market.rho0 = value;
    else if (path == "market.T") b.market.T = value;
    else if (path == "market.y0") b.market.y0 = value;
    else if (path == "insurer.alpha") b.insurer.alpha = value;
    else if (path == "insurer.gamma") b.insurer.gamma = value;
    else if (path == "insurer.beta") b.insurer.beta = value;
    else if (path == "insurer.beta0") b.insurer.beta0 = value;
    else if (path == "insurer.betaY") b.insurer.betaY = value;
    else if (path == "insurer.theta") b.insurer.theta = value;
    else if (path == "reinsurer.alphaR") b.reinsurer.alphaR = value;
    else if (path == "reinsurer.gammaR") b.reinsurer.gammaR = value;
    else if (path == "reinsurer.betaR") b.reinsurer.betaR = value;
    else if (path == "reinsurer.betaR0") b.reinsurer.betaR0 = value;
    else if (path == "reinsurer.betaRY") b.reinsurer.betaRY = value;
    else if (path == "claims.lambda0" || path == "claims.lambda") {
        if (b.claims.kind() != ClaimMeasure::Kind::RayleighCompoundPoisson)
            throw ConfigError("sweep parameter " + path + " requires a Rayleigh claim measure",
                              path);
        const double l0 = path == "claims.lambda0" ? value : b.claims.lambda0();
        const double l = path == "claims.lambda" ? value : b.claims.lambda();
        b.claims = ClaimMeasure::rayleigh_compound_poisson(l0, l);
    } else if (path == "numerics.ode_steps") {
        b.conventions.ode_steps = static_cast<int>(value);
    } else {
        throw ConfigError("unknown sweep parameter path: " + path, path);
    }
}

double eval_sweep_target(const ModelBundle& bundle, const SweepSpec& spec, double eta_override) {
    if (spec.target == "a0_star") {
        return solve_stackelberg(bundle, spec.t_eval).a0_star;
    }
    if (spec.target == "eta_star") {
        return solve_stackelberg(bundle, spec.t_eval).eta_star;
    }
    if (spec.target == "retention_feedback") {
        const double eta = std::isnan(eta_override) ? spec.eta_feedback : eta_override;
        return solve_retention(eta, bundle.insurer, bundle.conventions);
    }
    if (spec.target == "pi_I" || spec.target == "pi_R") {
        // the allocations need no equilibrium, only the coupled ODE solution
        const Agent agent = spec.target == "pi_I" ? Agent::Insurer : Agent::Reinsurer;
        RiccatiSolution ric = solve_riccati(agent, bundle);
        StackelbergEquilibrium eq;  // placeholder with matching fingerprint
        eq.bundle_fingerprint = fingerprint(bundle);
        RiccatiSolution other = solve_riccati(
            agent == Agent::Insurer ? Agent::Reinsurer : Agent::Insurer, bundle);
        StrategyProfile profile(bundle, agent == Agent::Insurer ? ric : other,
                                agent == Agent::Insurer ? other : ric, eq);
        return agent == Agent::Insurer ? pi_insurer(spec.t_eval, profile)
                                       : pi_reinsurer(spec.t_eval, profile);
    }
    throw ConfigError("unknown sweep target: " + spec.target, spec.target);
}

namespace {

struct Cell {
    double v1 = 0.0;
    double v2 = std::numeric_limits<double>::quiet_NaN();
    double result = std::numeric_limits<double>::quiet_NaN();
    std::string error;
};

void run_cell(const ModelBundle& base, const SweepSpec& spec, Cell& cell) {
    try {
        ModelBundle b = base;
        double eta_override = std::numeric_limits<double>::quiet_NaN();
        if (spec.param1 == "eta")
            eta_override = cell.v1;
        else
            apply_param(b, spec.param1, cell.v1);
        if (spec.param2) {
            if (*spec.param2 == "eta")
                eta_override = cell.v2;
            else
                apply_param(b, *spec.param2, cell.v2);
        }
        const ValidationReport report = validate(b);
        if (!report.ok()) {
            cell.error = report.to_string();
            return;
        }
        cell.result = eval_sweep_target(b, spec, eta_override);
    } catch (const std::exception& e) {
        cell.error = e.what();
    }
}

}  // namespace

int run_sweep(const ModelBundle& base, const SweepSpec& spec, std::ostream& out,
              std::ostream& diag) {
    if ((spec.param1 == "eta" || (spec.param2 && *spec.param2 == "eta")) &&
        spec.target != "retention_feedback")
        throw ConfigError("the pseudo-parameter \"eta\" is only valid with the "
                          "retention_feedback target",
                          "eta");

    std::vector<Cell> cells;
    if (spec.param2) {
        cells.reserve(spec.values1.size() * spec.values2.size());
        for (double v1 : spec.values1)
            for (double v2 : spec.values2) {
                Cell c;
                c.v1 = v1;
                c.v2 = v2;
                cells.push_back(c);
            }
    } else {
        cells.reserve(spec.values1.size());
        for (double v1 : spec.values1) {
            Cell c;
            c.v1 = v1;
            cells.push_back(c);
        }
    }

    const int jobs = std::max(1, spec.jobs);
    if (jobs == 1 || cells.size() <= 1) {
        for (Cell& c : cells) run_cell(base, spec, c);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= cells.size()) return;
                run_cell(base, spec, cells[i]);
            }
        };
        std::vector<std::thread> pool;
        const int n = std::min<int>(jobs, static_cast<int>(cells.size()));
        pool.reserve(n);
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    out << spec.param1;
    if (spec.param2) out << ',' << *spec.param2;
    out << ',' << spec.target << '\n';
    int ok = 0;
    for (const Cell& c : cells) {
        out << format_g17(c.v1);
        if (spec.param2) out << ',' << format_g17(c.v2);
        out << ',' << format_g17(c.result) << '\n';
        if (c.error.empty()) {
            ++ok;
        } else {
            diag << "sweep cell " << spec.param1 << '=' << format_g17(c.v1);
            if (spec.param2) diag << ' ' << *spec.param2 << '=' << format_g17(c.v2);
            diag << " failed: " << c.error << '\n';
        }
    }
    return ok;
}

}  // namespace reins
