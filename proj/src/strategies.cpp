#include "reins/strategies.hpp"

#include <cmath>
#include <stdexcept>

#include "reins/numerics.hpp"

namespace reins {

StrategyProfile::StrategyProfile(ModelBundle bundle_, RiccatiSolution insurer_,
                                 RiccatiSolution reinsurer_, StackelbergEquilibrium equilibrium_)
    : bundle(std::move(bundle_)),
      insurer_riccati(std::move(insurer_)),
      reinsurer_riccati(std::move(reinsurer_)),
      equilibrium(equilibrium_) {
    const std::uint64_t fp = fingerprint(bundle);
    if (insurer_riccati.bundle_fingerprint != fp || reinsurer_riccati.bundle_fingerprint != fp ||
        equilibrium.bundle_fingerprint != fp)
        throw std::invalid_argument(
            "StrategyProfile: sub-solutions come from different configurations");
}

StrategyProfile StrategyProfile::solve(const ModelBundle& bundle, double t_eval) {
    return StrategyProfile(bundle, solve_riccati(Agent::Insurer, bundle),
                           solve_riccati(Agent::Reinsurer, bundle),
                           solve_stackelberg(bundle, t_eval));
}

namespace {

// Numerator bracket shared by the allocation and the equity distortion:
// xi - (2a-1)*b0*rho0*sigma*A - g*sigma*rho0*(a*H_lo + (1-a)*H_hi), over denom.
double pi_hat_insurer(double t, const StrategyProfile& p) {
    const MarketParams& m = p.bundle.market;
    const InsurerPrefs& ip = p.bundle.insurer;
    const Eigen::Vector3d s = p.insurer_riccati.at(t);
    const double denom = ip.gamma + (2.0 * ip.alpha - 1.0) * ip.beta0;
    return (m.xi - (2.0 * ip.alpha - 1.0) * ip.beta0 * m.rho0 * m.sigma * s(0) -
            ip.gamma * m.sigma * m.rho0 * (ip.alpha * s(1) + ip.alpha_hat() * s(2))) /
           denom;
}

double pi_hat_reinsurer(double t, const StrategyProfile& p) {
    const MarketParams& m = p.bundle.market;
    const ReinsurerPrefs& rp = p.bundle.reinsurer;
    const Eigen::Vector3d s = p.reinsurer_riccati.at(t);
    const double denom = rp.gammaR + (2.0 * rp.alphaR - 1.0) * rp.betaR0;
    const double a_term = p.bundle.conventions.reinsurer_pi_mirror
                              ? rp.betaR0 * m.rho0 * m.sigma * s(0)
                              : rp.betaRY * m.sigma * s(0);
    return (m.xi - (2.0 * rp.alphaR - 1.0) * a_term -
            rp.gammaR * m.sigma * m.rho0 * (rp.alphaR * s(1) + rp.alpha_hat() * s(2))) /
           denom;
}

}  // namespace

double pi_insurer(double t, const StrategyProfile& profile) {
    const MarketParams& m = profile.bundle.market;
    return pi_hat_insurer(t, profile) * std::exp(-m.r * (m.T - t));
}

double pi_reinsurer(double t, const StrategyProfile& profile) {
    const MarketParams& m = profile.bundle.market;
    return pi_hat_reinsurer(t, profile) * std::exp(-m.r * (m.T - t));
}

double pi_no_sv(double t, double mu, double sigma0, const MarketParams& market,
                const InsurerPrefs& prefs) {
    if (!(sigma0 > 0.0)) throw std::invalid_argument("pi_no_sv: volatility must be positive");
    const double denom = prefs.gamma + (2.0 * prefs.alpha - 1.0) * prefs.beta0;
    return (mu - market.r) * std::exp(-market.r * (market.T - t)) / (sigma0 * sigma0 * denom);
}

double pi_no_sv_tied(double t, const MarketParams& market, const InsurerPrefs& prefs) {
    const double denom = prefs.gamma + (2.0 * prefs.alpha - 1.0) * prefs.beta0;
    return market.xi * std::exp(-market.r * (market.T - t)) / denom;
}

namespace {

// Compounded retained amount min(a0, z*e^{r(T-t)}), as it enters the claim
// distortions and the value intercepts.
double compounded_retention(double a0, double t, double z, const MarketParams& m) {
    return std::min(a0, z * std::exp(m.r * (m.T - t)));
}

}  // namespace

DistortionSet distortions_insurer(double t, double y, double z, const StrategyProfile& profile) {
    const MarketParams& m = profile.bundle.market;
    const InsurerPrefs& ip = profile.bundle.insurer;
    const Eigen::Vector3d s = profile.insurer_riccati.at(t);
    const double sy = std::sqrt(std::max(0.0, y));

    DistortionSet d;
    d.phi0_lo = ip.beta0 * sy * (pi_hat_insurer(t, profile) + m.sigma * m.rho0 * s(0));
    d.phiY_lo = m.sigma * ip.betaY * m.rho() * s(0) * sy;
    const double cap = compounded_retention(profile.equilibrium.a0_star, t, z, m);
    const double arg = ip.beta * (cap + 0.5 * ip.gamma * cap * cap);
    d.phiZ_lo = 1.0 - std::exp(arg);
    d.phi0_hi = -d.phi0_lo;
    d.phiY_hi = -d.phiY_lo;
    d.phiZ_hi = 1.0 - std::exp(-arg);
    return d;
}

DistortionSet distortions_reinsurer(double t, double y, double z, const StrategyProfile& profile) {
    const MarketParams& m = profile.bundle.market;
    const ReinsurerPrefs& rp = profile.bundle.reinsurer;
    const Eigen::Vector3d s = profile.reinsurer_riccati.at(t);
    const double sy = std::sqrt(std::max(0.0, y));

    DistortionSet d;
    d.phi0_lo = rp.betaR0 * sy * (pi_hat_reinsurer(t, profile) + m.sigma * m.rho0 * s(0));
    d.phiY_lo = m.sigma * rp.betaRY * m.rho() * s(0) * sy;
    const double cap = compounded_retention(profile.equilibrium.a0_star, t, z, m);
    const double arg = rp.betaR * (cap + 0.5 * rp.gammaR * cap * cap);
    d.phiZ_lo = 1.0 - std::exp(arg);
    d.phi0_hi = -d.phi0_lo;
    d.phiY_hi = -d.phiY_lo;
    d.phiZ_hi = 1.0 - std::exp(-arg);
    return d;
}

double penalty_rate(double phi0, double phiY, const std::function<double(double)>& phiZ,
                    const AmbiguityLevels& levels, const ClaimMeasure& measure,
                    const SolverConventions& conventions) {
    auto entropy = [&phiZ](double z) {
        const double p = phiZ(z);
        if (!(p < 1.0))
            throw std::domain_error("penalty_rate: claim distortion reached 1 at z=" +
                                    std::to_string(z));
        const double q = 1.0 - p;
        return q * std::log(q) + p;
    };
    const double claim_part = integrate_claim(measure, entropy, 0.0, conventions).value;
    return claim_part / levels.beta + phi0 * phi0 / (2.0 * levels.beta0) +
           phiY * phiY / (2.0 * levels.betaY);
}

double value_intercept(Agent agent, const StrategyProfile& profile, double t) {
    const ModelBundle& b = profile.bundle;
    const MarketParams& m = b.market;
    if (t >= m.T) return 0.0;

    const double eta = profile.equilibrium.eta_star;
    const double a0 = profile.equilibrium.a0_star;
    const double long_run = b.conventions.intercept_claim_scale &&
                            b.claims.kind() == ClaimMeasure::Kind::RayleighCompoundPoisson
                                ? b.claims.lambda()
                                : m.delta;
    const double mean_claim = b.claims.first_moment();

    std::function<double(double)> rate;
    if (agent == Agent::Insurer) {
        const InsurerPrefs& ip = b.insurer;
        rate = [&, eta, a0, long_run, mean_claim](double s) {
            const double compound = std::exp(m.r * (m.T - s));
            const double A = profile.insurer_riccati.A(s);
            auto capped = [&](double z) { return std::min(a0, z * compound); };
            const double retained =
                integrate_claim(b.claims, [&](double z) { return capped(z); }, 0.0, b.conventions)
                    .value;
            auto exp_arg = [&](double z) {
                const double c = capped(z);
                return ip.beta * (c + 0.5 * ip.gamma * c * c);
            };
            const double lo_part =
                integrate_claim(b.claims, [&](double z) { return 1.0 - std::exp(exp_arg(z)); },
                                0.0, b.conventions)
                    .value;
            const double hi_part =
                integrate_claim(b.claims, [&](double z) { return 1.0 - std::exp(-exp_arg(z)); },
                                0.0, b.conventions)
                    .value;
            return m.kappa * long_run * A + (ip.theta - eta) * compound * mean_claim +
                   (1.0 + eta) * retained + (ip.alpha / ip.beta) * lo_part -
                   (ip.alpha_hat() / ip.beta) * hi_part;
        };
    } else {
        const ReinsurerPrefs& rp = b.reinsurer;
        rate = [&, eta, a0, long_run](double s) {
            const double compound = std::exp(m.r * (m.T - s));
            const double A = profile.reinsurer_riccati.A(s);
            auto capped = [&](double z) { return std::min(a0, z * compound); };
            const double ceded =
                integrate_claim(b.claims, [&](double z) { return z * compound - capped(z); }, 0.0,
                                b.conventions)
                    .value;
            auto exp_arg = [&](double z) {
                const double c = capped(z);
                return rp.betaR * (c + 0.5 * rp.gammaR * c * c);
            };
            const double lo_part =
                integrate_claim(b.claims, [&](double z) { return 1.0 - std::exp(exp_arg(z)); },
                                0.0, b.conventions)
                    .value;
            const double hi_part =
                integrate_claim(b.claims, [&](double z) { return 1.0 - std::exp(-exp_arg(z)); },
                                0.0, b.conventions)
                    .value;
            return m.kappa * long_run * A + (1.0 + eta) * ceded + (rp.alphaR / rp.betaR) * lo_part -
                   (rp.alpha_hat() / rp.betaR) * hi_part;
        };
    }
    return integrate_interval(rate, t, m.T, b.conventions.quad_abs_tol,
                              b.conventions.quad_rel_tol);
}

double value_function(Agent agent, double t, double x, double y, const StrategyProfile& profile) {
    const MarketParams& m = profile.bundle.market;
    const RiccatiSolution& ric =
        agent == Agent::Insurer ? profile.insurer_riccati : profile.reinsurer_riccati;
    return std::exp(m.r * (m.T - t)) * x + ric.A(t) * y + value_intercept(agent, profile, t);
}

}  // namespace reins
