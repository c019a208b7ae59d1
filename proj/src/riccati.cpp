#include "reins/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace reins {

RiccatiCoeffs RiccatiCoeffs::for_agent(Agent agent, const ModelBundle& bundle) {
    RiccatiCoeffs c;
    c.kappa = bundle.market.kappa;
    c.sigma = bundle.market.sigma;
    c.rho0 = bundle.market.rho0;
    c.xi = bundle.market.xi;
    c.variant = bundle.conventions.riccati_variant;
    if (agent == Agent::Insurer) {
        c.alpha = bundle.insurer.alpha;
        c.gamma = bundle.insurer.gamma;
        c.beta_equity = bundle.insurer.beta0;
        c.beta_vol = bundle.insurer.betaY;
    } else {
        c.alpha = bundle.reinsurer.alphaR;
        c.gamma = bundle.reinsurer.gammaR;
        c.beta_equity = bundle.reinsurer.betaR0;
        c.beta_vol = bundle.reinsurer.betaRY;
    }
    return c;
}

Eigen::Vector3d riccati_rhs(double /*t*/, const Eigen::Vector3d& state,
                            const RiccatiCoeffs& cf) {
    const double A = state(0), Hlo = state(1), Hhi = state(2);
    const double a = cf.alpha, ah = 1.0 - cf.alpha;
    const double two_a1 = 2.0 * a - 1.0;
    const double s = cf.sigma, s2 = s * s;
    const double rho0 = cf.rho0;
    const double rho2 = 1.0 - rho0 * rho0;
    const double mix = cf.beta_equity * rho0 * rho0 + cf.beta_vol * rho2;
    const double c = cf.denom();

    const double pi_hat =
        (cf.xi - two_a1 * cf.beta_equity * rho0 * s * A - cf.gamma * s * rho0 * (a * Hlo + ah * Hhi)) /
        c;

    const double h_sq = a * Hlo * Hlo + ah * Hhi * Hhi;
    double dA;
    if (cf.variant == RiccatiVariant::Theorem) {
        dA = cf.kappa * A + 0.5 * two_a1 * s2 * mix * A * A + 0.5 * cf.gamma * s2 * h_sq -
             0.5 * c * pi_hat * pi_hat;
    } else {
        dA = cf.kappa * A - 0.5 * two_a1 * s2 * mix * A * A + 0.5 * s2 * h_sq -
             0.5 * c * pi_hat * pi_hat;
    }
    const double dHlo = cf.kappa * Hlo - cf.xi * pi_hat + cf.beta_equity * pi_hat * pi_hat +
                        s * cf.beta_equity * pi_hat * (A + Hlo) + s2 * mix * A * Hlo;
    const double dHhi = cf.kappa * Hhi - cf.xi * pi_hat - cf.beta_equity * pi_hat * pi_hat -
                        s * cf.beta_equity * pi_hat * (A + Hhi) - s2 * mix * A * Hhi;
    return {dA, dHlo, dHhi};
}

Eigen::Vector3d insurer_rhs(double t, const Eigen::Vector3d& state, const MarketParams& market,
                            const InsurerPrefs& prefs, RiccatiVariant variant) {
    RiccatiCoeffs cf;
    cf.kappa = market.kappa;
    cf.sigma = market.sigma;
    cf.rho0 = market.rho0;
    cf.xi = market.xi;
    cf.alpha = prefs.alpha;
    cf.gamma = prefs.gamma;
    cf.beta_equity = prefs.beta0;
    cf.beta_vol = prefs.betaY;
    cf.variant = variant;
    return riccati_rhs(t, state, cf);
}

Eigen::Vector3d reinsurer_rhs(double t, const Eigen::Vector3d& state, const MarketParams& market,
                              const ReinsurerPrefs& prefs, RiccatiVariant variant) {
    RiccatiCoeffs cf;
    cf.kappa = market.kappa;
    cf.sigma = market.sigma;
    cf.rho0 = market.rho0;
    cf.xi = market.xi;
    cf.alpha = prefs.alphaR;
    cf.gamma = prefs.gammaR;
    cf.beta_equity = prefs.betaR0;
    cf.beta_vol = prefs.betaRY;
    cf.variant = variant;
    return riccati_rhs(t, state, cf);
}

RiccatiSolution solve_riccati(Agent agent, const ModelBundle& bundle) {
    const RiccatiCoeffs cf = RiccatiCoeffs::for_agent(agent, bundle);
    const TimeGrid grid{bundle.market.T, bundle.conventions.ode_steps};
    auto rhs = [&cf](double t, const Eigen::Vector3d& y) { return riccati_rhs(t, y, cf); };

    RiccatiSolution sol;
    sol.agent = agent;
    sol.bundle_fingerprint = fingerprint(bundle);
    sol.path = integrate_backward<3>(rhs, Eigen::Vector3d::Zero(), grid);

    // Centered-difference consistency check at interior nodes; the residual is
    // dominated by the O(h^2) differencing of the 4th-order solution.
    const double h = grid.step();
    double worst = 0.0;
    for (int k = 1; k < grid.steps; ++k) {
        const Eigen::Vector3d centered =
            (sol.path.states.col(k + 1) - sol.path.states.col(k - 1)) / (2.0 * h);
        worst = std::max(worst,
                         (centered - sol.path.derivs.col(k)).lpNorm<Eigen::Infinity>());
    }
    sol.max_fd_residual = worst;
    return sol;
}

namespace {

double sup3(double x, double y, double z) {
    return std::max({std::abs(x), std::abs(y), std::abs(z)});
}

}  // namespace

ExistenceBound existence_bound_from_aggregates(double d, double k, double q, double T) {
    ExistenceBound b;
    b.d = d;
    b.k = k;
    b.q = q;
    b.Delta = d * d - 4.0 * k * q;
    const double inf = std::numeric_limits<double>::infinity();

    if (k == 0.0) {
        // no quadratic part: the comparison ODE is linear and never explodes
        b.case_tag = ExistenceBound::Case::Positive;
        b.t_max = inf;
        b.note = "quadratic coefficient aggregate k = 0; comparison equation is linear";
        b.horizon_ok = true;
        return b;
    }

    if (b.Delta == 0.0) {
        b.case_tag = ExistenceBound::Case::Zero;
        b.zeta1 = b.zeta2 = std::complex<double>(-d / (2.0 * k), 0.0);
        b.t_max = d > 0.0 ? 2.0 / d : inf;
        if (d <= 0.0) b.note = "degenerate aggregate d <= 0";
    } else if (b.Delta > 0.0) {
        b.case_tag = ExistenceBound::Case::Positive;
        const double root = std::sqrt(b.Delta);
        b.zeta1 = std::complex<double>((-d + root) / (2.0 * k), 0.0);
        b.zeta2 = std::complex<double>((-d - root) / (2.0 * k), 0.0);
        const double z1 = b.zeta1.real(), z2 = b.zeta2.real();
        if (z1 == 0.0 || z2 / z1 <= 0.0) {
            b.t_max = inf;
            b.note = "zeta2/zeta1 outside the logarithm's domain; no finite bound applies";
        } else {
            b.t_max = std::log(z2 / z1) / root;
        }
    } else {
        b.case_tag = ExistenceBound::Case::Negative;
        const double root = std::sqrt(-b.Delta);
        b.zeta1 = std::complex<double>(-d / (2.0 * k), root / (2.0 * k));
        b.zeta2 = std::conj(b.zeta1);
        const double pi = 3.14159265358979323846;
        b.t_max = (pi + 2.0 * std::atan(b.zeta1.real() / b.zeta1.imag())) / root;
    }
    b.horizon_ok = T < b.t_max;
    return b;
}

ExistenceBound existence_bound(const ModelBundle& bundle, Agent agent) {
    const RiccatiCoeffs cf = RiccatiCoeffs::for_agent(agent, bundle);
    const double a = cf.alpha, ah = 1.0 - cf.alpha;
    const double g = cf.gamma, b0 = cf.beta_equity, bY = cf.beta_vol;
    const double s = cf.sigma, s2 = s * s;
    const double r0 = cf.rho0, r02 = r0 * r0;
    const double rho2 = 1.0 - r02;
    const double xi = cf.xi, xi2 = xi * xi;
    const double kap = cf.kappa;
    const double two_a1 = 2.0 * a - 1.0;
    const double c = cf.denom();
    const double c2 = c * c;

    // Diagonal entries of the coefficient matrices, transcribed one for one.
    const double K_1 = 0.5 * two_a1 * s2 * (r02 * g * b0 / c + rho2 * bY);
    const double K_2 = (a * s2 * r0 * g * b0 / c) * (a * r0 * g / c - 1.0);
    const double K_3 = (ah * s2 * r0 * g * b0 / c) * (1.0 - ah * r0 * g / c);

    const double K1_1 = 0.5 * a * s2 * g * (1.0 - a * r0 * g / c);
    const double K1_2 = (two_a1 * s2 * r0 * b0 * b0 / c) * (two_a1 * r0 * b0 / c - 1.0);
    const double K1_3 = 0.0;

    const double K2_1 = 0.5 * ah * s2 * g * (1.0 - ah * r0 * g / c);
    const double K2_2 = 0.0;
    const double K2_3 = (two_a1 * s2 * r0 * b0 * b0 / c) * (1.0 - two_a1 * r0 * b0 / c);

    const double K3_1 = 0.0;
    const double K3_2 = ah * ah * s2 * r02 * g * g * b0 / c2;
    const double K3_3 = -(a * a * s2 * r02 * g * g * b0 / c2);

    const double cross = s2 * ((r02 - r0) * b0 + rho2 * bY);
    const double K12_1 = -(a * two_a1 * s2 * r02 * g * b0 / c);
    const double K12_2 = (s2 * r0 * g * b0 / c) * (2.0 * a * two_a1 * r0 * b0 / c + ah) + cross;
    const double K12_3 = 0.0;

    const double K13_1 = -(ah * two_a1 * s2 * r02 * g * b0 / c);
    const double K13_2 = 0.0;
    const double K13_3 = (s2 * r0 * g * b0 / c) * (2.0 * ah * two_a1 * r0 * b0 / c + a) + cross;

    const double K23_1 = 0.0;
    const double K23_2 = (ah * s2 * r0 * g * b0 / c) * (2.0 * a * r0 * g / c - 1.0);
    const double K23_3 = (a * s2 * r0 * g * b0 / c) * (1.0 - 2.0 * ah * r0 * g / c);

    const double K0_1 = -(a * ah * s2 * r02 * g * g / c);
    const double K0_2 = (ah * s2 * r0 * g * b0 / c) * (2.0 * two_a1 * r0 * b0 / c - 1.0);
    const double K0_3 = (a * s2 * r0 * g * b0 / c) * (1.0 - 2.0 * a * r0 * g / c);

    const double D_1 = kap + two_a1 * s * r0 * b0 * xi / c;
    const double D_2 = kap + s * (a * r0 * (1.0 - 2.0 * b0 / c) * g + b0) * xi / c;
    const double D_3 = kap + s * (ah * r0 * (1.0 + 2.0 * b0 / c) * g - b0) * xi / c;

    const double D1_1 = a * s * r0 * g * xi / c;
    const double D1_2 = (two_a1 * r0 * (1.0 - 2.0 * b0 / c) + 1.0) * s * b0 * xi / c;
    const double D1_3 = 0.0;

    const double D2_1 = ah * s * r0 * g * xi / c;
    const double D2_2 = 0.0;
    const double D2_3 = (two_a1 * r0 * (1.0 + 2.0 * b0 / c) - 1.0) * s * b0 * xi / c;

    const double D3_1 = 0.0;
    const double D3_2 = (ah * s * r0 * g / c) * (1.0 - 2.0 * b0 / c) * xi;
    const double D3_3 = (a * s * r0 * g / c) * (1.0 + 2.0 * b0 / c) * xi;

    const double Q_1 = -xi2 / (2.0 * c);
    const double Q_2 = -(g - 2.0 * ah * b0) * xi2 / c2;
    const double Q_3 = -(g + 2.0 * a * b0) * xi2 / c2;

    const double d = sup3(D_1, D_2, D_3) + sup3(D1_1, D1_2, D1_3) + sup3(D2_1, D2_2, D2_3) +
                     sup3(D3_1, D3_2, D3_3);
    const double k = sup3(K_1, K_2, K_3) + sup3(K0_1, K0_2, K0_3) + sup3(K1_1, K1_2, K1_3) +
                     sup3(K2_1, K2_2, K2_3) + sup3(K3_1, K3_2, K3_3) + sup3(K12_1, K12_2, K12_3) +
                     sup3(K13_1, K13_2, K13_3) + sup3(K23_1, K23_2, K23_3);
    const double q = sup3(Q_1, Q_2, Q_3);

    return existence_bound_from_aggregates(d, k, q, bundle.market.T);
}

std::string ExistenceBound::to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << "d=" << d << " k=" << k << " q=" << q << " Delta=" << Delta;
    switch (case_tag) {
        case Case::Zero: os << " (Delta=0)"; break;
        case Case::Positive: os << " (Delta>0)"; break;
        case Case::Negative: os << " (Delta<0)"; break;
    }
    os << " zeta1=(" << zeta1.real() << "," << zeta1.imag() << ")"
       << " zeta2=(" << zeta2.real() << "," << zeta2.imag() << ")"
       << " t_max=" << t_max << " horizon_ok=" << (horizon_ok ? "yes" : "no");
    if (!note.empty()) os << " note: " << note;
    return os.str();
}

}  // namespace reins
