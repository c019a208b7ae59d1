#include "reins/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "reins/numerics.hpp"

namespace reins {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrt2Pi = 2.5066282746310005024;
constexpr double kOverflowExponent = 700.0;  // exp() overflows near 709
}  // namespace

double retention_foc(double a0, double eta, const InsurerPrefs& prefs) {
    const double s = prefs.beta * (a0 + 0.5 * prefs.gamma * a0 * a0);
    if (s >= kOverflowExponent) return -std::numeric_limits<double>::max();
    const double mixed = prefs.alpha * std::exp(s) + prefs.alpha_hat() * std::exp(-s);
    return (1.0 + eta) - (1.0 + prefs.gamma * a0) * mixed;
}

double solve_retention(double eta, const InsurerPrefs& prefs,
                       const SolverConventions& conventions) {
    if (!(eta > 0.0)) throw std::invalid_argument("solve_retention: loading must be positive");

    // F(0) = eta > 0 and F is strictly decreasing, so one doubling pass finds
    // the sign change.
    double lo = 0.0;
    double hi = std::max(1.0, eta / prefs.gamma);
    int guard = 0;
    while (retention_foc(hi, eta, prefs) > 0.0) {
        hi *= 2.0;
        if (++guard > 1100)
            throw std::logic_error("solve_retention: no sign change found (impossible for a "
                                   "strictly decreasing condition)");
    }

    double mid = 0.5 * (hi + lo);
    for (int it = 0; it < 400; ++it) {
        mid = 0.5 * (hi + lo);
        const double fm = retention_foc(mid, eta, prefs);
        if (fm > 0.0)
            lo = mid;
        else
            hi = mid;
        if (std::abs(fm) <= conventions.root_abs_tol &&
            hi - lo <= conventions.root_rel_tol * std::max(mid, 1e-300))
            break;
    }
    return 0.5 * (hi + lo);
}

double retention_sensitivity(double a0, const InsurerPrefs& prefs) {
    const double s = prefs.beta * (a0 + 0.5 * prefs.gamma * a0 * a0);
    const double es = std::exp(s), ems = std::exp(-s);
    const double sum = prefs.alpha * es + prefs.alpha_hat() * ems;
    const double diff = prefs.alpha * es - prefs.alpha_hat() * ems;
    const double one_ga = 1.0 + prefs.gamma * a0;
    return 1.0 / (prefs.gamma * sum + prefs.beta * one_ga * one_ga * diff);
}

double reinsurer_foc(double eta, const ModelBundle& bundle, double t) {
    const MarketParams& m = bundle.market;
    const ReinsurerPrefs& rp = bundle.reinsurer;
    const double a0 = solve_retention(eta, bundle.insurer, bundle.conventions);
    const double da = retention_sensitivity(a0, bundle.insurer);
    const double compound = std::exp(m.r * (m.T - t));
    const double lower = a0 / compound;

    auto integrand = [&](double z) {
        const double w = z * compound - a0;  // compounded ceded amount
        const double arg = rp.betaR * (w + 0.5 * rp.gammaR * w * w);
        const double drift = w - (1.0 + eta) * da;
        const double slope = da * (1.0 + rp.gammaR * w);
        return drift + slope * (rp.alphaR * std::exp(arg) + rp.alpha_hat() * std::exp(-arg));
    };
    return integrate_claim(bundle.claims, integrand, lower, bundle.conventions).value;
}

double rayleigh_foc_closed_form(double eta, const ModelBundle& bundle, double t) {
    if (bundle.claims.kind() != ClaimMeasure::Kind::RayleighCompoundPoisson)
        throw std::invalid_argument("rayleigh_foc_closed_form: claim measure is not Rayleigh");

    const MarketParams& m = bundle.market;
    const ReinsurerPrefs& rp = bundle.reinsurer;
    const double lambda = bundle.claims.lambda();
    const double lambda0 = bundle.claims.lambda0();
    const double a0 = solve_retention(eta, bundle.insurer, bundle.conventions);
    const double da = retention_sensitivity(a0, bundle.insurer);

    const double f = std::exp(m.r * (m.T - t));
    const double f2 = f * f;
    const double l2 = lambda * lambda;

    const double inv_sig_plus = 2.0 * f2 / l2 + rp.betaR * rp.gammaR;
    const double inv_sig_minus = 2.0 * f2 / l2 - rp.betaR * rp.gammaR;
    if (!(inv_sig_minus > 0.0)) {
        std::ostringstream os;
        os << "rayleigh_foc_closed_form: 2 e^{2r(T-t)}/lambda^2 <= betaR*gammaR ("
           << 2.0 * f2 / l2 << " <= " << rp.betaR * rp.gammaR
           << "); the narrow-variance term is undefined";
        throw ClosedFormDomainError(os.str());
    }
    const double u = 1.0 - rp.gammaR * a0;

    const double I0 = kSqrtPi * lambda * f * normal_cdf(-std::sqrt(2.0) * a0 / (lambda * f)) -
                      (1.0 + eta) * da * std::exp(-a0 * a0 / (f2 * l2));

    auto I_pm = [&](double sign, double weight, double sig2) {
        const double beta_r = rp.betaR;
        const double prefactor =
            weight * da *
            std::exp(sign * 0.5 * beta_r * u * a0 + 0.5 * sig2 * beta_r * beta_r * u * u);
        const double gauss_term =
            (2.0 * sig2 * f2 / l2) * (1.0 - sign * sig2 * beta_r * rp.gammaR * (1.0 - a0)) *
            std::exp(-std::pow(a0 + sign * sig2 * beta_r * u, 2) / (2.0 * sig2));
        const double sig3 = sig2 * std::sqrt(sig2);
        const double cdf_term =
            (2.0 * kSqrt2Pi * sig3 * f2 / l2) *
            (rp.gammaR - sign * beta_r * (1.0 - sign * sig2 * beta_r * rp.gammaR) * u * u) *
            normal_cdf(-sign * sig2 * beta_r * u - a0 / sig2);
        return prefactor * (gauss_term + cdf_term);
    };

    const double alphaR = rp.alphaR, alphaR_hat = rp.alpha_hat();
    const double I_plus = I_pm(+1.0, alphaR, 1.0 / inv_sig_plus);
    const double I_minus = I_pm(-1.0, alphaR_hat, 1.0 / inv_sig_minus);

    // The stated form carries no Poisson intensity; restoring the measure's
    // linear scaling keeps it comparable with the quadrature route.
    return lambda0 * (I0 + I_minus + I_plus);
}

double solve_premium(const ModelBundle& bundle, double t, bool* multiple_roots) {
    if (multiple_roots) *multiple_roots = false;
    const double theta = bundle.insurer.theta;
    const SolverConventions& cv = bundle.conventions;
    const double start = theta + std::max(cv.root_abs_tol, 1e-12);
    constexpr double kEtaCeiling = 1e6;

    auto M = [&](double eta) { return reinsurer_foc(eta, bundle, t); };

    // Expand the upper end until the condition turns negative; the premium
    // condition is eventually negative for large loadings.
    double hi = start;
    double m_hi = M(hi);
    int doublings = 0;
    while (m_hi > 0.0 && hi < kEtaCeiling) {
        hi = theta + 2.0 * (hi - theta);
        m_hi = M(hi);
        ++doublings;
    }
    if (m_hi > 0.0) {
        std::ostringstream os;
        os << "solve_premium: premium condition stayed positive up to eta=" << hi << " after "
           << doublings << " doublings; no admissible root below " << kEtaCeiling;
        throw PremiumBracketError(os.str());
    }

    // Coarse pre-scan for multiple sign changes; determinism requires a fixed
    // rule, so the smallest bracket wins and a warning is attached.
    constexpr int kScanPoints = 64;
    double lo = start, m_lo = M(start);
    if (m_lo <= 0.0) {
        std::ostringstream os;
        os << "solve_premium: premium condition non-positive at the admissibility boundary "
              "eta=theta+ (value "
           << m_lo << "); bundle lies outside the existence argument's assumptions";
        throw PremiumBracketError(os.str());
    }
    int sign_changes = 0;
    double bracket_lo = lo, bracket_hi = hi;
    double prev_eta = start, prev_m = m_lo;
    for (int i = 1; i < kScanPoints; ++i) {
        const double e = start + (hi - start) * i / (kScanPoints - 1);
        const double v = M(e);
        if (prev_m > 0.0 && v <= 0.0) {
            if (++sign_changes == 1) {
                bracket_lo = prev_eta;
                bracket_hi = e;
            }
        } else if (prev_m <= 0.0 && v > 0.0) {
            ++sign_changes;
        }
        prev_eta = e;
        prev_m = v;
    }
    if (sign_changes > 1 && multiple_roots) *multiple_roots = true;

    const double scale = std::max(1.0, std::abs(m_lo));
    double a = bracket_lo, b = bracket_hi;
    double mid = 0.5 * (a + b);
    for (int it = 0; it < 300; ++it) {
        mid = 0.5 * (a + b);
        const double v = M(mid);
        if (v > 0.0)
            a = mid;
        else
            b = mid;
        if (std::abs(v) / scale <= cv.root_abs_tol && b - a <= cv.root_rel_tol * std::max(mid, 1.0))
            break;
    }
    return 0.5 * (a + b);
}

StackelbergEquilibrium solve_stackelberg(const ModelBundle& bundle, double t) {
    StackelbergEquilibrium eq;
    eq.t_eval = t;
    eq.bundle_fingerprint = fingerprint(bundle);
    eq.eta_star = solve_premium(bundle, t, &eq.multiple_roots_warning);
    eq.a0_star = solve_retention(eq.eta_star, bundle.insurer, bundle.conventions);
    eq.da0_deta = retention_sensitivity(eq.a0_star, bundle.insurer);
    eq.retention_residual = std::abs(retention_foc(eq.a0_star, eq.eta_star, bundle.insurer));
    const double m = reinsurer_foc(eq.eta_star, bundle, t);
    const double entry =
        bundle.insurer.theta + std::max(bundle.conventions.root_abs_tol, 1e-12);
    eq.premium_residual = std::abs(m) / std::max(1.0, std::abs(reinsurer_foc(entry, bundle, t)));
    return eq;
}

double retention_policy(double a0, double t, double z, const MarketParams& market,
                        RetentionDiscountSign convention) {
    const double sign = convention == RetentionDiscountSign::Negative ? -1.0 : 1.0;
    const double cap = a0 * std::exp(sign * market.r * (market.T - t));
    return std::min(cap, z);
}

}  // namespace reins
