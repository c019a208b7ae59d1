#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "reins/model.hpp"

namespace reins {

class PremiumBracketError : public std::runtime_error {
public:
    explicit PremiumBracketError(const std::string& msg) : std::runtime_error(msg) {}
};

class ClosedFormDomainError : public std::runtime_error {
public:
    explicit ClosedFormDomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Residual of the retention first-order condition
///   F(a0) = (1 + eta) - (1 + gamma*a0) * [alpha*e^s + (1-alpha)*e^{-s}],
///   s = beta*(a0 + gamma*a0^2/2).
/// Saturates to -DBL_MAX on exponent overflow so bracketing still sees a sign.
double retention_foc(double a0, double eta, const InsurerPrefs& prefs);

/// Unique root of retention_foc: F(0) = eta > 0 and F is strictly decreasing,
/// so the root is bracketed by doubling and found by plain bisection.
double solve_retention(double eta, const InsurerPrefs& prefs,
                       const SolverConventions& conventions = {});

/// Implicit-function sensitivity of the retention root to the premium loading;
/// strictly positive for alpha >= 0.5.
double retention_sensitivity(double a0, const InsurerPrefs& prefs);

/// Residual of the reinsurer's premium first-order condition at loading eta,
/// evaluated at time t by quadrature of the stated integrand over
/// z in [a0*e^{-r(T-t)}, inf). This route is authoritative; the Rayleigh closed
/// form below is a cross-check.
double reinsurer_foc(double eta, const ModelBundle& bundle, double t);

/// Closed-form Rayleigh evaluation of the premium condition, transcribed
/// exactly from its stated form (scaled by the Poisson intensity). Known to
/// deviate from the quadrature route away from t = T; see README. Throws
/// ClosedFormDomainError when 2 e^{2r(T-t)}/lambda^2 <= betaR*gammaR, which
/// makes the narrow-variance term undefined.
double rayleigh_foc_closed_form(double eta, const ModelBundle& bundle, double t);

/// Smallest admissible root of eta -> reinsurer_foc(eta, ., t) above the
/// insurance loading theta. A 64-point pre-scan detects multiple sign changes;
/// if found, the smallest root is returned and *multiple_roots is set.
double solve_premium(const ModelBundle& bundle, double t, bool* multiple_roots = nullptr);

struct StackelbergEquilibrium {
    double eta_star = 0.0;
    double a0_star = 0.0;
    double da0_deta = 0.0;
    double retention_residual = 0.0;
    double premium_residual = 0.0;  // scaled by the bracket-entry magnitude
    double t_eval = 0.0;
    bool multiple_roots_warning = false;
    std::uint64_t bundle_fingerprint = 0;
};

StackelbergEquilibrium solve_stackelberg(const ModelBundle& bundle, double t);

/// Excess-of-loss retained amount min(a0 * e^{s*r(T-t)}, z); s = -1 under the
/// default convention, +1 under the alternative reading.
double retention_policy(double a0, double t, double z, const MarketParams& market,
                        RetentionDiscountSign convention);

}  // namespace reins
