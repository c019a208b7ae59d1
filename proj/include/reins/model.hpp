#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace reins {

/// Heston market parameters. rho = sqrt(1 - rho0^2) is always recomputed so
/// rho0^2 + rho^2 == 1 holds to machine epsilon.
struct MarketParams {
    double r = 0.05;       // risk-free rate
    double xi = 1.0;       // market price of variance risk
    double kappa = 3.0;    // variance mean-reversion rate
    double delta = 0.09;   // long-run variance level
    double sigma = 0.5;    // vol-of-vol
    double rho0 = 0.5;     // stock/variance correlation
    double T = 10.0;       // horizon
    double y0 = 0.09;      // initial variance, used only when evaluating distortions at a state

    double rho() const { return std::sqrt(std::max(0.0, 1.0 - rho0 * rho0)); }
};

/// Insurer preferences. alpha_hat = 1 - alpha is derived, never stored.
struct InsurerPrefs {
    double alpha = 0.8;    // ambiguity attitude, in [0.5, 1]
    double gamma = 0.5;    // risk aversion
    double beta = 0.1;     // ambiguity level, claims
    double beta0 = 4.0;    // ambiguity level, equity
    double betaY = 4.0;    // ambiguity level, volatility
    double theta = 0.2;    // insurance premium loading (calibration default, see README)

    double alpha_hat() const { return 1.0 - alpha; }
};

struct ReinsurerPrefs {
    double alphaR = 0.8;   // calibration default
    double gammaR = 0.5;   // calibration default
    double betaR = 0.1;
    double betaR0 = 4.0;
    double betaRY = 4.0;

    double alpha_hat() const { return 1.0 - alphaR; }
};

struct ClaimAtom {
    double size = 1.0;    // z > 0
    double weight = 1.0;  // w > 0
};

/// Levy measure of claim sizes. Either a Rayleigh compound Poisson measure
/// nu(dz) = lambda0 * (2z/lambda^2) exp(-z^2/lambda^2) dz, or a finite list of
/// atoms nu = sum w_i * delta_{z_i} (exact integrals, used for oracle checks).
class ClaimMeasure {
public:
    enum class Kind { RayleighCompoundPoisson, DiscreteAtoms };

    ClaimMeasure() = default;  // Rayleigh(1, 1)

    static ClaimMeasure rayleigh_compound_poisson(double lambda0, double lambda);
    static ClaimMeasure discrete_atoms(std::vector<ClaimAtom> atoms);

    Kind kind() const { return kind_; }
    double lambda0() const { return lambda0_; }
    double lambda() const { return lambda_; }
    const std::vector<ClaimAtom>& atoms() const { return atoms_; }

    double total_mass() const;    // nu(0, inf)
    double first_moment() const;  // integral of z nu(dz)
    double second_moment() const;

    /// Rayleigh density lambda0 * (2z/lambda^2) exp(-z^2/lambda^2); zero for atoms.
    double density(double z) const;
    /// nu([z, inf)); analytic for Rayleigh, atom sum otherwise.
    double tail_mass(double z) const;

private:
    Kind kind_ = Kind::RayleighCompoundPoisson;
    double lambda0_ = 1.0;
    double lambda_ = 1.0;
    std::vector<ClaimAtom> atoms_;
};

enum class RetentionDiscountSign { Negative, Positive };
enum class RiccatiVariant { Theorem, Appendix };

/// Numerical conventions shared by every solver. The two enum switches select
/// between internally inconsistent printed forms of the model (see README);
/// defaults follow the main-text statements.
struct SolverConventions {
    int ode_steps = 10000;
    double root_abs_tol = 1e-12;
    double root_rel_tol = 1e-10;
    double quad_abs_tol = 1e-12;
    double quad_rel_tol = 1e-10;
    double tail_rel_tol = 1e-12;
    RetentionDiscountSign retention_discount_sign = RetentionDiscountSign::Negative;
    RiccatiVariant riccati_variant = RiccatiVariant::Theorem;
    // Reinsurer stock allocation: false = numerator carries betaRY * sigma * A_R
    // (as stated), true = structural mirror betaR0 * rho0 * sigma * A_R.
    bool reinsurer_pi_mirror = false;
    // Value intercept drift term: false = kappa * delta * A(s) (the model's
    // long-run level), true = kappa * lambda * A(s) strictly as stated.
    bool intercept_claim_scale = false;
};

/// Everything a solve needs. Immutable by convention after construction;
/// shared freely across worker threads.
struct ModelBundle {
    MarketParams market;
    InsurerPrefs insurer;
    ReinsurerPrefs reinsurer;
    ClaimMeasure claims;
    SolverConventions conventions;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

/// Checks every standing assumption: parameter ranges, the Feller condition
/// 2*kappa*delta >= sigma^2, finiteness of the claim measure and its first two
/// moments, and the exponential-moment bound required by the premium
/// condition's integrands (Rayleigh: growth rate beta_r*gamma_R*e^{2rT}/2 must
/// stay below 1/lambda^2). Violations are reported, not thrown.
ValidationReport validate(const ModelBundle& bundle);

/// Expected-value-principle premium per unit time: (1 + theta) * E[claim flow].
double premium_rate(double theta, const ClaimMeasure& measure);

/// Order-sensitive hash of every parameter; used to check that the pieces of a
/// strategy profile were solved from the same bundle.
std::uint64_t fingerprint(const ModelBundle& bundle);

}  // namespace reins
