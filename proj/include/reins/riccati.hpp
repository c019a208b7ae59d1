#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include "reins/model.hpp"
#include "reins/numerics.hpp"

namespace reins {

enum class Agent { Insurer, Reinsurer };

/// The coefficients that drive one agent's coupled system (A, H_lo, H_hi). The
/// insurer and reinsurer systems share one structure and differ only in which
/// preference parameters feed it.
struct RiccatiCoeffs {
    double kappa = 0.0;
    double sigma = 0.0;
    double rho0 = 0.0;
    double xi = 0.0;
    double alpha = 0.5;        // ambiguity attitude
    double gamma = 1.0;        // risk aversion
    double beta_equity = 1.0;  // ambiguity level toward equity risk
    double beta_vol = 1.0;     // ambiguity level toward volatility risk
    RiccatiVariant variant = RiccatiVariant::Theorem;

    static RiccatiCoeffs for_agent(Agent agent, const ModelBundle& bundle);

    /// gamma + (2*alpha - 1)*beta_equity, the denominator shared by every term.
    double denom() const { return gamma + (2.0 * alpha - 1.0) * beta_equity; }
};

/// Right-hand side of the coupled system at state (A, H_lo, H_hi). The shared
/// quantity pi_hat = [xi - (2a-1)*b0*rho0*sigma*A - g*sigma*rho0*(a*H_lo +
/// (1-a)*H_hi)] / denom is computed once and reused by all three lines. The
/// Appendix variant flips the sign of the A^2 term and drops the risk-aversion
/// factor on the H^2 term.
Eigen::Vector3d riccati_rhs(double t, const Eigen::Vector3d& state, const RiccatiCoeffs& coeffs);

Eigen::Vector3d insurer_rhs(double t, const Eigen::Vector3d& state, const MarketParams& market,
                            const InsurerPrefs& prefs, RiccatiVariant variant);
Eigen::Vector3d reinsurer_rhs(double t, const Eigen::Vector3d& state, const MarketParams& market,
                              const ReinsurerPrefs& prefs, RiccatiVariant variant);

struct RiccatiSolution {
    BackwardSolution<3> path;  // rows: A, H_lo, H_hi
    double max_fd_residual = 0.0;
    std::uint64_t bundle_fingerprint = 0;
    Agent agent = Agent::Insurer;

    double A(double t) const { return path.at(t)(0); }
    double H_lo(double t) const { return path.at(t)(1); }
    double H_hi(double t) const { return path.at(t)(2); }
    Eigen::Vector3d at(double t) const { return path.at(t); }
};

/// Solves one agent's system backward from the zero terminal condition and
/// attaches the max centered-difference residual over interior nodes as a
/// consistency diagnostic. Throws OdeBlowUpError on finite-time explosion.
RiccatiSolution solve_riccati(Agent agent, const ModelBundle& bundle);

struct ExistenceBound {
    double d = 0.0;  // sup-norm aggregate of the linear coefficient matrices
    double k = 0.0;  // quadratic coefficient matrices
    double q = 0.0;  // constant matrix
    double Delta = 0.0;
    std::complex<double> zeta1{0.0, 0.0};
    std::complex<double> zeta2{0.0, 0.0};
    double t_max = 0.0;  // +inf means global existence
    enum class Case { Zero, Positive, Negative } case_tag = Case::Positive;
    bool horizon_ok = false;  // T < t_max
    std::string note;

    std::string to_string() const;
};

/// Horizon bound below which the coupled system is guaranteed not to blow up.
/// Stated for the insurer's system; the reinsurer mapping reuses the same
/// construction on its own parameters (a conservative extrapolation, see
/// README).
ExistenceBound existence_bound(const ModelBundle& bundle, Agent agent = Agent::Insurer);

/// The three-case horizon formula alone, for direct checks against known
/// aggregates.
ExistenceBound existence_bound_from_aggregates(double d, double k, double q, double T);

}  // namespace reins
