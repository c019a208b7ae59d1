#pragma once

#include <functional>

#include "reins/equilibrium.hpp"
#include "reins/model.hpp"
#include "reins/riccati.hpp"

namespace reins {

/// A fully solved game: both agents' coupled ODE solutions plus the premium /
/// retention equilibrium, all from one bundle. Construction cross-checks the
/// configuration fingerprints so pieces of different solves cannot be mixed.
struct StrategyProfile {
    ModelBundle bundle;
    RiccatiSolution insurer_riccati;
    RiccatiSolution reinsurer_riccati;
    StackelbergEquilibrium equilibrium;

    StrategyProfile(ModelBundle bundle_, RiccatiSolution insurer_, RiccatiSolution reinsurer_,
                    StackelbergEquilibrium equilibrium_);

    static StrategyProfile solve(const ModelBundle& bundle, double t_eval);
};

/// Equilibrium stock allocation of the insurer at time t.
double pi_insurer(double t, const StrategyProfile& profile);

/// Equilibrium stock allocation of the reinsurer. The stated numerator carries
/// betaRY * sigma * A_R(t); conventions.reinsurer_pi_mirror substitutes the
/// structural mirror betaR0 * rho0 * sigma * A_R(t).
double pi_reinsurer(double t, const StrategyProfile& profile);

/// Deterministic-volatility benchmark allocation for a stock with drift mu and
/// volatility sigma0.
double pi_no_sv(double t, double mu, double sigma0, const MarketParams& market,
                const InsurerPrefs& prefs);

/// Benchmark tied to the bundle's market price of variance risk via
/// xi = (mu - r)/sigma0^2, which reduces to xi * e^{-r(T-t)} / denom.
double pi_no_sv_tied(double t, const MarketParams& market, const InsurerPrefs& prefs);

struct DistortionSet {
    double phi0_lo = 0.0, phiY_lo = 0.0, phiZ_lo = 0.0;
    double phi0_hi = 0.0, phiY_hi = 0.0, phiZ_hi = 0.0;
};

/// The six probability distortions (worst-case and best-case measures) at time
/// t, variance level y and claim size z.
DistortionSet distortions_insurer(double t, double y, double z, const StrategyProfile& profile);
DistortionSet distortions_reinsurer(double t, double y, double z, const StrategyProfile& profile);

struct AmbiguityLevels {
    double beta = 1.0;
    double beta0 = 1.0;
    double betaY = 1.0;
};

/// Relative-entropy penalty rate of a candidate distortion triple against the
/// reference measure. Throws std::domain_error when phiZ reaches 1 anywhere it
/// is evaluated.
double penalty_rate(double phi0, double phiY, const std::function<double(double)>& phiZ,
                    const AmbiguityLevels& levels, const ClaimMeasure& measure,
                    const SolverConventions& conventions);

/// Time-integral intercept B(t) (or B_R(t)) of the affine value function.
double value_intercept(Agent agent, const StrategyProfile& profile, double t);

/// Equilibrium value e^{r(T-t)} x + A(t) y + B(t).
double value_function(Agent agent, double t, double x, double y, const StrategyProfile& profile);

}  // namespace reins
