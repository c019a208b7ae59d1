#include "reins/model.hpp"

#include <cstring>
#include <sstream>
#include <stdexcept>

namespace reins {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;
}

ClaimMeasure ClaimMeasure::rayleigh_compound_poisson(double lambda0, double lambda) {
    ClaimMeasure m;
    m.kind_ = Kind::RayleighCompoundPoisson;
    m.lambda0_ = lambda0;
    m.lambda_ = lambda;
    return m;
}

ClaimMeasure ClaimMeasure::discrete_atoms(std::vector<ClaimAtom> atoms) {
    ClaimMeasure m;
    m.kind_ = Kind::DiscreteAtoms;
    m.atoms_ = std::move(atoms);
    return m;
}

double ClaimMeasure::total_mass() const {
    if (kind_ == Kind::RayleighCompoundPoisson) return lambda0_;
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight;
    return s;
}

double ClaimMeasure::first_moment() const {
    if (kind_ == Kind::RayleighCompoundPoisson) return lambda0_ * lambda_ * kSqrtPi / 2.0;
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight * a.size;
    return s;
}

double ClaimMeasure::second_moment() const {
    if (kind_ == Kind::RayleighCompoundPoisson) return lambda0_ * lambda_ * lambda_;
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight * a.size * a.size;
    return s;
}

double ClaimMeasure::density(double z) const {
    if (kind_ != Kind::RayleighCompoundPoisson || z <= 0.0) return 0.0;
    const double u = z / lambda_;
    return lambda0_ * (2.0 * z / (lambda_ * lambda_)) * std::exp(-u * u);
}

double ClaimMeasure::tail_mass(double z) const {
    if (kind_ == Kind::RayleighCompoundPoisson) {
        if (z <= 0.0) return lambda0_;
        const double u = z / lambda_;
        return lambda0_ * std::exp(-u * u);
    }
    double s = 0.0;
    for (const auto& a : atoms_) {
        if (a.size >= z) s += a.weight;
    }
    return s;
}

std::string ValidationReport::to_string() const {
    if (ok()) return "valid";
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << '\n';
        os << "violation: " << violations[i];
    }
    return os.str();
}

ValidationReport validate(const ModelBundle& bundle) {
    ValidationReport report;
    auto fail = [&report](const std::string& msg) { report.violations.push_back(msg); };

    const MarketParams& m = bundle.market;
    if (!(m.r >= 0.0)) fail("market.r must be >= 0");
    if (!(m.kappa > 0.0)) fail("market.kappa must be > 0");
    if (!(m.delta > 0.0)) fail("market.delta must be > 0");
    if (!(m.sigma >= 0.0)) fail("market.sigma must be >= 0");
    if (!(m.T > 0.0)) fail("market.T must be > 0");
    if (!(std::abs(m.rho0) <= 1.0)) fail("market.rho0 must lie in [-1, 1]");
    if (!(m.y0 >= 0.0)) fail("market.y0 must be >= 0");
    if (m.kappa > 0.0 && m.delta > 0.0 && !(2.0 * m.kappa * m.delta >= m.sigma * m.sigma))
        fail("Feller condition 2*kappa*delta >= sigma^2 violated");

    const InsurerPrefs& p = bundle.insurer;
    if (!(p.alpha >= 0.5 && p.alpha <= 1.0)) fail("insurer.alpha must lie in [0.5, 1]");
    if (!(p.gamma > 0.0)) fail("insurer.gamma must be > 0");
    if (!(p.beta > 0.0)) fail("insurer.beta must be > 0");
    if (!(p.beta0 > 0.0)) fail("insurer.beta0 must be > 0");
    if (!(p.betaY > 0.0)) fail("insurer.betaY must be > 0");
    if (!(p.theta > 0.0)) fail("insurer.theta must be > 0");

    const ReinsurerPrefs& q = bundle.reinsurer;
    if (!(q.alphaR >= 0.5 && q.alphaR <= 1.0)) fail("reinsurer.alphaR must lie in [0.5, 1]");
    if (!(q.gammaR > 0.0)) fail("reinsurer.gammaR must be > 0");
    if (!(q.betaR > 0.0)) fail("reinsurer.betaR must be > 0");
    if (!(q.betaR0 > 0.0)) fail("reinsurer.betaR0 must be > 0");
    if (!(q.betaRY > 0.0)) fail("reinsurer.betaRY must be > 0");

    const ClaimMeasure& nu = bundle.claims;
    if (nu.kind() == ClaimMeasure::Kind::RayleighCompoundPoisson) {
        if (!(nu.lambda0() > 0.0)) fail("claims.lambda0 must be > 0");
        if (!(nu.lambda() > 0.0)) fail("claims.lambda must be > 0");
        // Exponential-moment condition: the premium condition integrates
        // exp(betaR*gammaR*w^2/2) against the Rayleigh tail, with w compounded
        // by e^{r(T-t)}; the worst-case growth rate (t=0) must stay below the
        // Gaussian decay rate 1/lambda^2.
        if (nu.lambda() > 0.0 && q.betaR > 0.0 && q.gammaR > 0.0) {
            const double growth = 0.5 * q.betaR * q.gammaR * std::exp(2.0 * m.r * m.T);
            if (!(growth < 1.0 / (nu.lambda() * nu.lambda())))
                fail("exponential moment condition betaR*gammaR*e^{2rT}/2 < 1/lambda^2 violated");
        }
    } else {
        if (nu.atoms().empty()) fail("claims.atoms must be non-empty");
        for (std::size_t i = 0; i < nu.atoms().size(); ++i) {
            if (!(nu.atoms()[i].size > 0.0))
                fail("claims.atoms[" + std::to_string(i) + "].size must be > 0");
            if (!(nu.atoms()[i].weight > 0.0))
                fail("claims.atoms[" + std::to_string(i) + "].weight must be > 0");
        }
        if (!std::isfinite(nu.total_mass())) fail("claims total mass must be finite");
        if (!std::isfinite(nu.second_moment())) fail("claims second moment must be finite");
    }

    const SolverConventions& c = bundle.conventions;
    if (c.ode_steps < 100) fail("numerics.ode_steps must be >= 100");
    if (!(c.root_abs_tol > 0.0)) fail("numerics.root_abs_tol must be > 0");
    if (!(c.root_rel_tol > 0.0)) fail("numerics.root_rel_tol must be > 0");
    if (!(c.quad_abs_tol > 0.0)) fail("numerics.quad_abs_tol must be > 0");
    if (!(c.quad_rel_tol > 0.0)) fail("numerics.quad_rel_tol must be > 0");
    if (!(c.tail_rel_tol > 0.0)) fail("numerics.tail_rel_tol must be > 0");

    return report;
}

double premium_rate(double theta, const ClaimMeasure& measure) {
    if (!(theta > 0.0) && theta != 0.0)
        throw std::invalid_argument("premium_rate: loading must be finite and non-negative");
    const double mean = measure.first_moment();
    if (!std::isfinite(mean) || mean < 0.0)
        throw std::invalid_argument("premium_rate: claim measure has no finite first moment");
    return (1.0 + theta) * mean;
}

namespace {

// FNV-1a over raw bytes; stable across runs on a fixed platform.
void hash_bytes(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
}

void hash_double(std::uint64_t& h, double v) { hash_bytes(h, &v, sizeof(v)); }

}  // namespace

std::uint64_t fingerprint(const ModelBundle& b) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : {b.market.r, b.market.xi, b.market.kappa, b.market.delta, b.market.sigma,
                     b.market.rho0, b.market.T, b.market.y0, b.insurer.alpha, b.insurer.gamma,
                     b.insurer.beta, b.insurer.beta0, b.insurer.betaY, b.insurer.theta,
                     b.reinsurer.alphaR, b.reinsurer.gammaR, b.reinsurer.betaR, b.reinsurer.betaR0,
                     b.reinsurer.betaRY})
        hash_double(h, v);
    const int kind = static_cast<int>(b.claims.kind());
    hash_bytes(h, &kind, sizeof(kind));
    if (b.claims.kind() == ClaimMeasure::Kind::RayleighCompoundPoisson) {
        hash_double(h, b.claims.lambda0());
        hash_double(h, b.claims.lambda());
    } else {
        for (const auto& a : b.claims.atoms()) {
            hash_double(h, a.size);
            hash_double(h, a.weight);
        }
    }
    const SolverConventions& c = b.conventions;
    hash_bytes(h, &c.ode_steps, sizeof(c.ode_steps));
    for (double v : {c.root_abs_tol, c.root_rel_tol, c.quad_abs_tol, c.quad_rel_tol, c.tail_rel_tol})
        hash_double(h, v);
    const int flags[] = {static_cast<int>(c.retention_discount_sign),
                         static_cast<int>(c.riccati_variant), c.reinsurer_pi_mirror ? 1 : 0,
                         c.intercept_claim_scale ? 1 : 0};
    hash_bytes(h, flags, sizeof(flags));
    return h;
}

}  // namespace reins
