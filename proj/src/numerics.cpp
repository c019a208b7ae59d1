#include "reins/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace reins {

double normal_cdf(double x) {
    // erfc keeps full accuracy in both tails; 0.5*erfc(-x/sqrt(2)) = Phi(x).
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

namespace {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
constexpr double kKronrodNodes[8] = {
    0.0,
    0.2077849550078984676007,
    0.4058451513773971669066,
    0.5860872354676911302941,
    0.7415311855993944398639,
    0.8648644233597690727897,
    0.9491079123427585245262,
    0.9914553711208126392069,
};
constexpr double kKronrodWeights[8] = {
    0.2094821410847278280130, 0.2044329400752988924142, 0.1903505780647854099133,
    0.1690047266392679028266, 0.1406532597155259187452, 0.1047900103222501838399,
    0.0630920926299785532907, 0.0229353220105292249637,
};
constexpr double kGaussWeights[4] = {
    0.4179591836734693877551,  // node 0
    0.3818300505051189449504,  // node +-2
    0.2797053914892766679015,  // node +-4
    0.1294849661688696932706,  // node +-6
};

struct PanelEstimate {
    double value;
    double error;
};

PanelEstimate g7k15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = f(c);
    double k15 = kKronrodWeights[0] * f0;
    double g7 = kGaussWeights[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double fsum = f(c - dx) + f(c + dx);
        k15 += kKronrodWeights[i] * fsum;
        if (i % 2 == 0) g7 += kGaussWeights[i / 2] * fsum;
    }
    k15 *= half;
    g7 *= half;
    const double diff = std::abs(k15 - g7);
    // standard (200*diff)^1.5 sharpening, capped by the raw difference scale
    const double err = std::min(diff, std::pow(200.0 * diff, 1.5) / 200.0 + 1e-300);
    return {k15, std::max(err, std::abs(k15) * 1e-16)};
}

// Depth-first adaptive subdivision with a length-proportional error budget.
double adaptive_g7k15(const std::function<double(double)>& f, double a, double b, double abs_tol,
                      double rel_tol, double* error_out) {
    if (!(b > a)) {
        if (error_out) *error_out = 0.0;
        return 0.0;
    }
    const PanelEstimate whole = g7k15(f, a, b);
    const double scale = std::max(std::abs(whole.value), 1e-300);
    const double budget = std::max(abs_tol, rel_tol * scale);

    struct Panel {
        double a, b;
    };
    std::vector<Panel> stack;
    stack.push_back({a, b});
    const double total_len = b - a;
    double sum = 0.0;
    double err_sum = 0.0;
    int panels_done = 0;
    constexpr int kMaxPanels = 20000;

    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const PanelEstimate e = g7k15(f, p.a, p.b);
        const double local_budget = budget * ((p.b - p.a) / total_len);
        const double width = p.b - p.a;
        const double mid = 0.5 * (p.a + p.b);
        const bool can_split = width > total_len * 1e-12 && mid > p.a && mid < p.b;
        if (e.error <= local_budget || !can_split) {
            sum += e.value;
            err_sum += e.error;
            if (++panels_done > kMaxPanels)
                throw QuadratureError("quadrature did not converge within the panel budget",
                                      sum + e.value, err_sum);
        } else {
            stack.push_back({mid, p.b});
            stack.push_back({p.a, mid});
            if (static_cast<int>(stack.size()) > kMaxPanels)
                throw QuadratureError("quadrature did not converge within the panel budget", sum,
                                      err_sum);
        }
    }
    if (error_out) *error_out = err_sum;
    return sum;
}

}  // namespace

double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double rel_tol) {
    return adaptive_g7k15(f, a, b, abs_tol, rel_tol, nullptr);
}

QuadratureResult integrate_claim(const ClaimMeasure& measure,
                                 const std::function<double(double)>& f, double lower,
                                 const SolverConventions& conventions) {
    lower = std::max(lower, 0.0);
    QuadratureResult result;

    if (measure.kind() == ClaimMeasure::Kind::DiscreteAtoms) {
        double sum = 0.0;
        double zmax = lower;
        for (const auto& atom : measure.atoms()) {
            if (atom.size >= lower) {
                sum += atom.weight * f(atom.size);
                zmax = std::max(zmax, atom.size);
            }
        }
        result.value = sum;
        result.error_estimate = 0.0;
        result.truncation_point = zmax;
        return result;
    }

    const double lambda0 = measure.lambda0();
    const double lambda = measure.lambda();

    // Truncate where the analytic tail mass drops below the certified budget;
    // solving lambda0 * exp(-z^2/lambda^2) = eps gives the quantile directly.
    const double floor = conventions.quad_abs_tol;
    const double eps = std::max(conventions.tail_rel_tol * floor, 1e-300);
    double zmax = lower;
    if (lambda0 > eps) {
        zmax = std::max(lower, lambda * std::sqrt(std::log(lambda0 / eps)));
        // Push further out while the integrand itself is still visible there, to
        // cover integrands that grow against the Gaussian tail. exp(-z^2/lambda^2)
        // underflows past ~26.6 lambda, so the cap loses nothing.
        const double cap = lower + 27.0 * lambda;
        while (zmax < cap && std::abs(f(zmax)) * measure.tail_mass(zmax) > eps) zmax *= 1.05;
        zmax = std::min(zmax, cap);
    }
    result.truncation_point = zmax;
    if (zmax <= lower) {
        result.value = 0.0;
        result.error_estimate = measure.tail_mass(lower);
        return result;
    }

    auto integrand = [&](double z) { return f(z) * measure.density(z); };
    double err = 0.0;
    result.value = adaptive_g7k15(integrand, lower, zmax, conventions.quad_abs_tol,
                                  conventions.quad_rel_tol, &err);
    result.error_estimate = err + measure.tail_mass(zmax);
    return result;
}

}  // namespace reins
