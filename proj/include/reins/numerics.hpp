#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>

#include "reins/model.hpp"

namespace reins {

/// Uniform grid on [0, horizon] with steps+1 nodes; both endpoints are exact.
struct TimeGrid {
    double horizon = 1.0;
    int steps = 1;

    double step() const { return horizon / steps; }
    int size() const { return steps + 1; }
    double node(int k) const {
        if (k == steps) return horizon;  // avoid k*h rounding drift at the far end
        return k * horizon / steps;
    }
};

/// Standard normal CDF, absolute error below 1e-14.
double normal_cdf(double x);

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    double truncation_point = 0.0;  // z_max for Rayleigh; largest atom otherwise
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& msg, double best, double error)
        : std::runtime_error(msg), best_estimate(best), error_bound(error) {}
    double best_estimate;
    double error_bound;
};

/// Integrates f against the claim measure over [lower, inf). Discrete measures
/// are summed exactly in stored atom order (zero error estimate). Rayleigh
/// measures are truncated at the analytic tail quantile, so that the residual
/// tail mass is certified below tail_rel_tol * max(|value|, quad_abs_tol), then
/// integrated by adaptive Gauss-Kronrod panels.
QuadratureResult integrate_claim(const ClaimMeasure& measure,
                                 const std::function<double(double)>& f, double lower,
                                 const SolverConventions& conventions);

/// Adaptive G7/K15 on a finite interval; throws QuadratureError when the panel
/// budget runs out before the tolerance is met.
double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double rel_tol);

class OdeBlowUpError : public std::runtime_error {
public:
    OdeBlowUpError(double t, double magnitude)
        : std::runtime_error("ODE solution exceeded 1e8 in magnitude at t=" + std::to_string(t)),
          time(t), state_magnitude(magnitude) {}
    double time;
    double state_magnitude;
};

/// Backward integration result: states and right-hand-side values at every grid
/// node (column k belongs to grid node k). Off-grid evaluation uses the cubic
/// Hermite interpolant built from the stored derivatives, so it keeps the
/// integrator's order of accuracy.
template <int N>
struct BackwardSolution {
    TimeGrid grid;
    Eigen::Matrix<double, N, Eigen::Dynamic> states;
    Eigen::Matrix<double, N, Eigen::Dynamic> derivs;

    Eigen::Matrix<double, N, 1> at(double t) const {
        const double h = grid.step();
        if (t <= 0.0) return states.col(0);
        if (t >= grid.horizon) return states.col(grid.steps);
        int k = static_cast<int>(t / h);
        if (k >= grid.steps) k = grid.steps - 1;
        const double u = (t - grid.node(k)) / h;
        const double u2 = u * u, u3 = u2 * u;
        const double h00 = 2 * u3 - 3 * u2 + 1;
        const double h10 = u3 - 2 * u2 + u;
        const double h01 = -2 * u3 + 3 * u2;
        const double h11 = u3 - u2;
        return h00 * states.col(k) + (h10 * h) * derivs.col(k) + h01 * states.col(k + 1) +
               (h11 * h) * derivs.col(k + 1);
    }
};

/// Classical fixed-step RK4 from the terminal condition at t=horizon down to
/// t=0. Throws OdeBlowUpError as soon as any state component passes 1e8 in
/// magnitude, reporting the first offending time.
template <int N, class Rhs>
BackwardSolution<N> integrate_backward(Rhs&& rhs, const Eigen::Matrix<double, N, 1>& terminal,
                                       const TimeGrid& grid) {
    using State = Eigen::Matrix<double, N, 1>;
    BackwardSolution<N> out;
    out.grid = grid;
    out.states.resize(N, grid.size());
    out.derivs.resize(N, grid.size());

    const double h = -grid.step();  // stepping toward t=0
    State y = terminal;
    out.states.col(grid.steps) = y;
    out.derivs.col(grid.steps) = rhs(grid.horizon, y);

    for (int k = grid.steps; k > 0; --k) {
        const double t = grid.node(k);
        const State k1 = rhs(t, y);
        const State k2 = rhs(t + 0.5 * h, (y + (0.5 * h) * k1).eval());
        const State k3 = rhs(t + 0.5 * h, (y + (0.5 * h) * k2).eval());
        const State k4 = rhs(t + h, (y + h * k3).eval());
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double mag = y.template lpNorm<Eigen::Infinity>();
        if (!(mag <= 1e8)) throw OdeBlowUpError(grid.node(k - 1), mag);
        out.states.col(k - 1) = y;
        out.derivs.col(k - 1) = rhs(grid.node(k - 1), y);
    }
    return out;
}

}  // namespace reins
