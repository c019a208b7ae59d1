#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "reins/numerics.hpp"

using namespace reins;

TEST_CASE("normal_cdf matches the independent series oracle") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(40.0) == doctest::Approx(1.0).epsilon(1e-16));
    CHECK(normal_cdf(-40.0) == doctest::Approx(0.0).epsilon(1e-16));
    // frozen from the series oracle: Phi(1) = 0.841344746068542948...
    CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
    for (double x : {-3.0, -1.7, -0.4, 0.3, 1.0, 2.2, 3.5}) {
        const double oracle = static_cast<double>(oracles::normal_cdf_series(x));
        CHECK(std::abs(normal_cdf(x) - oracle) < 1e-14);
    }
}

TEST_CASE("normal_cdf symmetry and monotonicity") {
    for (int i = 0; i <= 10000; ++i) {
        const double x = -8.0 + 16.0 * i / 10000.0;
        CHECK(std::abs(normal_cdf(x) + normal_cdf(-x) - 1.0) <= 1e-15);
        if (i > 0) {
            const double prev = -8.0 + 16.0 * (i - 1) / 10000.0;
            CHECK(normal_cdf(prev) <= normal_cdf(x));
        }
    }
}

TEST_CASE("integrate_claim sums discrete atoms exactly") {
    const auto nu = ClaimMeasure::discrete_atoms({{1.0, 2.0}, {3.0, 1.0}});
    SolverConventions cv;
    auto identity = [](double z) { return z; };

    const auto all = integrate_claim(nu, identity, 0.0, cv);
    CHECK(all.value == 5.0);
    CHECK(all.error_estimate == 0.0);

    const auto tail = integrate_claim(nu, identity, 2.0, cv);
    CHECK(tail.value == 3.0);

    const auto none = integrate_claim(nu, identity, 10.0, cv);
    CHECK(none.value == 0.0);
}

TEST_CASE("integrate_claim reproduces Rayleigh moments") {
    SolverConventions cv;
    const auto nu = ClaimMeasure::rayleigh_compound_poisson(1.0, 1.0);
    const auto second = integrate_claim(nu, [](double z) { return z * z; }, 0.0, cv);
    CHECK(second.value == doctest::Approx(1.0).epsilon(1e-10));

    // independent naive grid oracle
    const double oracle = oracles::rayleigh_integral_grid([](double z) { return z * z; }, 1.0,
                                                          1.0, 0.0, 12.0, 2000000);
    CHECK(second.value == doctest::Approx(oracle).epsilon(1e-9));

    // certified truncation: residual tail mass below the relative budget
    const double tail = nu.tail_mass(second.truncation_point);
    CHECK(tail <= cv.tail_rel_tol * std::max(std::abs(second.value), cv.quad_abs_tol));
}

TEST_CASE("integrate_claim handles scaled Rayleigh measures") {
    SolverConventions cv;
    const auto nu = ClaimMeasure::rayleigh_compound_poisson(2.0, 1.0);
    const auto mean = integrate_claim(nu, [](double z) { return z; }, 0.0, cv);
    CHECK(mean.value == doctest::Approx(2.0 * 0.8862269254527580).epsilon(1e-10));
    const auto partial = integrate_claim(nu, [](double z) { return 1.0; }, 1.0, cv);
    CHECK(partial.value == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-10));
}

TEST_CASE("integrate_backward solves scalar linear problems") {
    const TimeGrid grid{1.0, 10000};
    using V1 = Eigen::Matrix<double, 1, 1>;

    SUBCASE("exponential decay backward") {
        auto rhs = [](double, const V1& y) { return y; };
        const auto sol = integrate_backward<1>(rhs, V1::Constant(1.0), grid);
        CHECK(sol.states(0, grid.steps) == 1.0);
        CHECK(std::abs(sol.states(0, 0) - std::exp(-1.0)) < 1e-10);
    }

    SUBCASE("zero derivative keeps the terminal value") {
        auto rhs = [](double, const V1&) { return V1::Zero().eval(); };
        const auto sol = integrate_backward<1>(rhs, V1::Constant(3.5), grid);
        for (int k = 0; k <= grid.steps; k += 500) CHECK(sol.states(0, k) == 3.5);
    }

    SUBCASE("gaussian closed form y(t) = exp(1 - t^2)") {
        auto rhs = [](double t, const V1& y) { return (-2.0 * t * y).eval(); };
        const auto sol = integrate_backward<1>(rhs, V1::Constant(1.0), grid);
        CHECK(std::abs(sol.states(0, 0) - std::exp(1.0)) < 1e-9);
        CHECK(std::abs(sol.at(0.5)(0) - std::exp(1.0 - 0.25)) < 1e-9);
    }
}

TEST_CASE("integrate_backward converges at fourth order") {
    using V1 = Eigen::Matrix<double, 1, 1>;
    // a faster linear rate keeps the errors well above rounding noise
    auto rhs = [](double, const V1& y) { return (4.0 * y).eval(); };
    double prev_err = 0.0;
    for (int n : {500, 1000, 2000}) {
        const auto sol = integrate_backward<1>(rhs, V1::Constant(1.0), TimeGrid{2.0, n});
        const double err = std::abs(sol.states(0, 0) - std::exp(-8.0));
        if (prev_err > 0.0) CHECK(prev_err / err >= 14.0);
        prev_err = err;
    }
}

TEST_CASE("integrate_backward reports blow-up time") {
    using V1 = Eigen::Matrix<double, 1, 1>;
    auto rhs = [](double, const V1& y) { return (-(y.array() * y.array())).matrix().eval(); };
    // backward from y(1) = 5: y(t) = 1/(t - 0.8), singular at t = 0.8
    try {
        integrate_backward<1>(rhs, V1::Constant(5.0), TimeGrid{1.0, 10000});
        FAIL("expected a blow-up");
    } catch (const OdeBlowUpError& e) {
        CHECK(e.time > 0.79);
        CHECK(e.time < 0.81);
    }
}

TEST_CASE("hermite interpolation matches grid nodes exactly") {
    using V1 = Eigen::Matrix<double, 1, 1>;
    auto rhs = [](double, const V1& y) { return y; };
    const TimeGrid grid{1.0, 100};
    const auto sol = integrate_backward<1>(rhs, V1::Constant(1.0), grid);
    for (int k = 0; k <= 100; k += 7) {
        CHECK(sol.at(grid.node(k))(0) == doctest::Approx(sol.states(0, k)).epsilon(1e-15));
    }
    // interpolant keeps the integrator's accuracy between nodes
    CHECK(std::abs(sol.at(0.345)(0) - std::exp(0.345 - 1.0)) < 1e-9);
}

TEST_CASE("non-convergent integrands raise with the best estimate attached") {
    SolverConventions cv;
    cv.quad_abs_tol = 1e-15;
    cv.quad_rel_tol = 1e-15;
    const auto nu = ClaimMeasure::rayleigh_compound_poisson(1.0, 1.0);
    auto wild = [](double z) { return std::sin(3.0e7 * z); };
    try {
        integrate_claim(nu, wild, 0.0, cv);
        FAIL("expected the panel budget to run out");
    } catch (const QuadratureError& e) {
        CHECK(std::isfinite(e.best_estimate));
        CHECK(e.error_bound >= 0.0);
    }
}
