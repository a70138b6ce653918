#include <doctest.h>

#include <cmath>

#include "decaylab/integrator.hpp"
#include "decaylab/spectrum.hpp"

using namespace decaylab;

namespace {

// closed form for the kernel equation v' = -c v^{p+1}, v(0) = a > 0
double power_decay(double a, double c, double p, double t) {
    return std::pow(std::pow(a, -p) + c * p * t, -1.0 / p);
}

double state_at(const Trajectory& traj, double t, std::size_t mode) {
    std::size_t best = 0;
    double bestd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.samples(); ++i) {
        const double d = std::abs(traj.times[i] - t);
        if (d < bestd) {
            bestd = d;
            best = i;
        }
    }
    REQUIRE(bestd < 1e-9);
    return traj.states[best][mode];
}

} // namespace

TEST_CASE("ode2_slow reproduces the closed-form kernel decay") {
    const auto prob = make_ode2_slow();
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 4.0;
    cfg.t_ramp = 1e30;  // uniform steps
    cfg.store_states = true;
    const auto traj = integrate(prob, StateVector({1.0, 0.0}), cfg);
    CHECK(traj.terminated == Termination::completed);
    CHECK(state_at(traj, 4.0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("linear problems are advanced exactly") {
    const auto prob = make_linear(SpectrumSpec::make({0.0, 2.0}, {1, 1}));
    IntegratorConfig cfg;
    cfg.dt = 0.1;
    cfg.t_end = std::log(2.0);
    cfg.store_states = true;
    for (auto scheme : {Scheme::etd1, Scheme::etd2rk}) {
        cfg.scheme = scheme;
        const auto traj = integrate(prob, StateVector({1.0, 1.0}), cfg);
        CHECK(state_at(traj, cfg.t_end, 0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(state_at(traj, cfg.t_end, 1) == doctest::Approx(0.25).epsilon(1e-12));
    }
    // error against the semigroup stays at roundoff regardless of dt
    cfg.scheme = Scheme::etd2rk;
    cfg.dt = 0.23;
    const auto traj = integrate(prob, StateVector({0.3, -0.7}), cfg);
    const auto exact = semigroup_apply(prob.spectrum, StateVector({0.3, -0.7}), cfg.t_end);
    for (std::size_t j = 0; j < 2; ++j)
        CHECK(state_at(traj, cfg.t_end, j) == doctest::Approx(exact[j]).epsilon(1e-12));
}

TEST_CASE("homogeneous data on the interval follow the scalar oracle") {
    const auto prob = make_neumann_interval(8, 2.0, 1.0, default_bounds_seed, 500);
    StateVector u0(prob.spectrum.total_dim);
    u0[0] = 0.1;
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 100.0;
    cfg.store_states = true;
    const auto traj = integrate(prob, u0, cfg);
    for (double t : {1.0, 10.0, 100.0}) {
        std::size_t best = 0;
        double bestd = 1e300;
        for (std::size_t i = 0; i < traj.samples(); ++i)
            if (std::abs(traj.times[i] - t) < bestd) {
                bestd = std::abs(traj.times[i] - t);
                best = i;
            }
        // samples thin out late; compare at the nearest recorded time
        CHECK(traj.norm_H[best] ==
              doctest::Approx(power_decay(0.1, 1.0, 2.0, traj.times[best])).epsilon(1e-6));
    }
}

TEST_CASE("the two-mode fast system follows its closed form") {
    // oracle: x = e^{-t}, y' + beta y = 2 e^{-2t} from y(0) = 0 gives
    // y = 2 (e^{-2t} - e^{-beta t}) / (beta - 2)
    const double beta = 10.0;
    const auto prob = make_ode2_fast(1.0, beta, 1.0, 1.0);
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 3.0;
    cfg.t_ramp = 1e30;
    cfg.store_states = true;
    const auto traj = integrate(prob, StateVector({1.0, 0.0}), cfg);
    for (double t : {1.0, 2.0, 3.0}) {
        const double y = 2.0 * (std::exp(-2.0 * t) - std::exp(-beta * t)) / (beta - 2.0);
        CHECK(state_at(traj, t, 0) == doctest::Approx(std::exp(-t)).epsilon(1e-9));
        CHECK(state_at(traj, t, 1) == doctest::Approx(y).epsilon(1e-6));
    }
    // x(0) = 0 pins x at zero and leaves y purely linear at rate beta
    const auto traj0 = integrate(prob, StateVector({0.0, 0.5}), cfg);
    for (double t : {1.0, 3.0}) {
        CHECK(state_at(traj0, t, 0) == 0.0);
        CHECK(state_at(traj0, t, 1) == doctest::Approx(0.5 * std::exp(-beta * t)).epsilon(1e-12));
    }
    // same degeneracy for the power-law system
    const auto slow = make_ode2_slow();
    const auto trajs = integrate(slow, StateVector({0.0, 0.3}), cfg);
    for (double t : {1.0, 3.0}) {
        CHECK(state_at(trajs, t, 0) == 0.0);
        CHECK(state_at(trajs, t, 1) == doctest::Approx(0.3 * std::exp(-t)).epsilon(1e-12));
    }
}

TEST_CASE("etd2rk converges at second order on ode2_slow") {
    const auto prob = make_ode2_slow();
    auto err = [&](double dt) {
        IntegratorConfig cfg;
        cfg.dt = dt;
        cfg.t_end = 1.0;
        cfg.t_ramp = 1e30;
        cfg.store_states = true;
        const auto traj = integrate(prob, StateVector({1.0, 0.0}), cfg);
        return std::abs(state_at(traj, 1.0, 0) - 1.0 / std::sqrt(3.0));
    };
    const double e1 = err(2e-2);
    const double e2 = err(1e-2);
    CHECK(e1 / e2 >= 3.5);
}

TEST_CASE("etd1 still converges, one order lower") {
    const auto prob = make_ode2_slow();
    auto err = [&](double dt) {
        IntegratorConfig cfg;
        cfg.dt = dt;
        cfg.t_end = 1.0;
        cfg.t_ramp = 1e30;
        cfg.scheme = Scheme::etd1;
        cfg.store_states = true;
        const auto traj = integrate(prob, StateVector({1.0, 0.0}), cfg);
        return std::abs(state_at(traj, 1.0, 0) - 1.0 / std::sqrt(3.0));
    };
    const double ratio = err(2e-2) / err(1e-2);
    CHECK(ratio >= 1.7);
    CHECK(ratio <= 2.5);
}

TEST_CASE("energy decays monotonically under the sign condition") {
    const auto prob = make_neumann_interval(8, 2.0, 1.0, default_bounds_seed, 500);
    StateVector u0(prob.spectrum.total_dim);
    u0[0] = 0.2;
    u0[1] = 0.1;
    u0[3] = -0.05;
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 50.0;
    const auto traj = integrate(prob, u0, cfg);
    double min_norm = 1e300;
    for (std::size_t i = 1; i < traj.samples(); ++i) {
        const double y_prev = traj.norm_H[i - 1] * traj.norm_H[i - 1];
        const double y = traj.norm_H[i] * traj.norm_H[i];
        CHECK(y <= y_prev + 1e-9);
        min_norm = std::min(min_norm, traj.norm_H[i]);
    }
    CHECK(min_norm > 0.0);  // non-trivial solutions never vanish
}

TEST_CASE("blowup and ball exits terminate cleanly") {
    OrderBounds b;
    b.K0 = 1.0;
    b.p = 2.0;
    b.q = 2.0;
    b.L = 10.0;
    b.R = 1e30;
    // u' = u^3 blows up at t = 1/(2 u0^2)
    const auto blow = make_custom("blowup", SpectrumSpec::make({0.0}, {1}),
                                  {PolynomialTerm{0, 1.0, {{0, 3}}}}, b);
    IntegratorConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 2.0;
    const auto traj = integrate(blow, StateVector({1.0}), cfg);
    CHECK(traj.terminated == Termination::blowup);
    CHECK(traj.times.back() < 1.0);

    b.R = 1.2;
    const auto grow = make_custom("drift", SpectrumSpec::make({0.0}, {1}),
                                  {PolynomialTerm{0, 1.0, {{0, 1}}}}, b);
    const auto traj2 = integrate(grow, StateVector({1.0}), cfg);
    CHECK(traj2.terminated == Termination::left_ball);
    CHECK(traj2.times.back() == doctest::Approx(std::log(1.2)).epsilon(1e-2));
}

TEST_CASE("invalid spans are rejected") {
    const auto prob = make_ode2_slow();
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.0;
    CHECK_THROWS(integrate(prob, StateVector({0.1, 0.0}), cfg));
}

TEST_CASE("forced linear solutions match the scalar oracles") {
    const auto spec = SpectrumSpec::make({1.0}, {1});
    const std::size_t n = 50001;
    std::vector<double> times(n);
    std::vector<StateVector> g0(n, StateVector(1)), g2(n, StateVector(1)), g1(n, StateVector(1));
    for (std::size_t i = 0; i < n; ++i) {
        times[i] = 5.0 * static_cast<double>(i) / static_cast<double>(n - 1);
        g2[i][0] = std::exp(-2.0 * times[i]);
        g1[i][0] = std::exp(-times[i]);
    }
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 5.0;

    const auto zero = integrate_linear_forced(spec, StateVector({1.0}), times, g0, cfg);
    for (std::size_t i = 0; i < zero.samples(); ++i)
        CHECK(zero.norm_H[i] == doctest::Approx(std::exp(-zero.times[i])).epsilon(1e-12));

    const auto resp = integrate_linear_forced(spec, StateVector({0.0}), times, g2, cfg);
    for (double t : {1.0, 2.5, 5.0}) {
        std::size_t i = static_cast<std::size_t>(t / 5.0 * (n - 1));
        CHECK(resp.norm_H[i] ==
              doctest::Approx(std::exp(-times[i]) - std::exp(-2.0 * times[i])).epsilon(1e-8));
    }

    // resonant forcing: w(t) = t e^{-t}
    const auto reso = integrate_linear_forced(spec, StateVector({0.0}), times, g1, cfg);
    for (double t : {1.0, 2.5, 5.0}) {
        std::size_t i = static_cast<std::size_t>(t / 5.0 * (n - 1));
        CHECK(reso.norm_H[i] == doctest::Approx(times[i] * std::exp(-times[i])).epsilon(1e-8));
    }

    IntegratorConfig longer = cfg;
    longer.t_end = 6.0;
    CHECK_THROWS_WITH(integrate_linear_forced(spec, StateVector({0.0}), times, g1, longer),
                      "forcing grid shorter than t_end");
}

TEST_CASE("diag_stride thins the samples") {
    const auto prob = make_ode2_slow();
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    cfg.t_ramp = 1e30;
    const auto dense = integrate(prob, StateVector({0.5, 0.0}), cfg);
    cfg.diag_stride = 10;
    const auto sparse = integrate(prob, StateVector({0.5, 0.0}), cfg);
    CHECK(dense.samples() > 9 * sparse.samples());
    CHECK(sparse.times.back() == doctest::Approx(1.0));
}
