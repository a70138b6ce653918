#include <doctest.h>

#include <cmath>

#include "decaylab/fast_constructor.hpp"

using namespace decaylab;

namespace {

// spectrum {1, 4} with f(u) = (0, x^2): the profile construction has the
// closed-form fixed point g(t) = (0, C e^{-2.5 t} + (v^2/2) e^{-0.5 t})
// for v0 = (v, 0), w0 = (0, C + v^2/2), with delta = 1.5.
ProblemDefinition make_quadratic_pair() {
    OrderBounds b;
    b.K0 = 1.0;
    b.p = 1.0;
    b.q = 1.0;
    b.L = 1.0;
    b.R = 4.0;
    return make_custom("quadratic_pair", SpectrumSpec::make({1.0, 4.0}, {1, 1}),
                       {PolynomialTerm{1, 1.0, {{0, 2}}}}, b);
}

} // namespace

TEST_CASE("parameter selection") {
    const auto neu = make_neumann_interval(16, 2.0, 1.0);
    const auto p = choose_params(neu, 1, 0.05);
    CHECK(p.lambda == 1.0);
    CHECK(p.beta == 4.0);
    CHECK(p.delta == doctest::Approx(2.0));  // midpoint of (1, min{4, 3})
    CHECK(p.grid.front() == 0.0);
    CHECK(p.grid.back() == p.T);
    CHECK(std::exp(-(p.delta - p.lambda) * p.T) < 1e-10);
    CHECK(2.0 * p.r1 < neu.bounds.R);

    // top of a finite spectrum: beta is the +inf sentinel
    const auto lin = make_linear(SpectrumSpec::make({1.0, 4.0}, {1, 1}));
    const auto ptop = choose_params(lin, 1, 0.01);
    CHECK(std::isinf(ptop.beta));
    CHECK(ptop.delta == doctest::Approx(4.0 + 0.5 * 1.0 * 4.0));
    CHECK(ptop.r1 == doctest::Approx(2.0 * ptop.r0));

    const auto pair = make_linear(SpectrumSpec::make({1.0, 2.0}, {1, 1}));
    const auto p2 = choose_params(pair, 0, 0.1);
    CHECK(p2.r1 == doctest::Approx(2.0 * std::sqrt(1.5) * 0.1).epsilon(1e-12));

    auto hopeless = make_quadratic_pair();
    hopeless.bounds.L = 1e30;
    CHECK_THROWS_WITH((void)choose_params(hopeless, 0, 0.1),
                      "smallness unattainable with sampled L");

    CHECK_THROWS((void)choose_params(neu, 0, 0.05));  // lambda must be positive
}

TEST_CASE("the linear map collapses in one application") {
    const auto lin = make_linear(SpectrumSpec::make({1.0, 4.0}, {1, 1}));
    const auto params = choose_params(lin, 0, 0.01);
    const StateVector v0({0.002, 0.0});

    SUBCASE("zero upper datum gives the zero correction") {
        const auto g1 = apply_F(zero_iterate(params, lin), params, lin, v0,
                                StateVector({0.0, 0.0}));
        CHECK(g1.sup_norm == 0.0);
    }
    SUBCASE("nonzero upper datum decays at beta - delta") {
        const StateVector w0({0.0, 0.003});
        const auto g1 = apply_F(zero_iterate(params, lin), params, lin, v0, w0);
        CHECK(g1.sup_norm ==
              doctest::Approx(norm_Dhalf(lin.spectrum, w0)).epsilon(1e-12));
        for (std::size_t i = 0; i < params.grid.size(); ++i) {
            const double expect =
                w0[1] * std::exp((params.delta - 4.0) * params.grid[i]);
            CHECK(g1.g[i][1] == doctest::Approx(expect).epsilon(1e-12));
            CHECK(g1.g[i][0] == 0.0);
        }
    }
}

TEST_CASE("a closed-form fixed point passes through the map unchanged") {
    const auto prob = make_quadratic_pair();
    const auto params = choose_params(prob, 0, 0.01);
    REQUIRE(params.delta == doctest::Approx(1.5));
    const double v = 0.005, C = 1e-6;
    const StateVector v0({v, 0.0});
    const StateVector w0({0.0, C + v * v / 2.0});
    REQUIRE(norm_Dhalf(prob.spectrum, v0) + norm_Dhalf(prob.spectrum, w0) <= params.r0);

    FixedPointIterate g;
    g.g.assign(params.grid.size(), StateVector(2));
    for (std::size_t i = 0; i < params.grid.size(); ++i) {
        const double t = params.grid[i];
        g.g[i][1] = C * std::exp(-2.5 * t) + 0.5 * v * v * std::exp(-0.5 * t);
        g.sup_norm = std::max(g.sup_norm, norm_Dhalf(prob.spectrum, g.g[i]));
    }
    const auto gbar = apply_F(g, params, prob, v0, w0);
    const double moved = iterate_distance(prob.spectrum, gbar, g);
    CAPTURE(moved);
    CHECK(moved <= 1e-6);
}

TEST_CASE("zero data fix the zero correction immediately") {
    const auto prob = make_quadratic_pair();
    const auto params = choose_params(prob, 0, 0.01);
    const auto sol = solve_fixed_point(prob, params, StateVector(2), StateVector(2));
    CHECK(sol.iterations <= 2);
    CHECK(sol.g_star.sup_norm == 0.0);
    CHECK(norm_H(sol.w1) == 0.0);
    CHECK(norm_H(sol.u0) == 0.0);
}

TEST_CASE("with f == 0 the datum splits exactly as v0 + w0") {
    const auto lin = make_linear(SpectrumSpec::make({0.0, 1.0, 4.0}, {1, 1, 1}));
    const auto params = choose_params(lin, 1, 0.02);
    const StateVector v0({0.0, 0.004, 0.0});
    const StateVector w0({0.0, 0.0, 0.003});
    const auto sol = solve_fixed_point(lin, params, v0, w0);
    CHECK(sol.iterations <= 2);
    CHECK(sol.residual <= 1e-10);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(sol.w1[j] == doctest::Approx(v0[j]).epsilon(1e-12));
        CHECK(sol.u0[j] == doctest::Approx(v0[j] + w0[j]).epsilon(1e-12));
    }
}

TEST_CASE("preconditions on the data are enforced") {
    const auto prob = make_quadratic_pair();
    const auto params = choose_params(prob, 0, 0.01);
    CHECK_THROWS(solve_fixed_point(prob, params, StateVector({0.0, 0.002}), StateVector(2)));
    CHECK_THROWS(solve_fixed_point(prob, params, StateVector({0.002, 0.0}),
                                   StateVector({0.001, 0.0})));
    CHECK_THROWS(solve_fixed_point(prob, params, StateVector({1.0, 0.0}), StateVector(2)));

    FixedPointIterate too_big = zero_iterate(params, prob);
    for (auto& gi : too_big.g) gi[0] = 10.0 * params.r1;
    too_big.sup_norm = 10.0 * params.r1;
    CHECK_THROWS(apply_F(too_big, params, prob, StateVector({0.002, 0.0}), StateVector(2)));

    // arguments of f must stay inside B_R
    auto tight = make_quadratic_pair();
    tight.bounds.R = 1e-3;
    FastParams fp = params;  // params were chosen for the roomy ball
    CHECK_THROWS_WITH((void)apply_F(zero_iterate(fp, tight), fp, tight,
                                    StateVector({0.002, 0.0}), StateVector(2)),
                      "left validity ball");
}

TEST_CASE("interval construction round-trips through the integrator") {
    const auto prob = make_neumann_interval(16, 2.0, 1.0);
    const auto params = choose_params(prob, 1, 0.05);
    const auto& spec = prob.spectrum;
    StateVector v0(spec.total_dim), w0(spec.total_dim);
    v0[1] = 0.45 * params.r0 / std::sqrt(2.0);
    w0[2] = 0.45 * params.r0 / std::sqrt(5.0);
    const auto sol = solve_fixed_point(prob, params, v0, w0);
    CHECK(sol.residual < 1e-10);
    CHECK(sol.g_star.sup_norm <= params.r1);  // iterates stay in the ball
    CHECK(!sol.contraction_ratios.empty());
    for (double r : sol.contraction_ratios) CHECK(r <= 0.55);
    // the upper component of the datum is pinned to w0 by construction
    const auto split = make_split(spec, 1);
    const auto up = project(spec, sol.u0, split, Part::plus);
    for (std::size_t j = 0; j < spec.total_dim; ++j)
        CHECK(up[j] == doctest::Approx(w0[j]).epsilon(1e-15));
    // geometric error decay toward the fixed point
    for (std::size_t k = 1; k + 1 < sol.distances.size(); ++k)
        CHECK(sol.distances[k + 1] <= 0.6 * sol.distances[k] + 1e-15);

    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 10.0;
    const auto val = validate_solution(sol, prob, cfg);
    CAPTURE(val.profile_window_err);
    CAPTURE(val.grid_match_err);
    CHECK(val.pass);

    // scaling the constructed component spoils the profile
    FixedPointSolution bad = sol;
    bad.w1 = 1.1 * sol.w1;
    bad.u0 = bad.w0 + bad.w1;
    const auto bad_val = validate_solution(bad, prob, cfg);
    CHECK_FALSE(bad_val.pass);
    CHECK(bad_val.profile_window_err > val.profile_window_err * 10.0);
}
