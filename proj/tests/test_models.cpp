#include <doctest.h>

#include <cmath>
#include <random>

#include "decaylab/models.hpp"

using namespace decaylab;

namespace {

StateVector random_ball_point(const ProblemDefinition& prob, double rmax,
                              std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> ur(0.0, 1.0);
    StateVector u(prob.spectrum.total_dim);
    for (auto& v : u.c) v = g(rng);
    const double nd = norm_Dhalf(prob.spectrum, u);
    const double r = rmax * ur(rng);
    for (auto& v : u.c) v *= r / nd;
    return u;
}

} // namespace

TEST_CASE("ode2_slow right-hand side and metadata") {
    const auto prob = make_ode2_slow();
    CHECK(prob.spectrum.eigenvalues == std::vector<double>{0.0, 1.0});
    CHECK(prob.bounds.p == 2.0);
    CHECK(prob.bounds.q == 2.0);
    CHECK_FALSE(prob.bounds.sign_condition);  // <u,f(u)> = x^3(y-x) changes sign
    const auto f = eval_nonlinearity(prob, StateVector({1.0, 0.0}));
    CHECK(f[0] == doctest::Approx(-1.0));
    CHECK(f[1] == doctest::Approx(1.0));
    CHECK(norm_H(eval_nonlinearity(prob, StateVector({0.0, 0.0}))) == 0.0);
}

TEST_CASE("ode2_fast construction") {
    CHECK_THROWS_WITH(make_ode2_fast(1.0, 1.0, 1.0, 1.0),
                      "requires spectral gap above lambda");
    CHECK_THROWS_WITH(make_ode2_fast(2.0, 1.0, 1.0, 1.0),
                      "requires spectral gap above lambda");
    const auto prob = make_ode2_fast(1.0, 10.0, 1.0, 1.0);
    CHECK(prob.spectrum.eigenvalues == std::vector<double>{1.0, 10.0});
    CHECK(prob.bounds.provenance == Provenance::formula);
    const auto f = eval_nonlinearity(prob, StateVector({0.5, 0.3}));
    CHECK(f[0] == 0.0);
    CHECK(f[1] == doctest::Approx(2.0 * 0.25));  // |x|^2 + |x|^2 at p=q=1

    // mixed exponents fall back to a sampled Lipschitz constant
    const auto mixed = make_ode2_fast(1.0, 10.0, 1.0, 2.0);
    CHECK(mixed.bounds.provenance == Provenance::sampled);
    CHECK(mixed.bounds.L > 0.0);
    const auto fm = eval_nonlinearity(mixed, StateVector({0.5, 0.0}));
    CHECK(fm[1] == doctest::Approx(0.25 + 0.125));
}

TEST_CASE("interval spectra") {
    const auto neu = make_neumann_interval(4, 2.0, 1.0, default_bounds_seed, 200);
    CHECK(neu.spectrum.eigenvalues == std::vector<double>{0.0, 1.0, 4.0, 9.0});
    CHECK(neu.spectrum.has_kernel());
    CHECK(neu.bounds.sign_condition);
    CHECK(neu.bounds.provenance == Provenance::sampled);

    const auto dir = make_dirichlet_interval(3, 2.0, 1.0, true, default_bounds_seed, 200);
    CHECK(dir.spectrum.eigenvalues == std::vector<double>{0.0, 3.0, 8.0});
    CHECK(dir.spectrum.spectral_gap() == 3.0);

    const auto sub = make_dirichlet_interval(2, 2.0, 1.0, false, default_bounds_seed, 200);
    CHECK(sub.spectrum.eigenvalues == std::vector<double>{0.5, 3.5});
    CHECK_FALSE(sub.spectrum.has_kernel());
}

TEST_CASE("constant states map through the cubic pointwise") {
    const auto prob = make_neumann_interval(8, 2.0, 1.0, default_bounds_seed, 500);
    const double c = 0.3;
    StateVector u(prob.spectrum.total_dim);
    u[0] = c;
    const auto f = eval_nonlinearity(prob, u);
    CHECK(f[0] == doctest::Approx(-c * c * c).epsilon(1e-12));
    for (std::size_t j = 1; j < f.size(); ++j) CHECK(f[j] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("validity ball is enforced") {
    const auto prob = make_neumann_interval(4, 2.0, 1.0, default_bounds_seed, 200);
    StateVector big(prob.spectrum.total_dim);
    big[3] = 1.0;  // |u|_{D(A^{1/2})} = sqrt(10) > R = 1
    CHECK_THROWS_WITH((void)eval_nonlinearity(prob, big), "outside validity ball");
}

TEST_CASE("transform round-trip is the identity on coefficients") {
    for (auto kind : {TransformPair::Basis::cosine, TransformPair::Basis::sine}) {
        const auto tp = TransformPair::make(kind, 16, 32);
        std::mt19937_64 rng(7);
        std::normal_distribution<double> g(0.0, 1.0);
        std::vector<double> c(16), grid(32), back(16);
        for (int trial = 0; trial < 50; ++trial) {
            for (auto& v : c) v = g(rng);
            tp.synthesis(c, grid);
            tp.analysis(grid, back);
            for (std::size_t j = 0; j < c.size(); ++j)
                CHECK(back[j] == doctest::Approx(c[j]).epsilon(1e-10));
        }
    }
    CHECK_THROWS(TransformPair::make(TransformPair::Basis::cosine, 16, 16));
}

TEST_CASE("order, sign and Lipschitz bounds hold on random samples") {
    std::mt19937_64 rng(99);
    const std::vector<ProblemDefinition> probs = {
        make_ode2_slow(), make_ode2_fast(1.0, 10.0, 1.0, 1.0),
        make_neumann_interval(8, 2.0, 1.0),
        make_dirichlet_interval(8, 2.0, 1.0, true)};
    for (const auto& prob : probs) {
        CAPTURE(prob.name);
        const auto& b = prob.bounds;
        for (int i = 0; i < 1000; ++i) {
            const auto u = random_ball_point(prob, b.R / 2, rng);
            const auto fu = eval_nonlinearity(prob, u);
            const double nH = norm_H(u);
            const double nA = norm_A_alpha(prob.spectrum, u, 0.5);
            CHECK(norm_H(fu) <=
                  b.K0 * (std::pow(nH, 1.0 + b.p) + std::pow(nA, 1.0 + b.q)) + 1e-12);
            if (b.sign_condition) {
                double dot = 0.0;
                for (std::size_t j = 0; j < u.size(); ++j) dot += u[j] * fu[j];
                CHECK(dot <= 1e-10);
            }
        }
        for (int i = 0; i < 300; ++i) {
            const auto u = random_ball_point(prob, b.R / 2, rng);
            const auto v = random_ball_point(prob, b.R / 2, rng);
            const auto fu = eval_nonlinearity(prob, u);
            const auto fv = eval_nonlinearity(prob, v);
            const double du = norm_Dhalf(prob.spectrum, u);
            const double dv = norm_Dhalf(prob.spectrum, v);
            const double dd = norm_Dhalf(prob.spectrum, u - v);
            CHECK(norm_H(fu - fv) <=
                  b.L * (std::pow(du, b.p) + std::pow(dv, b.p)) * dd + 1e-12);
        }
    }
}

TEST_CASE("custom polynomial models") {
    // u' = u^3 on the kernel of a 1-d spectrum
    OrderBounds b;
    b.K0 = 1.0;
    b.p = 2.0;
    b.q = 2.0;
    b.L = 3.0;
    b.R = 10.0;
    const auto prob = make_custom("cubic_growth", SpectrumSpec::make({0.0}, {1}),
                                  {PolynomialTerm{0, 1.0, {{0, 3}}}}, b);
    const auto f = eval_nonlinearity(prob, StateVector({2.0}));
    CHECK(f[0] == doctest::Approx(8.0));
    CHECK_THROWS(make_custom("bad", SpectrumSpec::make({0.0}, {1}),
                             {PolynomialTerm{3, 1.0, {}}}, b));

    const auto lin = make_linear(SpectrumSpec::make({0.0, 2.0}, {1, 1}));
    CHECK(norm_H(eval_nonlinearity(lin, StateVector({0.5, 0.5}))) == 0.0);
    CHECK(lin.bounds.sign_condition);
}
