#include <doctest.h>

#include <cmath>
#include <random>

#include "decaylab/spectrum.hpp"

using namespace decaylab;

namespace {

SpectrumSpec spec012() { return SpectrumSpec::make({0.0, 1.0, 4.0}, {1, 1, 1}); }

StateVector random_state(const SpectrumSpec& s, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    StateVector u(s.total_dim);
    for (auto& v : u.c) v = g(rng);
    return u;
}

} // namespace

TEST_CASE("spectrum construction validates its invariants") {
    CHECK_THROWS(SpectrumSpec::make({1.0, 1.0}, {1, 1}));
    CHECK_THROWS(SpectrumSpec::make({-1.0, 1.0}, {1, 1}));
    CHECK_THROWS(SpectrumSpec::make({0.0, 1.0}, {0, 1}));
    const auto s = SpectrumSpec::make({0.0, 1.0, 4.0}, {2, 1, 3});
    CHECK(s.total_dim == 6);
    CHECK(s.kernel_dim() == 2);
    CHECK(s.spectral_gap() == 1.0);
    CHECK(s.lambda_of[1] == 0.0);
    CHECK(s.lambda_of[3] == 4.0);
}

TEST_CASE("norm_H") {
    CHECK(norm_H(StateVector({3.0, 4.0})) == doctest::Approx(5.0));
    CHECK(norm_H(StateVector({0.0, 0.0})) == 0.0);
    CHECK(norm_H(StateVector({1.0, 1.0, 1.0})) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("fractional power norms") {
    const auto s01 = SpectrumSpec::make({0.0, 1.0}, {1, 1});
    const StateVector u({1.0, 1.0});
    CHECK(norm_A_alpha(s01, u, 0.5) == doctest::Approx(1.0));  // kernel mode drops out
    CHECK(norm_DA_alpha(s01, u, 0.5) == doctest::Approx(std::sqrt(3.0)));
    const auto s4 = SpectrumSpec::make({4.0}, {1});
    CHECK(norm_A_alpha(s4, StateVector({2.0}), 0.5) == doctest::Approx(4.0));
    // A^0 is the identity, including on the kernel
    CHECK(norm_A_alpha(s01, u, 0.0) == doctest::Approx(norm_H(u)));
}

TEST_CASE("projections at a split") {
    const auto s = spec012();
    const StateVector u({1.0, 2.0, 3.0});
    const auto split = make_split(s, 1);  // lambda = 1
    CHECK(project(s, u, split, Part::plus).c == std::vector<double>{0.0, 0.0, 3.0});
    CHECK(project(s, u, split, Part::minus).c == std::vector<double>{1.0, 0.0, 0.0});
    CHECK(project(s, u, split, Part::lambda).c == std::vector<double>{0.0, 2.0, 0.0});
    CHECK(project(s, u, split, Part::le).c == std::vector<double>{1.0, 2.0, 0.0});
    const auto sum = project(s, u, split, Part::minus) + project(s, u, split, Part::lambda) +
                     project(s, u, split, Part::plus);
    CHECK(sum.c == u.c);
    CHECK(project(s, u, split, Part::kernel).c == std::vector<double>{1.0, 0.0, 0.0});
    // trivial kernel: projection is the zero vector, not an error
    const auto s_pos = SpectrumSpec::make({1.0, 4.0}, {1, 1});
    const auto sp = make_split(s_pos, 0);
    CHECK(project(s_pos, StateVector({1.0, 1.0}), sp, Part::kernel).c ==
          std::vector<double>{0.0, 0.0});
    // idempotent
    const auto pp = project(s, u, split, Part::plus);
    CHECK(project(s, pp, split, Part::plus).c == pp.c);
}

TEST_CASE("semigroup action") {
    const auto s = SpectrumSpec::make({0.0, 2.0}, {1, 1});
    const StateVector u({1.0, 1.0});
    const auto v = semigroup_apply(s, u, std::log(2.0));
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(0.25));  // exp(-t lambda) with lambda = 2
    const auto s1m = SpectrumSpec::make({0.0, 1.0}, {1, 1});
    CHECK(semigroup_apply(s1m, u, std::log(2.0))[1] == doctest::Approx(0.5));
    CHECK(semigroup_apply(s, u, 0.0).c == u.c);
    const auto s1 = SpectrumSpec::make({1.0}, {1});
    CHECK(semigroup_apply(s1, StateVector({1.0}), -1.0)[0] == doctest::Approx(std::exp(1.0)));
    CHECK_THROWS_WITH(semigroup_apply(s1, StateVector({1.0}), -1e6), "semigroup overflow");
}

TEST_CASE("Parseval, smoothing, coercivity and group law on random data") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ur(0.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = SpectrumSpec::make({0.0, 0.5 + ur(rng), 4.0 + ur(rng)}, {2, 1, 2});
        const auto u = random_state(s, rng);
        const auto split = make_split(s, 1);

        const double nm = norm_H(project(s, u, split, Part::minus));
        const double nl = norm_H(project(s, u, split, Part::lambda));
        const double np = norm_H(project(s, u, split, Part::plus));
        CHECK(nm * nm + nl * nl + np * np ==
              doctest::Approx(norm_H(u) * norm_H(u)).epsilon(1e-12));

        const double t = ur(rng);
        CHECK(norm_H(semigroup_apply(s, u, t)) <= norm_H(u) + 1e-12);

        // |A^{1/2}u|^2 >= nu (|u|^2 - |P_K u|^2)
        const double nu = s.spectral_gap();
        const double nk = norm_H(project(s, u, split, Part::kernel));
        const double lhs = norm_A_alpha(s, u, 0.5);
        CHECK(lhs * lhs + 1e-10 >= nu * (norm_H(u) * norm_H(u) - nk * nk));

        const double t2 = ur(rng);
        const auto two_step = semigroup_apply(s, semigroup_apply(s, u, t), t2);
        const auto one_step = semigroup_apply(s, u, t + t2);
        for (std::size_t j = 0; j < u.size(); ++j)
            CHECK(two_step[j] == doctest::Approx(one_step[j]).epsilon(1e-12));
    }
    // smoothing is an equality iff the state is kernel-supported
    const auto s = SpectrumSpec::make({0.0, 1.0}, {1, 1});
    CHECK(norm_H(semigroup_apply(s, StateVector({2.0, 0.0}), 5.0)) == doctest::Approx(2.0));
    CHECK(norm_H(semigroup_apply(s, StateVector({2.0, 1.0}), 5.0)) < std::sqrt(5.0));
}
