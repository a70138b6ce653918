#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "decaylab/spectrum.hpp"

namespace decaylab {

enum class Provenance { formula, sampled };

// Order/Lipschitz data for the nonlinearity:
//   |f(u)|      <= K0 (|u|^{1+p} + |A^{1/2}u|^{1+q})
//   |f(u)-f(v)| <= L (|u|^p_{D} + |v|^p_{D}) |u-v|_{D},   D = D(A^{1/2})
// valid on the ball |u|_{D(A^{1/2})} < R. sign_condition records whether
// <u, f(u)> <= 0 holds on that ball.
struct OrderBounds {
    double K0 = 0.0;
    double p = 1.0;
    double q = 1.0;
    double L = 0.0;
    double R = 1.0;
    bool sign_condition = false;
    Provenance provenance = Provenance::formula;
    std::uint64_t sample_seed = 0;
};

// Orthonormal trig basis on (0, pi) under the probability measure dx/pi:
// cosine {1, sqrt2 cos kx} for Neumann, sine {sqrt2 sin kx} for Dirichlet.
// Collocation on the midpoint grid makes analysis∘synthesis exact.
struct TransformPair {
    enum class Basis { cosine, sine };

    Basis basis_kind;
    std::size_t n_modes = 0;
    std::size_t grid_size = 0;
    std::vector<double> grid_x;
    std::vector<double> synth;  // grid_size x n_modes, row-major
    std::vector<double> anal;   // n_modes x grid_size, row-major, 1/G folded in

    static TransformPair make(Basis kind, std::size_t n_modes, std::size_t grid_size);

    void synthesis(std::span<const double> coeffs, std::span<double> grid) const;
    void analysis(std::span<const double> grid, std::span<double> coeffs) const;
};

// One monomial of a coefficient-space polynomial nonlinearity:
// adds coeff * prod_i u[mode_i]^{pow_i} to component `target`.
struct PolynomialTerm {
    std::size_t target = 0;
    double coeff = 0.0;
    std::vector<std::pair<std::size_t, unsigned>> factors;
};

struct ProblemDefinition {
    std::string name;
    SpectrumSpec spectrum;
    OrderBounds bounds;
    std::shared_ptr<const TransformPair> transform;  // null for ODE/custom instances
    // f in eigencoordinates, no ball check; concurrent calls must not interfere.
    std::function<void(std::span<const double>, std::span<double>)> rhs;
};

// f(u), enforcing the validity ball: throws std::domain_error
// "outside validity ball" when |u|_{D(A^{1/2})} >= bounds.R.
StateVector eval_nonlinearity(const ProblemDefinition& prob, const StateVector& u);

// 2-d system x' = -x^3, y' + y = x^3 on the spectrum {0, 1}. The kernel
// component decays as (1+2t)^{-1/2} from x(0)=1; the range component is
// slaved at the cube of it. <u,f(u)> = x^3(y-x) changes sign on every
// ball, so sign_condition is false.
ProblemDefinition make_ode2_slow();

// 2-d system x' + lambda x = 0, y' + beta y = |x|^{1+p} + |x|^{1+q} on the
// spectrum {lambda, beta}; requires beta > lambda > 0. The y component
// decays like e^{-eta t}, eta = min{beta, (1+p)lambda, (1+q)lambda}
// (t e^{-eta t} at resonance).
ProblemDefinition make_ode2_fast(double lambda, double beta, double p, double q);

inline constexpr std::uint64_t default_bounds_seed = 0x5eedc0de;
inline constexpr std::size_t default_bound_samples = 10000;

// Pseudospectral heat problems on (0, pi) with psi(s) = c|s|^p s.
// Neumann: eigenvalues k^2, k = 0..N-1, kernel = constants, nu = 1.
// Dirichlet: eigenvalues k^2 - shift, k = 1..N, shift = 1 when critical
// (kernel = span{sin x}, nu = 3) and 0.5 otherwise (coercive).
ProblemDefinition make_neumann_interval(std::size_t n_modes, double p, double c,
                                        std::uint64_t seed = default_bounds_seed,
                                        std::size_t bound_samples = default_bound_samples);
ProblemDefinition make_dirichlet_interval(std::size_t n_modes, double p, double c,
                                          bool critical,
                                          std::uint64_t seed = default_bounds_seed,
                                          std::size_t bound_samples = default_bound_samples);

// f == 0 on the given spectrum.
ProblemDefinition make_linear(SpectrumSpec spec);

ProblemDefinition make_custom(std::string name, SpectrumSpec spec,
                              std::vector<PolynomialTerm> terms, OrderBounds bounds);

} // namespace decaylab
