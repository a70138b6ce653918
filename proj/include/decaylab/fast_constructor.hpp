#pragma once

#include "decaylab/integrator.hpp"

namespace decaylab {

// Parameters of the profile construction at one eigenvalue lambda > 0:
// delta sits at the midpoint of (lambda, min{beta, (1+p)lambda}), the grid
// covers [0, T] geometrically with e^{-(delta-lambda)T} < 1e-10, and r0 is
// halved until both smallness conditions hold:
//   2 r1 < R,   r1 = 2 (1 + 1/beta)^{1/2} r0,
//   2 L (2 r1)^p (sqrt(lambda+1)/(delta-lambda) + sqrt(beta+1)/(beta-delta)) <= 1/2.
struct FastParams {
    std::size_t lambda_block = 0;
    double lambda = 0.0;
    double beta = 0.0;            // +inf when lambda is the top of a finite spectrum
    double delta = 0.0;
    double r0 = 0.0;
    double r1 = 0.0;
    double T = 0.0;
    std::vector<double> grid;     // 0 = t_0 < ... < t_M = T
    double slack1 = 0.0;
    double slack2 = 0.0;
    std::size_t points_per_decade = 64;
    double tail_tolerance = 1e-10;
};

// Throws "smallness unattainable with sampled L" if r0 underflows 1e-12.
FastParams choose_params(const ProblemDefinition& prob, std::size_t lambda_block, double r0);

// A candidate correction g sampled on the grid; beyond T it is modeled as
// g(t) = g(T) e^{-(delta-lambda)(t-T)}. Membership in the iteration space
// means sup_norm <= r1.
struct FixedPointIterate {
    std::vector<StateVector> g;
    double sup_norm = 0.0;
};

FixedPointIterate zero_iterate(const FastParams& params, const ProblemDefinition& prob);

// sup over the grid of |g1 - g2|_{D(A^{1/2})}
double iterate_distance(const SpectrumSpec& spec, const FixedPointIterate& a,
                        const FixedPointIterate& b);

// One application of the profile map: evaluate phi_g(t) = f(v0 e^{-lambda t}
// + g(t) e^{-delta t}), integrate the low modes backward from t = +infinity
// and the high modes forward from w0, and return the corrected iterate
// (u_g(t) - v0 e^{-lambda t}) e^{delta t}. Mode-wise exponential quadrature
// is exact for piecewise-linear phi. Throws "left validity ball" if an
// argument leaves B_R.
FixedPointIterate apply_F(const FixedPointIterate& g, const FastParams& params,
                          const ProblemDefinition& prob, const StateVector& v0,
                          const StateVector& w0);

struct FixedPointSolution {
    StateVector v0, w0, w1, u0;
    FixedPointIterate g_star;
    std::vector<double> distances;           // successive sup-distances
    std::vector<double> contraction_ratios;  // distances[k] / distances[k-1]
    double residual = 0.0;
    std::size_t iterations = 0;
    FastParams params;
};

// Iterates from g = 0 until the sup-distance of successive iterates falls
// below 1e-10. Requires |v0|_D + |w0|_D <= r0, v0 supported on the lambda
// block and w0 strictly above it. Throws "no contraction; check smallness
// slack" when ratios stay above 0.9 for 10 iterations.
FixedPointSolution solve_fixed_point(const ProblemDefinition& prob, const FastParams& params,
                                     const StateVector& v0, const StateVector& w0);

struct ValidationReport {
    double profile_window_err = 0.0;  // sup_{[window]} |e^{lambda t}u(t) - v0|_D
    double profile_argmax_t = 0.0;
    double grid_match_err = 0.0;      // sup over samples of |u(t) - v0 e^{-lambda t} - g*(t) e^{-delta t}|_D
    double grid_argmax_t = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    double profile_tol = 0.0, grid_tol = 0.0;
    Termination terminated = Termination::completed;
    bool pass = false;
};

// Integrates forward from the constructed u0 and checks both the profile
// limit on a late window and consistency with v0 e^{-lambda t} + g* e^{-delta t}.
ValidationReport validate_solution(const FixedPointSolution& sol, const ProblemDefinition& prob,
                                   const IntegratorConfig& cfg, double window_lo = -1.0,
                                   double window_hi = -1.0, double profile_tol = 1e-4,
                                   double grid_tol = 1e-5);

} // namespace decaylab
