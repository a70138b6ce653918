#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "decaylab/integrator.hpp"

namespace decaylab {

// Quotients are computed from norms, never by forming Au - Qu, except in
// the inequality check where the residual is needed mode-wise. Below
// norm_H = 1e-150 they are reported as NaN so |u|^{2+d} cannot underflow.
inline constexpr double quotient_norm_floor = 1e-150;

inline double quotient_from_norms(double nH, double nA, double d) {
    if (!(nH >= quotient_norm_floor)) return std::numeric_limits<double>::quiet_NaN();
    const double den = std::pow(nH, 2.0 + d);
    if (den <= 0.0 || !std::isfinite(den))
        return std::numeric_limits<double>::quiet_NaN();
    return nA * nA / den;
}

// |A^{1/2}u|^2 / |u|^{2+d}; d = 0 gives the classical Dirichlet quotient.
// Throws "quotient undefined at zero" on the zero state.
double quotient(const SpectrumSpec& spec, const StateVector& u, double d);

struct QuotientSample {
    double t;
    double Q;
    std::vector<double> Qd;        // one per requested d
    std::vector<double> d_values;
};

QuotientSample quotient_sample(const SpectrumSpec& spec, const StateVector& u, double t,
                               const std::vector<double>& d_values);

// Finite-difference check of the one-sided derivative bounds for Q (d = 0)
// and Q_d (d > 0, needs a positive spectral gap) along a stored trajectory,
// with g(t) := f(u(t)). The tolerance absorbs pure discretization error:
// max(1e-6, C h^2 |curvature|).
struct QuotientCheckReport {
    double d = 0.0;
    double max_margin = -std::numeric_limits<double>::infinity();
    double argmax_t = 0.0;
    double tolerance = 0.0;        // tolerance at the argmax sample
    bool pass = true;
    std::size_t checked_samples = 0;
    std::size_t skipped_samples = 0;
};

QuotientCheckReport check_quotient_inequalities(const Trajectory& traj,
                                                const ProblemDefinition& prob, double d);

} // namespace decaylab
