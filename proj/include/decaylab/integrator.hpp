#pragma once

#include <span>
#include <vector>

#include "decaylab/models.hpp"

namespace decaylab {

enum class Scheme { etd1, etd2rk };
enum class Termination { completed, blowup, left_ball };

// The linear part is handled exactly mode-wise, so stiff eigenvalues never
// restrict dt. Steps grow geometrically after t_ramp (h = dt * max(1,
// t/t_ramp)): constant work per decade, which is what power-law fits need.
struct IntegratorConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    Scheme scheme = Scheme::etd2rk;
    std::size_t diag_stride = 1;   // record every k-th step
    double blowup_norm = 1e6;
    bool store_states = false;
    double t_ramp = 1.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> norm_H;
    std::vector<double> norm_Ahalf;
    std::vector<double> Q;     // |A^{1/2}u|^2 / |u|^2, NaN where undefined
    std::vector<double> Q2p;   // generalized quotient at d = 2p of the model
    std::vector<StateVector> states;  // aligned with times when stored
    Termination terminated = Termination::completed;
    double d2p = 2.0;

    bool has_states() const { return !states.empty(); }
    std::size_t samples() const { return times.size(); }
};

Trajectory integrate(const ProblemDefinition& prob, const StateVector& u0,
                     const IntegratorConfig& cfg);

// Mild solution of u' + Au = g(t) for forcing sampled on its own grid,
// advanced with exponential quadrature exact for piecewise-linear g.
// Samples are recorded at the forcing grid points up to cfg.t_end.
Trajectory integrate_linear_forced(const SpectrumSpec& spec, const StateVector& u0,
                                   std::span<const double> g_times,
                                   const std::vector<StateVector>& g_values,
                                   const IntegratorConfig& cfg);

} // namespace decaylab
