#pragma once

#include <limits>
#include <optional>
#include <string>

#include "decaylab/integrator.hpp"

namespace decaylab {

enum class Verdict { null_solution, slow, fast, inconclusive };
const char* to_string(Verdict v);

// Least-squares slope of log|u| against log t (power fit) or t (exponential
// fit) over the final 40% of the log-spaced sample window. Stable means the
// slopes of the two half-windows drift by less than 2% of the full slope.
struct RateFit {
    double t_lo = 0.0, t_hi = 0.0;
    std::size_t n = 0;
    double slope = std::numeric_limits<double>::quiet_NaN();
    double drift = std::numeric_limits<double>::infinity();
    double residual = std::numeric_limits<double>::quiet_NaN();  // RMS about the fit
    bool stable = false;
};

// Remainder-rate bracketing around eta = min{beta, (1+p)lambda, (1+q)lambda}:
// |u(t) - v0_hat e^{-lambda t}|_{D(A^{1/2})} e^{gamma t} must stay flat or
// fall for gamma = 0.9 eta and grow for gamma = 1.1 eta. The flat margin
// tolerates the resonant t e^{-eta t} case.
struct ProfileReport {
    StateVector v0_hat;
    double lambda = 0.0;
    double eta = 0.0;
    double gamma_low = 0.0, gamma_high = 0.0;
    double low_log_change = 0.0;   // log R_low(t_hi) - log R_low(t_lo)
    double high_log_change = 0.0;
    bool remainder_at_roundoff = false;
    bool pass = false;
};

struct ClassificationReport {
    Verdict verdict = Verdict::inconclusive;
    double p_hat = std::numeric_limits<double>::quiet_NaN();
    double lambda_hat = std::numeric_limits<double>::quiet_NaN();
    double lambda_snapped = std::numeric_limits<double>::quiet_NaN();
    StateVector v0_hat;
    double gamma_lower = std::numeric_limits<double>::quiet_NaN();
    double gamma_upper = std::numeric_limits<double>::quiet_NaN();
    bool stationary = false;
    RateFit power_fit;
    RateFit exp_fit;
    std::optional<ProfileReport> profile;
    std::string note;
};

// Trichotomy for a decayed trajectory. Throws "trajectory did not decay;
// classification out of scope" when the final D(A^{1/2}) norm is not below
// 1e-3 of the initial one (constant-norm trajectories are reported as slow
// with the stationary flag instead).
ClassificationReport classify(const Trajectory& traj, const ProblemDefinition& prob);

struct SlowVerification {
    double M1_hat = 0.0;   // inf |u(t)| (1+t)^{1/p}
    double M2_hat = 0.0;   // sup |A^{1/2}u(t)| / |u(t)|^{1+p}
    double m1_drift = 0.0;
    double m2_drift = 0.0;
    bool stationary = false;
    bool pass = false;
};

SlowVerification verify_slow_conclusions(const Trajectory& traj,
                                         const ClassificationReport& report,
                                         const ProblemDefinition& prob);

// Throws "profile vanishes; rate misidentified" when the extracted profile
// norm falls below 1e-12. Needs stored states.
ProfileReport extract_profile(const Trajectory& traj, const ProblemDefinition& prob,
                              std::size_t lambda_block);

} // namespace decaylab
