#pragma once

#include "decaylab/integrator.hpp"

namespace decaylab {

// Explicit constants for the open set of power-law data:
//   K1 = 4 K0^2 (3+2p) / nu,
//   sigma0 the largest power-of-two fraction of R satisfying, with >= 10%
//   slack,
//     sigma0^2 + K1 sigma0^{2+2p} < R^2,
//     4(1+p) sigma0^{2p} K1^2 + 2 K0^2 (3+2p) K1^{1+q} sigma0^{(2+2p)q}
//         <= 2 K0^2 (3+2p).
// Membership of u0: u0 != 0, |u0| < sigma0, |A^{1/2}u0|^2 < K1 |u0|^{2+2p}.
struct SlowCertificate {
    double K1 = 0.0;
    double sigma0 = 0.0;
    double R = 0.0;
    double nu = 0.0;
    double K0 = 0.0;
    double p = 0.0;
    double q = 0.0;
    double slack1 = 0.0;   // relative slack in the R^2 condition
    double slack2 = 0.0;   // relative slack in the quotient-drift condition
    Provenance constants_provenance = Provenance::formula;
    std::uint64_t sample_seed = 0;
};

// Requires bounds.sign_condition and nu > 0; throws
// "constants degenerate for these bounds" when no sigma0 > 1e-12 works.
SlowCertificate compute_constants(const OrderBounds& bounds, double nu);

struct Membership {
    bool member = false;
    double slack_nonzero = 0.0;   // |u0|
    double slack_sigma = 0.0;     // sigma0 - |u0|
    double slack_quotient = 0.0;  // K1 |u0|^{2+2p} - |A^{1/2}u0|^2
};

Membership certify(const SpectrumSpec& spec, const StateVector& u0,
                   const SlowCertificate& cert);

struct MonitorReport {
    bool norm_monotone = true;
    bool quotient_below_K1 = true;
    bool M1_positive = false;
    double M1_hat = 0.0;
    double m1_drift = 0.0;
    double first_violation_t = -1.0;
    Termination terminated = Termination::completed;
    bool pass = false;
};

// Integrates from certified u0 and asserts, sample-wise: |u(t)| does not
// increase (1e-9 headroom), Q_{2p}(t) < K1, and inf |u(t)|(1+t)^{1/p} > 0.
MonitorReport monitor_certified_run(const ProblemDefinition& prob, const StateVector& u0,
                                    const SlowCertificate& cert,
                                    const IntegratorConfig& cfg);

} // namespace decaylab
