#include "decaylab/slow_certifier.hpp"

#include <cmath>
#include <stdexcept>

namespace decaylab {

namespace {
constexpr double slack_required = 0.10;
constexpr double sigma_min = 1e-12;
constexpr double monotone_headroom = 1e-9;
} // namespace

SlowCertificate compute_constants(const OrderBounds& bounds, double nu) {
    if (!bounds.sign_condition)
        throw std::invalid_argument("compute_constants: bounds lack the sign condition");
    if (!(nu > 0.0)) throw std::invalid_argument("compute_constants: need nu > 0");
    const double K0 = bounds.K0, p = bounds.p, q = bounds.q, R = bounds.R;

    SlowCertificate cert;
    cert.K0 = K0;
    cert.p = p;
    cert.q = q;
    cert.R = R;
    cert.nu = nu;
    cert.K1 = 4.0 * K0 * K0 * (3.0 + 2.0 * p) / nu;
    cert.constants_provenance = bounds.provenance;
    cert.sample_seed = bounds.sample_seed;

    const double K1 = cert.K1;
    const double rhs2 = 2.0 * K0 * K0 * (3.0 + 2.0 * p);
    for (double sigma = R / 2.0; sigma > sigma_min; sigma /= 2.0) {
        const double lhs1 = sigma * sigma + K1 * std::pow(sigma, 2.0 + 2.0 * p);
        const double lhs2 = 4.0 * (1.0 + p) * std::pow(sigma, 2.0 * p) * K1 * K1 +
                            rhs2 * std::pow(K1, 1.0 + q) * std::pow(sigma, (2.0 + 2.0 * p) * q);
        const bool ok1 = lhs1 <= (1.0 - slack_required) * R * R;
        const bool ok2 = lhs2 <= (1.0 - slack_required) * rhs2;
        if (ok1 && ok2) {
            cert.sigma0 = sigma;
            cert.slack1 = 1.0 - lhs1 / (R * R);
            cert.slack2 = rhs2 > 0.0 ? 1.0 - lhs2 / rhs2 : 1.0;
            return cert;
        }
    }
    throw std::runtime_error("constants degenerate for these bounds");
}

Membership certify(const SpectrumSpec& spec, const StateVector& u0,
                   const SlowCertificate& cert) {
    Membership m;
    const double nH = norm_H(u0);
    const double nA = norm_A_alpha(spec, u0, 0.5);
    m.slack_nonzero = nH;
    m.slack_sigma = cert.sigma0 - nH;
    m.slack_quotient = cert.K1 * std::pow(nH, 2.0 + 2.0 * cert.p) - nA * nA;
    m.member = nH > 0.0 && nH < cert.sigma0 && nA * nA < cert.K1 * std::pow(nH, 2.0 + 2.0 * cert.p);
    return m;
}

MonitorReport monitor_certified_run(const ProblemDefinition& prob, const StateVector& u0,
                                    const SlowCertificate& cert,
                                    const IntegratorConfig& cfg) {
    if (!certify(prob.spectrum, u0, cert).member)
        throw std::invalid_argument("monitor: initial datum is not certified");

    const Trajectory traj = integrate(prob, u0, cfg);

    MonitorReport rep;
    rep.terminated = traj.terminated;
    const double p = cert.p;
    double m1 = std::numeric_limits<double>::infinity();
    double prev_y = traj.norm_H[0] * traj.norm_H[0];
    for (std::size_t i = 0; i < traj.samples(); ++i) {
        const double nH = traj.norm_H[i];
        const double y = nH * nH;
        if (i > 0 && y > prev_y + monotone_headroom && rep.norm_monotone) {
            rep.norm_monotone = false;
            if (rep.first_violation_t < 0.0) rep.first_violation_t = traj.times[i];
        }
        prev_y = y;
        const double q2p = traj.Q2p[i];
        if (std::isfinite(q2p) && !(q2p < cert.K1) && rep.quotient_below_K1) {
            rep.quotient_below_K1 = false;
            if (rep.first_violation_t < 0.0) rep.first_violation_t = traj.times[i];
        }
        if (nH > 0.0) m1 = std::min(m1, nH * std::pow(1.0 + traj.times[i], 1.0 / p));
        if (nH == 0.0 && rep.first_violation_t < 0.0) rep.first_violation_t = traj.times[i];
    }
    rep.M1_hat = m1;
    rep.M1_positive = std::isfinite(m1) && m1 > 0.0;

    const double t_end = traj.times.back();
    auto m1_at = [&](double t_target) {
        std::size_t best = 0;
        double bestd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < traj.samples(); ++i) {
            const double dd = std::abs(traj.times[i] - t_target);
            if (dd < bestd) {
                bestd = dd;
                best = i;
            }
        }
        return traj.norm_H[best] * std::pow(1.0 + traj.times[best], 1.0 / p);
    };
    const double a = m1_at(t_end / 10.0), b = m1_at(t_end);
    rep.m1_drift = b != 0.0 ? std::abs(b - a) / std::abs(b) : 0.0;

    rep.pass = rep.norm_monotone && rep.quotient_below_K1 && rep.M1_positive &&
               traj.terminated == Termination::completed;
    return rep;
}

} // namespace decaylab
