#include "decaylab/quotients.hpp"

#include <stdexcept>

#include "decaylab/kernels.hpp"

namespace decaylab {

double quotient(const SpectrumSpec& spec, const StateVector& u, double d) {
    const double nH = norm_H(u);
    if (nH == 0.0) throw std::domain_error("quotient undefined at zero");
    const double nA = norm_A_alpha(spec, u, 0.5);
    return quotient_from_norms(nH, nA, d);
}

QuotientSample quotient_sample(const SpectrumSpec& spec, const StateVector& u, double t,
                               const std::vector<double>& d_values) {
    QuotientSample s;
    s.t = t;
    s.d_values = d_values;
    s.Q = quotient(spec, u, 0.0);
    s.Qd.reserve(d_values.size());
    for (double d : d_values) s.Qd.push_back(quotient(spec, u, d));
    return s;
}

namespace {

// Derivative and curvature of a sampled function at the middle of three
// non-uniformly spaced points (exact for quadratics).
struct Stencil {
    double deriv;
    double curv;
};

Stencil stencil3(double hm, double hp, double fm, double f0, double fp) {
    const double denom = hm * hp * (hm + hp);
    const double deriv =
        (-hp * hp * fm + (hp * hp - hm * hm) * f0 + hm * hm * fp) / denom;
    const double curv = 2.0 * (hp * fm - (hm + hp) * f0 + hm * fp) / denom;
    return {deriv, curv};
}

constexpr double tol_floor = 1e-6;
constexpr double tol_curv_factor = 10.0;

} // namespace

QuotientCheckReport check_quotient_inequalities(const Trajectory& traj,
                                                const ProblemDefinition& prob, double d) {
    if (!traj.has_states())
        throw std::invalid_argument("quotient check: trajectory stores norms only");
    if (d < 0.0) throw std::invalid_argument("quotient check: d must be >= 0");
    const auto& spec = prob.spectrum;
    const double nu = d > 0.0 ? spec.spectral_gap() : 0.0;

    const std::size_t m = traj.samples();
    std::vector<double> qd(m);
    std::vector<bool> valid(m);
    std::size_t n_valid = 0;
    for (std::size_t i = 0; i < m; ++i) {
        qd[i] = quotient_from_norms(traj.norm_H[i], traj.norm_Ahalf[i], d);
        valid[i] = std::isfinite(qd[i]);
        if (valid[i]) ++n_valid;
    }
    if (n_valid < 3)
        throw std::runtime_error("quotient check: fewer than 3 samples with nonzero state");

    QuotientCheckReport rep;
    rep.d = d;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        if (!valid[i - 1] || !valid[i] || !valid[i + 1]) {
            ++rep.skipped_samples;
            continue;
        }
        const StateVector& u = traj.states[i];
        const double nH = traj.norm_H[i];
        StateVector g(u.size());
        if (norm_Dhalf(spec, u) >= prob.bounds.R) {
            ++rep.skipped_samples;  // order bounds not valid here
            continue;
        }
        prob.rhs(u.span(), g.span());
        const double g2 = kern::sumsq(g.span());

        double rhs;
        if (d == 0.0) {
            // residual |Au - Q u|^2 formed mode-wise
            const double Q = qd[i];
            double res = 0.0;
            for (std::size_t j = 0; j < u.size(); ++j) {
                const double r = (spec.lambda_of[j] - Q) * u[j];
                res += r * r;
            }
            rhs = (-res + g2) / (nH * nH);
        } else {
            rhs = -nu * qd[i] + 2.0 * (2.0 + d) * std::pow(nH, d) * qd[i] * qd[i] +
                  (3.0 + d) * g2 / std::pow(nH, 2.0 + d);
        }

        const double hm = traj.times[i] - traj.times[i - 1];
        const double hp = traj.times[i + 1] - traj.times[i];
        const auto st = stencil3(hm, hp, qd[i - 1], qd[i], qd[i + 1]);
        const double h = std::max(hm, hp);
        const double tol = std::max(tol_floor, tol_curv_factor * h * h * std::abs(st.curv));

        const double margin = st.deriv - rhs;
        ++rep.checked_samples;
        if (margin > rep.max_margin) {
            rep.max_margin = margin;
            rep.argmax_t = traj.times[i];
            rep.tolerance = tol;
        }
        if (margin > tol) rep.pass = false;
    }
    if (rep.checked_samples == 0)
        throw std::runtime_error("quotient check: fewer than 3 samples with nonzero state");
    return rep;
}

} // namespace decaylab
