#include "decaylab/integrator.hpp"

#include <cmath>
#include <stdexcept>

#include "decaylab/kernels.hpp"
#include "decaylab/quotients.hpp"

namespace decaylab {

namespace {

bool all_finite(const StateVector& u) {
    for (double v : u.c)
        if (!std::isfinite(v)) return false;
    return true;
}

struct Recorder {
    Trajectory& traj;
    const SpectrumSpec& spec;
    double d2p;
    bool store_states;

    void operator()(double t, const StateVector& u) {
        const double nH = norm_H(u);
        const double nA = norm_A_alpha(spec, u, 0.5);
        traj.times.push_back(t);
        traj.norm_H.push_back(nH);
        traj.norm_Ahalf.push_back(nA);
        traj.Q.push_back(quotient_from_norms(nH, nA, 0.0));
        traj.Q2p.push_back(quotient_from_norms(nH, nA, d2p));
        if (store_states) traj.states.push_back(u);
    }
};

} // namespace

Trajectory integrate(const ProblemDefinition& prob, const StateVector& u0,
                     const IntegratorConfig& cfg) {
    if (!(cfg.t_end > 0.0)) throw std::invalid_argument("integrate: zero-length time span");
    if (!(cfg.dt > 0.0) || !(cfg.dt < cfg.t_end))
        throw std::invalid_argument("integrate: need 0 < dt < t_end");
    if (u0.size() != prob.spectrum.total_dim)
        throw std::invalid_argument("integrate: dimension mismatch");

    const auto& spec = prob.spectrum;
    const std::size_t n = spec.total_dim;
    const double R = prob.bounds.R;

    Trajectory traj;
    traj.d2p = 2.0 * prob.bounds.p;
    Recorder record{traj, spec, traj.d2p, cfg.store_states};

    StateVector u = u0;
    record(0.0, u);

    std::vector<double> E(n), P1(n), P2(n);
    StateVector f0(n), a(n), fa(n), u1(n);
    double cached_h = -1.0;

    double t = 0.0;
    std::size_t step = 0;
    bool last_recorded = true;
    while (t < cfg.t_end) {
        if (norm_Dhalf(spec, u) >= R) {
            traj.terminated = Termination::left_ball;
            if (!last_recorded) record(t, u);
            return traj;
        }
        // snap the last step onto t_end so roundoff can never stall t
        double h = cfg.dt * std::max(1.0, t / cfg.t_ramp);
        double t_next = t + h;
        if (t_next >= cfg.t_end || t_next <= t) {
            t_next = cfg.t_end;
            h = cfg.t_end - t;
        }
        if (h != cached_h) {
            kern::etd_tables(spec.lambda_of, h, E, P1, P2);
            cached_h = h;
        }
        prob.rhs(u.span(), f0.span());
        if (cfg.scheme == Scheme::etd1) {
            kern::etd_stage(E, P1, h, u.span(), f0.span(), u1.span());
        } else {
            kern::etd_stage(E, P1, h, u.span(), f0.span(), a.span());
            if (!all_finite(a) || norm_Dhalf(spec, a) >= R) {
                traj.terminated = all_finite(a) ? Termination::left_ball : Termination::blowup;
                if (!last_recorded) record(t, u);
                return traj;
            }
            prob.rhs(a.span(), fa.span());
            kern::etd_correct(P2, h, a.span(), fa.span(), f0.span(), u1.span());
        }
        t = t_next;
        u = u1;
        ++step;
        if (!all_finite(u) || norm_H(u) > cfg.blowup_norm) {
            traj.terminated = Termination::blowup;
            record(t, u);
            return traj;
        }
        last_recorded = (step % cfg.diag_stride == 0) || t >= cfg.t_end;
        if (last_recorded) record(t, u);
    }
    traj.terminated = Termination::completed;
    return traj;
}

Trajectory integrate_linear_forced(const SpectrumSpec& spec, const StateVector& u0,
                                   std::span<const double> g_times,
                                   const std::vector<StateVector>& g_values,
                                   const IntegratorConfig& cfg) {
    if (!(cfg.t_end > 0.0)) throw std::invalid_argument("forced: zero-length time span");
    if (g_times.size() < 2 || g_times.size() != g_values.size())
        throw std::invalid_argument("forced: need matching times/values, at least 2 samples");
    if (g_times.front() != 0.0) throw std::invalid_argument("forced: forcing must start at 0");
    for (std::size_t i = 1; i < g_times.size(); ++i)
        if (!(g_times[i] > g_times[i - 1]))
            throw std::invalid_argument("forced: times not increasing");
    if (g_times.back() < cfg.t_end * (1.0 - 1e-12))
        throw std::invalid_argument("forcing grid shorter than t_end");
    if (u0.size() != spec.total_dim)
        throw std::invalid_argument("forced: dimension mismatch");

    const std::size_t n = spec.total_dim;
    Trajectory traj;
    Recorder record{traj, spec, traj.d2p, cfg.store_states};

    StateVector u = u0;
    record(0.0, u);
    for (std::size_t i = 0; i + 1 < g_times.size() && g_times[i] < cfg.t_end; ++i) {
        const double t1 = std::min(g_times[i + 1], cfg.t_end);
        const double h_full = g_times[i + 1] - g_times[i];
        const double h = t1 - g_times[i];
        const double frac = h / h_full;
        for (std::size_t j = 0; j < n; ++j) {
            const double g0 = g_values[i][j];
            const double g1 = g0 + frac * (g_values[i + 1][j] - g0);
            const double z = spec.lambda_of[j] * h;
            u[j] = std::exp(-z) * u[j] +
                   h * (g0 * kern::phi1(z) + (g1 - g0) * kern::phi2(z));
        }
        if (!all_finite(u)) {
            traj.terminated = Termination::blowup;
            record(t1, u);
            return traj;
        }
        record(t1, u);
    }
    traj.terminated = Termination::completed;
    return traj;
}

} // namespace decaylab
