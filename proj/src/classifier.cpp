#include "decaylab/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace decaylab {

namespace {

constexpr double null_floor = 1e-13;
constexpr double fit_floor = 1e-140;
constexpr double decay_factor = 1e-3;
constexpr double drift_limit = 0.02;
constexpr double snap_rel = 0.05;
constexpr double window_fraction = 0.4;
constexpr double gamma_low_factor = 0.9;
constexpr double gamma_high_factor = 1.1;
constexpr double flat_margin = 1.25;  // tolerated rise of the gamma-low remainder
constexpr double growth_margin = 2.0; // required rise of the gamma-high remainder

struct LsqFit {
    double slope = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    std::size_t n = 0;
};

LsqFit lsq_slope(std::span<const double> x, std::span<const double> y) {
    LsqFit out;
    const std::size_t n = x.size();
    out.n = n;
    if (n < 2) return out;
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= static_cast<double>(n);
    ym /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    if (sxx == 0.0) return out;
    out.slope = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - ym - out.slope * (x[i] - xm);
        ss += r * r;
    }
    out.residual = std::sqrt(ss / static_cast<double>(n));
    return out;
}

// abscissa(t) is log t for the power fit and t for the exponential fit;
// the window is the final 40% of the eligible samples. Output striding is
// uniform early and log-spaced late, so counting samples reaches far past
// the transient head.
RateFit windowed_fit(const std::vector<double>& t, const std::vector<double>& n_H,
                     bool log_abscissa) {
    RateFit fit;
    std::vector<double> xs, ys, ts;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] <= 0.0) continue;
        if (!(n_H[i] >= fit_floor)) continue;
        ts.push_back(t[i]);
        xs.push_back(log_abscissa ? std::log(t[i]) : t[i]);
        ys.push_back(std::log(n_H[i]));
    }
    if (ts.size() < 8) return fit;
    const std::size_t m =
        std::max<std::size_t>(8, static_cast<std::size_t>(window_fraction * ts.size()));
    if (m > ts.size()) return fit;
    const std::size_t first = ts.size() - m;
    fit.t_lo = ts[first];
    fit.t_hi = ts.back();

    std::span<const double> x(xs.data() + first, m);
    std::span<const double> y(ys.data() + first, m);
    const auto full = lsq_slope(x, y);
    fit.slope = full.slope;
    fit.residual = full.residual;
    fit.n = m;

    const std::size_t split = first + m / 2;
    const std::size_t n1 = m / 2;
    const std::size_t n2 = ts.size() - split;
    if (n1 < 3 || n2 < 3) return fit;
    const auto h1 = lsq_slope({xs.data() + first, n1}, {ys.data() + first, n1});
    const auto h2 = lsq_slope({xs.data() + split, n2}, {ys.data() + split, n2});
    fit.drift = std::abs(h2.slope - h1.slope);
    fit.stable = std::isfinite(fit.slope) &&
                 fit.drift <= drift_limit * std::abs(fit.slope);
    return fit;
}

// e^{lambda t} c without overflow when both factors are extreme
double exp_scaled(double c, double lambda_t) {
    if (c == 0.0) return 0.0;
    return std::copysign(std::exp(lambda_t + std::log(std::abs(c))), c);
}

std::size_t nearest_block(const SpectrumSpec& spec, double rate) {
    std::size_t best = 0;
    double bestd = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < spec.blocks(); ++k) {
        const double d = std::abs(spec.eigenvalues[k] - rate);
        if (d < bestd) {
            bestd = d;
            best = k;
        }
    }
    return best;
}

double snap_tolerance(const SpectrumSpec& spec, std::size_t k) {
    double halfgap = std::numeric_limits<double>::infinity();
    if (k > 0) halfgap = std::min(halfgap, (spec.eigenvalues[k] - spec.eigenvalues[k - 1]) / 2);
    if (k + 1 < spec.blocks())
        halfgap = std::min(halfgap, (spec.eigenvalues[k + 1] - spec.eigenvalues[k]) / 2);
    return std::min(snap_rel * spec.eigenvalues[k], halfgap);
}

double beta_above(const SpectrumSpec& spec, std::size_t lambda_block) {
    if (lambda_block + 1 < spec.blocks()) return spec.eigenvalues[lambda_block + 1];
    return std::numeric_limits<double>::infinity();
}

} // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::null_solution: return "null";
        case Verdict::slow: return "slow";
        case Verdict::fast: return "fast";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

ClassificationReport classify(const Trajectory& traj, const ProblemDefinition& prob) {
    if (traj.samples() < 2) throw std::invalid_argument("classify: trajectory too short");

    ClassificationReport rep;

    double max_n = 0.0;
    for (double v : traj.norm_H) max_n = std::max(max_n, v);
    if (max_n < null_floor) {
        rep.verdict = Verdict::null_solution;
        return rep;
    }

    const auto dhalf = [&](std::size_t i) {
        return std::hypot(traj.norm_H[i], traj.norm_Ahalf[i]);
    };
    const double initial = dhalf(0);
    const double final_ = dhalf(traj.samples() - 1);
    if (traj.terminated != Termination::completed || !(final_ < decay_factor * initial)) {
        double lo = traj.norm_H[0], hi = traj.norm_H[0];
        for (double v : traj.norm_H) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (traj.terminated == Termination::completed && lo > 0.0 && hi / lo - 1.0 < 1e-12) {
            rep.verdict = Verdict::slow;
            rep.stationary = true;
            rep.note = "stationary trajectory; slow with degenerate rate fit";
            return rep;
        }
        throw std::runtime_error("trajectory did not decay; classification out of scope");
    }

    rep.power_fit = windowed_fit(traj.times, traj.norm_H, /*log_abscissa=*/true);
    if (rep.power_fit.stable && rep.power_fit.slope < 0.0) {
        rep.verdict = Verdict::slow;
        rep.p_hat = -1.0 / rep.power_fit.slope;
        return rep;
    }

    rep.exp_fit = windowed_fit(traj.times, traj.norm_H, /*log_abscissa=*/false);
    if (rep.exp_fit.stable && rep.exp_fit.slope < 0.0) {
        const double rate = -rep.exp_fit.slope;
        rep.lambda_hat = rate;
        if (rate > (1.0 + snap_rel) * prob.spectrum.max_eigenvalue()) {
            rep.verdict = Verdict::inconclusive;
            rep.note = "rate above truncated spectrum; cannot separate "
                       "super-exponential decay from missing modes";
            return rep;
        }
        const std::size_t k = nearest_block(prob.spectrum, rate);
        if (prob.spectrum.eigenvalues[k] > 0.0 &&
            std::abs(prob.spectrum.eigenvalues[k] - rate) <= snap_tolerance(prob.spectrum, k)) {
            rep.verdict = Verdict::fast;
            rep.lambda_snapped = prob.spectrum.eigenvalues[k];
            if (traj.has_states()) {
                rep.profile = extract_profile(traj, prob, k);
                rep.v0_hat = rep.profile->v0_hat;
                rep.gamma_lower = rep.profile->gamma_low;
                rep.gamma_upper = rep.profile->gamma_high;
            } else {
                rep.note = "states not stored; profile not extracted";
            }
            return rep;
        }
        rep.verdict = Verdict::inconclusive;
        rep.note = "exponential rate does not match any eigenvalue";
        return rep;
    }

    rep.verdict = Verdict::inconclusive;
    rep.note = "no stable power-law or exponential rate";
    return rep;
}

SlowVerification verify_slow_conclusions(const Trajectory& traj,
                                         const ClassificationReport& report,
                                         const ProblemDefinition& prob) {
    if (report.verdict != Verdict::slow)
        throw std::invalid_argument("verify_slow_conclusions: verdict is not slow");
    SlowVerification out;
    if (report.stationary) {
        out.stationary = true;
        out.M1_hat = traj.norm_H[0];
        out.pass = out.M1_hat > 0.0;
        return out;
    }
    const double p = prob.bounds.p;
    double m1 = std::numeric_limits<double>::infinity();
    double m2 = 0.0;
    for (std::size_t i = 0; i < traj.samples(); ++i) {
        const double nH = traj.norm_H[i];
        if (!(nH >= fit_floor)) continue;
        m1 = std::min(m1, nH * std::pow(1.0 + traj.times[i], 1.0 / p));
        m2 = std::max(m2, traj.norm_Ahalf[i] / std::pow(nH, 1.0 + p));
    }
    out.M1_hat = m1;
    out.M2_hat = m2;

    // drift of both statistics across the last decade
    const double t_end = traj.times.back();
    auto stat_at = [&](double t_target, bool first_stat) {
        std::size_t best = 0;
        double bestd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < traj.samples(); ++i) {
            const double d = std::abs(traj.times[i] - t_target);
            if (d < bestd && traj.norm_H[i] >= fit_floor) {
                bestd = d;
                best = i;
            }
        }
        const double nH = traj.norm_H[best];
        return first_stat ? nH * std::pow(1.0 + traj.times[best], 1.0 / p)
                          : traj.norm_Ahalf[best] / std::pow(nH, 1.0 + p);
    };
    const double s1a = stat_at(t_end / 10.0, true), s1b = stat_at(t_end, true);
    const double s2a = stat_at(t_end / 10.0, false), s2b = stat_at(t_end, false);
    out.m1_drift = s1b != 0.0 ? std::abs(s1b - s1a) / std::abs(s1b) : 0.0;
    out.m2_drift = s2b != 0.0 ? std::abs(s2b - s2a) / std::abs(s2b) : 0.0;
    out.pass = out.M1_hat > 0.0 && std::isfinite(out.M2_hat) && out.m1_drift < 0.05 &&
               out.m2_drift < 0.05;
    return out;
}

ProfileReport extract_profile(const Trajectory& traj, const ProblemDefinition& prob,
                              std::size_t lambda_block) {
    if (!traj.has_states())
        throw std::invalid_argument("extract_profile: trajectory stores norms only");
    const auto& spec = prob.spectrum;
    const SpectralSplit split = make_split(spec, lambda_block);
    const double lambda = split.lambda;
    if (!(lambda > 0.0)) throw std::invalid_argument("extract_profile: lambda must be positive");

    ProfileReport out;
    out.lambda = lambda;
    const double beta = beta_above(spec, lambda_block);
    out.eta = std::min({beta, (1.0 + prob.bounds.p) * lambda, (1.0 + prob.bounds.q) * lambda});
    out.gamma_low = gamma_low_factor * out.eta;
    out.gamma_high = gamma_high_factor * out.eta;

    // average e^{lambda t} u_lambda(t) over the final 40% of the samples
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < traj.samples(); ++i)
        if (traj.times[i] > 0.0 && traj.norm_H[i] >= fit_floor) idx.push_back(i);
    if (idx.size() < 3) throw std::runtime_error("extract_profile: too few usable samples");
    const std::size_t m =
        std::max<std::size_t>(3, static_cast<std::size_t>(window_fraction * idx.size()));
    std::vector<std::size_t> win(idx.end() - static_cast<std::ptrdiff_t>(m), idx.end());

    StateVector v0(spec.total_dim);
    for (std::size_t i : win) {
        const double lt = lambda * traj.times[i];
        for (std::size_t j = split.lambda_begin; j < split.lambda_end; ++j)
            v0[j] += exp_scaled(traj.states[i][j], lt);
    }
    for (auto& v : v0.c) v /= static_cast<double>(win.size());
    if (norm_H(v0) < 1e-12) throw std::runtime_error("profile vanishes; rate misidentified");
    out.v0_hat = v0;

    // remainder |u - v0 e^{-lambda t}| in D(A^{1/2}); the profile estimate
    // carries relative roundoff, so samples where the remainder has fallen
    // below ~1e-11 of the profile's own scale carry no rate information
    auto remainder = [&](std::size_t i) {
        StateVector r = traj.states[i];
        const double e = std::exp(-lambda * traj.times[i]);
        for (std::size_t j = split.lambda_begin; j < split.lambda_end; ++j) r[j] -= v0[j] * e;
        return norm_Dhalf(spec, r);
    };
    const double v0_norm = norm_Dhalf(spec, v0);
    std::vector<std::size_t> usable;
    for (std::size_t i : win) {
        const double floor_i = 1e-11 * v0_norm * std::exp(-lambda * traj.times[i]);
        if (remainder(i) > floor_i) usable.push_back(i);
    }
    if (usable.size() < 2) {
        out.remainder_at_roundoff = true;
        out.pass = true;
        return out;
    }
    const std::size_t ia = usable.front(), ib = usable.back();
    const double ma = remainder(ia), mb = remainder(ib);
    const double dt_win = traj.times[ib] - traj.times[ia];
    const double dlog = std::log(mb) - std::log(ma);
    out.low_log_change = dlog + out.gamma_low * dt_win;
    out.high_log_change = dlog + out.gamma_high * dt_win;
    const bool low_ok = out.low_log_change <= std::log(flat_margin);
    const bool high_ok = out.high_log_change >= std::log(growth_margin);
    out.pass = low_ok && high_ok;
    return out;
}

} // namespace decaylab
