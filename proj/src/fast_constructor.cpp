#include "decaylab/fast_constructor.hpp"

#include <cmath>
#include <stdexcept>

#include "decaylab/kernels.hpp"

namespace decaylab {

namespace {

constexpr double r0_floor = 1e-12;
constexpr double fp_tolerance = 1e-10;
constexpr std::size_t max_iterations = 200;
constexpr double stall_ratio = 0.9;
constexpr std::size_t stall_patience = 10;

double smallness_lhs(const FastParams& p, double L, double pexp) {
    const double term_minus = std::sqrt(p.lambda + 1.0) / (p.delta - p.lambda);
    const double term_plus =
        std::isinf(p.beta) ? 0.0 : std::sqrt(p.beta + 1.0) / (p.beta - p.delta);
    return 2.0 * L * std::pow(2.0 * p.r1, pexp) * (term_minus + term_plus);
}

// x * e^{e_arg} without forming e^{e_arg} when the factors are extreme
double mul_exp(double x, double e_arg) {
    if (x == 0.0) return 0.0;
    return std::copysign(std::exp(e_arg + std::log(std::abs(x))), x);
}

} // namespace

FastParams choose_params(const ProblemDefinition& prob, std::size_t lambda_block, double r0) {
    const auto& spec = prob.spectrum;
    if (lambda_block >= spec.blocks())
        throw std::invalid_argument("choose_params: eigenvalue index out of range");
    FastParams p;
    p.lambda_block = lambda_block;
    p.lambda = spec.eigenvalues[lambda_block];
    if (!(p.lambda > 0.0))
        throw std::invalid_argument("choose_params: lambda must be a positive eigenvalue");
    p.beta = lambda_block + 1 < spec.blocks() ? spec.eigenvalues[lambda_block + 1]
                                              : std::numeric_limits<double>::infinity();
    const double cap = std::min(p.beta, (1.0 + prob.bounds.p) * p.lambda);
    p.delta = p.lambda + 0.5 * (cap - p.lambda);

    p.T = std::ceil(-std::log(p.tail_tolerance) / (p.delta - p.lambda));
    // the scans hold quantities of size e^{-(1+p) lambda t} and e^{+delta t}
    if ((1.0 + prob.bounds.p) * p.lambda * p.T > 700.0 || p.delta * p.T > 700.0)
        throw std::runtime_error(
            "choose_params: tail horizon exceeds floating-point range for these parameters");

    // {0} followed by five geometric decades up to T
    const double decades = 5.0;
    const std::size_t n_geo =
        static_cast<std::size_t>(decades * static_cast<double>(p.points_per_decade)) + 1;
    p.grid.reserve(n_geo + 1);
    p.grid.push_back(0.0);
    const double l0 = std::log10(p.T) - decades;
    for (std::size_t i = 0; i < n_geo; ++i) {
        const double l = l0 + decades * static_cast<double>(i) / static_cast<double>(n_geo - 1);
        p.grid.push_back(std::pow(10.0, l));
    }
    p.grid.back() = p.T;

    if (!(r0 > 0.0)) throw std::invalid_argument("choose_params: r0 must be positive");
    const double r1_factor = 2.0 * std::sqrt(1.0 + (std::isinf(p.beta) ? 0.0 : 1.0 / p.beta));
    p.r0 = r0;
    while (p.r0 > r0_floor) {
        p.r1 = r1_factor * p.r0;
        const bool ok1 = 2.0 * p.r1 < prob.bounds.R;
        const bool ok2 = smallness_lhs(p, prob.bounds.L, prob.bounds.p) <= 0.5;
        if (ok1 && ok2) {
            p.slack1 = 1.0 - 2.0 * p.r1 / prob.bounds.R;
            p.slack2 = 1.0 - smallness_lhs(p, prob.bounds.L, prob.bounds.p) / 0.5;
            return p;
        }
        p.r0 /= 2.0;
    }
    throw std::runtime_error("smallness unattainable with sampled L");
}

FixedPointIterate zero_iterate(const FastParams& params, const ProblemDefinition& prob) {
    FixedPointIterate it;
    it.g.assign(params.grid.size(), StateVector(prob.spectrum.total_dim));
    it.sup_norm = 0.0;
    return it;
}

double iterate_distance(const SpectrumSpec& spec, const FixedPointIterate& a,
                        const FixedPointIterate& b) {
    if (a.g.size() != b.g.size())
        throw std::invalid_argument("iterate_distance: grid mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.g.size(); ++i)
        d = std::max(d, norm_Dhalf(spec, a.g[i] - b.g[i]));
    return d;
}

namespace {

struct MapResult {
    FixedPointIterate gbar;
    StateVector u_at_0;
};

MapResult apply_map(const FixedPointIterate& g, const FastParams& params,
                    const ProblemDefinition& prob, const StateVector& v0,
                    const StateVector& w0) {
    const auto& spec = prob.spectrum;
    const std::size_t n = spec.total_dim;
    const std::size_t m = params.grid.size();
    const double lambda = params.lambda;
    const double delta = params.delta;

    if (g.g.size() != m) throw std::invalid_argument("apply_F: iterate grid mismatch");
    if (g.sup_norm > params.r1 * (1.0 + 1e-9))
        throw std::invalid_argument("apply_F: iterate outside the r1 ball");

    // phi rows: f(v0 e^{-lambda t_i} + g_i e^{-delta t_i})
    std::vector<StateVector> phi(m, StateVector(n));
    StateVector arg(n);
    for (std::size_t i = 0; i < m; ++i) {
        const double el = std::exp(-lambda * params.grid[i]);
        const double ed = std::exp(-delta * params.grid[i]);
        for (std::size_t j = 0; j < n; ++j) arg[j] = v0[j] * el + g.g[i][j] * ed;
        if (!(norm_Dhalf(spec, arg) < prob.bounds.R))
            throw std::runtime_error("left validity ball");
        prob.rhs(arg.span(), phi[i].span());
    }

    const std::size_t lam_begin = spec.block_begin[params.lambda_block];
    const std::size_t lam_end = spec.block_begin[params.lambda_block + 1];

    MapResult out;
    out.gbar.g.assign(m, StateVector(n));
    out.u_at_0 = StateVector(n);

    // Low modes (mu <= lambda): backward scan of
    //   I(t_i) = int_{t_i}^{inf} e^{(s-t_i) mu} phi_j(s) ds,
    // analytic beyond T with phi ~ phi(T) e^{-delta (s-T)}.
    // High modes (mu >= beta): forward scan of
    //   K(t_i) = int_0^{t_i} e^{(s-t_i) mu} phi_j(s) ds.
    // Independent per mode.
    const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n >= kern::par_threshold)
    for (std::ptrdiff_t jj = 0; jj < nn; ++jj) {
        const std::size_t j = static_cast<std::size_t>(jj);
        const double mu = spec.lambda_of[j];
        if (j < lam_end) {
            double I = phi[m - 1][j] / (delta - mu);
            out.gbar.g[m - 1][j] = mul_exp(-I, delta * params.grid[m - 1]);
            for (std::size_t i = m - 1; i-- > 0;) {
                const double h = params.grid[i + 1] - params.grid[i];
                I = kern::int_exp_linear(h, mu, phi[i][j], phi[i + 1][j]) +
                    std::exp(mu * h) * I;
                out.gbar.g[i][j] = mul_exp(-I, delta * params.grid[i]);
            }
            const double v = (j >= lam_begin && j < lam_end) ? v0[j] : 0.0;
            out.u_at_0[j] = v - I;
        } else {
            double K = 0.0;
            out.gbar.g[0][j] = w0[j];
            out.u_at_0[j] = w0[j];
            for (std::size_t i = 1; i < m; ++i) {
                const double h = params.grid[i] - params.grid[i - 1];
                K = std::exp(-mu * h) * K +
                    kern::int_decay_linear(h, mu, phi[i - 1][j], phi[i][j]);
                const double t = params.grid[i];
                out.gbar.g[i][j] =
                    w0[j] * std::exp((delta - mu) * t) + mul_exp(K, delta * t);
            }
        }
    }

    out.gbar.sup_norm = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        out.gbar.sup_norm = std::max(out.gbar.sup_norm, norm_Dhalf(spec, out.gbar.g[i]));
    return out;
}

} // namespace

FixedPointIterate apply_F(const FixedPointIterate& g, const FastParams& params,
                          const ProblemDefinition& prob, const StateVector& v0,
                          const StateVector& w0) {
    return apply_map(g, params, prob, v0, w0).gbar;
}

FixedPointSolution solve_fixed_point(const ProblemDefinition& prob, const FastParams& params,
                                     const StateVector& v0, const StateVector& w0) {
    const auto& spec = prob.spectrum;
    if (v0.size() != spec.total_dim || w0.size() != spec.total_dim)
        throw std::invalid_argument("solve_fixed_point: dimension mismatch");
    if (norm_Dhalf(spec, v0) + norm_Dhalf(spec, w0) > params.r0 * (1.0 + 1e-12))
        throw std::invalid_argument("solve_fixed_point: |v0|+|w0| exceeds r0");
    const std::size_t lam_begin = spec.block_begin[params.lambda_block];
    const std::size_t lam_end = spec.block_begin[params.lambda_block + 1];
    for (std::size_t j = 0; j < spec.total_dim; ++j) {
        if (v0[j] != 0.0 && (j < lam_begin || j >= lam_end))
            throw std::invalid_argument("solve_fixed_point: v0 not an eigenvector of lambda");
        if (w0[j] != 0.0 && j < lam_end)
            throw std::invalid_argument("solve_fixed_point: w0 not supported above lambda");
    }

    FixedPointSolution sol;
    sol.v0 = v0;
    sol.w0 = w0;
    sol.params = params;

    FixedPointIterate g = zero_iterate(params, prob);
    MapResult last;
    std::size_t stalled = 0;
    bool converged = false;
    for (std::size_t k = 1; k <= max_iterations; ++k) {
        last = apply_map(g, params, prob, v0, w0);
        const double d = iterate_distance(spec, last.gbar, g);
        sol.distances.push_back(d);
        if (sol.distances.size() >= 2) {
            const double prev = sol.distances[sol.distances.size() - 2];
            if (prev > 0.0) {
                const double r = d / prev;
                sol.contraction_ratios.push_back(r);
                stalled = r > stall_ratio ? stalled + 1 : 0;
            }
        }
        g = last.gbar;
        sol.iterations = k;
        if (d < fp_tolerance) {
            converged = true;
            break;
        }
        if (stalled >= stall_patience)
            throw std::runtime_error("no contraction; check smallness slack");
    }
    if (!converged) throw std::runtime_error("no contraction; check smallness slack");

    sol.residual = sol.distances.back();
    sol.g_star = g;
    const SpectralSplit split = make_split(spec, params.lambda_block);
    sol.w1 = project(spec, last.u_at_0, split, Part::le);
    sol.u0 = sol.w0 + sol.w1;
    return sol;
}

ValidationReport validate_solution(const FixedPointSolution& sol, const ProblemDefinition& prob,
                                   const IntegratorConfig& cfg, double window_lo,
                                   double window_hi, double profile_tol, double grid_tol) {
    const auto& spec = prob.spectrum;
    const FastParams& p = sol.params;
    ValidationReport rep;
    // e^{lambda t} u - v0 decays no slower than min(beta - lambda, p lambda),
    // so the default window opens where that factor is below e^{-6}. It
    // closes at 20/rho: quadrature error in the below-lambda components of
    // the datum grows like e^{(lambda - mu) t} in this rescaled frame and
    // takes over at late times.
    const double rho = std::min(std::isinf(p.beta) ? std::numeric_limits<double>::infinity()
                                                   : p.beta - p.lambda,
                                prob.bounds.p * p.lambda);
    rep.window_lo = window_lo > 0.0 ? window_lo : 6.0 / rho;
    rep.window_hi = window_hi > 0.0 ? window_hi : 20.0 / rho;
    rep.profile_tol = profile_tol;
    rep.grid_tol = grid_tol;

    IntegratorConfig run = cfg;
    run.store_states = true;
    run.t_end = std::max(cfg.t_end, rep.window_hi * 1.05);
    const Trajectory traj = integrate(prob, sol.u0, run);
    rep.terminated = traj.terminated;
    if (traj.terminated != Termination::completed) {
        rep.pass = false;
        return rep;
    }

    const std::size_t n = spec.total_dim;
    StateVector diff(n);
    for (std::size_t i = 0; i < traj.samples(); ++i) {
        const double t = traj.times[i];
        const double lt = p.lambda * t;
        if (t >= rep.window_lo && t <= rep.window_hi) {
            for (std::size_t j = 0; j < n; ++j) {
                const double c = traj.states[i][j];
                const double scaled =
                    c == 0.0 ? 0.0 : std::copysign(std::exp(lt + std::log(std::abs(c))), c);
                diff[j] = scaled - sol.v0[j];
            }
            const double e = norm_Dhalf(spec, diff);
            if (e > rep.profile_window_err) {
                rep.profile_window_err = e;
                rep.profile_argmax_t = t;
            }
        }
        if (t <= p.T) {
            // g* is piecewise linear on its grid by construction
            const auto& grid = p.grid;
            std::size_t k = 0;
            while (k + 2 < grid.size() && grid[k + 1] < t) ++k;
            const double h = grid[k + 1] - grid[k];
            const double w = h > 0.0 ? (t - grid[k]) / h : 0.0;
            const double el = std::exp(-p.lambda * t);
            const double ed = std::exp(-p.delta * t);
            for (std::size_t j = 0; j < n; ++j) {
                const double gi =
                    (1.0 - w) * sol.g_star.g[k][j] + w * sol.g_star.g[k + 1][j];
                diff[j] = traj.states[i][j] - sol.v0[j] * el - gi * ed;
            }
            const double e = norm_Dhalf(spec, diff);
            if (e > rep.grid_match_err) {
                rep.grid_match_err = e;
                rep.grid_argmax_t = t;
            }
        }
    }
    rep.pass = rep.profile_window_err <= rep.profile_tol && rep.grid_match_err <= rep.grid_tol;
    return rep;
}

} // namespace decaylab
