#include "decaylab/models.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "decaylab/kernels.hpp"

namespace decaylab {

TransformPair TransformPair::make(Basis kind, std::size_t n_modes, std::size_t grid_size) {
    if (grid_size < 2 * n_modes)
        throw std::invalid_argument("transform: grid must be at least 2x modes for dealiasing");
    TransformPair tp;
    tp.basis_kind = kind;
    tp.n_modes = n_modes;
    tp.grid_size = grid_size;
    tp.grid_x.resize(grid_size);
    tp.synth.resize(grid_size * n_modes);
    tp.anal.resize(n_modes * grid_size);
    const double pi = std::numbers::pi;
    const double sqrt2 = std::numbers::sqrt2;
    for (std::size_t j = 0; j < grid_size; ++j)
        tp.grid_x[j] = pi * (static_cast<double>(j) + 0.5) / static_cast<double>(grid_size);
    for (std::size_t j = 0; j < grid_size; ++j) {
        for (std::size_t k = 0; k < n_modes; ++k) {
            double v;
            if (kind == Basis::cosine) {
                v = k == 0 ? 1.0 : sqrt2 * std::cos(static_cast<double>(k) * tp.grid_x[j]);
            } else {
                v = sqrt2 * std::sin(static_cast<double>(k + 1) * tp.grid_x[j]);
            }
            tp.synth[j * n_modes + k] = v;
            tp.anal[k * grid_size + j] = v / static_cast<double>(grid_size);
        }
    }
    return tp;
}

void TransformPair::synthesis(std::span<const double> coeffs, std::span<double> grid) const {
    kern::matvec(synth, grid_size, n_modes, coeffs, grid);
}

void TransformPair::analysis(std::span<const double> grid, std::span<double> coeffs) const {
    kern::matvec(anal, n_modes, grid_size, grid, coeffs);
}

StateVector eval_nonlinearity(const ProblemDefinition& prob, const StateVector& u) {
    if (u.size() != prob.spectrum.total_dim)
        throw std::invalid_argument("eval_nonlinearity: dimension mismatch");
    if (!(norm_Dhalf(prob.spectrum, u) < prob.bounds.R))
        throw std::domain_error("outside validity ball");
    StateVector f(u.size());
    prob.rhs(u.span(), f.span());
    return f;
}

ProblemDefinition make_ode2_slow() {
    ProblemDefinition prob;
    prob.name = "ode2_slow";
    prob.spectrum = SpectrumSpec::make({0.0, 1.0}, {1, 1});
    // |f(u)| = sqrt2 |x|^3 <= sqrt2 |u|^3;
    // |f(u)-f(v)| = sqrt2 |x^3 - y^3| <= (3/2) sqrt2 (|u|^2 + |v|^2) |u-v|.
    prob.bounds.K0 = std::numbers::sqrt2;
    prob.bounds.p = 2.0;
    prob.bounds.q = 2.0;
    prob.bounds.L = 1.5 * std::numbers::sqrt2;
    prob.bounds.R = 4.0;
    prob.bounds.sign_condition = false;
    prob.bounds.provenance = Provenance::formula;
    prob.rhs = [](std::span<const double> in, std::span<double> out) {
        const double x3 = in[0] * in[0] * in[0];
        out[0] = -x3;
        out[1] = x3;
    };
    return prob;
}

ProblemDefinition make_ode2_fast(double lambda, double beta, double p, double q) {
    if (!(beta > lambda) || !(lambda > 0.0))
        throw std::invalid_argument("requires spectral gap above lambda");
    ProblemDefinition prob;
    prob.name = "ode2_fast";
    prob.spectrum = SpectrumSpec::make({lambda, beta}, {1, 1});
    prob.bounds.p = p;
    prob.bounds.q = q;
    prob.bounds.K0 = std::max(1.0, std::pow(lambda, -(1.0 + q) / 2.0));
    prob.bounds.R = 4.0;
    prob.bounds.sign_condition = false;
    if (p == q) {
        prob.bounds.L = (1.0 + p) + (1.0 + q);
        prob.bounds.provenance = Provenance::formula;
    } else {
        // Mixed exponents have no clean closed form; sample the ratio.
        prob.bounds.L = 0.0;  // patched below
        prob.bounds.provenance = Provenance::sampled;
    }
    prob.rhs = [p, q](std::span<const double> in, std::span<double> out) {
        const double ax = std::abs(in[0]);
        out[0] = 0.0;
        out[1] = (ax == 0.0 ? 0.0 : std::pow(ax, 1.0 + p) + std::pow(ax, 1.0 + q));
    };
    if (p != q) {
        std::mt19937_64 rng(default_bounds_seed);
        std::uniform_real_distribution<double> ux(-prob.bounds.R / 2, prob.bounds.R / 2);
        double worst = 0.0;
        const double pe = prob.bounds.p;
        for (int i = 0; i < 5000; ++i) {
            const double x = ux(rng), y = ux(rng);
            if (x == y) continue;
            auto f2 = [&](double s) {
                return std::pow(std::abs(s), 1.0 + p) + std::pow(std::abs(s), 1.0 + q);
            };
            const double num = std::abs(f2(x) - f2(y));
            const double den =
                (std::pow(std::abs(x), pe) + std::pow(std::abs(y), pe)) * std::abs(x - y);
            if (den > 0.0) worst = std::max(worst, num / den);
        }
        prob.bounds.L = 1.5 * worst;
        prob.bounds.sample_seed = default_bounds_seed;
    }
    return prob;
}

namespace {

// Max of |f(u)| / (|u|^{1+p} + |A^{1/2}u|^{1+q}) and of the two-point
// Lipschitz ratio over a sample of B_R, times a 1.5 safety factor.
// Isotropic draws in 16+ dimensions never come near the kernel ray, where
// the pointwise nonlinearity has its worst ratios, so the sample mixes
// three eigenvalue weightings with single-mode rays.
void sample_order_constants(ProblemDefinition& prob, std::uint64_t seed, std::size_t samples) {
    const auto& spec = prob.spectrum;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> urad(0.0, 1.0);
    const double R = prob.bounds.R;
    const double p = prob.bounds.p;
    const double q = prob.bounds.q;

    auto draw = [&, i = std::size_t{0}](double rmax) mutable {
        StateVector u(spec.total_dim);
        const std::size_t family = i % 4;
        if (family == 3) {
            u[i / 4 % spec.total_dim] = 1.0;
        } else {
            const double weight = family == 0 ? 0.0 : (family == 1 ? 1.0 : 3.0);
            for (std::size_t j = 0; j < spec.total_dim; ++j)
                u[j] = gauss(rng) / std::pow(1.0 + spec.lambda_of[j], weight / 2.0);
        }
        ++i;
        const double nd = norm_Dhalf(spec, u);
        const double r = rmax * std::max(urad(rng), 1e-3);
        for (auto& v : u.c) v *= r / nd;
        return u;
    };
    auto feval = [&](const StateVector& u) {
        StateVector f(u.size());
        prob.rhs(u.span(), f.span());
        return f;
    };

    double k0 = 0.0, lip = 0.0;
    const std::size_t n_single = samples / 2;
    for (std::size_t i = 0; i < n_single; ++i) {
        const StateVector u = draw(0.999 * R);
        const double nH = norm_H(u);
        const double nA = norm_A_alpha(spec, u, 0.5);
        const double den = std::pow(nH, 1.0 + p) + std::pow(nA, 1.0 + q);
        if (den > 0.0) k0 = std::max(k0, norm_H(feval(u)) / den);
    }
    const std::size_t n_pairs = samples / 4;
    for (std::size_t i = 0; i < n_pairs; ++i) {
        StateVector u = draw(0.999 * R);
        StateVector v = (i % 2 == 0) ? draw(0.999 * R) : u + (1e-3 * draw(0.999 * R));
        if (norm_Dhalf(spec, v) >= R) continue;
        const double dd = norm_Dhalf(spec, u - v);
        if (dd == 0.0) continue;
        const double den =
            (std::pow(norm_Dhalf(spec, u), p) + std::pow(norm_Dhalf(spec, v), p)) * dd;
        if (den > 0.0) lip = std::max(lip, norm_H(feval(u) - feval(v)) / den);
    }
    prob.bounds.K0 = 1.5 * k0;
    prob.bounds.L = 1.5 * lip;
    prob.bounds.provenance = Provenance::sampled;
    prob.bounds.sample_seed = seed;
}

ProblemDefinition make_interval_problem(std::string name, TransformPair::Basis basis,
                                        std::vector<double> eigs, std::size_t n_modes,
                                        double p, double c, std::uint64_t seed,
                                        std::size_t bound_samples) {
    ProblemDefinition prob;
    prob.name = std::move(name);
    prob.spectrum = SpectrumSpec::make(std::move(eigs),
                                       std::vector<std::size_t>(n_modes, 1));
    auto tp = std::make_shared<const TransformPair>(
        TransformPair::make(basis, n_modes, 2 * n_modes));
    prob.transform = tp;
    prob.rhs = [tp, p, c](std::span<const double> in, std::span<double> out) {
        std::vector<double> grid(tp->grid_size);
        std::vector<double> psi(tp->grid_size);
        tp->synthesis(in, grid);
        kern::power_map(grid, p, c, psi);  // f = -psi(u) pointwise
        tp->analysis(psi, out);
    };
    prob.bounds.p = p;
    prob.bounds.q = p;
    prob.bounds.R = 1.0;
    prob.bounds.sign_condition = true;  // psi(s) s = c|s|^{2+p} >= 0
    sample_order_constants(prob, seed, bound_samples);
    return prob;
}

} // namespace

ProblemDefinition make_neumann_interval(std::size_t n_modes, double p, double c,
                                        std::uint64_t seed, std::size_t bound_samples) {
    if (n_modes < 2) throw std::invalid_argument("neumann_interval: need at least 2 modes");
    std::vector<double> eigs(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k)
        eigs[k] = static_cast<double>(k) * static_cast<double>(k);
    return make_interval_problem("neumann_interval", TransformPair::Basis::cosine,
                                 std::move(eigs), n_modes, p, c, seed, bound_samples);
}

ProblemDefinition make_dirichlet_interval(std::size_t n_modes, double p, double c,
                                          bool critical, std::uint64_t seed,
                                          std::size_t bound_samples) {
    if (n_modes < 2) throw std::invalid_argument("dirichlet_interval: need at least 2 modes");
    const double shift = critical ? 1.0 : 0.5;
    std::vector<double> eigs(n_modes);
    for (std::size_t k = 1; k <= n_modes; ++k)
        eigs[k - 1] = static_cast<double>(k) * static_cast<double>(k) - shift;
    return make_interval_problem(critical ? "dirichlet_interval_critical"
                                          : "dirichlet_interval_subcritical",
                                 TransformPair::Basis::sine, std::move(eigs), n_modes, p, c,
                                 seed, bound_samples);
}

ProblemDefinition make_linear(SpectrumSpec spec) {
    ProblemDefinition prob;
    prob.name = "linear";
    prob.spectrum = std::move(spec);
    prob.bounds.K0 = 0.0;
    prob.bounds.L = 0.0;
    prob.bounds.p = 1.0;
    prob.bounds.q = 1.0;
    prob.bounds.R = 4.0;
    prob.bounds.sign_condition = true;
    prob.rhs = [](std::span<const double>, std::span<double> out) {
        for (auto& v : out) v = 0.0;
    };
    return prob;
}

ProblemDefinition make_custom(std::string name, SpectrumSpec spec,
                              std::vector<PolynomialTerm> terms, OrderBounds bounds) {
    ProblemDefinition prob;
    prob.name = std::move(name);
    const std::size_t dim = spec.total_dim;
    for (const auto& t : terms) {
        if (t.target >= dim) throw std::invalid_argument("custom: term target out of range");
        for (const auto& [m, _] : t.factors)
            if (m >= dim) throw std::invalid_argument("custom: factor mode out of range");
    }
    prob.spectrum = std::move(spec);
    prob.bounds = bounds;
    prob.rhs = [terms](std::span<const double> in, std::span<double> out) {
        for (auto& v : out) v = 0.0;
        for (const auto& t : terms) {
            double v = t.coeff;
            for (const auto& [mode, pow_] : t.factors)
                for (unsigned e = 0; e < pow_; ++e) v *= in[mode];
            out[t.target] += v;
        }
    };
    return prob;
}

} // namespace decaylab
