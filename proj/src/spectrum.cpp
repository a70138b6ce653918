#include "decaylab/spectrum.hpp"

#include <cmath>
#include <stdexcept>

#include "decaylab/kernels.hpp"

namespace decaylab {

SpectrumSpec SpectrumSpec::make(std::vector<double> eigs, std::vector<std::size_t> mult) {
    if (eigs.empty()) throw std::invalid_argument("spectrum: empty eigenvalue list");
    if (eigs.size() != mult.size())
        throw std::invalid_argument("spectrum: eigenvalues/multiplicities size mismatch");
    for (std::size_t k = 0; k < eigs.size(); ++k) {
        if (!(eigs[k] >= 0.0)) throw std::invalid_argument("spectrum: negative eigenvalue");
        if (k > 0 && !(eigs[k] > eigs[k - 1]))
            throw std::invalid_argument("spectrum: eigenvalues not strictly increasing");
        if (mult[k] == 0) throw std::invalid_argument("spectrum: zero multiplicity");
    }
    SpectrumSpec s;
    s.eigenvalues = std::move(eigs);
    s.multiplicities = std::move(mult);
    s.block_begin.resize(s.eigenvalues.size() + 1, 0);
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
        s.block_begin[k + 1] = s.block_begin[k] + s.multiplicities[k];
        for (std::size_t m = 0; m < s.multiplicities[k]; ++m) {
            s.lambda_of.push_back(s.eigenvalues[k]);
            s.block_of.push_back(k);
        }
    }
    s.total_dim = s.lambda_of.size();
    return s;
}

double SpectrumSpec::spectral_gap() const {
    for (double lam : eigenvalues)
        if (lam > 0.0) return lam;
    throw std::runtime_error("spectrum: no strictly positive eigenvalue");
}

double SpectrumSpec::max_eigenvalue() const { return eigenvalues.back(); }

StateVector operator+(const StateVector& a, const StateVector& b) {
    StateVector r(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) r[j] = a[j] + b[j];
    return r;
}

StateVector operator-(const StateVector& a, const StateVector& b) {
    StateVector r(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) r[j] = a[j] - b[j];
    return r;
}

StateVector operator*(double s, const StateVector& a) {
    StateVector r(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) r[j] = s * a[j];
    return r;
}

SpectralSplit make_split(const SpectrumSpec& spec, std::size_t lambda_block) {
    if (lambda_block >= spec.blocks())
        throw std::invalid_argument("split: eigenvalue index out of range");
    return SpectralSplit{lambda_block, spec.block_begin[lambda_block],
                         spec.block_begin[lambda_block + 1],
                         spec.eigenvalues[lambda_block]};
}

StateVector project(const SpectrumSpec& spec, const StateVector& u,
                    const SpectralSplit& split, Part part) {
    if (u.size() != spec.total_dim)
        throw std::invalid_argument("project: state/spectrum dimension mismatch");
    StateVector r(u.size());
    std::size_t lo = 0, hi = 0;
    switch (part) {
        case Part::minus:  lo = 0;                 hi = split.lambda_begin; break;
        case Part::lambda: lo = split.lambda_begin; hi = split.lambda_end;  break;
        case Part::plus:   lo = split.lambda_end;   hi = u.size();          break;
        case Part::le:     lo = 0;                  hi = split.lambda_end;  break;
        case Part::kernel:
            lo = 0;
            hi = spec.kernel_dim();  // zero vector when the kernel is trivial
            break;
    }
    for (std::size_t j = lo; j < hi; ++j) r[j] = u[j];
    return r;
}

double norm_H(const StateVector& u) { return std::sqrt(kern::sumsq(u.span())); }

double norm_A_alpha(const SpectrumSpec& spec, const StateVector& u, double alpha) {
    if (u.size() != spec.total_dim)
        throw std::invalid_argument("norm: state/spectrum dimension mismatch");
    if (alpha == 0.5) return std::sqrt(kern::weighted_sumsq(spec.lambda_of, u.span()));
    double acc = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double w = std::pow(spec.lambda_of[j], 2.0 * alpha);  // pow(0,0)=1
        acc += w * u[j] * u[j];
    }
    return std::sqrt(acc);
}

double norm_DA_alpha(const SpectrumSpec& spec, const StateVector& u, double alpha) {
    const double a = norm_H(u);
    const double b = norm_A_alpha(spec, u, alpha);
    return std::sqrt(a * a + b * b);
}

StateVector semigroup_apply(const SpectrumSpec& spec, const StateVector& u, double t) {
    if (u.size() != spec.total_dim)
        throw std::invalid_argument("semigroup: state/spectrum dimension mismatch");
    StateVector r(u.size());
    kern::exp_scale(spec.lambda_of, t, u.span(), r.span());
    for (double v : r.c)
        if (!std::isfinite(v)) throw std::runtime_error("semigroup overflow");
    return r;
}

} // namespace decaylab
