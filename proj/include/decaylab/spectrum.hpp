#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

// States live in the eigenbasis of a self-adjoint nonnegative operator A
// with discrete spectrum. Everything here is an immutable value after
// construction; all operations are pure.

namespace decaylab {

struct SpectrumSpec {
    std::vector<double> eigenvalues;        // distinct, strictly increasing, >= 0
    std::vector<std::size_t> multiplicities;
    std::size_t total_dim = 0;

    // Expanded per-coefficient views.
    std::vector<double> lambda_of;          // eigenvalue attached to coefficient j
    std::vector<std::size_t> block_of;      // distinct-eigenvalue block of coefficient j
    std::vector<std::size_t> block_begin;   // first coefficient of each block, size nblocks+1

    static SpectrumSpec make(std::vector<double> eigs, std::vector<std::size_t> mult);

    std::size_t blocks() const { return eigenvalues.size(); }
    bool has_kernel() const { return !eigenvalues.empty() && eigenvalues.front() == 0.0; }
    std::size_t kernel_dim() const { return has_kernel() ? multiplicities.front() : 0; }
    // Smallest strictly positive eigenvalue; throws if the spectrum is {0} or empty.
    double spectral_gap() const;
    double max_eigenvalue() const;
};

struct StateVector {
    std::vector<double> c;

    StateVector() = default;
    explicit StateVector(std::size_t n) : c(n, 0.0) {}
    explicit StateVector(std::vector<double> v) : c(std::move(v)) {}
    StateVector(std::initializer_list<double> v) : c(v) {}

    std::size_t size() const { return c.size(); }
    double& operator[](std::size_t j) { return c[j]; }
    double operator[](std::size_t j) const { return c[j]; }
    std::span<const double> span() const { return {c.data(), c.size()}; }
    std::span<double> span() { return {c.data(), c.size()}; }
};

StateVector operator+(const StateVector& a, const StateVector& b);
StateVector operator-(const StateVector& a, const StateVector& b);
StateVector operator*(double s, const StateVector& a);

// Split of the coefficient index set at one eigenvalue of the spectrum.
// Membership is by block index, never by floating-point comparison.
struct SpectralSplit {
    std::size_t lambda_block;
    std::size_t lambda_begin;    // coefficient range of the lambda block
    std::size_t lambda_end;
    double lambda;
};

SpectralSplit make_split(const SpectrumSpec& spec, std::size_t lambda_block);

// minus is strictly below lambda so that {minus, lambda, plus} partitions
// the indices; le = minus + lambda is the closed lower subspace used by the
// profile construction. kernel ignores the split threshold.
enum class Part { minus, lambda, plus, kernel, le };

StateVector project(const SpectrumSpec& spec, const StateVector& u,
                    const SpectralSplit& split, Part part);

double norm_H(const StateVector& u);
// |A^alpha u| = (sum lambda_j^{2 alpha} c_j^2)^{1/2}, with 0^0 = 1 on the kernel.
double norm_A_alpha(const SpectrumSpec& spec, const StateVector& u, double alpha);
// Full D(A^alpha) norm (|u|^2 + |A^alpha u|^2)^{1/2}.
double norm_DA_alpha(const SpectrumSpec& spec, const StateVector& u, double alpha);
inline double norm_Dhalf(const SpectrumSpec& spec, const StateVector& u) {
    return norm_DA_alpha(spec, u, 0.5);
}

// e^{-tA} u for t >= 0; t < 0 is the backward map (finite spectra only,
// throws "semigroup overflow" if a coefficient leaves the finite range).
StateVector semigroup_apply(const SpectrumSpec& spec, const StateVector& u, double t);

} // namespace decaylab
