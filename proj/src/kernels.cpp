#include "decaylab/kernels.hpp"

#include <atomic>
#include <cmath>
#include <vector>

namespace decaylab::kern {

namespace {
std::atomic<Exec> g_exec{Exec::automatic};

bool use_par(std::size_t n) {
#ifdef _OPENMP
    switch (exec_mode()) {
        case Exec::serial: return false;
        case Exec::parallel: return true;
        case Exec::automatic: return n >= par_threshold;
    }
    return false;
#else
    (void)n;
    return false;
#endif
}
} // namespace

void set_exec(Exec mode) { g_exec.store(mode); }
Exec exec_mode() { return g_exec.load(); }

double phi1(double z) {
    if (std::abs(z) < 1e-4) {
        return 1.0 + z * (-0.5 + z * (1.0 / 6.0 + z * (-1.0 / 24.0)));
    }
    return -std::expm1(-z) / z;
}

double phi2(double z) {
    if (std::abs(z) < 0.25) {
        // sum_k (-z)^k / (k+2)!
        double term = 0.5, acc = 0.5;
        for (int k = 1; k <= 12; ++k) {
            term *= -z / static_cast<double>(k + 2);
            acc += term;
        }
        return acc;
    }
    return (z + std::expm1(-z)) / (z * z);
}

double gphi1(double w) {
    if (std::abs(w) < 1e-4) {
        return 1.0 + w * (0.5 + w * (1.0 / 6.0 + w * (1.0 / 24.0)));
    }
    return std::expm1(w) / w;
}

double gphi2(double w) {
    if (std::abs(w) < 0.25) {
        // sum_k w^k (k+1)/(k+2)!
        double fact = 2.0, acc = 0.5, pw = 1.0;
        for (int k = 1; k <= 12; ++k) {
            pw *= w;
            fact *= static_cast<double>(k + 2);
            acc += pw * static_cast<double>(k + 1) / fact;
        }
        return acc;
    }
    return ((w - 1.0) * std::exp(w) + 1.0) / (w * w);
}

double int_exp_linear(double h, double mu, double f0, double f1) {
    const double w = mu * h;
    return h * (f0 * gphi1(w) + (f1 - f0) * gphi2(w));
}

double int_decay_linear(double h, double mu, double f0, double f1) {
    const double z = mu * h;
    return h * (f0 * phi1(z) + (f1 - f0) * phi2(z));
}

namespace serial {

void exp_scale(std::span<const double> lam, double t,
               std::span<const double> in, std::span<double> out) {
    const std::size_t n = in.size();
    for (std::size_t j = 0; j < n; ++j) out[j] = in[j] * std::exp(-t * lam[j]);
}

void etd_tables(std::span<const double> lam, double h,
                std::span<double> E, std::span<double> P1, std::span<double> P2) {
    const std::size_t n = lam.size();
    for (std::size_t j = 0; j < n; ++j) {
        const double z = h * lam[j];
        E[j] = std::exp(-z);
        P1[j] = phi1(z);
        P2[j] = phi2(z);
    }
}

void etd_stage(std::span<const double> E, std::span<const double> P, double h,
               std::span<const double> u, std::span<const double> f,
               std::span<double> out) {
    const std::size_t n = u.size();
    for (std::size_t j = 0; j < n; ++j) out[j] = E[j] * u[j] + h * P[j] * f[j];
}

void etd_correct(std::span<const double> P2, double h,
                 std::span<const double> a, std::span<const double> fa,
                 std::span<const double> fu, std::span<double> out) {
    const std::size_t n = a.size();
    for (std::size_t j = 0; j < n; ++j) out[j] = a[j] + h * P2[j] * (fa[j] - fu[j]);
}

void matvec(std::span<const double> M, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = M.data() + i * cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void power_map(std::span<const double> in, double p, double c,
               std::span<double> out) {
    const std::size_t n = in.size();
    if (p == 2.0) {
        for (std::size_t j = 0; j < n; ++j) out[j] = -c * in[j] * in[j] * in[j];
    } else if (p == 1.0) {
        for (std::size_t j = 0; j < n; ++j) out[j] = -c * std::abs(in[j]) * in[j];
    } else {
        for (std::size_t j = 0; j < n; ++j)
            out[j] = in[j] == 0.0 ? 0.0 : -c * std::pow(std::abs(in[j]), p) * in[j];
    }
}

double sumsq(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc;
}

double weighted_sumsq(std::span<const double> w, std::span<const double> x) {
    double acc = 0.0;
    const std::size_t n = x.size();
    for (std::size_t j = 0; j < n; ++j) acc += w[j] * x[j] * x[j];
    return acc;
}

} // namespace serial

namespace par {

namespace {
constexpr std::size_t block = 1024;
}

void exp_scale(std::span<const double> lam, double t,
               std::span<const double> in, std::span<double> out) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) out[j] = in[j] * std::exp(-t * lam[j]);
}

void etd_tables(std::span<const double> lam, double h,
                std::span<double> E, std::span<double> P1, std::span<double> P2) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(lam.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        const double z = h * lam[j];
        E[j] = std::exp(-z);
        P1[j] = phi1(z);
        P2[j] = phi2(z);
    }
}

void etd_stage(std::span<const double> E, std::span<const double> P, double h,
               std::span<const double> u, std::span<const double> f,
               std::span<double> out) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) out[j] = E[j] * u[j] + h * P[j] * f[j];
}

void etd_correct(std::span<const double> P2, double h,
                 std::span<const double> a, std::span<const double> fa,
                 std::span<const double> fu, std::span<double> out) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) out[j] = a[j] + h * P2[j] * (fa[j] - fu[j]);
}

void matvec(std::span<const double> M, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
    const std::ptrdiff_t r = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < r; ++i) {
        const double* row = M.data() + static_cast<std::size_t>(i) * cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void power_map(std::span<const double> in, double p, double c,
               std::span<double> out) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(in.size());
    if (p == 2.0) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t j = 0; j < n; ++j) out[j] = -c * in[j] * in[j] * in[j];
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t j = 0; j < n; ++j)
            out[j] = in[j] == 0.0 ? 0.0 : -c * std::pow(std::abs(in[j]), p) * in[j];
    }
}

// Block-wise partial sums combined serially: independent of thread count.
double sumsq(std::span<const double> x) {
    const std::size_t n = x.size();
    const std::size_t nblocks = (n + block - 1) / block;
    std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * block;
        const std::size_t hi = std::min(lo + block, n);
        double acc = 0.0;
        for (std::size_t j = lo; j < hi; ++j) acc += x[j] * x[j];
        partial[b] = acc;
    }
    double acc = 0.0;
    for (double v : partial) acc += v;
    return acc;
}

double weighted_sumsq(std::span<const double> w, std::span<const double> x) {
    const std::size_t n = x.size();
    const std::size_t nblocks = (n + block - 1) / block;
    std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * block;
        const std::size_t hi = std::min(lo + block, n);
        double acc = 0.0;
        for (std::size_t j = lo; j < hi; ++j) acc += w[j] * x[j] * x[j];
        partial[b] = acc;
    }
    double acc = 0.0;
    for (double v : partial) acc += v;
    return acc;
}

} // namespace par

void exp_scale(std::span<const double> lam, double t,
               std::span<const double> in, std::span<double> out) {
    use_par(in.size()) ? par::exp_scale(lam, t, in, out) : serial::exp_scale(lam, t, in, out);
}

void etd_tables(std::span<const double> lam, double h,
                std::span<double> E, std::span<double> P1, std::span<double> P2) {
    use_par(lam.size()) ? par::etd_tables(lam, h, E, P1, P2)
                        : serial::etd_tables(lam, h, E, P1, P2);
}

void etd_stage(std::span<const double> E, std::span<const double> P, double h,
               std::span<const double> u, std::span<const double> f,
               std::span<double> out) {
    use_par(u.size()) ? par::etd_stage(E, P, h, u, f, out)
                      : serial::etd_stage(E, P, h, u, f, out);
}

void etd_correct(std::span<const double> P2, double h,
                 std::span<const double> a, std::span<const double> fa,
                 std::span<const double> fu, std::span<double> out) {
    use_par(a.size()) ? par::etd_correct(P2, h, a, fa, fu, out)
                      : serial::etd_correct(P2, h, a, fa, fu, out);
}

void matvec(std::span<const double> M, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
    use_par(rows * cols) ? par::matvec(M, rows, cols, x, y)
                         : serial::matvec(M, rows, cols, x, y);
}

void power_map(std::span<const double> in, double p, double c,
               std::span<double> out) {
    use_par(in.size()) ? par::power_map(in, p, c, out) : serial::power_map(in, p, c, out);
}

double sumsq(std::span<const double> x) {
    return use_par(x.size()) ? par::sumsq(x) : serial::sumsq(x);
}

double weighted_sumsq(std::span<const double> w, std::span<const double> x) {
    return use_par(x.size()) ? par::weighted_sumsq(w, x) : serial::weighted_sumsq(w, x);
}

} // namespace decaylab::kern
