#pragma once

#include <cstddef>
#include <span>

// Low-level array kernels. Every kernel exists twice: a plain serial
// reference in kern::serial and an OpenMP version in kern::par. The
// unqualified wrappers dispatch on array size (and the global exec mode),
// so desk-scale problems never pay parallel overhead. Parallel reductions
// use fixed 1024-element blocks combined serially, so results do not
// depend on the thread count.

namespace decaylab::kern {

enum class Exec { automatic, serial, parallel };

void set_exec(Exec mode);
Exec exec_mode();

// Minimum element count before the dispatcher considers OpenMP.
inline constexpr std::size_t par_threshold = 4096;

// Exponential integrator weights. phi1/phi2 are against the decaying
// kernel e^{-z}, gphi1/gphi2 against the growing kernel e^{+w}. Series
// branches below |z| = 1e-4 avoid cancellation (kernel modes have z = 0
// exactly).
double phi1(double z);   // (1 - e^{-z}) / z
double phi2(double z);   // (e^{-z} - 1 + z) / z^2
double gphi1(double w);  // (e^{w} - 1) / w
double gphi2(double w);  // (w e^{w} - e^{w} + 1) / w^2

// Exact integrals of a linear interpolant against exponential kernels:
//   int_exp_linear:   \int_0^h e^{+mu s}     (f0 + (f1-f0) s/h) ds
//   int_decay_linear: \int_0^h e^{-mu (h-s)} (f0 + (f1-f0) s/h) ds, mu >= 0
// The decay form never forms a growing exponential and is safe for large
// mu*h; the growing form is for bounded mu*h only.
double int_exp_linear(double h, double mu, double f0, double f1);
double int_decay_linear(double h, double mu, double f0, double f1);

namespace serial {

void exp_scale(std::span<const double> lam, double t,
               std::span<const double> in, std::span<double> out);

// E = exp(-h*lam), P1 = phi1(h*lam), P2 = phi2(h*lam)
void etd_tables(std::span<const double> lam, double h,
                std::span<double> E, std::span<double> P1, std::span<double> P2);

// out = E.*u + h * P.*f
void etd_stage(std::span<const double> E, std::span<const double> P, double h,
               std::span<const double> u, std::span<const double> f,
               std::span<double> out);

// out = a + h * P2.*(fa - fu)
void etd_correct(std::span<const double> P2, double h,
                 std::span<const double> a, std::span<const double> fa,
                 std::span<const double> fu, std::span<double> out);

// y = M x with M row-major (rows x cols)
void matvec(std::span<const double> M, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);

// out = -c |in|^p in, applied pointwise
void power_map(std::span<const double> in, double p, double c,
               std::span<double> out);

double sumsq(std::span<const double> x);
double weighted_sumsq(std::span<const double> w, std::span<const double> x);

} // namespace serial

namespace par {

void exp_scale(std::span<const double> lam, double t,
               std::span<const double> in, std::span<double> out);
void etd_tables(std::span<const double> lam, double h,
                std::span<double> E, std::span<double> P1, std::span<double> P2);
void etd_stage(std::span<const double> E, std::span<const double> P, double h,
               std::span<const double> u, std::span<const double> f,
               std::span<double> out);
void etd_correct(std::span<const double> P2, double h,
                 std::span<const double> a, std::span<const double> fa,
                 std::span<const double> fu, std::span<double> out);
void matvec(std::span<const double> M, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);
void power_map(std::span<const double> in, double p, double c,
               std::span<double> out);
double sumsq(std::span<const double> x);
double weighted_sumsq(std::span<const double> w, std::span<const double> x);

} // namespace par

void exp_scale(std::span<const double> lam, double t,
               std::span<const double> in, std::span<double> out);
void etd_tables(std::span<const double> lam, double h,
                std::span<double> E, std::span<double> P1, std::span<double> P2);
void etd_stage(std::span<const double> E, std::span<const double> P, double h,
               std::span<const double> u, std::span<const double> f,
               std::span<double> out);
void etd_correct(std::span<const double> P2, double h,
                 std::span<const double> a, std::span<const double> fa,
                 std::span<const double> fu, std::span<double> out);
void matvec(std::span<const double> M, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);
void power_map(std::span<const double> in, double p, double c,
               std::span<double> out);
double sumsq(std::span<const double> x);
double weighted_sumsq(std::span<const double> w, std::span<const double> x);

} // namespace decaylab::kern
