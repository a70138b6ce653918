// Timings of the OpenMP kernels against their serial references, plus an
// end-to-end integration at a size where the transforms dominate.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "decaylab/integrator.hpp"
#include "decaylab/kernels.hpp"

using namespace decaylab;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename F>
double time_loop(F&& body, int reps) {
    body();  // warm up
    const auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) body();
    return seconds_since(t0) / reps;
}

void bench_size(std::size_t n, int reps) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> lam(n), x(n), y(n), E(n), P1(n), P2(n), f(n);
    for (std::size_t j = 0; j < n; ++j) {
        lam[j] = static_cast<double>(j * j) / static_cast<double>(n);
        x[j] = gauss(rng);
        f[j] = gauss(rng);
    }
    const std::size_t g = 2 * n;
    std::vector<double> mat(g * n), grid(g);
    for (auto& v : mat) v = gauss(rng);

    struct Row {
        const char* name;
        double serial;
        double par;
    };
    std::vector<Row> rows;

    rows.push_back({"etd_tables",
                    time_loop([&] { kern::serial::etd_tables(lam, 1e-3, E, P1, P2); }, reps),
                    time_loop([&] { kern::par::etd_tables(lam, 1e-3, E, P1, P2); }, reps)});
    rows.push_back({"etd_stage",
                    time_loop([&] { kern::serial::etd_stage(E, P1, 1e-3, x, f, y); }, reps),
                    time_loop([&] { kern::par::etd_stage(E, P1, 1e-3, x, f, y); }, reps)});
    rows.push_back({"exp_scale",
                    time_loop([&] { kern::serial::exp_scale(lam, 0.5, x, y); }, reps),
                    time_loop([&] { kern::par::exp_scale(lam, 0.5, x, y); }, reps)});
    rows.push_back({"synthesis",
                    time_loop([&] { kern::serial::matvec(mat, g, n, x, grid); }, reps),
                    time_loop([&] { kern::par::matvec(mat, g, n, x, grid); }, reps)});
    rows.push_back({"power_map",
                    time_loop([&] { kern::serial::power_map(grid, 2.0, 1.0, grid); }, reps),
                    time_loop([&] { kern::par::power_map(grid, 2.0, 1.0, grid); }, reps)});
    rows.push_back({"sumsq", time_loop([&] { (void)kern::serial::sumsq(grid); }, reps),
                    time_loop([&] { (void)kern::par::sumsq(grid); }, reps)});

    std::printf("n = %zu (grid %zu)\n", n, g);
    std::printf("  %-12s %12s %12s %8s\n", "kernel", "serial [us]", "openmp [us]", "speedup");
    for (const Row& r : rows)
        std::printf("  %-12s %12.2f %12.2f %8.2fx\n", r.name, r.serial * 1e6, r.par * 1e6,
                    r.serial / r.par);
}

void bench_integrate(std::size_t n_modes) {
    ProblemDefinition prob = make_neumann_interval(n_modes, 2.0, 1.0, default_bounds_seed, 64);
    StateVector u0(prob.spectrum.total_dim);
    u0[0] = 0.05;
    u0[1] = 0.01;
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.5;
    cfg.diag_stride = 100;

    auto once = [&] {
        const auto t0 = Clock::now();
        (void)integrate(prob, u0, cfg);
        return seconds_since(t0);
    };
    kern::set_exec(kern::Exec::serial);
    const double ts = once();
    kern::set_exec(kern::Exec::parallel);
    const double tp = once();
    kern::set_exec(kern::Exec::automatic);
    std::printf(
        "integrate neumann_interval N=%zu to t=0.5: serial %.3fs, openmp %.3fs (%.2fx)\n",
        n_modes, ts, tp, ts / tp);
}

} // namespace

int main(int argc, char** argv) {
    int threads = 0;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("decaylab kernel benchmark (%d OpenMP threads)\n\n", threads);
    std::size_t big = argc > 1 ? static_cast<std::size_t>(std::atoll(argv[1])) : 4096;
    bench_size(512, 200);
    bench_size(big, 20);
    std::printf("\n");
    bench_integrate(512);
    return 0;
}
