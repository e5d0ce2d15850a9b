#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "pctate/montecarlo.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

// Times the parallel simulation kernel against its serial reference and
// checks that the two produce identical results.

namespace {

template <typename F>
double time_call(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    pctate::SimConfig config;
    config.n = argc > 1 ? std::atol(argv[1]) : 2000;
    config.reps = argc > 2 ? std::atol(argv[2]) : 400;

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("n=%ld reps=%ld threads=%d\n", config.n, config.reps, threads);

    pctate::SimRow parallel_row, serial_row;
    const double t_serial = time_call([&] { serial_row = pctate::run_cell_serial(config); });
    const double t_parallel = time_call([&] { parallel_row = pctate::run_cell(config); });

    bool identical = parallel_row.reject_rate_z_mu == serial_row.reject_rate_z_mu &&
                     parallel_row.reject_rate_z_tau == serial_row.reject_rate_z_tau;
    for (int j = 0; j < 5; ++j)
        identical = identical && parallel_row.mean[j] == serial_row.mean[j] &&
                    parallel_row.sd[j] == serial_row.sd[j];

    std::printf("serial:   %.3f s\n", t_serial);
    std::printf("parallel: %.3f s  (speedup %.2fx)\n", t_parallel, t_serial / t_parallel);
    std::printf("results identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
