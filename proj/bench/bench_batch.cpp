// Timed comparison of the serial and OpenMP batch paths on a reduced matrix.
// Prints wall time and speedup; output datasets are checked for equality.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "hallufault/experiments.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace hallufault;
using Clock = std::chrono::steady_clock;

int main(int argc, char** argv) {
    int runs = argc > 1 ? std::atoi(argv[1]) : 5;
    int jobs = argc > 2 ? std::atoi(argv[2]) : 0;
#ifdef _OPENMP
    if (jobs <= 0) jobs = omp_get_max_threads();
#else
    if (jobs <= 0) jobs = 1;
#endif

    ScenarioConfig scenario;
    BatchParams params;
    params.runs_per_condition = runs;
    params.baseline_runs = runs;

    auto matrix = condition_matrix();
    std::printf("bench: %zu conditions x %d runs, serial vs %d jobs\n", matrix.size(), runs,
                jobs);

    params.jobs = 1;
    auto t0 = Clock::now();
    auto serial = run_batch(matrix, scenario, params);
    auto t1 = Clock::now();
    params.jobs = jobs;
    auto parallel = run_batch(matrix, scenario, params);
    auto t2 = Clock::now();

    double serial_s = std::chrono::duration<double>(t1 - t0).count();
    double parallel_s = std::chrono::duration<double>(t2 - t1).count();
    bool identical = dataset_to_csv(serial) == dataset_to_csv(parallel);

    std::printf("serial:   %.3f s\n", serial_s);
    std::printf("parallel: %.3f s (%d jobs, speedup %.2fx)\n", parallel_s, jobs,
                serial_s / parallel_s);
    std::printf("datasets identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
