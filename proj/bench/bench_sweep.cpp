// Times the canned suite through the serial and the OpenMP sweep runners.
//   bench_sweep [repeats] [jobs]

#include "hsmsim/experiments.hpp"
#include "hsmsim/scenario.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

using namespace hsmsim;

namespace {

double time_it(int repeats, const std::function<std::vector<ResultRow>()> &run, std::vector<ResultRow> &last) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < repeats; ++i) {
        last = run();
    }
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char **argv) {
    const int repeats = argc > 1 ? std::atoi(argv[1]) : 20;
    const int jobs = argc > 2 ? std::atoi(argv[2]) : omp_get_max_threads();
    if (repeats < 1 || jobs < 1) {
        std::fprintf(stderr, "usage: bench_sweep [repeats>=1] [jobs>=1]\n");
        return 2;
    }
    const auto suite = load_suite(HSMSIM_SCENARIO_DIR);

    std::vector<ResultRow> serial;
    std::vector<ResultRow> parallel;
    const double ts = time_it(repeats, [&] { return run_points_serial(suite); }, serial);
    const double tp = time_it(repeats, [&] { return run_points_parallel(suite, jobs); }, parallel);

    std::printf("rows      %zu\n", serial.size());
    std::printf("repeats   %d\n", repeats);
    std::printf("serial    %.4f s\n", ts);
    std::printf("parallel  %.4f s (%d threads)\n", tp, jobs);
    std::printf("speedup   %.2fx\n", ts / tp);
    if (serial != parallel) {
        std::printf("MISMATCH between serial and parallel rows\n");
        return 1;
    }
    std::printf("rows identical\n");
    return 0;
}
