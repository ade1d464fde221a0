// Serial vs OpenMP eigenpair field on the system problem.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "eigbranch/discretize.hpp"
#include "eigbranch/scan.hpp"

using namespace eigbranch;

namespace {

template <class F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t modes = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 4;
    const std::size_t cells = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 256;
    const Pencil pencil = extract_pencil(fourier_problem_system(modes));
    const ScanWindow w{-2, 2, -3, 3};
    const ScanGrid g{cells, cells};

    ScalarField serial;
    ScalarField parallel;
    const double ts = best_of(3, [&] { serial = eigenpair_field_serial(pencil, w, g); });
    const double tp = best_of(3, [&] { parallel = eigenpair_field_parallel(pencil, w, g); });
    bool same = serial.samples.size() == parallel.samples.size();
    for (std::size_t k = 0; same && k < serial.samples.size(); ++k)
        same = serial.samples[k].value == parallel.samples[k].value;

    std::printf("dim %zu, grid %zux%zu, threads %d\n", pencil.l.rows(), cells + 1, cells + 1, omp_get_max_threads());
    std::printf("serial   %.4f s\nparallel %.4f s\nspeedup  %.2fx\nidentical %s\n", ts, tp, ts / tp, same ? "yes" : "no");
    return same ? 0 : 1;
}
