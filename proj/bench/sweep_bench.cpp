// Serial against OpenMP sweeps on a few representative problems. Both run the
// same number of sweeps from the same start and must end bit-identical.
//
//   sweep_bench [sweeps]     (threads from OMP_NUM_THREADS)

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include <omp.h>

#include "pshenv/density.hpp"
#include "pshenv/sweep.hpp"

using namespace pshenv;

namespace {

struct Case {
    std::string label;
    int n;
    double h;
    double f;
    double g;  // 0: constant right-hand side
};

double time_sweeps(const SweepProblem& p, std::vector<double>& u, int sweeps,
                   SweepStats (*sweep)(const SweepProblem&, double*)) {
    auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < sweeps; ++k) sweep(p, u.data());
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    const int sweeps = argc > 1 ? std::atoi(argv[1]) : 200;
    const std::vector<Case> cases = {
        {"n=1 disc h=1/128, f=4", 1, 1.0 / 128, 4.0, 0.0},
        {"n=1 disc h=1/128, penalized j=64", 1, 1.0 / 128, 0.0, 1.0},
        {"n=2 ball h=1/16, f=32", 2, 1.0 / 16, 32.0, 0.0},
    };
    std::printf("threads: %d, sweeps per run: %d\n", omp_get_max_threads(), sweeps);
    std::printf("%-36s %10s %12s %12s %9s %s\n", "case", "nodes", "serial ns/u", "omp ns/u", "speedup", "identical");
    int mismatches = 0;
    for (const auto& c : cases) {
        auto grid = build_grid(DomainSpec::ball(c.n, std::vector<double>(2 * c.n, 0.0), 1.0), c.h,
                               StencilSet::standard(c.n));
        auto f = DensityField::constant(grid, c.f);
        GridFunction obstacle(grid, 0.0);
        RHSSpec rhs = c.g > 0.0 ? RHSSpec::penalized(DensityField::constant(grid, c.g), f, obstacle, 64.0)
                                : RHSSpec::constant(f);
        SweepProblem p(rhs, &obstacle, 1e-8);

        std::vector<double> a(obstacle.values().begin(), obstacle.values().end());
        std::vector<double> b = a;
        double ts = time_sweeps(p, a, sweeps, sweep_serial);
        double tp = time_sweeps(p, b, sweeps, sweep_parallel);
        bool same = std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
        mismatches += same ? 0 : 1;
        const double updates = static_cast<double>(grid->interior().size()) * sweeps;
        std::printf("%-36s %10zu %12.2f %12.2f %9.2f %s\n", c.label.c_str(), grid->interior().size(),
                    1e9 * ts / updates, 1e9 * tp / updates, ts / tp, same ? "yes" : "NO");
    }
    return mismatches == 0 ? 0 : 1;
}
