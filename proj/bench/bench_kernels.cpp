#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "qlpde/brackets.hpp"
#include "qlpde/catalog.hpp"
#include "qlpde/parallel.hpp"
#include "qlpde/stepper.hpp"

using namespace qlpde;

namespace {

double seconds(const std::function<void()>& f, int repeats) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const char* name, double ref, double ser, double par) {
    std::printf("%-28s %10.4f %10.4f %10.4f %8.2fx\n", name, ref, ser, par, ref / par);
}

}  // namespace

int main(int argc, char** argv) {
    const int N = argc > 1 ? std::atoi(argv[1]) : 8;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
    const ProblemSpec spec = find_entry("burgers").make_pde();
    const double alpha = 0.45;
    const int nodes = default_node_schedule(N);
    const StandardDomain d = build_domain(spec, alpha, Direction::plus);
    std::printf("threads=%d N=%d nodes=%d\n", max_threads(), N, nodes);
    std::printf("%-28s %10s %10s %10s %9s\n", "kernel", "reference", "serial", "parallel", "speedup");

    const double step_ref = seconds(
        [&] {
            Lattice L = sample_initial_layer(spec, d, nodes);
            for (int k = 1; k <= (1 << N); ++k) L = step_layer_reference(spec, d, N, k, L);
        },
        repeats);
    const double step_ser = seconds([&] { solve(spec, alpha, N, nodes, Direction::plus, ExecPolicy::serial); }, repeats);
    const double step_par = seconds([&] { solve(spec, alpha, N, nodes, Direction::plus, ExecPolicy::parallel); }, repeats);
    row("stepper", step_ref, step_ser, step_par);

    const int Nb = std::max(1, N - 4);
    const int nb = default_node_schedule(Nb);
    const double br_ref = seconds([&] { compute_brackets_reference(spec, d, Nb, nb, 3); }, 1);
    const double br_ser = seconds([&] { compute_brackets(spec, d, Nb, nb, 3, ExecPolicy::serial); }, 1);
    const double br_par = seconds([&] { compute_brackets(spec, d, Nb, nb, 3, ExecPolicy::parallel); }, 1);
    row("brackets (N-4)", br_ref, br_ser, br_par);
    return 0;
}
