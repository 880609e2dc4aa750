// Times each parallel kernel against its serial reference and checks that both give
// identical results.
//
//   wvs_bench [repeats]

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <string>

#include "wvs/entropy.hpp"
#include "wvs/ergodic.hpp"
#include "wvs/experiments.hpp"
#include "wvs/parallel.hpp"

namespace {

using namespace wvs;

double best_seconds(int repeats, const std::function<void()>& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
        best = std::min(best, d.count());
    }
    return best;
}

void row(const std::string& name, double serial, double parallel, bool same) {
    std::cout << name << "," << format_number(serial) << "," << format_number(parallel) << ","
              << format_number(serial / parallel) << "," << (same ? "yes" : "NO") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
    const auto mixture = SourceModel::mixture(
        {0.5, 0.5}, {SourceModel::iid({0.5, 0.5}), SourceModel::iid({0.9, 0.1})});
    const WordFunction code(2, 2, {{0}, {1, 0}});
    const Measure eta = InducedMeasure(mixture, code);

    std::cout << "# threads " << max_threads() << "\n";
    std::cout << "kernel,serial_s,parallel_s,speedup,identical\n";
    bool all_same = true;

    {
        double a = 0.0, b = 0.0;
        const double ts = best_seconds(repeats, [&] { a = reference::joint_entropy_exact(eta, 14); });
        const double tp = best_seconds(repeats, [&] { b = joint_entropy_exact(eta, 14); });
        row("joint_entropy_exact(n=14)", ts, tp, a == b);
        all_same = all_same && a == b;
    }
    {
        AepExperiment a, b;
        const double ts = best_seconds(
            repeats, [&] { a = reference::aep_experiment(mixture, code, 10'000, 64, 5); });
        const double tp = best_seconds(repeats, [&] { b = aep_experiment(mixture, code, 10'000, 64, 5); });
        bool same = a.paths.size() == b.paths.size();
        for (std::size_t p = 0; same && p < a.paths.size(); ++p)
            same = a.paths[p].empirical_h == b.paths[p].empirical_h &&
                   a.paths[p].output_horizon == b.paths[p].output_horizon;
        row("aep_experiment(64x10^4)", ts, tp, same);
        all_same = all_same && same;
    }
    {
        const SymbolTuple zero{0};
        const auto g = CylinderFunction::indicator(2, zero);
        SpreadReport a, b;
        const double ts = best_seconds(
            repeats, [&] { a = reference::ergodicity_spread(mixture, code, g, 64, 10'000, 9); });
        const double tp =
            best_seconds(repeats, [&] { b = ergodicity_spread(mixture, code, g, 64, 10'000, 9); });
        const bool same = a.final_averages == b.final_averages && a.spread == b.spread;
        row("ergodicity_spread(64x10^4)", ts, tp, same);
        all_same = all_same && same;
    }
    return all_same ? 0 : 1;
}
