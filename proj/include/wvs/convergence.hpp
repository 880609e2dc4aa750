#ifndef WVS_CONVERGENCE_HPP
#define WVS_CONVERGENCE_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace wvs {

inline constexpr double kDefaultConvergenceTolerance = 1e-2;

// Finite-horizon stand-in for an almost-sure limit. `spread` is the largest deviation
// from the final value over the checkpoints in the last quartile of the horizon. A
// converged verdict is evidence at the tested horizon, not a proof of the limit.
struct ConvergenceVerdict {
    std::vector<std::size_t> horizons;
    std::vector<double> partial_averages;
    double final = 0.0;
    double spread = 0.0;
    double tolerance = kDefaultConvergenceTolerance;
    bool converged = false;
};

ConvergenceVerdict assess_convergence(std::vector<std::size_t> horizons,
                                      std::vector<double> values,
                                      double tolerance = kDefaultConvergenceTolerance);

// `count` checkpoints evenly spaced over [1, horizon], always ending at horizon.
std::vector<std::size_t> even_checkpoints(std::size_t horizon, std::size_t count);

}  // namespace wvs

#endif
