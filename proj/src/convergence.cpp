#include "wvs/convergence.hpp"

#include <algorithm>
#include <cmath>

#include "wvs/errors.hpp"

namespace wvs {

ConvergenceVerdict assess_convergence(std::vector<std::size_t> horizons,
                                      std::vector<double> values, double tolerance) {
    if (horizons.size() != values.size())
        throw DomainError("assess_convergence: horizons and values differ in length");
    if (values.empty()) throw DegenerateInputError("assess_convergence: empty trace");
    if (!(tolerance > 0.0)) throw DomainError("assess_convergence: tolerance must be positive");
    ConvergenceVerdict v;
    v.final = values.back();
    v.tolerance = tolerance;
    const double cutoff = 0.75 * static_cast<double>(horizons.back());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (static_cast<double>(horizons[i]) >= cutoff)
            v.spread = std::max(v.spread, std::abs(values[i] - v.final));
    }
    v.converged = std::isfinite(v.final) && v.spread < tolerance;
    v.horizons = std::move(horizons);
    v.partial_averages = std::move(values);
    return v;
}

std::vector<std::size_t> even_checkpoints(std::size_t horizon, std::size_t count) {
    if (horizon == 0 || count == 0) throw DomainError("even_checkpoints: empty range");
    count = std::min(count, horizon);
    std::vector<std::size_t> out;
    out.reserve(count);
    for (std::size_t i = 1; i <= count; ++i) {
        const std::size_t h = (horizon * i) / count;
        if (out.empty() || h > out.back()) out.push_back(h);
    }
    return out;
}

}  // namespace wvs
