#include "wvs/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wvs/entropy.hpp"
#include "wvs/errors.hpp"
#include "wvs/parallel.hpp"
#include "wvs/rng.hpp"

namespace wvs {
namespace {

constexpr std::size_t kEnsembleCheckpoints = 200;

SpreadReport summarize(std::vector<double> finals) {
    if (finals.size() < 2) throw DegenerateInputError("ergodicity_spread: need at least 2 paths");
    SpreadReport r;
    double sum = 0.0;
    for (double v : finals) sum += v;
    r.mean = sum / static_cast<double>(finals.size());
    double ss = 0.0;
    for (double v : finals) ss += (v - r.mean) * (v - r.mean);
    r.spread = std::sqrt(ss / static_cast<double>(finals.size() - 1));
    r.final_averages = std::move(finals);
    return r;
}

double final_time_average(std::span<const Symbol> w, const CylinderFunction& g,
                          std::size_t horizon) {
    double sum = 0.0;
    for (std::size_t i = 0; i < horizon; ++i) sum += g(w.subspan(i));
    return sum / static_cast<double>(horizon);
}

void check_spread_args(std::size_t paths, std::size_t horizon, const CylinderFunction& g,
                       std::size_t alphabet) {
    if (paths < 2) throw DegenerateInputError("ergodicity_spread: need at least 2 paths");
    if (horizon == 0) throw DomainError("ergodicity_spread: horizon must be at least 1");
    if (g.alphabet_size() != alphabet)
        throw DomainError("ergodicity_spread: function alphabet does not match the sequence");
}

bool window_equals(std::span<const Symbol> w, std::size_t at, std::span<const Symbol> tuple) {
    return std::equal(tuple.begin(), tuple.end(), w.begin() + static_cast<std::ptrdiff_t>(at));
}

}  // namespace

CylinderFunction::CylinderFunction(std::size_t alphabet_size, std::size_t order,
                                   std::vector<double> table)
    : alphabet_size_(alphabet_size), order_(order), table_(std::move(table)) {
    if (alphabet_size_ < 1) throw DomainError("cylinder function: empty alphabet");
    if (order_ < 1 || order_ > kMaxCylinderOrder)
        throw DomainError("cylinder function: order must be in 1.." +
                          std::to_string(kMaxCylinderOrder));
    const auto expected = checked_power(alphabet_size_, order_);
    if (table_.size() != expected)
        throw DomainError("cylinder function: table has " + std::to_string(table_.size()) +
                          " entries, expected " + std::to_string(expected));
    for (double v : table_) {
        if (!std::isfinite(v)) throw DomainError("cylinder function: non-finite table entry");
        bound_ = std::max(bound_, std::abs(v));
    }
}

CylinderFunction CylinderFunction::indicator(std::size_t alphabet_size,
                                             std::span<const Symbol> tuple) {
    if (tuple.empty()) throw DomainError("cylinder indicator: empty tuple");
    check_alphabet(tuple, alphabet_size, "cylinder indicator");
    std::vector<double> table(checked_power(alphabet_size, tuple.size()), 0.0);
    table[tuple_index(tuple, alphabet_size)] = 1.0;
    return CylinderFunction(alphabet_size, tuple.size(), std::move(table));
}

CylinderFunction CylinderFunction::constant(std::size_t alphabet_size, double value) {
    return CylinderFunction(alphabet_size, 1, std::vector<double>(alphabet_size, value));
}

double CylinderFunction::operator()(std::span<const Symbol> window) const {
    if (window.size() < order_)
        throw RangeError("cylinder function: window of " + std::to_string(window.size()) +
                         " symbols, order is " + std::to_string(order_));
    return table_[tuple_index(window.first(order_), alphabet_size_)];
}

std::vector<CylinderFunction> cylinder_indicators(std::size_t alphabet_size,
                                                  std::size_t max_order) {
    std::vector<CylinderFunction> out;
    for (std::size_t k = 1; k <= max_order; ++k) {
        const auto count = checked_power(alphabet_size, k);
        for (std::uint64_t i = 0; i < count; ++i)
            out.push_back(CylinderFunction::indicator(alphabet_size,
                                                      tuple_from_index(i, k, alphabet_size)));
    }
    return out;
}

ConvergenceVerdict time_average(std::span<const Symbol> w, const CylinderFunction& g,
                                std::span<const std::size_t> checkpoints, double tolerance) {
    if (checkpoints.empty()) throw DegenerateInputError("time_average: no checkpoints");
    check_alphabet(w, g.alphabet_size(), "time_average");
    const std::size_t last = checkpoints.back();
    if (last + g.order() - 1 > w.size())
        throw RangeError("time_average: window overrun; horizon " + std::to_string(last) +
                         " with order " + std::to_string(g.order()) + " needs " +
                         std::to_string(last + g.order() - 1) + " symbols, have " +
                         std::to_string(w.size()));
    std::vector<double> values;
    values.reserve(checkpoints.size());
    double sum = 0.0;
    std::size_t i = 0;
    for (std::size_t cp : checkpoints) {
        if (cp == 0 || cp < i) throw DomainError("time_average: checkpoints must increase");
        for (; i < cp; ++i) sum += g(w.subspan(i));
        values.push_back(sum / static_cast<double>(cp));
    }
    return assess_convergence({checkpoints.begin(), checkpoints.end()}, std::move(values),
                              tolerance);
}

SpreadReport ergodicity_spread(const SourceModel& model, const CylinderFunction& g,
                               std::size_t paths, std::size_t horizon, std::uint64_t seed) {
    check_spread_args(paths, horizon, g, model.alphabet_size());
    std::vector<double> finals(paths);
    parallel_for(paths, [&](std::size_t p) {
        const auto x = sample_path(model, horizon + g.order() - 1, derive_seed(seed, p));
        finals[p] = final_time_average(x.symbols, g, horizon);
    });
    return summarize(std::move(finals));
}

SymbolTuple encoded_path(const SourceModel& model, const WordFunction& wf,
                         std::size_t output_length, std::uint64_t seed) {
    // Every codeword has length >= 1, so this many inputs always suffice.
    const auto x = sample_path(model, output_length, seed);
    auto y = encode_stream(wf, x.symbols).output;
    y.resize(output_length);
    return y;
}

SpreadReport ergodicity_spread(const SourceModel& model, const WordFunction& wf,
                               const CylinderFunction& g, std::size_t paths,
                               std::size_t horizon, std::uint64_t seed) {
    check_spread_args(paths, horizon, g, wf.output_alphabet());
    std::vector<double> finals(paths);
    parallel_for(paths, [&](std::size_t p) {
        const auto y = encoded_path(model, wf, horizon + g.order() - 1, derive_seed(seed, p));
        finals[p] = final_time_average(y, g, horizon);
    });
    return summarize(std::move(finals));
}

std::vector<AmsDiagnostic> ams_diagnostic(const SourceModel& model,
                                          std::span<const SymbolTuple> cylinders,
                                          std::size_t horizon, double tolerance) {
    if (horizon < 100) throw DomainError("ams_diagnostic: horizon must be at least 100");
    std::vector<AmsDiagnostic> out;
    for (const auto& cyl : cylinders) {
        const auto series = shifted_cylinder_series(model, cyl, horizon);
        std::vector<std::size_t> horizons(horizon);
        std::vector<double> averages(horizon);
        double sum = 0.0;
        for (std::size_t i = 0; i < horizon; ++i) {
            sum += series[i];
            horizons[i] = i + 1;
            averages[i] = sum / static_cast<double>(i + 1);
        }
        AmsDiagnostic d;
        d.cylinder = cyl;
        d.cesaro = assess_convergence(std::move(horizons), std::move(averages), tolerance);
        for (std::size_t i = (3 * horizon) / 4; i < horizon; ++i)
            d.per_step_spread = std::max(d.per_step_spread, std::abs(series[i] - d.cesaro.final));
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<InducedAmsDiagnostic> induced_ams_diagnostic(
    const SourceModel& model, const WordFunction& wf, std::span<const SymbolTuple> cylinders,
    std::size_t horizon, std::size_t paths, std::uint64_t seed, double tolerance) {
    if (horizon < 100) throw DomainError("induced_ams_diagnostic: horizon must be at least 100");
    if (paths < 2) throw DegenerateInputError("induced_ams_diagnostic: need at least 2 paths");
    const InducedMeasure eta(model, wf);
    const std::size_t k = wf.output_alphabet();
    std::vector<InducedAmsDiagnostic> out;
    for (const auto& cyl : cylinders) {
        check_alphabet(cyl, k, "induced_ams_diagnostic cylinder");
        if (cyl.empty()) throw DomainError("induced_ams_diagnostic: empty cylinder");
        InducedAmsDiagnostic d;
        d.cylinder = cyl;
        for (std::size_t shift = 0; shift + cyl.size() <= kInducedExactShiftCap; ++shift) {
            const auto count = checked_power(k, shift);
            double total = 0.0;
            for (std::uint64_t c = 0; c < count; ++c) {
                MeasureScorer scorer(eta);
                for (Symbol s : tuple_from_index(c, shift, k)) scorer.push(s);
                for (Symbol s : cyl) scorer.push(s);
                total += std::exp(scorer.log_probability());
            }
            d.exact_shifted.push_back(total);
        }
        if (!d.exact_shifted.empty()) {
            double sum = 0.0;
            for (double v : d.exact_shifted) sum += v;
            d.exact_cesaro = sum / static_cast<double>(d.exact_shifted.size());
        }

        const auto checkpoints = even_checkpoints(horizon, kEnsembleCheckpoints);
        std::vector<std::vector<double>> per_path(paths);
        parallel_for(paths, [&](std::size_t p) {
            const auto y = encoded_path(model, wf, horizon + cyl.size() - 1, derive_seed(seed, p));
            std::vector<double> partial;
            partial.reserve(checkpoints.size());
            std::size_t hits = 0;
            std::size_t i = 0;
            for (std::size_t cp : checkpoints) {
                for (; i < cp; ++i) hits += window_equals(y, i, cyl) ? 1 : 0;
                partial.push_back(static_cast<double>(hits) / static_cast<double>(cp));
            }
            per_path[p] = std::move(partial);
        });
        std::vector<double> trace(checkpoints.size(), 0.0);
        for (const auto& partial : per_path)
            for (std::size_t c = 0; c < trace.size(); ++c) trace[c] += partial[c];
        for (double& v : trace) v /= static_cast<double>(paths);
        std::vector<double> finals;
        for (const auto& partial : per_path) finals.push_back(partial.back());
        const auto spread = summarize(std::move(finals));
        d.two_sigma = 2.0 * spread.spread / std::sqrt(static_cast<double>(paths));
        d.ensemble = assess_convergence(checkpoints, std::move(trace), tolerance);
        out.push_back(std::move(d));
    }
    return out;
}

EmpiricalComponent::EmpiricalComponent(std::span<const Symbol> w, std::size_t alphabet_size,
                                       std::size_t max_order, std::size_t horizon)
    : alphabet_size_(alphabet_size), horizon_(horizon) {
    if (max_order < 1 || max_order > kMaxCylinderOrder)
        throw DomainError("empirical_component: order must be in 1.." +
                          std::to_string(kMaxCylinderOrder));
    const auto cells = checked_power(alphabet_size, max_order);
    if (horizon < 10 * cells)
        throw ResourceError("empirical_component: horizon " + std::to_string(horizon) +
                            " below 10 * |A|^k = " + std::to_string(10 * cells));
    if (horizon + max_order - 1 > w.size())
        throw RangeError("empirical_component: sequence of " + std::to_string(w.size()) +
                         " symbols, need " + std::to_string(horizon + max_order - 1));
    check_alphabet(w.first(horizon + max_order - 1), alphabet_size, "empirical_component");
    for (std::size_t k = 1; k <= max_order; ++k) {
        std::vector<std::uint64_t> c(checked_power(alphabet_size, k), 0);
        for (std::size_t i = 0; i < horizon; ++i) ++c[tuple_index(w.subspan(i, k), alphabet_size)];
        counts_.push_back(std::move(c));
    }
}

std::uint64_t EmpiricalComponent::count(std::span<const Symbol> tuple) const {
    if (tuple.empty() || tuple.size() > counts_.size())
        throw RangeError("empirical_component: tuple order outside 1.." +
                         std::to_string(counts_.size()));
    check_alphabet(tuple, alphabet_size_, "empirical_component");
    return counts_[tuple.size() - 1][tuple_index(tuple, alphabet_size_)];
}

double EmpiricalComponent::frequency(std::span<const Symbol> tuple) const {
    return static_cast<double>(count(tuple)) / static_cast<double>(horizon_);
}

namespace reference {

SpreadReport ergodicity_spread(const SourceModel& model, const WordFunction& wf,
                               const CylinderFunction& g, std::size_t paths,
                               std::size_t horizon, std::uint64_t seed) {
    check_spread_args(paths, horizon, g, wf.output_alphabet());
    std::vector<double> finals(paths);
    for (std::size_t p = 0; p < paths; ++p) {
        const auto y = encoded_path(model, wf, horizon + g.order() - 1, derive_seed(seed, p));
        finals[p] = final_time_average(y, g, horizon);
    }
    return summarize(std::move(finals));
}

}  // namespace reference

}  // namespace wvs
